//! Exhaustive ground truth for the solvers.
//!
//! Nothing here shares code with the solvers beyond the pairwise
//! [`intersects`](crate::model::intersects) predicate: no sorted views,
//! no predecessor indices, no sweeps. Witness tie-break is the
//! lexicographically smallest id set among optima.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{Instance, ProblemKind, SolutionSet};
use crate::reductions::{Assignment, CnfFormula};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    /// Cap on sets visited by the subset searches.
    pub max_subsets: u64,
    /// Cap on truth-table rows.
    pub max_assignments: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_subsets: 1 << 24,
            max_assignments: 1 << 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle budget exceeded: more than {limit} {what}")]
    BudgetExceeded { what: &'static str, limit: u64 },
    #[error("f must be at least 1")]
    ZeroBalance,
}

fn adjacency(inst: &Instance) -> Vec<Vec<bool>> {
    let ivs = inst.intervals();
    ivs.iter()
        .map(|a| {
            ivs.iter()
                .map(|b| a.id != b.id && a.intersects(b))
                .collect()
        })
        .collect()
}

struct Meter {
    used: u64,
    limit: u64,
    what: &'static str,
}

impl Meter {
    fn tick(&mut self) -> Result<(), OracleError> {
        self.used += 1;
        if self.used > self.limit {
            Err(OracleError::BudgetExceeded {
                what: self.what,
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }
}

/// Some f-balanced independent set, by include-first backtracking over ids.
pub fn oracle_fbis(
    inst: &Instance,
    f: usize,
    budget: &OracleBudget,
) -> Result<Option<SolutionSet>, OracleError> {
    if f == 0 {
        return Err(OracleError::ZeroBalance);
    }
    let adj = adjacency(inst);
    let mut meter = Meter {
        used: 0,
        limit: budget.max_subsets,
        what: "subsets",
    };
    let mut counts = vec![0usize; inst.k()];
    let mut chosen = Vec::new();

    fn go(
        inst: &Instance,
        adj: &[Vec<bool>],
        f: usize,
        next: usize,
        counts: &mut Vec<usize>,
        chosen: &mut Vec<usize>,
        meter: &mut Meter,
    ) -> Result<bool, OracleError> {
        meter.tick()?;
        if counts.iter().all(|&c| c == f) {
            return Ok(true);
        }
        if next == inst.n() {
            return Ok(false);
        }
        let color = inst.color(next) - 1;
        if counts[color] < f && chosen.iter().all(|&c| !adj[c][next]) {
            counts[color] += 1;
            chosen.push(next);
            if go(inst, adj, f, next + 1, counts, chosen, meter)? {
                return Ok(true);
            }
            chosen.pop();
            counts[color] -= 1;
        }
        go(inst, adj, f, next + 1, counts, chosen, meter)
    }

    if go(inst, &adj, f, 0, &mut counts, &mut chosen, &mut meter)? {
        Ok(Some(
            SolutionSet::new(ProblemKind::Bis, chosen, inst).expect("ids from instance"),
        ))
    } else {
        Ok(None)
    }
}

/// Maximum number of colors in an independent set with at most one
/// interval per color, with one witness.
pub fn oracle_mcis(
    inst: &Instance,
    budget: &OracleBudget,
) -> Result<(usize, SolutionSet), OracleError> {
    let adj = adjacency(inst);
    let mut meter = Meter {
        used: 0,
        limit: budget.max_subsets,
        what: "subsets",
    };
    let mut used = vec![false; inst.k()];
    let mut chosen = Vec::new();
    let mut best: Vec<usize> = Vec::new();

    fn go(
        inst: &Instance,
        adj: &[Vec<bool>],
        next: usize,
        used: &mut Vec<bool>,
        chosen: &mut Vec<usize>,
        best: &mut Vec<usize>,
        meter: &mut Meter,
    ) -> Result<(), OracleError> {
        meter.tick()?;
        if next == inst.n() {
            if chosen.len() > best.len() {
                *best = chosen.clone();
            }
            return Ok(());
        }
        let color = inst.color(next) - 1;
        if !used[color] && chosen.iter().all(|&c| !adj[c][next]) {
            used[color] = true;
            chosen.push(next);
            go(inst, adj, next + 1, used, chosen, best, meter)?;
            chosen.pop();
            used[color] = false;
        }
        go(inst, adj, next + 1, used, chosen, best, meter)
    }

    go(inst, &adj, 0, &mut used, &mut chosen, &mut best, &mut meter)?;
    let count = best.len();
    let witness = SolutionSet::new(ProblemKind::Mcis, best, inst).expect("ids from instance");
    Ok((count, witness))
}

fn subset_count(n: usize, budget: &OracleBudget) -> Result<u64, OracleError> {
    if n >= 63 || (1u64 << n) > budget.max_subsets {
        return Err(OracleError::BudgetExceeded {
            what: "subsets",
            limit: budget.max_subsets,
        });
    }
    Ok(1u64 << n)
}

/// Some f-balanced dominating set, by scanning every subset in increasing
/// bitmask order over sorted ids.
pub fn oracle_fbds(
    inst: &Instance,
    f: usize,
    budget: &OracleBudget,
) -> Result<Option<SolutionSet>, OracleError> {
    if f == 0 {
        return Err(OracleError::ZeroBalance);
    }
    let n = inst.n();
    let total = subset_count(n, budget)?;
    let adj = adjacency(inst);
    let mut best: Option<Vec<usize>> = None;
    for mask in 0..total {
        if mask.count_ones() as usize != f * inst.k() {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let mut counts = vec![0usize; inst.k()];
        for &m in &members {
            counts[inst.color(m) - 1] += 1;
        }
        if counts.iter().any(|&c| c != f) {
            continue;
        }
        let dominating = (0..n)
            .filter(|&v| mask >> v & 1 == 0)
            .all(|v| members.iter().any(|&m| adj[m][v]));
        if dominating && best.as_ref().is_none_or(|b| members < *b) {
            best = Some(members);
        }
    }
    Ok(best.map(|ids| SolutionSet::new(ProblemKind::Bds, ids, inst).expect("ids from instance")))
}

/// Truth-table SAT; returns the first satisfying row (variable 1 is the
/// least significant bit).
pub fn oracle_sat(
    phi: &CnfFormula,
    budget: &OracleBudget,
) -> Result<Option<Assignment>, OracleError> {
    let n = phi.num_vars();
    if n >= 63 || (1u64 << n) > budget.max_assignments {
        return Err(OracleError::BudgetExceeded {
            what: "assignments",
            limit: budget.max_assignments,
        });
    }
    for row in 0..(1u64 << n) {
        let a = Assignment((0..n).map(|i| row >> i & 1 == 1).collect());
        if phi.evaluate(&a) {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

/// Every maximal independent set, by subset scan with a maximality filter.
pub fn oracle_maximal_is(
    inst: &Instance,
    budget: &OracleBudget,
) -> Result<Vec<BTreeSet<usize>>, OracleError> {
    let n = inst.n();
    let total = subset_count(n, budget)?;
    let adj = adjacency(inst);
    let masks: Vec<u64> = (0..n)
        .map(|i| (0..n).filter(|&j| adj[i][j]).fold(0u64, |m, j| m | 1 << j))
        .collect();
    let mut out = Vec::new();
    for mask in 0..total {
        let independent = (0..n).all(|i| mask >> i & 1 == 0 || masks[i] & mask == 0);
        if !independent {
            continue;
        }
        let maximal = (0..n).all(|j| mask >> j & 1 == 1 || masks[j] & mask != 0);
        if maximal {
            out.push((0..n).filter(|&i| mask >> i & 1 == 1).collect());
        }
    }
    out.sort();
    Ok(out)
}
