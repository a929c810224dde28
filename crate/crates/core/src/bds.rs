//! Exact f-BDS by enumeration, and canonicalization of 1-BDS solutions on
//! instances produced by [`reduce_domset`](crate::reductions::reduce_domset).

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::SolveError;
use crate::model::{Coord, Instance, Interval, ProblemKind, SolutionSet};
use crate::reductions::{GadgetMetadata, ReductionError, ReductionKind, VariableGadget};

/// Largest `∏ C(n_c, f)` the exact solver will enumerate.
pub const MAX_BDS_COMBINATIONS: u128 = 100_000_000;

/// Answers "does some member of D intersect this interval" in O(log |D|).
///
/// Members are sorted by left endpoint with a running maximum of right
/// endpoints; an interval `[l, r]` is met iff some member with left `<= r`
/// reaches `>= l`.
#[derive(Debug, Clone)]
pub struct DominationIndex {
    lefts: Vec<Coord>,
    reach: Vec<Coord>,
}

impl DominationIndex {
    pub fn new(inst: &Instance, members: impl IntoIterator<Item = usize>) -> Self {
        let mut spans: Vec<(Coord, Coord)> = members
            .into_iter()
            .map(|id| {
                let iv = inst.interval(id);
                (iv.left, iv.right)
            })
            .collect();
        spans.sort_unstable();
        let lefts = spans.iter().map(|s| s.0).collect();
        let reach = spans
            .iter()
            .scan(Coord::MIN, |max, s| {
                *max = (*max).max(s.1);
                Some(*max)
            })
            .collect();
        DominationIndex { lefts, reach }
    }

    pub fn dominates(&self, iv: &Interval) -> bool {
        let count = self.lefts.partition_point(|&l| l <= iv.right);
        count > 0 && self.reach[count - 1] >= iv.left
    }
}

/// Closed neighborhoods (each interval plus everything it meets).
pub fn closed_neighborhoods(inst: &Instance) -> Vec<Vec<usize>> {
    let ivs = inst.intervals();
    let mut nbrs: Vec<Vec<usize>> = (0..ivs.len()).map(|id| vec![id]).collect();
    let mut by_left: Vec<usize> = (0..ivs.len()).collect();
    by_left.sort_unstable_by_key(|&id| (ivs[id].left, id));
    for (pos, &a) in by_left.iter().enumerate() {
        for &b in &by_left[pos + 1..] {
            if ivs[b].left > ivs[a].right {
                break;
            }
            nbrs[a].push(b);
            nbrs[b].push(a);
        }
    }
    nbrs
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| {
        acc.saturating_mul((n - i) as u128) / (i as u128 + 1)
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BdsStats {
    pub n: usize,
    pub k: usize,
    pub f: usize,
    pub search_space: u128,
    pub combinations_examined: u64,
    pub feasible: bool,
}

#[derive(Debug, Clone)]
pub struct BdsOutcome {
    pub solution: Option<SolutionSet>,
    pub stats: BdsStats,
}

struct BdsSearch {
    f: usize,
    /// Members of each color class, classes in enumeration order.
    classes: Vec<Vec<usize>>,
    nbrs: Vec<Vec<usize>>,
    /// Vertices whose closed neighborhood is fully decided after class `r`.
    settled_after: Vec<Vec<usize>>,
    covered: Vec<u32>,
    chosen: Vec<usize>,
    examined: u64,
}

impl BdsSearch {
    fn pick(&mut self, id: usize) {
        self.chosen.push(id);
        for &u in &self.nbrs[id] {
            self.covered[u] += 1;
        }
    }

    fn unpick(&mut self) {
        let id = self.chosen.pop().expect("pick/unpick balanced");
        for &u in &self.nbrs[id] {
            self.covered[u] -= 1;
        }
    }

    /// Chooses the remaining members of class `rank`, starting at `start`.
    fn search(&mut self, rank: usize, start: usize, picked: usize) -> bool {
        if rank == self.classes.len() {
            self.examined += 1;
            return true;
        }
        if picked == self.f {
            // A vertex whose every neighbor's color is now decided must be covered.
            let dead = self.settled_after[rank]
                .iter()
                .any(|&u| self.covered[u] == 0);
            if dead {
                self.examined += 1;
                return false;
            }
            return self.search(rank + 1, 0, 0);
        }
        let size = self.classes[rank].len();
        for i in start..=size - (self.f - picked) {
            let id = self.classes[rank][i];
            self.pick(id);
            if self.search(rank, i + 1, picked + 1) {
                return true;
            }
            self.unpick();
        }
        false
    }
}

pub fn run_fbds_brute(inst: &Instance, f: usize) -> Result<BdsOutcome, SolveError> {
    if f == 0 {
        return Err(SolveError::ZeroBalance);
    }
    let sizes = inst.color_class_sizes();
    let search_space = sizes
        .iter()
        .fold(1u128, |acc, &s| acc.saturating_mul(binomial(s, f)));
    let mut stats = BdsStats {
        n: inst.n(),
        k: inst.k(),
        f,
        search_space,
        ..BdsStats::default()
    };
    if search_space > MAX_BDS_COMBINATIONS {
        return Err(SolveError::SearchSpaceTooLarge {
            combinations: search_space,
            limit: MAX_BDS_COMBINATIONS,
        });
    }
    if search_space == 0 {
        return Ok(BdsOutcome {
            solution: None,
            stats,
        });
    }

    // Smallest classes first; rank[c] is the position of color c + 1.
    let mut order: Vec<usize> = (0..inst.k()).collect();
    order.sort_by_key(|&c| (sizes[c], c));
    let mut rank = vec![0; inst.k()];
    for (r, &c) in order.iter().enumerate() {
        rank[c] = r;
    }
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); inst.k()];
    for iv in inst.intervals() {
        classes[rank[iv.color - 1]].push(iv.id);
    }
    let nbrs = closed_neighborhoods(inst);
    let mut settled_after = vec![Vec::new(); inst.k()];
    for (u, nb) in nbrs.iter().enumerate() {
        let last = nb
            .iter()
            .map(|&w| rank[inst.color(w) - 1])
            .max()
            .expect("closed");
        settled_after[last].push(u);
    }

    let mut search = BdsSearch {
        f,
        classes,
        nbrs,
        settled_after,
        covered: vec![0; inst.n()],
        chosen: Vec::new(),
        examined: 0,
    };
    let found = search.search(0, 0, 0);
    stats.combinations_examined = search.examined;
    let solution = if found {
        Some(SolutionSet::new(
            ProblemKind::Bds,
            search.chosen.iter().copied(),
            inst,
        )?)
    } else {
        None
    };
    stats.feasible = solution.is_some();
    Ok(BdsOutcome { solution, stats })
}

/// An f-balanced dominating set, or `None`, by exhaustive enumeration of
/// exactly-f-per-color combinations.
pub fn solve_fbds_brute(inst: &Instance, f: usize) -> Result<Option<SolutionSet>, SolveError> {
    run_fbds_brute(inst, f).map(|o| o.solution)
}

/// Whether every variable gadget contains one of its two canonical sets.
pub fn is_canonical(meta: &GadgetMetadata, sol: &SolutionSet) -> Result<bool, ReductionError> {
    Ok(meta
        .variable_gadgets()?
        .iter()
        .all(|g| variable_is_canonical(g, sol.ids())))
}

fn variable_is_canonical(g: &VariableGadget, ids: &BTreeSet<usize>) -> bool {
    g.true_set().iter().all(|id| ids.contains(id))
        || g.false_set().iter().all(|id| ids.contains(id))
}

/// Rewrites a valid 1-BDS of a domset instance into canonical form.
///
/// For a variable whose `h_t` is selected, `t1`/`t2` are dropped and the
/// missing positive clause vertices `c_t^1`/`c_t^2` (same colors) are added;
/// symmetrically for `h_f`. Variables already in canonical form and all
/// other vertices are left untouched.
pub fn canonicalize_bds(
    inst: &Instance,
    meta: &GadgetMetadata,
    sol: &SolutionSet,
) -> Result<SolutionSet, ReductionError> {
    if meta.reduction != ReductionKind::Domset {
        return Err(ReductionError::MetaMismatch(
            "not a domset reduction".into(),
        ));
    }
    meta.check_instance(inst)?;
    crate::reductions::require_valid(inst, sol, ProblemKind::Bds)?;
    let mut ids = sol.ids().clone();
    for g in meta.variable_gadgets()? {
        if variable_is_canonical(&g, &ids) {
            continue;
        }
        let (drop, add) = if ids.contains(&g.h_t) {
            ([g.t1, g.t2], g.c_t)
        } else {
            ([g.f1, g.f2], g.c_f)
        };
        for id in drop {
            ids.remove(&id);
        }
        ids.extend(add);
    }
    let out = SolutionSet::new(ProblemKind::Bds, ids, inst)
        .map_err(|e| ReductionError::MetaMismatch(e.to_string()))?;
    crate::reductions::require_valid(inst, &out, ProblemKind::Bds)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::verify_solution;
    use crate::reductions::{reduce_domset, CnfFormula};

    fn inst(k: usize, spans: &[(i64, i64, usize)]) -> Instance {
        let ivs = spans
            .iter()
            .enumerate()
            .map(|(id, &(l, r, c))| Interval::new(id, l, r, c))
            .collect();
        Instance::new(k, ivs, false).unwrap()
    }

    fn ids(sol: &SolutionSet) -> Vec<usize> {
        sol.ids().iter().copied().collect()
    }

    #[test]
    fn single_vertex() {
        let i = inst(1, &[(0, 1, 1)]);
        assert_eq!(ids(&solve_fbds_brute(&i, 1).unwrap().unwrap()), vec![0]);
    }

    #[test]
    fn isolated_third_vertex_is_infeasible() {
        let i = inst(2, &[(0, 1, 1), (5, 6, 2), (10, 11, 1)]);
        assert!(solve_fbds_brute(&i, 1).unwrap().is_none());
    }

    #[test]
    fn triangle() {
        let i = inst(2, &[(0, 4, 1), (1, 5, 2), (2, 6, 1)]);
        let sol = solve_fbds_brute(&i, 1).unwrap().unwrap();
        assert!(ids(&sol) == vec![0, 1] || ids(&sol) == vec![1, 2]);
        assert!(verify_solution(&i, &sol, 1).unwrap().valid);
    }

    #[test]
    fn small_class_short_circuits_and_guard() {
        let i = inst(2, &[(0, 1, 1), (2, 3, 1)]);
        assert!(solve_fbds_brute(&i, 1).unwrap().is_none());
        let spans: Vec<_> = (0..60).map(|t| (t, t, 1 + (t as usize % 2))).collect();
        let wide = inst(2, &spans);
        assert!(matches!(
            solve_fbds_brute(&wide, 5),
            Err(SolveError::SearchSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn index_matches_pairwise_check() {
        let i = inst(
            1,
            &[(0, 2, 1), (5, 9, 1), (3, 3, 1), (10, 12, 1), (4, 4, 1)],
        );
        let idx = DominationIndex::new(&i, [0, 1]);
        for iv in i.intervals() {
            let brute = [0, 1].iter().any(|&d| i.interval(d).intersects(iv));
            assert_eq!(idx.dominates(iv), brute, "{iv:?}");
        }
    }

    #[test]
    fn neighborhoods_are_closed_and_symmetric() {
        let i = inst(1, &[(0, 4, 1), (1, 5, 1), (2, 6, 1), (8, 9, 1)]);
        let nb = closed_neighborhoods(&i);
        assert_eq!(nb[3], vec![3]);
        let mut n0 = nb[0].clone();
        n0.sort_unstable();
        assert_eq!(n0, vec![0, 1, 2]);
    }

    fn unit_fixture() -> (Instance, GadgetMetadata) {
        // (x)(x)(¬x)(¬x): gadget ids t1=0 h_t=1 t2=2 f1=3 h_f=4 f2=5, c_t=6,7 c_f=8,9.
        let phi = CnfFormula::new(1, vec![vec![1], vec![1], vec![-1], vec![-1]]).unwrap();
        reduce_domset(&phi).unwrap()
    }

    #[test]
    fn canonicalization_swaps_t1_for_its_clause_vertex() {
        // x=y=T, z=F satisfies it; x's first clause is also satisfied by y.
        let phi = CnfFormula::new(
            3,
            vec![
                vec![1, 2],
                vec![1, -2, 3],
                vec![2, -1, 3],
                vec![-3, -1],
                vec![-3, -2],
            ],
        )
        .unwrap();
        let (inst, meta) = reduce_domset(&phi).unwrap();
        let gs = meta.variable_gadgets().unwrap();
        let (x, y, z) = (gs[0], gs[1], gs[2]);
        // x true but keeps t1 in place of c_t^1.
        let mut chosen = vec![x.h_t, x.f1, x.f2, x.t1, x.c_t[1]];
        chosen.extend(y.true_set());
        chosen.extend(z.false_set());
        let sol = SolutionSet::new(ProblemKind::Bds, chosen, &inst).unwrap();
        assert!(verify_solution(&inst, &sol, 1).unwrap().valid);
        assert!(!is_canonical(&meta, &sol).unwrap());

        let canon = canonicalize_bds(&inst, &meta, &sol).unwrap();
        let mut expected: BTreeSet<usize> = x.true_set().into_iter().collect();
        expected.extend(y.true_set());
        expected.extend(z.false_set());
        assert_eq!(canon.ids(), &expected);
        assert!(is_canonical(&meta, &canon).unwrap());
        assert!(verify_solution(&inst, &canon, 1).unwrap().valid);
        assert_eq!(canonicalize_bds(&inst, &meta, &canon).unwrap(), canon);
    }

    #[test]
    fn canonicalization_rejects_bad_input() {
        let (inst, meta) = unit_fixture();
        let sol = SolutionSet::new(ProblemKind::Bds, [0, 1], &inst).unwrap();
        assert!(matches!(
            canonicalize_bds(&inst, &meta, &sol),
            Err(ReductionError::InvalidSolution(_))
        ));
        let other = inst.clone();
        let mut wrong = meta.clone();
        wrong.roles.pop();
        assert!(matches!(
            canonicalize_bds(&other, &wrong, &sol),
            Err(ReductionError::MetaMismatch(_))
        ));
    }
}
