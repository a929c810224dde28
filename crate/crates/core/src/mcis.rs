//! Approximation algorithms for 1-Max-Colored Independent Set: the greedy
//! right-endpoint sweep (at least half the optimal colors) and b-local search
//! seeded with it.

use serde::Serialize;

use crate::error::SolveError;
use crate::model::{Coord, Instance, ProblemKind, SolutionSet};

/// Default cap on `n^(2b)` for one local-search neighborhood.
pub const DEFAULT_NEIGHBOR_BUDGET: u128 = 1_000_000_000;

/// Sweep state: one slot per color and the right end of the last pick.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyState {
    pub slots: Vec<Option<usize>>,
    pub frontier: Option<Coord>,
}

impl GreedyState {
    fn new(k: usize) -> Self {
        GreedyState {
            slots: vec![None; k],
            frontier: None,
        }
    }

    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.slots.iter().filter_map(|s| *s)
    }
}

pub fn greedy_state(inst: &Instance) -> GreedyState {
    let mut state = GreedyState::new(inst.k());
    for &id in inst.sorted_view().order() {
        let iv = inst.interval(id);
        let slot = &mut state.slots[iv.color - 1];
        if slot.is_none() && state.frontier.is_none_or(|r| iv.left > r) {
            *slot = Some(id);
            state.frontier = Some(iv.right);
        }
    }
    state
}

pub fn greedy_mcis(inst: &Instance) -> SolutionSet {
    let state = greedy_state(inst);
    SolutionSet::new(ProblemKind::Mcis, state.selected(), inst).expect("ids come from the instance")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalSearchConfig {
    /// Neighborhood radius; `b = 1/ε²`.
    pub b: usize,
    pub max_rounds: Option<usize>,
    pub seed_with_greedy: bool,
    pub neighbor_budget: u128,
}

impl Default for LocalSearchConfig {
    fn default() -> Self {
        LocalSearchConfig {
            b: 2,
            max_rounds: None,
            seed_with_greedy: true,
            neighbor_budget: DEFAULT_NEIGHBOR_BUDGET,
        }
    }
}

impl LocalSearchConfig {
    pub fn with_b(b: usize) -> Self {
        LocalSearchConfig {
            b,
            ..Self::default()
        }
    }

    pub fn epsilon(&self) -> f64 {
        1.0 / (self.b as f64).sqrt()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LocalSearchStats {
    pub n: usize,
    pub k: usize,
    pub b: usize,
    pub initial_colors: usize,
    pub colors: usize,
    pub rounds: usize,
    pub neighbors_evaluated: u64,
}

#[derive(Debug, Clone)]
pub struct LocalSearchOutcome {
    pub solution: SolutionSet,
    pub stats: LocalSearchStats,
}

fn check_budget(n: usize, b: usize, budget: u128) -> Result<(), SolveError> {
    if b == 0 {
        return Err(SolveError::ZeroRadius);
    }
    let evaluations = (n as u128).checked_pow(2 * b as u32).unwrap_or(u128::MAX);
    if evaluations > budget {
        return Err(SolveError::NeighborhoodTooLarge {
            evaluations,
            budget,
        });
    }
    Ok(())
}

/// Searches the b-neighborhood of a color-distinct independent set for a
/// neighbor with more colors.
///
/// Removal sets are tried by increasing size, each in lexicographic order;
/// for removal set `R` only addition sets of size `|R|+1..=b` can raise the
/// color count, and additions are pruned as soon as they meet a retained
/// interval or repeat a color. The first improving neighbor is returned.
struct Neighborhood<'a> {
    inst: &'a Instance,
    b: usize,
    evaluated: u64,
}

impl<'a> Neighborhood<'a> {
    fn find_improvement(&mut self, current: &[usize]) -> Option<Vec<usize>> {
        let mut in_current = vec![false; self.inst.n()];
        for &id in current {
            in_current[id] = true;
        }
        let outside: Vec<usize> = (0..self.inst.n()).filter(|&id| !in_current[id]).collect();
        let max_removals = self.b.min(current.len());
        for r in 0..=max_removals.min(self.b - 1) {
            let mut removal = Vec::with_capacity(r);
            if let Some(found) = self.removals(current, &outside, r, 0, &mut removal) {
                return Some(found);
            }
        }
        None
    }

    fn removals(
        &mut self,
        current: &[usize],
        outside: &[usize],
        size: usize,
        start: usize,
        removal: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        if removal.len() == size {
            let retained: Vec<usize> = current
                .iter()
                .copied()
                .filter(|id| !removal.contains(id))
                .collect();
            return self.additions(&retained, outside, size + 1);
        }
        for i in start..current.len() {
            removal.push(current[i]);
            let found = self.removals(current, outside, size, i + 1, removal);
            removal.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }

    fn additions(
        &mut self,
        retained: &[usize],
        outside: &[usize],
        need: usize,
    ) -> Option<Vec<usize>> {
        let mut used_color = vec![false; self.inst.k()];
        for &id in retained {
            used_color[self.inst.color(id) - 1] = true;
        }
        let pool: Vec<usize> = outside
            .iter()
            .copied()
            .filter(|&id| {
                let iv = self.inst.interval(id);
                !used_color[iv.color - 1]
                    && retained
                        .iter()
                        .all(|&r| !iv.intersects(self.inst.interval(r)))
            })
            .collect();
        if pool.len() < need {
            return None;
        }
        let mut picked = Vec::with_capacity(self.b);
        self.extend_additions(&pool, 0, need, &mut used_color, &mut picked)
            .map(|added| {
                let mut next: Vec<usize> = retained.iter().copied().chain(added).collect();
                next.sort_unstable();
                next
            })
    }

    fn extend_additions(
        &mut self,
        pool: &[usize],
        start: usize,
        need: usize,
        used_color: &mut [bool],
        picked: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        if picked.len() >= need {
            return Some(picked.clone());
        }
        if picked.len() == self.b {
            return None;
        }
        for i in start..pool.len() {
            let id = pool[i];
            let iv = self.inst.interval(id);
            if used_color[iv.color - 1]
                || picked.iter().any(|&p| iv.intersects(self.inst.interval(p)))
            {
                continue;
            }
            self.evaluated += 1;
            used_color[iv.color - 1] = true;
            picked.push(id);
            let found = self.extend_additions(pool, i + 1, need, used_color, picked);
            picked.pop();
            used_color[iv.color - 1] = false;
            if found.is_some() {
                return found;
            }
        }
        None
    }
}

fn color_distinct_independent(inst: &Instance, ids: &[usize]) -> Result<(), SolveError> {
    let sol = SolutionSet::new(ProblemKind::Mcis, ids.iter().copied(), inst)?;
    let verdict = crate::model::verify_solution(inst, &sol, 1)?;
    match verdict.violations.first() {
        None => Ok(()),
        Some(v) => Err(SolveError::InvalidSolution(v.to_string())),
    }
}

pub fn run_local_search(
    inst: &Instance,
    cfg: &LocalSearchConfig,
) -> Result<LocalSearchOutcome, SolveError> {
    check_budget(inst.n(), cfg.b, cfg.neighbor_budget)?;
    let mut current: Vec<usize> = if cfg.seed_with_greedy {
        greedy_state(inst).selected().collect()
    } else {
        Vec::new()
    };
    current.sort_unstable();
    let mut stats = LocalSearchStats {
        n: inst.n(),
        k: inst.k(),
        b: cfg.b,
        initial_colors: current.len(),
        ..LocalSearchStats::default()
    };
    let mut search = Neighborhood {
        inst,
        b: cfg.b,
        evaluated: 0,
    };
    while current.len() < inst.k() && cfg.max_rounds.is_none_or(|cap| stats.rounds < cap) {
        match search.find_improvement(&current) {
            Some(next) => {
                debug_assert!(next.len() > current.len());
                current = next;
                stats.rounds += 1;
                assert!(stats.rounds <= inst.k(), "more than k improvement rounds");
            }
            None => break,
        }
    }
    stats.colors = current.len();
    stats.neighbors_evaluated = search.evaluated;
    let solution = SolutionSet::new(ProblemKind::Mcis, current, inst)?;
    Ok(LocalSearchOutcome { solution, stats })
}

pub fn local_search_mcis(
    inst: &Instance,
    cfg: &LocalSearchConfig,
) -> Result<SolutionSet, SolveError> {
    run_local_search(inst, cfg).map(|o| o.solution)
}

/// `true` iff no b-local neighbor of `sol` is an independent set with more colors.
///
/// `sol` must be independent with at most one interval per color.
pub fn is_b_locally_optimal(
    inst: &Instance,
    sol: &SolutionSet,
    b: usize,
) -> Result<bool, SolveError> {
    is_b_locally_optimal_within(inst, sol, b, DEFAULT_NEIGHBOR_BUDGET)
}

pub fn is_b_locally_optimal_within(
    inst: &Instance,
    sol: &SolutionSet,
    b: usize,
    budget: u128,
) -> Result<bool, SolveError> {
    check_budget(inst.n(), b, budget)?;
    let ids: Vec<usize> = sol.ids().iter().copied().collect();
    color_distinct_independent(inst, &ids)?;
    let mut search = Neighborhood {
        inst,
        b,
        evaluated: 0,
    };
    Ok(search.find_improvement(&ids).is_none())
}
