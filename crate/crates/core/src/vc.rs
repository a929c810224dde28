//! Exact f-BIS parameterized by the vertex cover number.
//!
//! A maximum independent set `V_ind` (greedy by right endpoint, exact on
//! interval graphs) yields a minimum vertex cover `V_c = V \ V_ind`. Every
//! maximal independent set `M` equals `(V_ind ∪ S) \ N(S)` for
//! `S = M ∩ V_c`, so enumerating the independent subsets `S` of the cover
//! visits every maximal independent set within `2^τ` candidates.

use serde::Serialize;

use crate::error::SolveError;
use crate::model::{Coord, Instance, ProblemKind, SolutionSet};

/// Largest vertex cover number the solver accepts.
pub const MAX_TAU: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexCoverDecomposition {
    /// Cover ids in right-endpoint order.
    pub cover: Vec<usize>,
    /// Independent-set ids in right-endpoint order.
    pub independent: Vec<usize>,
}

impl VertexCoverDecomposition {
    pub fn tau(&self) -> usize {
        self.cover.len()
    }
}

pub fn minimum_vertex_cover(inst: &Instance) -> VertexCoverDecomposition {
    let view = inst.sorted_view();
    let mut cover = Vec::new();
    let mut independent = Vec::new();
    let mut frontier: Option<Coord> = None;
    for &id in view.order() {
        let iv = inst.interval(id);
        if frontier.is_none_or(|r| iv.left > r) {
            frontier = Some(iv.right);
            independent.push(id);
        } else {
            cover.push(id);
        }
    }
    VertexCoverDecomposition { cover, independent }
}

/// Lazily yields `(V_ind ∪ S) \ N(S)` for every independent `S ⊆ V_c`, in
/// lexicographic order of `S` over the cover's right-endpoint order.
///
/// Subsets containing an intersecting pair are pruned before they are
/// extended. Candidates come out sorted by right endpoint.
pub struct SwapCandidates<'a> {
    inst: &'a Instance,
    decomp: &'a VertexCoverDecomposition,
    /// Indices into `decomp.cover`, increasing.
    chosen: Vec<usize>,
    started: bool,
    yielded: u64,
}

impl<'a> SwapCandidates<'a> {
    fn compatible_from(&self, start: usize) -> Option<usize> {
        let reach = self
            .chosen
            .last()
            .map(|&c| self.inst.interval(self.decomp.cover[c]).right);
        (start..self.decomp.cover.len()).find(|&j| {
            let iv = self.inst.interval(self.decomp.cover[j]);
            reach.is_none_or(|r| iv.left > r)
        })
    }

    /// Builds the candidate for the current `chosen` set in one merge pass.
    fn materialize(&self) -> Vec<usize> {
        let chosen: Vec<usize> = self.chosen.iter().map(|&c| self.decomp.cover[c]).collect();
        let mut out = Vec::with_capacity(self.decomp.independent.len() + chosen.len());
        let mut si = 0;
        for &v in &self.decomp.independent {
            let iv = self.inst.interval(v);
            // Both lists are disjoint and sorted, so only the first chosen
            // interval reaching iv.left can meet iv.
            while si < chosen.len() && self.inst.interval(chosen[si]).right < iv.left {
                out.push(chosen[si]);
                si += 1;
            }
            let hit = si < chosen.len() && self.inst.interval(chosen[si]).left <= iv.right;
            if !hit {
                out.push(v);
            }
        }
        out.extend_from_slice(&chosen[si..]);
        out
    }

    pub fn yielded(&self) -> u64 {
        self.yielded
    }
}

impl Iterator for SwapCandidates<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if !self.started {
            self.started = true;
        } else {
            let mut start = self.chosen.last().map_or(0, |&c| c + 1);
            loop {
                if let Some(j) = self.compatible_from(start) {
                    self.chosen.push(j);
                    break;
                }
                start = self.chosen.pop()? + 1;
            }
        }
        self.yielded += 1;
        assert!(
            self.decomp.tau() >= 64 || self.yielded <= 1u64 << self.decomp.tau(),
            "more than 2^tau swap candidates"
        );
        Some(self.materialize())
    }
}

pub fn enumerate_swap_candidates<'a>(
    inst: &'a Instance,
    decomp: &'a VertexCoverDecomposition,
) -> SwapCandidates<'a> {
    SwapCandidates {
        inst,
        decomp,
        chosen: Vec::new(),
        started: false,
        yielded: 0,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VcStats {
    pub n: usize,
    pub k: usize,
    pub f: usize,
    pub tau: usize,
    pub candidates_examined: u64,
    pub feasible: bool,
}

#[derive(Debug, Clone)]
pub struct VcOutcome {
    pub solution: Option<SolutionSet>,
    pub stats: VcStats,
}

pub fn run_fbis_vc(inst: &Instance, f: usize) -> Result<VcOutcome, SolveError> {
    if f == 0 {
        return Err(SolveError::ZeroBalance);
    }
    let decomp = minimum_vertex_cover(inst);
    let mut stats = VcStats {
        n: inst.n(),
        k: inst.k(),
        f,
        tau: decomp.tau(),
        ..VcStats::default()
    };
    if decomp.tau() > MAX_TAU {
        return Err(SolveError::CoverTooLarge {
            tau: decomp.tau(),
            limit: MAX_TAU,
        });
    }
    if inst.is_color_deficient() {
        return Ok(VcOutcome {
            solution: None,
            stats,
        });
    }
    let mut candidates = enumerate_swap_candidates(inst, &decomp);
    let mut found = None;
    for cand in candidates.by_ref() {
        if let Some(ids) = balanced_subset(inst, &cand, f) {
            found = Some(ids);
            break;
        }
    }
    stats.candidates_examined = candidates.yielded();
    let solution = found
        .map(|ids| SolutionSet::new(ProblemKind::Bis, ids, inst))
        .transpose()?;
    stats.feasible = solution.is_some();
    Ok(VcOutcome { solution, stats })
}

/// The first `f` members per color (by id) if every color has at least `f`.
fn balanced_subset(inst: &Instance, independent: &[usize], f: usize) -> Option<Vec<usize>> {
    let mut sorted = independent.to_vec();
    sorted.sort_unstable();
    let mut taken = vec![0usize; inst.k()];
    let mut out = Vec::with_capacity(f * inst.k());
    for id in sorted {
        let slot = &mut taken[inst.color(id) - 1];
        if *slot < f {
            *slot += 1;
            out.push(id);
        }
    }
    taken.iter().all(|&t| t == f).then_some(out)
}

pub fn solve_fbis_vc(inst: &Instance, f: usize) -> Result<Option<SolutionSet>, SolveError> {
    run_fbis_vc(inst, f).map(|o| o.solution)
}
