//! Exact f-BIS by dynamic programming over cardinality vectors.
//!
//! Intervals are processed in right-endpoint order. Level `i` holds the set
//! `U_i` of per-color count vectors (all entries `<= f`) realized by some
//! independent subset of the first `i` intervals:
//!
//! ```text
//! U_0 = {0}
//! U_i = { u + e_color(i) : u in U_prev(i), entry stays <= f } ∪ U_{i-1}
//! ```
//!
//! Each vector is encoded as a mixed-radix integer in base `f + 1` with the
//! first color most significant, so integer order is lexicographic order and
//! adding a unit vector preserves the order of a sorted level. A level is
//! produced by one linear merge of two sorted slices.

use std::sync::Arc;

use serde::Serialize;

use crate::error::SolveError;
use crate::model::{Instance, ProblemKind, SolutionSet, SortedView};

/// Upper bound on `(f+1)^k` accepted by the solver.
pub const MAX_VECTOR_STATES: u128 = 1 << 26;

/// Per-color counts, colors `1..=k` stored at `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CardinalityVector(Vec<usize>);

impl CardinalityVector {
    pub fn zero(k: usize) -> Self {
        CardinalityVector(vec![0; k])
    }

    /// The unit vector for 1-based `color`.
    pub fn unit(k: usize, color: usize) -> Self {
        let mut v = vec![0; k];
        v[color - 1] = 1;
        CardinalityVector(v)
    }

    pub fn uniform(k: usize, f: usize) -> Self {
        CardinalityVector(vec![f; k])
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn is_within(&self, f: usize) -> bool {
        self.0.iter().all(|&c| c <= f)
    }
}

impl std::ops::Add for &CardinalityVector {
    type Output = CardinalityVector;

    fn add(self, rhs: &CardinalityVector) -> CardinalityVector {
        CardinalityVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

/// Mixed-radix encoding of vectors with entries in `0..=f`.
#[derive(Debug, Clone)]
struct Codec {
    base: u32,
    /// `weight[c]` is the code increment for color `c + 1`.
    weight: Vec<u32>,
}

impl Codec {
    fn new(k: usize, f: usize) -> Self {
        let base = f as u32 + 1;
        let mut weight = vec![1u32; k];
        for c in (0..k.saturating_sub(1)).rev() {
            weight[c] = weight[c + 1] * base;
        }
        Codec { base, weight }
    }

    #[inline]
    fn digit(&self, code: u32, color: usize) -> u32 {
        (code / self.weight[color - 1]) % self.base
    }

    fn encode(&self, v: &CardinalityVector) -> u32 {
        v.0.iter()
            .zip(&self.weight)
            .map(|(&c, &w)| c as u32 * w)
            .sum()
    }

    fn decode(&self, code: u32) -> CardinalityVector {
        CardinalityVector(
            self.weight
                .iter()
                .map(|&w| ((code / w) % self.base) as usize)
                .collect(),
        )
    }
}

/// One member of a level: the vector and the sorted position at which it
/// was first created by adding an interval (0 for the zero vector).
///
/// Because levels only grow and duplicates keep the entry from `U_{i-1}`, the
/// origin is a complete backlink: the predecessor is `code - e_color(origin)`
/// at level `prev(origin)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Entry {
    code: u32,
    origin: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DpStats {
    pub n: usize,
    pub k: usize,
    pub f: usize,
    pub feasible: bool,
    /// Largest `|U_i|` seen.
    pub peak_states: usize,
    /// Levels that had to be stored because they differ from their predecessor.
    pub distinct_levels: usize,
}

/// The full table of levels; kept for reconstruction and inspection.
#[derive(Debug, Clone)]
pub struct DpTable {
    codec: Codec,
    view: SortedView,
    levels: Vec<Arc<[Entry]>>,
    peak_states: usize,
}

impl DpTable {
    /// Runs the recurrence over every interval of `inst` with entries capped at `f`.
    pub fn build(inst: &Instance, f: usize) -> Result<Self, SolveError> {
        check_state_space(inst.k(), f)?;
        let codec = Codec::new(inst.k(), f);
        let view = inst.sorted_view();
        let cap = f as u32;
        let state_bound = (f + 1).pow(inst.k() as u32);

        let mut levels: Vec<Arc<[Entry]>> = Vec::with_capacity(view.len() + 1);
        levels.push(Arc::from(vec![Entry { code: 0, origin: 0 }]));
        let mut scratch: Vec<Entry> = Vec::new();
        let mut peak_states = 1;

        for pos in 1..=view.len() {
            let color = inst.color(view.id_at(pos));
            let unit = codec.weight[color - 1];
            let grown = &levels[view.prev_of(pos)];
            let carried = &levels[pos - 1];

            scratch.clear();
            let mut extended = grown
                .iter()
                .filter(|e| codec.digit(e.code, color) < cap)
                .map(|e| Entry {
                    code: e.code + unit,
                    origin: pos as u32,
                })
                .peekable();
            let mut kept = carried.iter().copied().peekable();
            loop {
                match (extended.peek(), kept.peek()) {
                    (Some(a), Some(b)) if a.code < b.code => {
                        scratch.push(*a);
                        extended.next();
                    }
                    (Some(a), Some(b)) => {
                        if a.code == b.code {
                            extended.next();
                        }
                        scratch.push(*b);
                        kept.next();
                    }
                    (Some(a), None) => {
                        scratch.push(*a);
                        extended.next();
                    }
                    (None, Some(b)) => {
                        scratch.push(*b);
                        kept.next();
                    }
                    (None, None) => break,
                }
            }

            assert!(scratch.len() <= state_bound, "level exceeds (f+1)^k states");
            let level = if scratch.len() == carried.len() {
                Arc::clone(carried)
            } else {
                peak_states = peak_states.max(scratch.len());
                Arc::from(scratch.as_slice())
            };
            levels.push(level);
        }

        Ok(DpTable {
            codec,
            view,
            levels,
            peak_states,
        })
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Vectors of `U_i`, in lexicographic order.
    pub fn level(&self, i: usize) -> impl Iterator<Item = CardinalityVector> + '_ {
        self.levels[i].iter().map(|e| self.codec.decode(e.code))
    }

    pub fn level_len(&self, i: usize) -> usize {
        self.levels[i].len()
    }

    pub fn peak_states(&self) -> usize {
        self.peak_states
    }

    pub fn distinct_levels(&self) -> usize {
        let mut count = 1;
        for w in self.levels.windows(2) {
            if !Arc::ptr_eq(&w[0], &w[1]) {
                count += 1;
            }
        }
        count
    }

    pub fn contains(&self, i: usize, v: &CardinalityVector) -> bool {
        let code = self.codec.encode(v);
        self.levels[i]
            .binary_search_by_key(&code, |e| e.code)
            .is_ok()
    }

    /// Rebuilds an independent set realizing `v` from the backlinks, if `v` is in the last level.
    pub fn witness(&self, inst: &Instance, v: &CardinalityVector) -> Option<Vec<usize>> {
        let mut code = self.codec.encode(v);
        let mut level = self.levels.len() - 1;
        let mut ids = Vec::new();
        loop {
            let idx = self.levels[level]
                .binary_search_by_key(&code, |e| e.code)
                .ok()?;
            let origin = self.levels[level][idx].origin as usize;
            if origin == 0 {
                debug_assert_eq!(code, 0);
                return Some(ids);
            }
            let id = self.view.id_at(origin);
            ids.push(id);
            code -= self.codec.weight[inst.color(id) - 1];
            level = self.view.prev_of(origin);
        }
    }
}

fn check_state_space(k: usize, f: usize) -> Result<(), SolveError> {
    let states = (f as u128 + 1).checked_pow(k as u32).unwrap_or(u128::MAX);
    if states > MAX_VECTOR_STATES {
        return Err(SolveError::ParameterTooLarge {
            states,
            limit: MAX_VECTOR_STATES,
        });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct DpOutcome {
    pub solution: Option<SolutionSet>,
    pub stats: DpStats,
}

/// Solves f-BIS and reports table statistics.
pub fn run_fbis_dp(inst: &Instance, f: usize) -> Result<DpOutcome, SolveError> {
    if f == 0 {
        return Err(SolveError::ZeroBalance);
    }
    check_state_space(inst.k(), f)?;
    let mut stats = DpStats {
        n: inst.n(),
        k: inst.k(),
        f,
        ..DpStats::default()
    };
    if inst.color_class_sizes().iter().any(|&size| size < f) {
        return Ok(DpOutcome {
            solution: None,
            stats,
        });
    }
    let table = DpTable::build(inst, f)?;
    stats.peak_states = table.peak_states();
    stats.distinct_levels = table.distinct_levels();
    let target = CardinalityVector::uniform(inst.k(), f);
    let solution = table
        .witness(inst, &target)
        .map(|ids| SolutionSet::new(ProblemKind::Bis, ids, inst))
        .transpose()?;
    stats.feasible = solution.is_some();
    Ok(DpOutcome { solution, stats })
}

/// An f-balanced independent set, or `None` if none exists.
pub fn solve_fbis_dp(inst: &Instance, f: usize) -> Result<Option<SolutionSet>, SolveError> {
    run_fbis_dp(inst, f).map(|o| o.solution)
}

/// Largest `f` for which an f-balanced independent set exists (0 if none).
///
/// Binary search over `f` in `1..=min class size`; feasibility is monotone
/// since dropping one member per color from an f-balanced set leaves an
/// (f-1)-balanced one.
pub fn max_f(inst: &Instance) -> Result<usize, SolveError> {
    let hi = inst.color_class_sizes().into_iter().min().unwrap_or(0);
    let (mut lo, mut hi) = (0usize, hi);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if solve_fbis_dp(inst, mid)?.is_some() {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(lo)
}
