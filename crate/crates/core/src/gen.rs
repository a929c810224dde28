//! Seeded instance generators.
//!
//! All randomness comes from ChaCha8 seeded with `GenSpec::seed`, so a
//! `(spec, seed)` pair reproduces bit-identical instances on every
//! platform that uses the same generator.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Coord, Instance, Interval};
use crate::reductions::{reduce_indset, CnfFormula};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    UniformRandom,
    ProperUnit,
    GreedyAdversarial,
    SatDerived,
}

impl Model {
    pub const ALL: [Model; 4] = [
        Model::UniformRandom,
        Model::ProperUnit,
        Model::GreedyAdversarial,
        Model::SatDerived,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Model::UniformRandom => "uniform-random",
            Model::ProperUnit => "proper-unit",
            Model::GreedyAdversarial => "greedy-adversarial",
            Model::SatDerived => "sat-derived",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Model::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown model {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub k: usize,
    /// When `n >= k * f_target`, every color receives at least `f_target`
    /// intervals (uniform-random and proper-unit only).
    pub f_target: usize,
    pub seed: u64,
    pub model: Model,
}

impl GenSpec {
    pub fn new(model: Model, n: usize, k: usize, seed: u64) -> Self {
        GenSpec {
            n,
            k,
            f_target: 0,
            seed,
            model,
        }
    }

    pub fn with_f_target(mut self, f: usize) -> Self {
        self.f_target = f;
        self
    }
}

/// Builds the instance described by `spec`.
///
/// * `uniform-random`: endpoints uniform in `[0, 4n]`.
/// * `proper-unit`: every interval has length 2, so none nests in another.
/// * `greedy-adversarial`: `t = max(1, n / 3)` blocks of three intervals
///   over `2t` colors; `k` is ignored.
/// * `sat-derived`: the independent-set reduction of a random formula in
///   which every variable occurs at most three times; `k` is ignored.
///
/// # Panics
/// If `n == 0` or `k == 0`.
pub fn generate(spec: &GenSpec) -> Instance {
    assert!(
        spec.n >= 1 && spec.k >= 1,
        "generate needs n >= 1 and k >= 1"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.model {
        Model::UniformRandom => {
            let colors = colors(spec, &mut rng);
            let hi = 4 * spec.n as Coord;
            let ivs = colors
                .into_iter()
                .enumerate()
                .map(|(id, c)| {
                    let a = rng.gen_range(0..=hi);
                    let b = rng.gen_range(0..=hi);
                    Interval::new(id, a.min(b), a.max(b), c)
                })
                .collect();
            Instance::new(spec.k, ivs, false).expect("generated instance is valid")
        }
        Model::ProperUnit => {
            let colors = colors(spec, &mut rng);
            let hi = 2 * spec.n as Coord;
            let ivs = colors
                .into_iter()
                .enumerate()
                .map(|(id, c)| {
                    let left = rng.gen_range(0..=hi);
                    Interval::new(id, left, left + 2, c)
                })
                .collect();
            Instance::new(spec.k, ivs, true).expect("generated instance is valid")
        }
        Model::GreedyAdversarial => greedy_adversarial((spec.n / 3).max(1)),
        Model::SatDerived => {
            let nvars = spec.n.div_ceil(3).max(2);
            let nclauses = (spec.n * 2 / 5).max(1);
            let phi = random_three_bounded(nvars, nclauses, &mut rng);
            reduce_indset(&phi)
                .expect("three-bounded formula reduces")
                .0
        }
    }
}

fn colors(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let guaranteed = if spec.n >= spec.k * spec.f_target {
        spec.k * spec.f_target
    } else {
        0
    };
    let mut out: Vec<usize> = (0..guaranteed).map(|i| i % spec.k + 1).collect();
    out.extend((guaranteed..spec.n).map(|_| rng.gen_range(1..=spec.k)));
    out.shuffle(rng);
    out
}

/// `t` disjoint blocks `[o,o+2] a`, `[o+1,o+4] b`, `[o+5,o+6] a` with
/// `o = 10s` and colors `a = 2s+1`, `b = 2s+2` for block `s`. Greedy keeps
/// one color per block; the optimum keeps both.
pub fn greedy_adversarial(t: usize) -> Instance {
    let mut ivs = Vec::with_capacity(3 * t);
    for s in 0..t {
        let o = 10 * s as Coord;
        let (a, b) = (2 * s + 1, 2 * s + 2);
        for (l, r, c) in [(o, o + 2, a), (o + 1, o + 4, b), (o + 5, o + 6, a)] {
            ivs.push(Interval::new(ivs.len(), l, r, c));
        }
    }
    Instance::new(2 * t, ivs, true).expect("adversarial blocks are valid")
}

fn random_literal(var: usize, rng: &mut impl Rng) -> i32 {
    if rng.gen_bool(0.5) {
        var as i32
    } else {
        -(var as i32)
    }
}

/// Up to `nclauses` clauses of two or three literals in which each of the
/// `nvars` variables occurs at most three times. Generation stops early once
/// fewer than two variables have spare occurrences.
pub fn random_three_bounded(nvars: usize, nclauses: usize, rng: &mut impl Rng) -> CnfFormula {
    random_three_bounded_sized(nvars, nclauses, 0.5, rng)
}

/// [`random_three_bounded`] where each clause has three literals with
/// probability `three` (two otherwise). Short clauses make unsatisfiable
/// formulas far more likely.
pub fn random_three_bounded_sized(
    nvars: usize,
    nclauses: usize,
    three: f64,
    rng: &mut impl Rng,
) -> CnfFormula {
    let mut spare = vec![3usize; nvars];
    let mut clauses = Vec::with_capacity(nclauses);
    for _ in 0..nclauses {
        let mut open: Vec<usize> = (1..=nvars).filter(|&v| spare[v - 1] > 0).collect();
        if open.len() < 2 {
            break;
        }
        let size = if rng.gen_bool(three) { 3 } else { 2 }.min(open.len());
        open.shuffle(rng);
        let clause: Vec<i32> = open[..size]
            .iter()
            .map(|&v| {
                spare[v - 1] -= 1;
                random_literal(v, rng)
            })
            .collect();
        clauses.push(clause);
    }
    CnfFormula::new(nvars, clauses).expect("generated clauses are well formed")
}

/// A formula in which every variable occurs exactly twice positively and
/// twice negatively, dealt into clauses of one to three literals.
pub fn random_tptn(nvars: usize, rng: &mut impl Rng) -> CnfFormula {
    let mut pool = tptn_pool(nvars);
    pool.shuffle(rng);
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    let mut target = rng.gen_range(1..=3);
    for lit in pool {
        let clash = current.iter().any(|l| l.abs() == lit.abs());
        if clash || current.len() == target {
            clauses.push(std::mem::take(&mut current));
            target = rng.gen_range(1..=3);
        }
        current.push(lit);
    }
    if !current.is_empty() {
        clauses.push(current);
    }
    CnfFormula::new(nvars, clauses).expect("generated clauses are well formed")
}

/// Like [`random_tptn`] but with every clause of exactly three literals;
/// `nvars` must be a multiple of 3.
pub fn random_tptn_three(nvars: usize, rng: &mut impl Rng) -> CnfFormula {
    assert!(
        nvars.is_multiple_of(3),
        "4 * nvars literals must split into triples"
    );
    let mut pool = tptn_pool(nvars);
    loop {
        pool.shuffle(rng);
        let clauses: Vec<Vec<i32>> = pool.chunks(3).map(<[i32]>::to_vec).collect();
        if let Ok(phi) = CnfFormula::new(nvars, clauses) {
            return phi;
        }
    }
}

fn tptn_pool(nvars: usize) -> Vec<i32> {
    (1..=nvars as i32).flat_map(|v| [v, v, -v, -v]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcis::greedy_mcis;
    use crate::reductions::Flavor;

    #[test]
    fn seed_determinism() {
        for model in Model::ALL {
            let spec = GenSpec::new(model, 12, 3, 7);
            assert_eq!(generate(&spec), generate(&spec), "{model}");
        }
        let a = generate(&GenSpec::new(Model::UniformRandom, 12, 3, 1));
        let b = generate(&GenSpec::new(Model::UniformRandom, 12, 3, 2));
        assert_ne!(a, b);
    }

    #[test]
    fn single_interval() {
        for seed in 0..20 {
            let i = generate(&GenSpec::new(Model::UniformRandom, 1, 1, seed));
            assert_eq!(i.n(), 1);
        }
    }

    #[test]
    fn proper_unit_is_proper() {
        for seed in 0..50 {
            let i = generate(&GenSpec::new(Model::ProperUnit, 20, 3, seed));
            assert!(i.is_geometrically_proper());
        }
    }

    #[test]
    fn f_target_respected() {
        for seed in 0..50 {
            let spec = GenSpec::new(Model::UniformRandom, 10, 3, seed).with_f_target(3);
            assert!(generate(&spec).color_class_sizes().iter().all(|&s| s >= 3));
        }
    }

    #[test]
    fn adversarial_greedy_halves() {
        for t in 1..=4 {
            let i = greedy_adversarial(t);
            assert_eq!(greedy_mcis(&i).distinct_colors(), t);
        }
    }

    #[test]
    fn formula_flavors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=6 {
            assert_eq!(random_tptn(n, &mut rng).flavor(), Flavor::Tptn);
            let phi = random_three_bounded(n + 1, 4, &mut rng);
            assert!(phi.satisfies(Flavor::ThreeBounded));
        }
        let phi = random_tptn_three(3, &mut rng);
        assert_eq!(phi.num_clauses(), 4);
        assert!(phi.clauses().iter().all(|c| c.len() == 3));
    }

    #[test]
    fn model_names_round_trip() {
        for m in Model::ALL {
            assert_eq!(m.name().parse::<Model>().unwrap(), m);
        }
        assert!("nope".parse::<Model>().is_err());
    }
}
