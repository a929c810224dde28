use std::collections::BTreeSet;

use proptest::prelude::*;

use colorbal::bds::{canonicalize_bds, is_canonical, solve_fbds_brute};
use colorbal::dp::{max_f, solve_fbis_dp};
use colorbal::gen::{random_three_bounded, random_tptn};
use colorbal::mcis::{greedy_mcis, is_b_locally_optimal, run_local_search, LocalSearchConfig};
use colorbal::model::is_independent;
use colorbal::oracle::{
    oracle_fbds, oracle_fbis, oracle_maximal_is, oracle_mcis, oracle_sat, OracleBudget,
};
use colorbal::reductions::{
    decode_domset, decode_indset, encode_domset_solution, encode_indset_solution, implied_edges,
    reduce_domset, reduce_indset, CnfFormula,
};
use colorbal::vc::{enumerate_swap_candidates, minimum_vertex_cover, solve_fbis_vc};
use colorbal::{
    intersects, parse_instance, verify_solution, Instance, Interval, ProblemKind, SolutionSet,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(max_n: usize, max_k: usize, span: i64) -> impl Strategy<Value = Instance> {
    (1..=max_k, 1..=max_n).prop_flat_map(move |(k, n)| {
        prop::collection::vec((0..span, 0..span / 3 + 1, 1..=k), n).prop_map(move |raw| {
            let ivs = raw
                .into_iter()
                .enumerate()
                .map(|(id, (l, len, c))| Interval::new(id, l, l + len, c))
                .collect();
            Instance::new(k, ivs, false).unwrap()
        })
    })
}

fn brute_intersects(a: &Interval, b: &Interval) -> bool {
    (a.left..=a.right).any(|x| b.left <= x && x <= b.right)
}

fn budget() -> OracleBudget {
    OracleBudget::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn intersects_is_symmetric_and_pointwise(
        a in (-20i64..20, 0i64..10),
        b in (-20i64..20, 0i64..10),
    ) {
        let x = Interval::new(0, a.0, a.0 + a.1, 1);
        let y = Interval::new(1, b.0, b.0 + b.1, 1);
        prop_assert_eq!(intersects(&x, &y), intersects(&y, &x));
        prop_assert_eq!(intersects(&x, &y), brute_intersects(&x, &y));
    }

    #[test]
    fn prev_matches_quadratic_scan(inst in instance(200, 3, 400)) {
        let view = inst.sorted_view();
        for pos in 1..=view.len() {
            let me = inst.interval(view.id_at(pos));
            let expected = (1..=view.len())
                .filter(|&q| inst.interval(view.id_at(q)).right < me.left)
                .max()
                .unwrap_or(0);
            prop_assert_eq!(view.prev_of(pos), expected);
        }
        for w in view.order().windows(2) {
            let (a, b) = (inst.interval(w[0]), inst.interval(w[1]));
            prop_assert!((a.right, a.left, a.id) < (b.right, b.left, b.id));
        }
    }

    #[test]
    fn text_round_trip(inst in instance(40, 5, 200)) {
        let back = parse_instance(&inst.to_text()).unwrap();
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn edge_count_matches_pairs(inst in instance(40, 2, 60)) {
        prop_assert_eq!(inst.edge_count(), implied_edges(&inst).len());
    }

    #[test]
    fn verify_matches_definitions(inst in instance(10, 3, 30), mask in any::<u16>(), f in 1usize..3) {
        let ids: Vec<usize> = (0..inst.n()).filter(|&i| mask >> i & 1 == 1).collect();
        let independent = ids.iter().all(|&a| ids.iter().all(|&b| a == b || !brute_intersects(inst.interval(a), inst.interval(b))));
        let mut counts = vec![0usize; inst.k()];
        for &i in &ids {
            counts[inst.color(i) - 1] += 1;
        }
        let dominating = (0..inst.n()).all(|v| ids.iter().any(|&m| m == v || brute_intersects(inst.interval(m), inst.interval(v))));

        let bis = SolutionSet::new(ProblemKind::Bis, ids.clone(), &inst).unwrap();
        prop_assert_eq!(
            verify_solution(&inst, &bis, f).unwrap().valid,
            independent && counts.iter().all(|&c| c == f)
        );
        let mcis = bis.clone().with_kind(ProblemKind::Mcis);
        prop_assert_eq!(
            verify_solution(&inst, &mcis, f).unwrap().valid,
            independent && counts.iter().all(|&c| c <= 1)
        );
        let bds = bis.with_kind(ProblemKind::Bds);
        prop_assert_eq!(
            verify_solution(&inst, &bds, f).unwrap().valid,
            dominating && counts.iter().all(|&c| c == f)
        );
        prop_assert_eq!(is_independent(&inst, ids), independent);
    }

    #[test]
    fn bis_solvers_agree_with_oracle(inst in instance(14, 3, 40), f in 1usize..=3) {
        let truth = oracle_fbis(&inst, f, &budget()).unwrap().is_some();
        for found in [solve_fbis_dp(&inst, f).unwrap(), solve_fbis_vc(&inst, f).unwrap()] {
            prop_assert_eq!(found.is_some(), truth);
            if let Some(sol) = found {
                prop_assert!(verify_solution(&inst, &sol, f).unwrap().valid);
            }
        }
    }

    #[test]
    fn max_f_is_tight(inst in instance(12, 2, 40)) {
        let best = max_f(&inst).unwrap();
        if best > 0 {
            prop_assert!(oracle_fbis(&inst, best, &budget()).unwrap().is_some());
        }
        prop_assert!(oracle_fbis(&inst, best + 1, &budget()).unwrap().is_none());
    }

    #[test]
    fn swap_candidates_cover_maximal_sets(inst in instance(12, 2, 30)) {
        let decomp = minimum_vertex_cover(&inst);
        let mut it = enumerate_swap_candidates(&inst, &decomp);
        let candidates: BTreeSet<BTreeSet<usize>> = it.by_ref().map(|c| c.into_iter().collect()).collect();
        prop_assert!(it.yielded() <= 1u64 << decomp.tau());
        for m in oracle_maximal_is(&inst, &budget()).unwrap() {
            prop_assert!(candidates.contains(&m), "missing {:?}", m);
        }
        let max_is = oracle_maximal_is(&inst, &budget()).unwrap().iter().map(BTreeSet::len).max().unwrap();
        prop_assert_eq!(decomp.independent.len(), max_is);
    }

    #[test]
    fn greedy_and_local_search_bounds(inst in instance(14, 4, 40)) {
        let (opt, _) = oracle_mcis(&inst, &budget()).unwrap();
        let greedy = greedy_mcis(&inst);
        prop_assert!(verify_solution(&inst, &greedy, 1).unwrap().valid);
        prop_assert!(2 * greedy.distinct_colors() >= opt);
        let out = run_local_search(&inst, &LocalSearchConfig::with_b(2)).unwrap();
        prop_assert!(verify_solution(&inst, &out.solution, 1).unwrap().valid);
        prop_assert!(out.stats.colors >= greedy.distinct_colors());
        prop_assert!(out.stats.colors <= opt);
        prop_assert!(out.stats.rounds <= inst.k());
        prop_assert!(is_b_locally_optimal(&inst, &out.solution, 2).unwrap());
    }

    #[test]
    fn bds_solver_agrees_with_oracle(inst in instance(11, 3, 30), f in 1usize..=2) {
        let truth = oracle_fbds(&inst, f, &budget()).unwrap().is_some();
        let found = solve_fbds_brute(&inst, f).unwrap();
        prop_assert_eq!(found.is_some(), truth);
        if let Some(sol) = found {
            prop_assert!(verify_solution(&inst, &sol, f).unwrap().valid);
        }
    }

    #[test]
    fn indset_reduction_round_trips(seed in any::<u64>(), nvars in 2usize..=5, nclauses in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = random_three_bounded(nvars, nclauses, &mut rng);
        let (inst, meta) = reduce_indset(&phi).unwrap();
        prop_assert!(inst.is_geometrically_proper());
        let sat = oracle_sat(&phi, &budget()).unwrap();
        let bis = solve_fbis_dp(&inst, 1).unwrap();
        prop_assert_eq!(sat.is_some(), bis.is_some());
        if let Some(sol) = bis {
            prop_assert!(phi.evaluate(&decode_indset(&inst, &meta, &sol).unwrap()));
        }
        if let Some(a) = sat {
            let sol = encode_indset_solution(&inst, &meta, &a).unwrap();
            prop_assert!(verify_solution(&inst, &sol, 1).unwrap().valid);
            prop_assert!(phi.evaluate(&decode_indset(&inst, &meta, &sol).unwrap()));
        }
    }

    #[test]
    fn domset_reduction_round_trips(seed in any::<u64>(), nvars in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = random_tptn(nvars, &mut rng);
        let (inst, meta) = reduce_domset(&phi).unwrap();
        let literals: usize = phi.clauses().iter().map(Vec::len).sum();
        prop_assert_eq!(inst.n(), 6 * nvars + literals);
        let sat = oracle_sat(&phi, &budget()).unwrap();
        let bds = solve_fbds_brute(&inst, 1).unwrap();
        prop_assert_eq!(sat.is_some(), bds.is_some());
        if let Some(sol) = bds {
            let canon = canonicalize_bds(&inst, &meta, &sol).unwrap();
            prop_assert!(verify_solution(&inst, &canon, 1).unwrap().valid);
            prop_assert!(is_canonical(&meta, &canon).unwrap());
            prop_assert_eq!(&canonicalize_bds(&inst, &meta, &canon).unwrap(), &canon);
            prop_assert!(phi.evaluate(&decode_domset(&inst, &meta, &sol).unwrap()));
        }
        if let Some(a) = sat {
            let sol = encode_domset_solution(&inst, &meta, &a).unwrap();
            prop_assert!(verify_solution(&inst, &sol, 1).unwrap().valid);
            prop_assert_eq!(decode_domset(&inst, &meta, &sol).unwrap(), a);
        }
    }

    #[test]
    fn dimacs_round_trip(seed in any::<u64>(), nvars in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = random_tptn(nvars, &mut rng);
        let back: CnfFormula = phi.to_dimacs().parse().unwrap();
        prop_assert_eq!(back, phi);
    }
}
