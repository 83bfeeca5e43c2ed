mod common;

use common::*;
use curvmax_core::search::{greedy, local_search, oblivious_local_search};
use curvmax_core::verify::{brute_force_opt, check_lemma1, check_lemma2, check_ratio};
use curvmax_core::{
    curvature, decompose, solve_with_curvature, ElementSet, PotentialParams, SearchConfig,
    SetFunction, SetFunctionOracle,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn lemma1_holds_at_arbitrary_colorful_bases(
        (f, m) in instance(6),
        ell in 1usize..=4,
        colors in prop::collection::vec(0usize..4, 6),
        mask in any::<u64>(),
    ) {
        let kappa = match curvature(&f) { Ok(k) => k, Err(_) => return Ok(()) };
        let d = decompose(&f, kappa).unwrap();
        let g = d.g();
        let params = PotentialParams::new(ell, 1.0, 16).unwrap();
        let n = f.ground().len();
        let seed = ElementSet(mask & ((1u64 << n) - 1));
        let mut start = ElementSet::EMPTY;
        for e in seed.iter() {
            if m.independent(start.with(e)) {
                start = start.with(e);
            }
        }
        let s = color(ell, m.complete_to_base(start), &colors);
        let r = check_lemma1(&s, &g, &m, &params).unwrap();
        prop_assert!(r.pass(), "{:?}", r);
        prop_assert!(r.literal_bracket <= r.bracket + 1e-9 * f.scale());
    }

    #[test]
    fn search_output_satisfies_lemma1_and_lemma2((f, m) in instance(7), eps in 0.05f64..0.5) {
        let kappa = match curvature(&f) { Ok(k) => k, Err(_) => return Ok(()) };
        let d = decompose(&f, kappa).unwrap();
        let cfg = SearchConfig::with_epsilon(eps);
        let params = PotentialParams::new(2, 1.0, 16).unwrap();
        let (s, report) = local_search(&d, &m, &params, &cfg).unwrap();
        prop_assert!(report.converged);
        prop_assert!(m.is_base(report.solution));
        prop_assert!(check_lemma1(&s, &d.g(), &m, &params).unwrap().pass());
        let l2 = check_lemma2(&report, &d, &m, &params, report.theta).unwrap();
        prop_assert!(l2.pass(), "{:?}", l2);
        prop_assert!(l2.bracket >= -l2.slack_allow - l2.tolerance);
    }

    #[test]
    fn ratio_guarantee((f, m) in instance(8)) {
        if curvature(&f).is_err() {
            return Ok(());
        }
        let r = check_ratio(&f, &m, &SearchConfig::default()).unwrap();
        prop_assert!(r.pass(), "{:?}", r);
    }

    #[test]
    fn parallel_and_sequential_runs_agree((f, m) in instance(7)) {
        if curvature(&f).is_err() {
            return Ok(());
        }
        let mut cfg = SearchConfig { trace: true, ..SearchConfig::default() };
        let par = solve_with_curvature(&f.clone(), &m, &cfg).unwrap();
        cfg.parallel = false;
        let seq = solve_with_curvature(&f.clone(), &m, &cfg).unwrap();
        prop_assert_eq!(
            serde_json::to_string(&par).unwrap(),
            serde_json::to_string(&seq).unwrap()
        );
    }

    #[test]
    fn greedy_is_optimal_for_modular(
        m in any_matroid(8),
        w in prop::collection::vec(0u32..=20, 8),
    ) {
        let n = m.ground().len();
        let f = SetFunctionOracle::modular(w[..n].iter().map(|&x| f64::from(x) / 4.0).collect())
            .unwrap();
        let opt = brute_force_opt(&f, &m).unwrap();
        prop_assert_eq!(f.value(greedy(&f, &m)), opt.opt_value);
    }

    #[test]
    fn baselines_never_exceed_opt((f, m) in instance(8)) {
        let opt = brute_force_opt(&f, &m).unwrap().opt_value;
        let tol = 1e-9 * f.scale();
        let ob = oblivious_local_search(&f, &m);
        prop_assert!(ob.value <= opt + tol);
        prop_assert!(m.is_base(ob.solution));
        prop_assert!(f.value(greedy(&f, &m)) <= opt + tol);
    }

    #[test]
    fn brute_force_dominates_every_independent_set((f, m) in instance(7)) {
        let opt = brute_force_opt(&f, &m).unwrap();
        prop_assert!(m.independent(opt.opt_set));
        prop_assert_eq!(f.value(opt.opt_set), opt.opt_value);
        for s in f.ground().subsets().filter(|s| m.independent(*s)) {
            prop_assert!(f.value(s) <= opt.opt_value);
        }
    }
}
