mod common;

use common::*;
use curvmax_core::matroid::{check_axioms_with, exchange_bijection, lifted_is_independent};
use curvmax_core::{ElementSet, LiftedElement, MatroidOracle};
use proptest::prelude::*;

fn assert_exchange_bijection(m: &MatroidOracle, a: ElementSet, b: ElementSet) {
    let h = exchange_bijection(m, a, b).unwrap();
    let domain: ElementSet = h.keys().copied().collect();
    let image: ElementSet = h.values().copied().collect();
    assert_eq!(domain, a);
    assert_eq!(image, b);
    assert_eq!(h.len(), a.len());
    for (&u, &v) in &h {
        if b.contains(u) {
            assert_eq!(u, v, "not the identity on A ∩ B");
        }
        assert!(
            m.independent(a.without(u).with(v)),
            "A - {u} + {v} dependent"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn axioms_hold_for_every_kind(m in any_matroid(8)) {
        prop_assert_eq!(m.check_axioms(), Ok(()));
        let bases = m.bases();
        prop_assert!(!bases.is_empty());
        prop_assert!(bases.iter().all(|b| b.len() == m.rank()));
        prop_assert!(m.is_base(m.complete_to_base(ElementSet::EMPTY)));
    }

    #[test]
    fn complete_to_base_extends(m in any_matroid(8), mask in any::<u64>()) {
        let n = m.ground().len();
        let mut s = ElementSet::EMPTY;
        for e in ElementSet(mask & ((1u64 << n) - 1)).iter() {
            if m.independent(s.with(e)) {
                s = s.with(e);
            }
        }
        let b = m.complete_to_base(s);
        prop_assert!(s.is_subset(b));
        prop_assert!(m.is_base(b));
    }

    #[test]
    fn bijections_on_random_base_pairs(m in any_matroid(8), picks in prop::collection::vec((any::<usize>(), any::<usize>()), 100)) {
        let bases = m.bases();
        for (i, j) in picks {
            assert_exchange_bijection(&m, bases[i % bases.len()], bases[j % bases.len()]);
        }
    }

    #[test]
    fn lifted_matroid_axioms(m in any_matroid(4), ell in 1usize..=3) {
        let n = m.ground().len();
        let lifted_n = n * ell;
        let decode = |s: ElementSet| -> Vec<LiftedElement> {
            s.iter().map(|x| LiftedElement::new(x / ell, 1 + x % ell)).collect()
        };
        let result = check_axioms_with(lifted_n, |s| {
            lifted_is_independent(&m, ell, &decode(s)).unwrap()
        });
        prop_assert_eq!(result, Ok(()));
    }
}

fn assert_all_pairs(m: &MatroidOracle) {
    let bases = m.bases();
    let mut rng_state = 0x9e37_79b9_7f4a_7c15u64;
    for _ in 0..100 {
        rng_state = rng_state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let i = (rng_state >> 33) as usize % bases.len();
        let j = (rng_state >> 13) as usize % bases.len();
        assert_exchange_bijection(m, bases[i], bases[j]);
    }
}

#[test]
fn hundred_base_pairs_per_kind() {
    let k4 = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let graphic = MatroidOracle::graphic(4, k4).unwrap();
    let kinds = [
        MatroidOracle::uniform(7, 3).unwrap(),
        MatroidOracle::partition(
            7,
            vec![vec![0, 1, 2], vec![3, 4], vec![5, 6]],
            vec![2, 1, 1],
        )
        .unwrap(),
        MatroidOracle::explicit_bases(6, graphic.bases()).unwrap(),
        graphic,
    ];
    for m in &kinds {
        assert_eq!(m.check_axioms(), Ok(()));
        assert_all_pairs(m);
    }
}
