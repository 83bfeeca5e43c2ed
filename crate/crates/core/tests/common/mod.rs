#![allow(dead_code)]

use curvmax_core::{ElementSet, LiftedElement, LiftedSolution, MatroidOracle, SetFunctionOracle};
use proptest::prelude::*;

pub fn uniform(max_n: usize) -> impl Strategy<Value = MatroidOracle> {
    (1..=max_n)
        .prop_flat_map(|n| (Just(n), 0..=n))
        .prop_map(|(n, r)| MatroidOracle::uniform(n, r).unwrap())
}

pub fn partition(max_n: usize) -> impl Strategy<Value = MatroidOracle> {
    (1..=max_n)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(0usize..3, n),
                prop::collection::vec(0usize..=3, 3),
            )
        })
        .prop_map(|(assign, caps)| {
            let mut blocks = Vec::new();
            let mut capacities = Vec::new();
            for (b, &cap) in caps.iter().enumerate() {
                let block: Vec<usize> = (0..assign.len()).filter(|&e| assign[e] == b).collect();
                if !block.is_empty() {
                    blocks.push(block);
                    capacities.push(cap);
                }
            }
            MatroidOracle::partition(assign.len(), blocks, capacities).unwrap()
        })
}

pub fn graphic(max_n: usize) -> impl Strategy<Value = MatroidOracle> {
    (2usize..=5, 1..=max_n)
        .prop_flat_map(|(v, n)| (Just(v), prop::collection::vec((0..v, 0..v), n)))
        .prop_map(|(v, edges)| MatroidOracle::graphic(v, edges).unwrap())
}

pub fn explicit_bases(max_n: usize) -> impl Strategy<Value = MatroidOracle> {
    prop_oneof![partition(max_n), graphic(max_n)]
        .prop_map(|m| MatroidOracle::explicit_bases(m.ground().len(), m.bases()).unwrap())
}

pub fn any_matroid(max_n: usize) -> impl Strategy<Value = MatroidOracle> {
    prop_oneof![
        uniform(max_n),
        partition(max_n),
        graphic(max_n),
        explicit_bases(max_n)
    ]
}

fn quarter() -> impl Strategy<Value = f64> {
    (0u32..=20).prop_map(|k| f64::from(k) / 4.0)
}

/// Monotone submodular functions on exactly `n` elements.
pub fn submodular(n: usize) -> impl Strategy<Value = SetFunctionOracle> {
    let modular =
        prop::collection::vec(quarter(), n).prop_map(|w| SetFunctionOracle::modular(w).unwrap());
    let coverage = (1usize..=6)
        .prop_flat_map(move |items| {
            (
                prop::collection::vec(quarter(), items),
                prop::collection::vec(prop::collection::vec(0..items, 0..=3), n),
            )
        })
        .prop_map(|(w, sets)| SetFunctionOracle::coverage(w, sets).unwrap());
    let facility = (1usize..=4)
        .prop_flat_map(move |clients| {
            prop::collection::vec(prop::collection::vec(quarter(), n), clients)
        })
        .prop_map(move |b| SetFunctionOracle::facility_location(n, b).unwrap());
    prop_oneof![modular, coverage, facility]
}

pub fn ground_and_submodular(max_n: usize) -> impl Strategy<Value = SetFunctionOracle> {
    (1..=max_n).prop_flat_map(submodular)
}

/// A function paired with a matroid on the same ground set.
pub fn instance(max_n: usize) -> impl Strategy<Value = (SetFunctionOracle, MatroidOracle)> {
    any_matroid(max_n).prop_flat_map(|m| {
        let n = m.ground().len();
        (submodular(n), Just(m))
    })
}

/// Arbitrary table on `n` elements with `f(∅) = 0`, not necessarily submodular.
pub fn table(n: usize) -> impl Strategy<Value = SetFunctionOracle> {
    prop::collection::vec(quarter(), 1usize << n).prop_map(move |mut v| {
        v[0] = 0.0;
        SetFunctionOracle::table(n, v).unwrap()
    })
}

/// Colors each element of `base` with a color from `colors` (cycled).
pub fn color(ell: usize, base: ElementSet, colors: &[usize]) -> LiftedSolution {
    LiftedSolution::from_pairs(
        ell,
        base.iter()
            .enumerate()
            .map(|(i, e)| LiftedElement::new(e, 1 + colors[i % colors.len()] % ell)),
    )
    .unwrap()
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}
