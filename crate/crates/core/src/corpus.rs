//! Deterministic benchmark corpus: small instances (n ≤ 10) over uniform,
//! partition and graphic matroids with curvature in {0, 0.3, 0.5, 0.7, 1}
//! plus facility-location instances of whatever curvature they happen to have.
//!
//! Curved instances of a target curvature `c` are tables of
//! `(1 - c)·Σ_{e∈S} h({e}) + c·h(S)`, where `h` is a coverage function in which
//! the last element duplicates the first, so `h` has curvature exactly 1 and
//! the mixture has curvature exactly `c`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::instance::InstanceFile;
use crate::matroid::MatroidOracle;
use crate::set::ElementSet;
use crate::setfn::{SetFunction, SetFunctionOracle};

pub const CORPUS_SEED: u64 = 0x5EED_C0DE;

/// Curvature targets of the mixed table instances.
pub const MIXED_CURVATURES: [f64; 3] = [0.3, 0.5, 0.7];

/// A corpus entry; `name` doubles as the file stem.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub file: InstanceFile,
}

fn quarter_weight(rng: &mut ChaCha8Rng) -> f64 {
    f64::from(rng.gen_range(1u32..=20)) / 4.0
}

/// Matroid shapes cycled through by the generator.
fn matroid_for(slot: usize, n: usize) -> (String, MatroidOracle) {
    match slot % 3 {
        0 => {
            let rank = 2 + (slot / 3) % 3;
            (
                format!("uniform{rank}"),
                MatroidOracle::uniform(n, rank.min(n)).expect("valid uniform matroid"),
            )
        }
        1 => {
            let half = n / 2;
            let blocks = vec![(0..half).collect(), (half..n).collect()];
            let caps = vec![1 + slot % 2, 2];
            (
                format!("partition{}{}", caps[0], caps[1]),
                MatroidOracle::partition(n, blocks, caps).expect("valid partition matroid"),
            )
        }
        _ => {
            let (label, edges) = graph_with_edges(n);
            let vertices = edges.iter().map(|&(a, b)| a.max(b)).max().unwrap_or(0) + 1;
            (
                format!("graphic-{label}"),
                MatroidOracle::graphic(vertices, edges).expect("valid graphic matroid"),
            )
        }
    }
}

/// Graphs with exactly `n` edges (6 ≤ n ≤ 10).
fn graph_with_edges(n: usize) -> (&'static str, Vec<(usize, usize)>) {
    let k4 = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    match n {
        6 => ("k4", k4),
        7 => ("k4-pendant", [k4, vec![(3, 4)]].concat()),
        8 => (
            "wheel4",
            vec![
                (0, 1),
                (0, 2),
                (0, 3),
                (0, 4),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 1),
            ],
        ),
        9 => ("k4-path", [k4, vec![(3, 4), (4, 5), (5, 3)]].concat()),
        _ => (
            "k5",
            vec![
                (0, 1),
                (0, 2),
                (0, 3),
                (0, 4),
                (1, 2),
                (1, 3),
                (1, 4),
                (2, 3),
                (2, 4),
                (3, 4),
            ],
        ),
    }
}

/// Random coverage sets over `items` items with element `n - 1` duplicating element 0.
fn duplicated_coverage(
    rng: &mut ChaCha8Rng,
    n: usize,
    items: usize,
) -> (Vec<f64>, Vec<Vec<usize>>) {
    let weights: Vec<f64> = (0..items).map(|_| quarter_weight(rng)).collect();
    let mut sets: Vec<Vec<usize>> = (0..n - 1)
        .map(|_| {
            let size = rng.gen_range(1..=3);
            let mut s: Vec<usize> = (0..size).map(|_| rng.gen_range(0..items)).collect();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    sets.push(sets[0].clone());
    (weights, sets)
}

fn mixed_table(h: &SetFunctionOracle, c: f64) -> Vec<f64> {
    let n = h.ground().len();
    let singles: Vec<f64> = (0..n).map(|e| h.value(ElementSet::singleton(e))).collect();
    h.ground()
        .subsets()
        .map(|s| {
            let additive: f64 = s.iter().map(|e| singles[e]).sum();
            (1.0 - c) * additive + c * h.value(s)
        })
        .collect()
}

/// The full corpus in a fixed order.
pub fn generate() -> Result<Vec<CorpusEntry>> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let mut out = Vec::new();
    fn push(label: String, f: &SetFunctionOracle, m: &MatroidOracle, out: &mut Vec<CorpusEntry>) {
        let name = format!("{:02}-{label}", out.len());
        let file = InstanceFile::from_oracles(Some(name.clone()), f, m, None);
        out.push(CorpusEntry { name, file });
    }

    for slot in 0..6 {
        let n = 6 + slot % 5;
        let f = SetFunctionOracle::modular((0..n).map(|_| quarter_weight(&mut rng)).collect())?;
        let (mlabel, m) = matroid_for(slot, n);
        push(format!("modular-n{n}-{mlabel}"), &f, &m, &mut out);
    }

    for (ci, &c) in MIXED_CURVATURES.iter().enumerate() {
        for slot in 0..6 {
            let n = 6 + (slot + ci) % 5;
            let (weights, sets) = duplicated_coverage(&mut rng, n, n + 2);
            let h = SetFunctionOracle::coverage(weights, sets)?;
            let f = SetFunctionOracle::table(n, mixed_table(&h, c))?;
            let (mlabel, m) = matroid_for(slot + ci, n);
            push(
                format!("table-k{:02}-n{n}-{mlabel}", (c * 10.0).round() as u32),
                &f,
                &m,
                &mut out,
            );
        }
    }

    for slot in 0..6 {
        let n = 6 + (slot + 3) % 5;
        let (weights, sets) = duplicated_coverage(&mut rng, n, n + 3);
        let f = SetFunctionOracle::coverage(weights, sets)?;
        let (mlabel, m) = matroid_for(slot + 1, n);
        push(format!("coverage-n{n}-{mlabel}"), &f, &m, &mut out);
    }

    for slot in 0..4 {
        let n = 6 + (slot * 2) % 5;
        let clients = 4 + slot;
        let benefits = (0..clients)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        if rng.gen_bool(0.6) {
                            quarter_weight(&mut rng)
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        let f = SetFunctionOracle::facility_location(n, benefits)?;
        let (mlabel, m) = matroid_for(slot + 2, n);
        push(format!("facility-n{n}-{mlabel}"), &f, &m, &mut out);
    }

    Ok(out)
}
