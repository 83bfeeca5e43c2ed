//! Value oracles for monotone set functions, curvature, submodularity ratio
//! and the split `f = g + l` into a curved part and an additive part.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::set::{ElementSet, GroundSet};

/// Relative tolerance for floating-point comparisons of oracle values.
pub const REL_TOL: f64 = 1e-9;

/// Largest ground set accepted by the table-backed oracle.
pub const MAX_TABLE_GROUND: usize = 20;

/// Default cap on `n` for the exhaustive submodularity-ratio computation.
pub const DEFAULT_RATIO_CAP: usize = 12;

/// Read access to a set function `f: 2^E -> R`.
pub trait SetFunction: Sync {
    fn ground(&self) -> GroundSet;

    /// `f(S)` without range checks; `s` must lie inside the ground set.
    fn value(&self, s: ElementSet) -> f64;

    fn eval(&self, s: ElementSet) -> Result<f64> {
        self.ground().check(s)?;
        Ok(self.value(s))
    }

    /// `f(S + e) - f(S)`.
    fn marginal(&self, e: usize, s: ElementSet) -> Result<f64> {
        let ground = self.ground();
        if e >= ground.len() {
            return Err(Error::Input(format!(
                "element {e} is outside the ground set"
            )));
        }
        ground.check(s)?;
        if s.contains(e) {
            return Err(Error::Input(format!("element {e} is already in {s}")));
        }
        Ok(self.value(s.with(e)) - self.value(s))
    }

    /// Largest singleton value, or 1 when every singleton is zero. Used to
    /// scale absolute tolerances.
    fn scale(&self) -> f64 {
        let max = (0..self.ground().len())
            .map(|e| self.value(ElementSet::singleton(e)))
            .fold(0.0f64, f64::max);
        if max > 0.0 {
            max
        } else {
            1.0
        }
    }
}

/// The parametric families a [`SetFunctionOracle`] can represent.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionKind {
    /// `f(S) = sum of weights[e] for e in S`.
    Modular { weights: Vec<f64> },
    /// Weighted coverage: element `e` covers the universe items `sets[e]`.
    Coverage {
        item_weights: Vec<f64>,
        sets: Vec<Vec<usize>>,
    },
    /// `f(S) = sum over clients c of max over i in S of benefits[c][i]`.
    FacilityLocation { benefits: Vec<Vec<f64>> },
    /// Explicit table indexed by subset bitmask.
    Table { values: Vec<f64> },
}

impl FunctionKind {
    pub fn name(&self) -> &'static str {
        match self {
            FunctionKind::Modular { .. } => "modular",
            FunctionKind::Coverage { .. } => "coverage",
            FunctionKind::FacilityLocation { .. } => "facility_location",
            FunctionKind::Table { .. } => "table",
        }
    }

    fn raw(&self, s: ElementSet) -> f64 {
        match self {
            FunctionKind::Modular { weights } => s.iter().map(|e| weights[e]).sum(),
            FunctionKind::Coverage { item_weights, sets } => {
                let mut covered = vec![false; item_weights.len()];
                for e in s.iter() {
                    for &item in &sets[e] {
                        covered[item] = true;
                    }
                }
                covered
                    .iter()
                    .zip(item_weights)
                    .filter(|(c, _)| **c)
                    .map(|(_, w)| w)
                    .sum()
            }
            FunctionKind::FacilityLocation { benefits } => benefits
                .iter()
                .map(|row| s.iter().map(|i| row[i]).fold(0.0f64, f64::max))
                .sum(),
            FunctionKind::Table { values } => values[s.mask() as usize],
        }
    }
}

/// Memoizing value oracle. Values are normalized so that `f(∅) = 0`.
///
/// The memo is shared between threads. The evaluation counter counts distinct
/// sets inserted into the memo, so it is exact and independent of scheduling.
#[derive(Debug)]
pub struct SetFunctionOracle {
    ground: GroundSet,
    kind: FunctionKind,
    offset: f64,
    memo: RwLock<HashMap<u64, f64>>,
    evals: AtomicU64,
}

impl Clone for SetFunctionOracle {
    /// Clones parameters only; the clone starts with an empty memo and a zero counter.
    fn clone(&self) -> Self {
        SetFunctionOracle {
            ground: self.ground,
            kind: self.kind.clone(),
            offset: self.offset,
            memo: RwLock::new(HashMap::new()),
            evals: AtomicU64::new(0),
        }
    }
}

impl SetFunctionOracle {
    /// Builds an oracle after checking parameter shapes and non-negativity.
    pub fn new(n: usize, kind: FunctionKind) -> Result<Self> {
        let ground = GroundSet::new(n)?;
        validate_kind(n, &kind)?;
        let offset = kind.raw(ElementSet::EMPTY);
        Ok(SetFunctionOracle {
            ground,
            kind,
            offset,
            memo: RwLock::new(HashMap::new()),
            evals: AtomicU64::new(0),
        })
    }

    pub fn modular(weights: Vec<f64>) -> Result<Self> {
        Self::new(weights.len(), FunctionKind::Modular { weights })
    }

    pub fn coverage(item_weights: Vec<f64>, sets: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(sets.len(), FunctionKind::Coverage { item_weights, sets })
    }

    /// `benefits[c][i]` is the value facility `i` provides to client `c`.
    pub fn facility_location(n: usize, benefits: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(n, FunctionKind::FacilityLocation { benefits })
    }

    pub fn table(n: usize, values: Vec<f64>) -> Result<Self> {
        Self::new(n, FunctionKind::Table { values })
    }

    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    /// Amount subtracted from every raw value so that `f(∅) = 0`.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Number of distinct sets evaluated since construction or the last reset.
    pub fn eval_count(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }

    /// Clears the memo and zeroes the evaluation counter.
    pub fn reset(&self) {
        self.memo.write().expect("memo lock poisoned").clear();
        self.evals.store(0, Ordering::Relaxed);
    }

    /// Materializes all `2^n` normalized values (n ≤ 20).
    pub fn to_table(&self) -> Result<Vec<f64>> {
        if self.ground.len() > MAX_TABLE_GROUND {
            return Err(Error::Resource(format!(
                "cannot tabulate a function on {} elements (limit {MAX_TABLE_GROUND})",
                self.ground.len()
            )));
        }
        Ok(self.ground.subsets().map(|s| self.value(s)).collect())
    }
}

impl SetFunction for SetFunctionOracle {
    fn ground(&self) -> GroundSet {
        self.ground
    }

    fn value(&self, s: ElementSet) -> f64 {
        if s.is_empty() {
            return 0.0;
        }
        if let Some(v) = self.memo.read().expect("memo lock poisoned").get(&s.mask()) {
            return *v;
        }
        let v = self.kind.raw(s) - self.offset;
        let mut memo = self.memo.write().expect("memo lock poisoned");
        if memo.insert(s.mask(), v).is_none() {
            self.evals.fetch_add(1, Ordering::Relaxed);
        }
        v
    }
}

fn check_weights(location: &str, weights: &[f64]) -> Result<()> {
    for (i, w) in weights.iter().enumerate() {
        if !w.is_finite() || *w < 0.0 {
            return Err(Error::validation(
                format!("{location}[{i}]"),
                format!("weight must be finite and non-negative, got {w}"),
            ));
        }
    }
    Ok(())
}

fn validate_kind(n: usize, kind: &FunctionKind) -> Result<()> {
    match kind {
        FunctionKind::Modular { weights } => {
            if weights.len() != n {
                return Err(Error::validation(
                    "function.weights",
                    format!("expected {n} weights, got {}", weights.len()),
                ));
            }
            check_weights("function.weights", weights)
        }
        FunctionKind::Coverage { item_weights, sets } => {
            check_weights("function.item_weights", item_weights)?;
            if sets.len() != n {
                return Err(Error::validation(
                    "function.sets",
                    format!("expected {n} sets, got {}", sets.len()),
                ));
            }
            for (e, set) in sets.iter().enumerate() {
                if let Some(item) = set.iter().find(|&&i| i >= item_weights.len()) {
                    return Err(Error::validation(
                        format!("function.sets[{e}]"),
                        format!("item {item} has no weight ({} items)", item_weights.len()),
                    ));
                }
            }
            Ok(())
        }
        FunctionKind::FacilityLocation { benefits } => {
            for (c, row) in benefits.iter().enumerate() {
                let loc = format!("function.benefits[{c}]");
                if row.len() != n {
                    return Err(Error::validation(
                        loc,
                        format!("expected {n} facility benefits, got {}", row.len()),
                    ));
                }
                check_weights(&loc, row)?;
            }
            Ok(())
        }
        FunctionKind::Table { values } => {
            if n > MAX_TABLE_GROUND {
                return Err(Error::validation(
                    "ground_set",
                    format!("table functions support at most {MAX_TABLE_GROUND} elements"),
                ));
            }
            if values.len() != 1usize << n {
                return Err(Error::validation(
                    "function.values",
                    format!("expected {} entries, got {}", 1usize << n, values.len()),
                ));
            }
            if let Some(i) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::validation(
                    format!("function.values[\"{i}\"]"),
                    "value must be finite",
                ));
            }
            Ok(())
        }
    }
}

/// Curvature `1 - min_e f(e | E - e) / f(e)` over elements with `f(e) > 0`,
/// clamped to `[0, 1]`.
pub fn curvature<F: SetFunction + ?Sized>(f: &F) -> Result<f64> {
    let full = f.ground().full();
    let f_full = f.value(full);
    let mut min_ratio = f64::INFINITY;
    for e in full.iter() {
        let single = f.value(ElementSet::singleton(e));
        if single <= 0.0 {
            continue;
        }
        let last = f_full - f.value(full.without(e));
        min_ratio = min_ratio.min(last / single);
    }
    if !min_ratio.is_finite() {
        return Err(Error::Degenerate(
            "every singleton value is zero; curvature is undefined".into(),
        ));
    }
    Ok((1.0 - min_ratio).clamp(0.0, 1.0))
}

/// Submodularity ratio by exhaustive enumeration of `T ⊆ S`, `e ∉ S`.
///
/// Triples whose marginal on `S` is zero (within tolerance) or whose marginal on `T`
/// already dominates are skipped; `T = S` keeps the result at most 1.
pub fn submodularity_ratio_bruteforce<F: SetFunction + ?Sized>(f: &F, cap: usize) -> Result<f64> {
    let ground = f.ground();
    if ground.len() > cap {
        return Err(Error::Resource(format!(
            "submodularity ratio enumeration limited to n <= {cap}, got {}",
            ground.len()
        )));
    }
    let tol = REL_TOL * f.scale();
    let full = ground.full();
    let mut gamma = 1.0f64;
    for s in ground.subsets() {
        let fs = f.value(s);
        for e in full.difference(s).iter() {
            let m_s = f.value(s.with(e)) - fs;
            if m_s <= tol {
                continue;
            }
            for t in s.subsets() {
                let m_t = f.value(t.with(e)) - f.value(t);
                if m_t < m_s - tol {
                    gamma = gamma.min(m_t / m_s);
                }
            }
        }
    }
    Ok(gamma.max(0.0))
}

/// A pair `(S, T)` with `f(S) + f(T) < f(S ∪ T) + f(S ∩ T)` beyond tolerance.
pub fn find_submodularity_violation<F: SetFunction + ?Sized>(
    f: &F,
) -> Option<(ElementSet, ElementSet)> {
    let tol = REL_TOL * f.scale();
    let ground = f.ground();
    for s in ground.subsets() {
        for t in ground.subsets() {
            if t.mask() < s.mask() {
                continue;
            }
            let lhs = f.value(s) + f.value(t);
            let rhs = f.value(s.union(t)) + f.value(s.intersection(t));
            if lhs < rhs - tol {
                return Some((s, t));
            }
        }
    }
    None
}

/// An `(e, S)` with `f(S + e) < f(S)` beyond tolerance.
pub fn find_monotonicity_violation<F: SetFunction + ?Sized>(f: &F) -> Option<(usize, ElementSet)> {
    let tol = REL_TOL * f.scale();
    let ground = f.ground();
    let full = ground.full();
    for s in ground.subsets() {
        let fs = f.value(s);
        for e in full.difference(s).iter() {
            if f.value(s.with(e)) - fs < -tol {
                return Some((e, s));
            }
        }
    }
    None
}

/// `f = g + l` with `l` additive and `g = f - l`.
#[derive(Debug, Clone)]
pub struct Decomposition<'a> {
    f: &'a SetFunctionOracle,
    kappa: Option<f64>,
    l_weights: Vec<f64>,
}

impl<'a> Decomposition<'a> {
    /// Curvature split: `l(e) = (1 - kappa) f({e})`.
    pub fn from_curvature(f: &'a SetFunctionOracle, kappa: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&kappa) {
            return Err(Error::Input(format!(
                "curvature must lie in [0, 1], got {kappa}"
            )));
        }
        let l_weights = (0..f.ground().len())
            .map(|e| (1.0 - kappa) * f.value(ElementSet::singleton(e)))
            .collect();
        Ok(Decomposition {
            f,
            kappa: Some(kappa),
            l_weights,
        })
    }

    /// Split with caller-chosen additive weights; `g` need not be submodular.
    pub fn from_weights(f: &'a SetFunctionOracle, l_weights: Vec<f64>) -> Result<Self> {
        if l_weights.len() != f.ground().len() {
            return Err(Error::Input(format!(
                "expected {} additive weights, got {}",
                f.ground().len(),
                l_weights.len()
            )));
        }
        check_weights("linear_weights", &l_weights).map_err(|e| Error::Input(e.to_string()))?;
        Ok(Decomposition {
            f,
            kappa: None,
            l_weights,
        })
    }

    pub fn f(&self) -> &'a SetFunctionOracle {
        self.f
    }

    /// Curvature this split was built from; `None` for caller-supplied weights.
    pub fn kappa(&self) -> Option<f64> {
        self.kappa
    }

    pub fn l_weights(&self) -> &[f64] {
        &self.l_weights
    }

    pub fn l_value(&self, s: ElementSet) -> f64 {
        s.iter().map(|e| self.l_weights[e]).sum()
    }

    pub fn g_value(&self, s: ElementSet) -> f64 {
        self.f.value(s) - self.l_value(s)
    }

    /// The residual `g` as a standalone oracle.
    pub fn g(&self) -> Residual<'_> {
        Residual {
            f: self.f,
            l_weights: &self.l_weights,
        }
    }
}

/// `g(S) = f(S) - sum of l_weights over S`.
#[derive(Debug, Clone, Copy)]
pub struct Residual<'a> {
    f: &'a SetFunctionOracle,
    l_weights: &'a [f64],
}

impl SetFunction for Residual<'_> {
    fn ground(&self) -> GroundSet {
        self.f.ground()
    }

    fn value(&self, s: ElementSet) -> f64 {
        self.f.value(s) - s.iter().map(|e| self.l_weights[e]).sum::<f64>()
    }

    fn scale(&self) -> f64 {
        self.f.scale()
    }
}

pub fn decompose(f: &SetFunctionOracle, kappa: f64) -> Result<Decomposition<'_>> {
    Decomposition::from_curvature(f, kappa)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> ElementSet {
        v.iter().copied().collect()
    }

    fn half_curved() -> SetFunctionOracle {
        SetFunctionOracle::table(2, vec![0.0, 1.0, 1.0, 1.5]).unwrap()
    }

    fn sample_coverage() -> SetFunctionOracle {
        SetFunctionOracle::coverage(vec![1.0, 1.0], vec![vec![0, 1], vec![1]]).unwrap()
    }

    #[test]
    fn eval_examples() {
        let f = SetFunctionOracle::modular(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(f.eval(set(&[0, 2])).unwrap(), 4.0);
        assert_eq!(f.eval(ElementSet::EMPTY).unwrap(), 0.0);
        let c = sample_coverage();
        assert_eq!(c.eval(set(&[1])).unwrap(), 1.0);
        assert_eq!(c.eval(set(&[0, 1])).unwrap(), 2.0);
        assert!(f.eval(set(&[3])).is_err());
    }

    #[test]
    fn memo_counts_distinct_sets() {
        let f = SetFunctionOracle::modular(vec![1.0, 2.0, 3.0]).unwrap();
        f.eval(set(&[0])).unwrap();
        f.eval(set(&[0])).unwrap();
        f.eval(set(&[0, 1])).unwrap();
        f.eval(ElementSet::EMPTY).unwrap();
        assert_eq!(f.eval_count(), 2);
        f.reset();
        assert_eq!(f.eval_count(), 0);
        assert_eq!(f.clone().eval_count(), 0);
    }

    #[test]
    fn marginal_examples() {
        let f = SetFunctionOracle::modular(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(f.marginal(1, set(&[0])).unwrap(), 2.0);
        assert_eq!(sample_coverage().marginal(1, set(&[0])).unwrap(), 0.0);
        assert!(matches!(f.marginal(0, set(&[0])), Err(Error::Input(_))));
        let s = set(&[2]);
        assert_eq!(
            f.marginal(0, s).unwrap(),
            f.eval(s.with(0)).unwrap() - f.eval(s).unwrap()
        );
    }

    #[test]
    fn table_normalization_shift() {
        let f = SetFunctionOracle::table(1, vec![0.3, 1.3]).unwrap();
        assert_eq!(f.offset(), 0.3);
        assert_eq!(f.eval(ElementSet::EMPTY).unwrap(), 0.0);
        assert!((f.eval(set(&[0])).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn curvature_examples() {
        let modular = SetFunctionOracle::modular(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(curvature(&modular).unwrap(), 0.0);
        assert_eq!(curvature(&half_curved()).unwrap(), 0.5);
        let dup = SetFunctionOracle::table(2, vec![0.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(curvature(&dup).unwrap(), 1.0);
        let zero = SetFunctionOracle::modular(vec![0.0, 0.0]).unwrap();
        assert!(matches!(curvature(&zero), Err(Error::Degenerate(_))));
    }

    #[test]
    fn submodularity_ratio_examples() {
        assert_eq!(
            submodularity_ratio_bruteforce(&half_curved(), 12).unwrap(),
            1.0
        );
        let modular = SetFunctionOracle::modular(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(submodularity_ratio_bruteforce(&modular, 12).unwrap(), 1.0);
        let super_ = SetFunctionOracle::table(2, vec![0.0, 1.0, 1.0, 2.5]).unwrap();
        let gamma = submodularity_ratio_bruteforce(&super_, 12).unwrap();
        assert!((gamma - 2.0 / 3.0).abs() < 1e-12);
        let big = SetFunctionOracle::modular(vec![1.0; 13]).unwrap();
        assert!(matches!(
            submodularity_ratio_bruteforce(&big, DEFAULT_RATIO_CAP),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn decomposition_examples() {
        let modular = SetFunctionOracle::modular(vec![1.0, 2.0, 3.0]).unwrap();
        let d = decompose(&modular, 0.0).unwrap();
        assert!(modular
            .ground()
            .subsets()
            .all(|s| d.g_value(s).abs() < 1e-12));
        assert!(modular
            .ground()
            .subsets()
            .all(|s| d.l_value(s) == modular.value(s)));

        let f = half_curved();
        let d = decompose(&f, 1.0).unwrap();
        assert!(d.l_weights().iter().all(|&w| w == 0.0));

        let d = decompose(&f, 0.5).unwrap();
        assert_eq!(d.l_weights(), &[0.5, 0.5]);
        let g = d.g();
        assert_eq!(g.value(set(&[0])), 0.5);
        assert_eq!(g.value(set(&[1])), 0.5);
        assert_eq!(g.value(set(&[0, 1])), 0.5);

        assert!(matches!(decompose(&f, 1.5), Err(Error::Input(_))));
        assert!(matches!(decompose(&f, -0.1), Err(Error::Input(_))));
    }

    #[test]
    fn violations_are_located() {
        let super_ = SetFunctionOracle::table(2, vec![0.0, 1.0, 1.0, 2.5]).unwrap();
        let (s, t) = find_submodularity_violation(&super_).unwrap();
        assert_eq!((s, t), (set(&[0]), set(&[1])));
        let decreasing = SetFunctionOracle::table(2, vec![0.0, 2.0, 1.0, 1.0]).unwrap();
        assert_eq!(
            find_monotonicity_violation(&decreasing),
            Some((1, set(&[0])))
        );
        assert!(find_monotonicity_violation(&half_curved()).is_none());
    }

    #[test]
    fn shape_validation() {
        assert!(SetFunctionOracle::modular(vec![1.0, -1.0]).is_err());
        assert!(SetFunctionOracle::table(2, vec![0.0; 3]).is_err());
        assert!(SetFunctionOracle::coverage(vec![1.0], vec![vec![1]]).is_err());
        assert!(SetFunctionOracle::facility_location(2, vec![vec![1.0]]).is_err());
    }

    #[test]
    fn facility_location_value() {
        let f =
            SetFunctionOracle::facility_location(3, vec![vec![3.0, 1.0, 0.0], vec![0.0, 2.0, 2.0]])
                .unwrap();
        assert_eq!(f.value(set(&[0])), 3.0);
        assert_eq!(f.value(set(&[0, 1])), 5.0);
        assert_eq!(f.value(set(&[1, 2])), 3.0);
    }
}
