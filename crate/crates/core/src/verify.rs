//! Brute-force optima and numerical checks of the local-maximum guarantees.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matroid::{exchange_bijection, lift_bijection, LiftedSolution, MatroidOracle};
use crate::potential::{phi_f, phi_g, PotentialParams};
use crate::search::{solve_with_curvature, RunReport, SearchConfig};
use crate::set::ElementSet;
use crate::setfn::{Decomposition, SetFunction, SetFunctionOracle, REL_TOL};

/// Largest ground set for exhaustive enumeration of independent sets.
pub const BRUTE_FORCE_CAP: usize = 20;

/// Largest ground set for the exhaustive decomposition checks.
pub const DECOMPOSITION_CHECK_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteForceResult {
    pub opt_set: ElementSet,
    pub opt_value: f64,
    /// Number of independent sets visited.
    pub enumerated: u64,
}

/// Exact maximum of `f` over independent sets of `m`.
///
/// Depth-first enumeration adds elements in increasing id order and prunes a
/// branch as soon as the set becomes dependent. Ties go to the smaller set,
/// then to the lexicographically smaller member list.
pub fn brute_force_opt<F: SetFunction + ?Sized>(
    f: &F,
    m: &MatroidOracle,
) -> Result<BruteForceResult> {
    let n = f.ground().len();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::Resource(format!(
            "brute force is limited to n <= {BRUTE_FORCE_CAP}, got {n}"
        )));
    }
    if m.ground() != f.ground() {
        return Err(Error::Input(
            "function and matroid ground sets differ".into(),
        ));
    }

    struct Walk<'a, F: ?Sized> {
        f: &'a F,
        m: &'a MatroidOracle,
        n: usize,
        best: (ElementSet, f64),
        enumerated: u64,
    }

    impl<F: SetFunction + ?Sized> Walk<'_, F> {
        fn visit(&mut self, s: ElementSet, next: usize) {
            self.enumerated += 1;
            let v = self.f.value(s);
            let (best_set, best_value) = self.best;
            if v > best_value
                || (v == best_value && s.canonical_cmp(best_set) == std::cmp::Ordering::Less)
            {
                self.best = (s, v);
            }
            for e in next..self.n {
                let t = s.with(e);
                if self.m.independent(t) {
                    self.visit(t, e + 1);
                }
            }
        }
    }

    let mut walk = Walk {
        f,
        m,
        n,
        best: (ElementSet::EMPTY, f.value(ElementSet::EMPTY)),
        enumerated: 0,
    };
    walk.visit(ElementSet::EMPTY, 0);
    let (opt_set, opt_value) = walk.best;
    Ok(BruteForceResult {
        opt_set,
        opt_value,
        enumerated: walk.enumerated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

impl CheckStatus {
    fn from_bool(ok: bool) -> Self {
        if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        }
    }
}

/// Per-color quantities of an exchange check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColorDetail {
    pub color: usize,
    /// `Σ_{(u,k) ∈ S} Φ(S - (u,k) + h_j((u,k)))`.
    pub swapped_potential_sum: f64,
    /// For the linear identity: `l(π(S)) + Σ [l(π(S')) - l(π(S))] - l(OPT)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linear_identity_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaCheckReport {
    pub status: CheckStatus,
    pub lhs: f64,
    pub rhs: f64,
    /// `Σ_{(u,k) ∈ S} [Φ(S) - (1/ℓ) Σ_j Φ(S - (u,k) + h_j((u,k)))]`.
    pub bracket: f64,
    /// `Φ(S) - (1/ℓ) Σ_j Σ_{(u,k)} Φ(S - (u,k) + h_j((u,k)))`, which is
    /// `bracket - (|S| - 1)·Φ(S)` and therefore never larger.
    pub literal_bracket: f64,
    pub slack_allow: f64,
    pub tolerance: f64,
    pub reference: ElementSet,
    pub details: Vec<ColorDetail>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl LemmaCheckReport {
    pub fn pass(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    pub fn skipped(note: String) -> Self {
        LemmaCheckReport {
            status: CheckStatus::Skipped,
            lhs: f64::NAN,
            rhs: f64::NAN,
            bracket: f64::NAN,
            literal_bracket: f64::NAN,
            slack_allow: 0.0,
            tolerance: 0.0,
            reference: ElementSet::EMPTY,
            details: Vec::new(),
            note: Some(note),
        }
    }
}

/// Maximizer of `f` over `m`, padded to a base by smallest-id additions.
/// For monotone `f` the padded set is still optimal.
pub fn optimal_base<F: SetFunction + ?Sized>(f: &F, m: &MatroidOracle) -> Result<ElementSet> {
    Ok(m.complete_to_base(brute_force_opt(f, m)?.opt_set))
}

/// [`check_lemma1_against`] with `OPT` the brute-force maximizer of `g`, padded to a base.
pub fn check_lemma1<G: SetFunction + ?Sized>(
    s: &LiftedSolution,
    g: &G,
    m: &MatroidOracle,
    params: &PotentialParams,
) -> Result<LemmaCheckReport> {
    let reference = optimal_base(g, m)?;
    check_lemma1_against(s, g, m, params, reference)
}

/// Checks
///
/// ```text
/// g(π(S)) ≥ factor·g(B) + Σ_{(u,k) ∈ S} [Φ_g(S) - (1/ℓ) Σ_j Φ_g(S - (u,k) + h_j((u,k)))]
/// ```
///
/// for a colorful base `S` and a base `B`, with `h` the exchange bijection
/// `π(S) -> B`. The bracket sums the potential change of each exchange, so it
/// vanishes when every exchange is trivial and is non-negative at a local
/// maximum. The inequality holds for every base `B`, optimal or not.
pub fn check_lemma1_against<G: SetFunction + ?Sized>(
    s: &LiftedSolution,
    g: &G,
    m: &MatroidOracle,
    params: &PotentialParams,
    reference: ElementSet,
) -> Result<LemmaCheckReport> {
    if s.ell() != params.ell {
        return Err(Error::Input(format!(
            "solution has {} colors, parameters have ℓ = {}",
            s.ell(),
            params.ell
        )));
    }
    let a = s.projection();
    if a.len() != reference.len() {
        return Err(Error::Precondition(format!(
            "|π(S)| = {} differs from |OPT| = {}; the check requires bases",
            a.len(),
            reference.len()
        )));
    }
    for (name, set) in [("π(S)", a), ("OPT", reference)] {
        if !m.is_base(set) {
            return Err(Error::Precondition(format!("{name} = {set} is not a base")));
        }
    }
    let h = exchange_bijection(m, a, reference)?;
    let phi_s = phi_g(s, g, params);
    let mut details = Vec::with_capacity(params.ell);
    let mut total = 0.0;
    for j in 1..=params.ell {
        let hj = lift_bijection(&h, s, j)?;
        let mut sum = 0.0;
        for (out, inn) in &hj {
            sum += phi_g(&s.swapped(*out, *inn)?, g, params);
        }
        total += sum;
        details.push(ColorDetail {
            color: j,
            swapped_potential_sum: sum,
            linear_identity_residual: None,
        });
    }
    let bracket = a.len() as f64 * phi_s - total / params.ell as f64;
    let literal_bracket = phi_s - total / params.ell as f64;
    let lhs = g.value(a);
    let rhs = params.guarantee_factor() * g.value(reference) + bracket;
    let tolerance = REL_TOL * g.scale();
    Ok(LemmaCheckReport {
        status: CheckStatus::from_bool(lhs >= rhs - tolerance),
        lhs,
        rhs,
        bracket,
        literal_bracket,
        slack_allow: 0.0,
        tolerance,
        reference,
        details,
        note: None,
    })
}

/// Checks `g(π(S)) + l(π(S)) ≥ factor·g(OPT) + l(OPT) - r·θ` for a local-search
/// result, with `OPT` the brute-force maximizer of `f`. Also checks, for every
/// color `j`, the additive identity `l(π(S)) + Σ_{(u,k)} [l(π(S')) - l(π(S))] = l(OPT)`
/// where `S' = S - (u,k) + h_j((u,k))`.
pub fn check_lemma2(
    report: &RunReport,
    d: &Decomposition<'_>,
    m: &MatroidOracle,
    params: &PotentialParams,
    theta: f64,
) -> Result<LemmaCheckReport> {
    let f = d.f();
    if f.ground().len() > BRUTE_FORCE_CAP {
        return Ok(LemmaCheckReport::skipped(format!(
            "OPT unavailable: n = {} exceeds the brute-force cap of {BRUTE_FORCE_CAP}",
            f.ground().len()
        )));
    }
    let reference = optimal_base(f, m)?;
    check_lemma2_against(report, d, m, params, theta, reference)
}

pub fn check_lemma2_against(
    report: &RunReport,
    d: &Decomposition<'_>,
    m: &MatroidOracle,
    params: &PotentialParams,
    theta: f64,
    reference: ElementSet,
) -> Result<LemmaCheckReport> {
    let s = &report.lifted;
    let a = s.projection();
    if a.len() != reference.len() || !m.is_base(a) || !m.is_base(reference) {
        return Err(Error::Precondition(format!(
            "π(S) = {a} and OPT = {reference} must both be bases"
        )));
    }
    let g = d.g();
    let l_s = d.l_value(a);
    let l_opt = d.l_value(reference);
    let scale = d.f().scale();
    let tolerance = REL_TOL * scale;

    let h = exchange_bijection(m, a, reference)?;
    let phi_s = phi_f(s, d, params).phi_f;
    let mut details = Vec::with_capacity(params.ell);
    let mut total = 0.0;
    let mut identity_ok = true;
    for j in 1..=params.ell {
        let hj = lift_bijection(&h, s, j)?;
        let mut sum = 0.0;
        let mut linear_change = 0.0;
        for (out, inn) in &hj {
            let swapped = s.swapped(*out, *inn)?;
            sum += phi_f(&swapped, d, params).phi_f;
            linear_change += d.l_value(swapped.projection()) - l_s;
        }
        total += sum;
        let residual = l_s + linear_change - l_opt;
        identity_ok &= residual.abs() <= tolerance;
        details.push(ColorDetail {
            color: j,
            swapped_potential_sum: sum,
            linear_identity_residual: Some(residual),
        });
    }
    let bracket = a.len() as f64 * phi_s - total / params.ell as f64;
    let literal_bracket = phi_s - total / params.ell as f64;
    let lhs = g.value(a) + l_s;
    let rhs = params.guarantee_factor() * g.value(reference) + l_opt;
    let slack_allow = m.rank() as f64 * theta;
    let holds = lhs >= rhs - slack_allow - tolerance;
    Ok(LemmaCheckReport {
        status: CheckStatus::from_bool(holds && identity_ok),
        lhs,
        rhs,
        bracket,
        literal_bracket,
        slack_allow,
        tolerance,
        reference,
        details,
        note: (!report.converged).then(|| "search hit max_iterations before converging".into()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub property: &'static str,
    pub sets: Vec<ElementSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element: Option<usize>,
    /// How far the inequality or identity is off.
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionCheck {
    pub status: CheckStatus,
    pub subsets_checked: u64,
    pub violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl DecompositionCheck {
    pub fn pass(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    pub fn skipped(note: String) -> Self {
        DecompositionCheck {
            status: CheckStatus::Skipped,
            subsets_checked: 0,
            violations: Vec::new(),
            note: Some(note),
        }
    }
}

/// Cap on the number of violations recorded per property.
const MAX_REPORTED: usize = 16;

/// Exhaustive check of `g + l = f`, `g` monotone, `g` submodular and
/// `g ≤ κ·f` (the last only when the split came from a curvature).
pub fn check_decomposition(
    f: &SetFunctionOracle,
    d: &Decomposition<'_>,
) -> Result<DecompositionCheck> {
    let ground = f.ground();
    if ground.len() > DECOMPOSITION_CHECK_CAP {
        return Err(Error::Resource(format!(
            "decomposition checks are limited to n <= {DECOMPOSITION_CHECK_CAP}, got {}",
            ground.len()
        )));
    }
    let g = d.g();
    let scale = f.scale();
    let loose = REL_TOL * scale;
    let tight = 1e-12 * scale;
    let mut violations: Vec<Violation> = Vec::new();
    let record = |v: &mut Vec<Violation>, viol: Violation| {
        if v.iter().filter(|x| x.property == viol.property).count() < MAX_REPORTED {
            v.push(viol);
        }
    };

    for s in ground.subsets() {
        let gap = (g.value(s) + d.l_value(s) - f.value(s)).abs();
        if gap > tight {
            record(
                &mut violations,
                Violation {
                    property: "identity",
                    sets: vec![s],
                    element: None,
                    amount: gap,
                },
            );
        }
        if let Some(kappa) = d.kappa() {
            let excess = g.value(s) - kappa * f.value(s);
            if excess > loose {
                record(
                    &mut violations,
                    Violation {
                        property: "bound",
                        sets: vec![s],
                        element: None,
                        amount: excess,
                    },
                );
            }
        }
        for e in ground.full().difference(s).iter() {
            let gain = g.value(s.with(e)) - g.value(s);
            if gain < -loose {
                record(
                    &mut violations,
                    Violation {
                        property: "monotone",
                        sets: vec![s],
                        element: Some(e),
                        amount: -gain,
                    },
                );
            }
        }
        for t in ground.subsets().filter(|t| t.mask() > s.mask()) {
            let deficit =
                g.value(s.union(t)) + g.value(s.intersection(t)) - g.value(s) - g.value(t);
            if deficit > loose {
                record(
                    &mut violations,
                    Violation {
                        property: "submodular",
                        sets: vec![s, t],
                        element: None,
                        amount: deficit,
                    },
                );
            }
        }
    }
    Ok(DecompositionCheck {
        status: CheckStatus::from_bool(violations.is_empty()),
        subsets_checked: 1u64 << ground.len(),
        violations,
        note: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioCheck {
    pub status: CheckStatus,
    pub f_value: f64,
    pub opt_value: f64,
    pub kappa: f64,
    /// The run's guarantee, `1 - κ/e - ε` unless ℓ was fixed.
    pub bound: f64,
    pub ratio: Option<f64>,
}

impl RatioCheck {
    pub fn pass(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

/// `f_value ≥ guarantee·OPT - 1e-9·scale` for a finished run, where the
/// guarantee is `1 - κ/e - ε` unless ℓ was fixed by the caller.
pub fn ratio_check_of(report: &RunReport, opt_value: f64, scale: f64) -> RatioCheck {
    let kappa = report.kappa.unwrap_or(1.0);
    let bound = report.guarantee;
    let holds = report.f_value >= bound * opt_value - REL_TOL * scale;
    RatioCheck {
        status: CheckStatus::from_bool(holds),
        f_value: report.f_value,
        opt_value,
        kappa,
        bound,
        ratio: (opt_value > 0.0).then(|| report.f_value / opt_value),
    }
}

/// Solves with [`solve_with_curvature`] and compares against the brute-force optimum.
pub fn check_ratio(
    f: &SetFunctionOracle,
    m: &MatroidOracle,
    cfg: &SearchConfig,
) -> Result<RatioCheck> {
    let report = solve_with_curvature(f, m, cfg)?;
    let opt = brute_force_opt(f, m)?;
    Ok(ratio_check_of(&report, opt.opt_value, f.scale()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::LiftedElement;
    use crate::search::local_search;
    use crate::setfn::{curvature, decompose};

    fn set(v: &[usize]) -> ElementSet {
        v.iter().copied().collect()
    }

    fn half_curved() -> SetFunctionOracle {
        SetFunctionOracle::table(2, vec![0.0, 1.0, 1.0, 1.5]).unwrap()
    }

    #[test]
    fn brute_force_examples() {
        let f = SetFunctionOracle::modular(vec![1.0, 2.0, 3.0]).unwrap();
        let r = brute_force_opt(&f, &MatroidOracle::uniform(3, 2).unwrap()).unwrap();
        assert_eq!((r.opt_set, r.opt_value), (set(&[1, 2]), 5.0));
        assert_eq!(r.enumerated, 7);

        let dup = SetFunctionOracle::table(2, vec![0.0, 1.0, 1.0, 1.0]).unwrap();
        let r = brute_force_opt(&dup, &MatroidOracle::uniform(2, 1).unwrap()).unwrap();
        assert_eq!((r.opt_set, r.opt_value), (set(&[0]), 1.0));

        let r = brute_force_opt(&f, &MatroidOracle::uniform(3, 0).unwrap()).unwrap();
        assert_eq!((r.opt_set, r.opt_value), (ElementSet::EMPTY, 0.0));

        let big = SetFunctionOracle::modular(vec![1.0; 21]).unwrap();
        assert!(matches!(
            brute_force_opt(&big, &MatroidOracle::uniform(21, 1).unwrap()),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn lemma1_identity_case() {
        let f = SetFunctionOracle::coverage(
            vec![1.0, 2.0, 1.0],
            vec![vec![0, 1], vec![1, 2], vec![2], vec![0]],
        )
        .unwrap();
        let m = MatroidOracle::uniform(4, 2).unwrap();
        let p = PotentialParams::new(1, 1.0, 16).unwrap();
        let opt = optimal_base(&f, &m).unwrap();
        let s = LiftedSolution::monochrome(1, opt, 1).unwrap();
        let r = check_lemma1(&s, &f, &m, &p).unwrap();
        assert!(r.bracket.abs() < 1e-15);
        assert_eq!(r.lhs, f.value(opt));
        assert!(r.pass());
    }

    #[test]
    fn lemma1_half_curved_hand_values() {
        // g = residual of the κ = 0.5 table: g{0} = g{1} = g{01} = 0.5.
        let f = half_curved();
        let d = decompose(&f, 0.5).unwrap();
        let g = d.g();
        let m = MatroidOracle::uniform(2, 1).unwrap();
        let p = PotentialParams::new(2, 1.0, 16).unwrap();
        let s = LiftedSolution::from_pairs(2, [LiftedElement::new(0, 1)]).unwrap();
        let r = check_lemma1(&s, &g, &m, &p).unwrap();
        // OPT for g is {0}; Φ_g(S) = (2/9)(α1·0.5 + α2·0.5) = (2/9)(1.25); every
        // swapped set is (0,1) or (0,2), both with the same potential.
        let phi = 2.0 / 9.0 * 1.25;
        assert_eq!(r.reference, set(&[0]));
        assert!((r.bracket - (phi - (phi + phi) / 2.0)).abs() < 1e-15);
        assert!((r.rhs - 5.0 / 9.0 * 0.5).abs() < 1e-15);
        assert_eq!(r.lhs, 0.5);
        assert!(r.pass());
    }

    #[test]
    fn lemma1_requires_bases() {
        let f = SetFunctionOracle::modular(vec![1.0, 2.0, 3.0]).unwrap();
        let m = MatroidOracle::uniform(3, 2).unwrap();
        let p = PotentialParams::new(2, 1.0, 16).unwrap();
        let s = LiftedSolution::from_pairs(2, [LiftedElement::new(0, 1)]).unwrap();
        assert!(matches!(
            check_lemma1(&s, &f, &m, &p),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn lemma2_examples() {
        for f in [
            SetFunctionOracle::modular(vec![1.0, 2.0, 3.0]).unwrap(),
            SetFunctionOracle::table(3, vec![0.0, 1.0, 1.0, 1.5, 0.5, 1.2, 1.2, 1.6]).unwrap(),
        ] {
            let m = MatroidOracle::uniform(3, 2).unwrap();
            let kappa = curvature(&f).unwrap();
            let d = decompose(&f, kappa).unwrap();
            let p = PotentialParams::new(4, 1.0, 16).unwrap();
            let (_, report) = local_search(&d, &m, &p, &SearchConfig::default()).unwrap();
            let r = check_lemma2(&report, &d, &m, &p, report.theta).unwrap();
            assert!(r.pass(), "{r:?}");
            for detail in &r.details {
                assert!(detail.linear_identity_residual.unwrap().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lemma2_reports_non_converged_runs() {
        let f = SetFunctionOracle::coverage(
            vec![1.0, 1.0, 1.0, 1.0],
            vec![vec![0], vec![0, 1], vec![1, 2, 3], vec![3]],
        )
        .unwrap();
        let m = MatroidOracle::uniform(4, 2).unwrap();
        let d = decompose(&f, curvature(&f).unwrap()).unwrap();
        let p = PotentialParams::new(2, 1.0, 16).unwrap();
        let cfg = SearchConfig {
            max_iterations: 0,
            ..Default::default()
        };
        let (_, report) = local_search(&d, &m, &p, &cfg).unwrap();
        assert!(!report.converged);
        let r = check_lemma2(&report, &d, &m, &p, report.theta).unwrap();
        assert_eq!(r.slack_allow, 2.0 * report.theta);
        assert!(r.note.is_some());
    }

    #[test]
    fn decomposition_check_examples() {
        let modular = SetFunctionOracle::modular(vec![1.0, 2.0, 3.0]).unwrap();
        let d = decompose(&modular, 0.0).unwrap();
        assert!(check_decomposition(&modular, &d).unwrap().pass());

        let f = half_curved();
        let d = decompose(&f, 0.5).unwrap();
        let r = check_decomposition(&f, &d).unwrap();
        assert!(r.pass());
        assert_eq!(r.subsets_checked, 4);

        let bad = SetFunctionOracle::table(2, vec![0.0, 1.0, 1.0, 2.5]).unwrap();
        let d = decompose(&bad, 1.0).unwrap();
        let r = check_decomposition(&bad, &d).unwrap();
        assert!(!r.pass());
        let v = r
            .violations
            .iter()
            .find(|v| v.property == "submodular")
            .unwrap();
        assert_eq!(v.sets, vec![set(&[0]), set(&[1])]);
    }

    #[test]
    fn ratio_check_examples() {
        let f = SetFunctionOracle::modular(vec![1.0, 2.0, 3.0]).unwrap();
        let m = MatroidOracle::uniform(3, 2).unwrap();
        let r = check_ratio(&f, &m, &SearchConfig::default()).unwrap();
        assert!(r.pass());
        assert_eq!(r.ratio, Some(1.0));

        let dup = SetFunctionOracle::table(2, vec![0.0, 1.0, 1.0, 1.0]).unwrap();
        let r = check_ratio(
            &dup,
            &MatroidOracle::uniform(2, 1).unwrap(),
            &SearchConfig::default(),
        )
        .unwrap();
        assert!(r.pass());
        assert!((r.bound - (1.0 - 1.0 / std::f64::consts::E - 0.1)).abs() < 1e-15);
    }
}
