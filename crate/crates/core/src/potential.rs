//! The non-oblivious potential over colorful lifted solutions.
//!
//! For `ℓ` colors and ratio parameter `γ`, with `c = 1 + γ³/ℓ`,
//!
//! ```text
//! α_i      = c^(i-1) / C(ℓ-1, i-1)                        i = 1..ℓ
//! Φ_g(S)   = (γ/ℓ) c^(-ℓ) Σ_{∅ ≠ J ⊆ [ℓ]} α_|J| g(π_J(S))
//! Φ_f(S)   = Φ_g(S) + l(π_[ℓ](S))
//! ```
//!
//! The `J = ∅` term is skipped: `g(∅) = 0` and `α_0` is not defined.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matroid::{LiftedElement, LiftedSolution};
use crate::set::ElementSet;
use crate::setfn::{Decomposition, SetFunction};

/// Default upper bound on ℓ; a Φ evaluation sums `2^ℓ` terms.
pub const DEFAULT_ELL_CAP: usize = 16;

/// Environment variable overriding [`DEFAULT_ELL_CAP`].
pub const ELL_CAP_ENV: &str = "CURVMAX_ELL_CAP";

/// ℓ cap from `CURVMAX_ELL_CAP`, falling back to [`DEFAULT_ELL_CAP`].
pub fn ell_cap_from_env() -> usize {
    std::env::var(ELL_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&c| (1..=31).contains(&c))
        .unwrap_or(DEFAULT_ELL_CAP)
}

fn check_params(ell: usize, gamma: f64) -> Result<()> {
    if ell == 0 {
        return Err(Error::Input("ℓ must be at least 1".into()));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::Input(format!("γ must lie in (0, 1], got {gamma}")));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `[α_1, .., α_ℓ]`.
pub fn alpha_coefficients(ell: usize, gamma: f64) -> Result<Vec<f64>> {
    check_params(ell, gamma)?;
    let c = 1.0 + gamma.powi(3) / ell as f64;
    Ok((1..=ell)
        .map(|i| c.powi(i as i32 - 1) / binomial(ell - 1, i - 1))
        .collect())
}

/// `1 - (1 + γ³/ℓ)^(-ℓ)`, the factor multiplying `g(OPT)` at a local maximum.
pub fn guarantee_factor(ell: usize, gamma: f64) -> f64 {
    let ell_f = ell as f64;
    1.0 - (1.0 + gamma.powi(3) / ell_f).powf(-ell_f)
}

/// Smallest ℓ whose factor is within `ε/2` of its limit `1 - e^(-γ³)`.
pub fn smallest_ell(epsilon: f64, gamma: f64, cap: usize) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Input(format!("ε must lie in (0, 1), got {epsilon}")));
    }
    check_params(1, gamma)?;
    let target = 1.0 - (-gamma.powi(3)).exp() - epsilon / 2.0;
    (1..=cap)
        .find(|&ell| guarantee_factor(ell, gamma) >= target)
        .ok_or_else(|| {
            Error::Resource(format!(
                "ε = {epsilon} needs ℓ > {cap} colors (2^ℓ potential terms); \
                 use a larger ε or raise {ELL_CAP_ENV}"
            ))
        })
}

/// Potential parameters for a fixed `(ℓ, γ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    pub ell: usize,
    pub gamma: f64,
    /// `alphas[i - 1] = α_i`.
    pub alphas: Vec<f64>,
    /// `(γ/ℓ)(1 + γ³/ℓ)^(-ℓ)`.
    pub prefactor: f64,
}

impl PotentialParams {
    pub fn new(ell: usize, gamma: f64, ell_cap: usize) -> Result<Self> {
        check_params(ell, gamma)?;
        if ell > ell_cap {
            return Err(Error::Resource(format!(
                "ℓ = {ell} exceeds the cap of {ell_cap} (2^ℓ potential terms)"
            )));
        }
        let alphas = alpha_coefficients(ell, gamma)?;
        let ell_f = ell as f64;
        let prefactor = gamma / ell_f * (1.0 + gamma.powi(3) / ell_f).powf(-ell_f);
        Ok(PotentialParams {
            ell,
            gamma,
            alphas,
            prefactor,
        })
    }

    pub fn guarantee_factor(&self) -> f64 {
        guarantee_factor(self.ell, self.gamma)
    }

    /// `α_|J|` for a color mask.
    fn alpha_of(&self, colors: u32) -> f64 {
        self.alphas[colors.count_ones() as usize - 1]
    }
}

/// The two parts of `Φ_f` and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialValue {
    pub phi_g: f64,
    pub linear_part: f64,
    pub phi_f: f64,
}

/// `Φ_g` for per-color classes that may overlap, i.e. any subset of `E × [ℓ]`.
pub fn phi_g_classes<G: SetFunction + ?Sized>(
    classes: &[ElementSet],
    g: &G,
    params: &PotentialParams,
) -> f64 {
    assert_eq!(classes.len(), params.ell, "color count differs from ℓ");
    let sum: f64 = (1u32..(1u32 << params.ell))
        .map(|colors| {
            let projected = classes
                .iter()
                .enumerate()
                .filter(|(i, _)| colors & (1 << i) != 0)
                .fold(ElementSet::EMPTY, |acc, (_, c)| acc.union(*c));
            params.alpha_of(colors) * g.value(projected)
        })
        .sum();
    params.prefactor * sum
}

/// `Φ_g(S)` by full summation over all `2^ℓ - 1` non-empty color sets.
pub fn phi_g<G: SetFunction + ?Sized>(s: &LiftedSolution, g: &G, params: &PotentialParams) -> f64 {
    phi_g_classes(s.classes(), g, params)
}

pub fn phi_f(
    s: &LiftedSolution,
    d: &Decomposition<'_>,
    params: &PotentialParams,
) -> PotentialValue {
    let phi_g = phi_g(s, &d.g(), params);
    let linear_part = d.l_value(s.projection());
    PotentialValue {
        phi_g,
        linear_part,
        phi_f: phi_g + linear_part,
    }
}

/// `Φ_f(S - out + inn) - Φ_f(S)`, summing only over color sets that contain
/// `out.color` or `inn.color`; the others see the same projection before and after.
pub fn swap_delta(
    s: &LiftedSolution,
    out: LiftedElement,
    inn: LiftedElement,
    d: &Decomposition<'_>,
    params: &PotentialParams,
) -> Result<f64> {
    let next = s.swapped(out, inn)?;
    if out == inn {
        return Ok(0.0);
    }
    let g = d.g();
    let touched = (1u32 << (out.color - 1)) | (1u32 << (inn.color - 1));
    let mut sum = 0.0;
    for colors in 1u32..(1u32 << params.ell) {
        if colors & touched == 0 {
            continue;
        }
        let before = g.value(s.project_mask(colors));
        let after = g.value(next.project_mask(colors));
        sum += params.alpha_of(colors) * (after - before);
    }
    let linear = if out.element == inn.element {
        0.0
    } else {
        d.l_weights()[inn.element] - d.l_weights()[out.element]
    };
    Ok(params.prefactor * sum + linear)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setfn::{decompose, SetFunctionOracle};

    fn pair(e: usize, c: usize) -> LiftedElement {
        LiftedElement::new(e, c)
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_coefficients(1, 1.0).unwrap(), vec![1.0]);
        assert_eq!(alpha_coefficients(2, 1.0).unwrap(), vec![1.0, 1.5]);
        let a3 = alpha_coefficients(3, 1.0).unwrap();
        assert!(close(a3[0], 1.0) && close(a3[1], 2.0 / 3.0) && close(a3[2], 16.0 / 9.0));
        assert!(alpha_coefficients(0, 1.0).is_err());
        assert!(alpha_coefficients(2, 0.0).is_err());
        assert!(alpha_coefficients(2, 1.5).is_err());
    }

    #[test]
    fn guarantee_factor_examples() {
        assert_eq!(guarantee_factor(1, 1.0), 0.5);
        assert!(close(guarantee_factor(2, 1.0), 5.0 / 9.0));
        assert!((guarantee_factor(4, 1.0) - 0.5904).abs() < 1e-12);
    }

    #[test]
    fn smallest_ell_examples() {
        assert_eq!(smallest_ell(0.1, 1.0, 16).unwrap(), 4);
        assert_eq!(smallest_ell(0.9, 1.0, 16).unwrap(), 1);
        assert!(matches!(
            smallest_ell(0.001, 1.0, 20),
            Err(Error::Resource(_))
        ));
        assert!(smallest_ell(0.0, 1.0, 16).is_err());
        assert!(smallest_ell(1.0, 1.0, 16).is_err());
    }

    #[test]
    fn params_respect_cap() {
        assert!(matches!(
            PotentialParams::new(17, 1.0, 16),
            Err(Error::Resource(_))
        ));
        let p = PotentialParams::new(2, 1.0, 16).unwrap();
        assert!(close(p.prefactor, 2.0 / 9.0));
    }

    #[test]
    fn phi_g_examples() {
        let g = SetFunctionOracle::table(2, vec![0.0, 1.0, 1.0, 1.5]).unwrap();
        let p1 = PotentialParams::new(1, 1.0, 16).unwrap();
        let s1 = LiftedSolution::from_pairs(1, [pair(0, 1), pair(1, 1)]).unwrap();
        assert!(close(phi_g(&s1, &g, &p1), 1.5 / 2.0));

        let p = PotentialParams::new(2, 1.0, 16).unwrap();
        let s = LiftedSolution::from_pairs(2, [pair(0, 1), pair(1, 2)]).unwrap();
        assert!(close(phi_g(&s, &g, &p), 8.5 / 9.0));
        let s = LiftedSolution::from_pairs(2, [pair(0, 1)]).unwrap();
        assert!(close(phi_g(&s, &g, &p), 5.0 / 9.0));
    }

    #[test]
    fn phi_f_examples() {
        let f = SetFunctionOracle::table(2, vec![0.0, 1.0, 1.0, 1.5]).unwrap();
        let p = PotentialParams::new(2, 1.0, 16).unwrap();
        let s = LiftedSolution::from_pairs(2, [pair(0, 1), pair(1, 2)]).unwrap();

        let d = decompose(&f, 0.5).unwrap();
        let v = phi_f(&s, &d, &p);
        assert!(close(v.linear_part, 1.0));
        assert!(close(v.phi_g, 3.5 / 9.0));
        assert!(close(v.phi_f, 1.0 + 3.5 / 9.0));

        let d1 = decompose(&f, 1.0).unwrap();
        let v = phi_f(&s, &d1, &p);
        assert_eq!(v.linear_part, 0.0);
        assert_eq!(v.phi_f, v.phi_g);

        let m = SetFunctionOracle::modular(vec![1.0, 2.0]).unwrap();
        let d0 = decompose(&m, 0.0).unwrap();
        let v = phi_f(&s, &d0, &p);
        assert!(v.phi_g.abs() < 1e-15);
        assert_eq!(v.linear_part, 3.0);
    }

    #[test]
    fn swap_delta_examples() {
        let f = SetFunctionOracle::table(2, vec![0.0, 1.0, 1.0, 1.5]).unwrap();
        let d = decompose(&f, 1.0).unwrap();
        let p = PotentialParams::new(2, 1.0, 16).unwrap();
        let s = LiftedSolution::from_pairs(2, [pair(0, 1)]).unwrap();
        assert_eq!(swap_delta(&s, pair(0, 1), pair(0, 1), &d, &p).unwrap(), 0.0);
        assert!(
            swap_delta(&s, pair(0, 1), pair(1, 2), &d, &p)
                .unwrap()
                .abs()
                < 1e-15
        );
        let recolor = swap_delta(&s, pair(0, 1), pair(0, 2), &d, &p).unwrap();
        let full = phi_f(&s.swapped(pair(0, 1), pair(0, 2)).unwrap(), &d, &p).phi_f
            - phi_f(&s, &d, &p).phi_f;
        assert!((recolor - full).abs() < 1e-15);
        assert!(swap_delta(&s, pair(1, 1), pair(0, 2), &d, &p).is_err());
        let two = LiftedSolution::from_pairs(2, [pair(0, 1), pair(1, 2)]).unwrap();
        assert!(swap_delta(&two, pair(0, 1), pair(1, 1), &d, &p).is_err());
    }
}
