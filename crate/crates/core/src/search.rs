//! Greedy initialization, non-oblivious local search guided by `Φ_f`, the
//! curvature-aware end-to-end solver, γ guessing, and an oblivious baseline.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matroid::{LiftedElement, LiftedSolution, MatroidOracle};
use crate::potential::{
    self, ell_cap_from_env, guarantee_factor, smallest_ell, PotentialParams, PotentialValue,
};
use crate::set::ElementSet;
use crate::setfn::{curvature, decompose, Decomposition, SetFunction, SetFunctionOracle, REL_TOL};

pub const DEFAULT_MAX_ITERATIONS: usize = 100_000;

/// How the submodularity ratio γ of the residual `g` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaMode {
    Fixed(f64),
    /// Try `γ = 1, (1-η), (1-η)², ...` down to `gamma_min`.
    Auto {
        gamma_min: f64,
        eta: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub epsilon: f64,
    /// Number of colors; `None` picks the smallest ℓ meeting the ε budget.
    pub ell: Option<usize>,
    pub gamma: GammaMode,
    /// Swap-improvement threshold; `None` derives `ε·f(greedy)/(4r)`.
    pub theta: Option<f64>,
    pub max_iterations: usize,
    /// Evaluate candidate swaps on the rayon pool.
    pub parallel: bool,
    pub trace: bool,
    pub ell_cap: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            epsilon: 0.1,
            ell: None,
            gamma: GammaMode::Fixed(1.0),
            theta: None,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            parallel: true,
            trace: false,
            ell_cap: ell_cap_from_env(),
        }
    }
}

impl SearchConfig {
    pub fn with_epsilon(epsilon: f64) -> Self {
        SearchConfig {
            epsilon,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Input(format!(
                "ε must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if let Some(theta) = self.theta {
            if !(theta > 0.0 && theta.is_finite()) {
                return Err(Error::Input(format!("θ must be positive, got {theta}")));
            }
        }
        Ok(())
    }
}

/// One accepted move of the local search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwapStep {
    pub out: LiftedElement,
    #[serde(rename = "in")]
    pub inn: LiftedElement,
    pub delta: f64,
    pub phi_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaTrial {
    pub gamma: f64,
    pub ell: usize,
    pub f_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    /// `π_[ℓ]` of the lifted solution.
    pub solution: ElementSet,
    pub lifted: LiftedSolution,
    pub f_value: f64,
    pub phi: PotentialValue,
    pub kappa: Option<f64>,
    pub ell: usize,
    pub gamma: f64,
    pub epsilon: f64,
    pub theta: f64,
    /// Lower bound on `f_value / OPT` implied by the run's parameters.
    pub guarantee: f64,
    pub iterations: usize,
    pub oracle_calls: u64,
    /// False when `max_iterations` stopped the search before a local maximum.
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<SwapStep>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_trials: Option<Vec<GammaTrial>>,
}

/// Greedy base: repeatedly add the feasible element with the largest
/// marginal (smallest id on ties); once no marginal is positive, complete to
/// a base by smallest-id additions.
pub fn greedy<F: SetFunction + ?Sized>(f: &F, m: &MatroidOracle) -> ElementSet {
    let n = f.ground().len();
    let mut s = ElementSet::EMPTY;
    loop {
        let base = f.value(s);
        let mut best: Option<(usize, f64)> = None;
        for e in 0..n {
            if s.contains(e) || !m.independent(s.with(e)) {
                continue;
            }
            let gain = f.value(s.with(e)) - base;
            if best.is_none_or(|(_, b)| gain > b) {
                best = Some((e, gain));
            }
        }
        match best {
            Some((e, gain)) if gain > 0.0 => s = s.with(e),
            _ => return m.complete_to_base(s),
        }
    }
}

/// `ε·LB/(4r)`, with a tolerance-sized fallback when `LB` or `r` vanish.
pub fn derive_theta(epsilon: f64, lower_bound: f64, rank: usize, scale: f64) -> f64 {
    if lower_bound > 0.0 && rank > 0 {
        epsilon * lower_bound / (4.0 * rank as f64)
    } else {
        epsilon * REL_TOL * scale / 4.0
    }
}

/// All swaps `(out, in)` keeping `S` a colorful independent set of the lifted
/// matroid, in increasing `(out, in)` order. Recolorings are included.
pub fn feasible_swaps(
    s: &LiftedSolution,
    m: &MatroidOracle,
) -> Vec<(LiftedElement, LiftedElement)> {
    let n = m.ground().len();
    let ell = s.ell();
    let projection = s.projection();
    let mut out = Vec::new();
    for leaving in s.pairs() {
        let rest = projection.without(leaving.element);
        for e in 0..n {
            let admissible = if e == leaving.element {
                true
            } else {
                !projection.contains(e) && m.independent(rest.with(e))
            };
            if !admissible {
                continue;
            }
            for color in 1..=ell {
                let entering = LiftedElement::new(e, color);
                if entering != leaving {
                    out.push((leaving, entering));
                }
            }
        }
    }
    out
}

fn lifted_start(m: &MatroidOracle, ell: usize, start: ElementSet) -> Result<LiftedSolution> {
    let mut s = LiftedSolution::monochrome(ell, start, 1)?;
    let completed = m.complete_to_base(start);
    for e in completed.difference(start).iter() {
        s.insert(LiftedElement::new(e, 1))?;
    }
    Ok(s)
}

/// Best-improvement local search on colorful bases of the lifted matroid,
/// guided by `Φ_f`. Stops at an approximate local maximum: no feasible swap
/// raises `Φ_f` by more than θ.
pub fn local_search(
    d: &Decomposition<'_>,
    m: &MatroidOracle,
    params: &PotentialParams,
    cfg: &SearchConfig,
) -> Result<(LiftedSolution, RunReport)> {
    cfg.validate()?;
    let f = d.f();
    if f.ground() != m.ground() {
        return Err(Error::Input(format!(
            "function has {} elements but the matroid has {}",
            f.ground().len(),
            m.ground().len()
        )));
    }
    let calls_before = f.eval_count();

    let start = greedy(f, m);
    let lower_bound = f.value(start);
    let rank = m.rank();
    let theta = cfg
        .theta
        .unwrap_or_else(|| derive_theta(cfg.epsilon, lower_bound, rank, f.scale()));

    let mut s = lifted_start(m, params.ell, start)?;
    let mut phi = potential::phi_f(&s, d, params).phi_f;
    let mut trace = cfg.trace.then(Vec::new);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_iterations {
        let candidates = feasible_swaps(&s, m);
        let eval = |&(out, inn): &(LiftedElement, LiftedElement)| {
            potential::swap_delta(&s, out, inn, d, params)
        };
        let deltas: Vec<f64> = if cfg.parallel {
            candidates.par_iter().map(eval).collect::<Result<_>>()?
        } else {
            candidates.iter().map(eval).collect::<Result<_>>()?
        };
        // First maximum in candidate order, so ties resolve lexicographically.
        let best =
            deltas
                .iter()
                .enumerate()
                .fold(None, |best: Option<(usize, f64)>, (i, &delta)| match best {
                    Some((_, b)) if delta <= b => best,
                    _ => Some((i, delta)),
                });
        match best {
            Some((i, delta)) if delta > theta => {
                let (out, inn) = candidates[i];
                s = s.swapped(out, inn)?;
                phi += delta;
                iterations += 1;
                if let Some(t) = trace.as_mut() {
                    t.push(SwapStep {
                        out,
                        inn,
                        delta,
                        phi_after: phi,
                    });
                }
            }
            _ => {
                converged = true;
                break;
            }
        }
    }

    let solution = s.projection();
    let report = RunReport {
        solution,
        lifted: s.clone(),
        f_value: f.value(solution),
        phi: potential::phi_f(&s, d, params),
        kappa: d.kappa(),
        ell: params.ell,
        gamma: params.gamma,
        epsilon: cfg.epsilon,
        theta,
        guarantee: guarantee_factor(params.ell, params.gamma) - cfg.epsilon / 2.0,
        iterations,
        oracle_calls: f.eval_count() - calls_before,
        converged,
        trace,
        gamma_trials: None,
    };
    Ok((s, report))
}

/// `1 - κ/e - ε`, the bound certified when ℓ comes from [`smallest_ell`].
pub fn curvature_bound(kappa: f64, epsilon: f64) -> f64 {
    1.0 - kappa / std::f64::consts::E - epsilon
}

/// `1 - κ(1 - factor(ℓ, γ)) - ε/2`, the bound certified by a run with an
/// explicit ℓ: at an approximate local maximum
/// `f(S) ≥ factor·g(OPT) + l(OPT) - rθ` with `g(OPT) ≤ κ·OPT` and `rθ ≤ (ε/4)·OPT`.
pub fn curvature_bound_for_ell(kappa: f64, ell: usize, gamma: f64, epsilon: f64) -> f64 {
    1.0 - kappa * (1.0 - guarantee_factor(ell, gamma)) - epsilon / 2.0
}

/// End-to-end solver: curvature, decomposition, ℓ selection, local search.
pub fn solve_with_curvature(
    f: &SetFunctionOracle,
    m: &MatroidOracle,
    cfg: &SearchConfig,
) -> Result<RunReport> {
    cfg.validate()?;
    let gamma = match cfg.gamma {
        GammaMode::Fixed(g) => g,
        GammaMode::Auto { .. } => 1.0,
    };
    let kappa = curvature(f)?;
    let d = decompose(f, kappa)?;
    let ell = match cfg.ell {
        Some(ell) => ell,
        None => smallest_ell(cfg.epsilon, gamma, cfg.ell_cap)?,
    };
    let params = PotentialParams::new(ell, gamma, cfg.ell_cap)?;
    let (_, mut report) = local_search(&d, m, &params, cfg)?;
    report.guarantee = match cfg.ell {
        Some(_) => curvature_bound_for_ell(kappa, ell, gamma, cfg.epsilon),
        None => curvature_bound(kappa, cfg.epsilon),
    };
    Ok(report)
}

/// `{1, (1-η), (1-η)², ...}` down to `gamma_min`.
pub fn gamma_grid(gamma_min: f64, eta: f64) -> Result<Vec<f64>> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Input(format!("η must lie in (0, 1), got {eta}")));
    }
    if gamma_min.is_nan() || gamma_min <= 0.0 || gamma_min > 1.0 {
        return Err(Error::Input(format!(
            "γ_min must lie in (0, 1] for a non-empty grid, got {gamma_min}"
        )));
    }
    let mut grid = Vec::new();
    let mut gamma = 1.0;
    while gamma >= gamma_min {
        grid.push(gamma);
        gamma *= 1.0 - eta;
    }
    Ok(grid)
}

/// Runs the local search for every γ on a geometric grid and keeps the run
/// with the largest `f` value (larger γ on ties). For residuals `g = f - l`
/// that are not submodular.
pub fn gamma_guessing_solve(
    f: &SetFunctionOracle,
    l_weights: Vec<f64>,
    m: &MatroidOracle,
    cfg: &SearchConfig,
    gamma_min: f64,
    eta: f64,
) -> Result<RunReport> {
    cfg.validate()?;
    let grid = gamma_grid(gamma_min, eta)?;
    let d = Decomposition::from_weights(f, l_weights)?;
    let calls_before = f.eval_count();
    let mut best: Option<RunReport> = None;
    let mut trials = Vec::with_capacity(grid.len());
    for gamma in grid {
        let ell = match cfg.ell {
            Some(ell) => ell,
            None => smallest_ell(cfg.epsilon, gamma, cfg.ell_cap)?,
        };
        let params = PotentialParams::new(ell, gamma, cfg.ell_cap)?;
        let (_, report) = local_search(&d, m, &params, cfg)?;
        trials.push(GammaTrial {
            gamma,
            ell,
            f_value: report.f_value,
        });
        if best.as_ref().is_none_or(|b| report.f_value > b.f_value) {
            best = Some(report);
        }
    }
    let mut report = best.expect("grid is non-empty");
    report.gamma_trials = Some(trials);
    report.oracle_calls = f.eval_count() - calls_before;
    Ok(report)
}

/// Result of a baseline heuristic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineRun {
    pub solution: ElementSet,
    pub value: f64,
    pub iterations: usize,
}

/// Single-swap local search on bases guided by `f` itself, from the
/// smallest-id base. Accepts the best swap while it gains more than
/// `1e-9·scale`; ties go to the smallest `(out, in)`.
pub fn oblivious_local_search<F: SetFunction + ?Sized>(f: &F, m: &MatroidOracle) -> BaselineRun {
    let n = f.ground().len();
    let tol = REL_TOL * f.scale();
    let mut s = m.complete_to_base(ElementSet::EMPTY);
    let mut value = f.value(s);
    let mut iterations = 0;
    while iterations < DEFAULT_MAX_ITERATIONS {
        let mut best: Option<(ElementSet, f64)> = None;
        for out in s.iter() {
            let rest = s.without(out);
            for inn in 0..n {
                if s.contains(inn) || !m.independent(rest.with(inn)) {
                    continue;
                }
                let next = rest.with(inn);
                let v = f.value(next);
                if best.is_none_or(|(_, b)| v > b) {
                    best = Some((next, v));
                }
            }
        }
        match best {
            Some((next, v)) if v - value > tol => {
                s = next;
                value = v;
                iterations += 1;
            }
            _ => break,
        }
    }
    BaselineRun {
        solution: s,
        value,
        iterations,
    }
}

pub fn oblivious_local_search_baseline<F: SetFunction + ?Sized>(
    f: &F,
    m: &MatroidOracle,
) -> ElementSet {
    oblivious_local_search(f, m).solution
}
