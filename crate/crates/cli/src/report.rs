use curvmax_core::search::{GammaTrial, SwapStep};
use curvmax_core::verify::{DecompositionCheck, LemmaCheckReport, RatioCheck};
use curvmax_core::{ElementSet, LiftedSolution, RunReport};
use serde::Serialize;

/// JSON report written by `solve` and `verify`.
#[derive(Debug, Clone, Serialize)]
pub struct ReportFile {
    pub instance: String,
    pub solution: ElementSet,
    pub lifted: LiftedSolution,
    pub f_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt_set: Option<ElementSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    /// `null` when a caller-supplied additive part replaces the curvature split.
    pub kappa: Option<f64>,
    pub ell: usize,
    pub gamma: f64,
    pub epsilon: f64,
    pub theta: f64,
    pub guarantee_bound: f64,
    pub phi: f64,
    pub iterations: usize,
    pub converged: bool,
    pub oracle_calls: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<SwapStep>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_trials: Option<Vec<GammaTrial>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checks: Option<Checks>,
}

impl ReportFile {
    pub fn from_run(instance: String, run: RunReport, warnings: Vec<String>) -> Self {
        ReportFile {
            instance,
            solution: run.solution,
            lifted: run.lifted,
            f_value: run.f_value,
            opt_value: None,
            opt_set: None,
            ratio: None,
            kappa: run.kappa,
            ell: run.ell,
            gamma: run.gamma,
            epsilon: run.epsilon,
            theta: run.theta,
            guarantee_bound: run.guarantee,
            phi: run.phi.phi_f,
            iterations: run.iterations,
            converged: run.converged,
            oracle_calls: run.oracle_calls,
            wall_time_ms: None,
            warnings,
            trace: run.trace,
            gamma_trials: run.gamma_trials,
            checks: None,
        }
    }

    /// Records the optimum; `ratio` is `f_value / opt_value`, or 1 when both are 0.
    pub fn set_opt(&mut self, opt_set: ElementSet, opt_value: f64) {
        self.opt_set = Some(opt_set);
        self.opt_value = Some(opt_value);
        self.ratio = Some(ratio(self.f_value, opt_value));
    }
}

pub fn ratio(value: f64, opt: f64) -> f64 {
    if opt > 0.0 {
        value / opt
    } else {
        1.0
    }
}

/// JSON report written by `opt`.
#[derive(Debug, Clone, Serialize)]
pub struct OptReport {
    pub instance: String,
    pub opt_set: ElementSet,
    pub opt_value: f64,
    pub enumerated: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Checks {
    pub all_pass: bool,
    pub lemma1: LemmaCheckReport,
    pub lemma2: LemmaCheckReport,
    pub decomposition: DecompositionCheck,
    pub ratio: RatioCheck,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}
