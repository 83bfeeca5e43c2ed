//! `curvmax bench`: four algorithms per instance, one CSV row each.
//!
//! Columns: `instance, algorithm, status, value, opt_value, ratio, kappa,
//! bound, bound_met, iterations, oracle_calls, time_ms, message`. Rows are
//! ordered by instance path, then `greedy, oblivious, non_oblivious, opt`.
//! Cells that do not apply are empty.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use curvmax_core::potential::ell_cap_from_env;
use curvmax_core::search::{greedy, oblivious_local_search};
use curvmax_core::setfn::REL_TOL;
use curvmax_core::verify::brute_force_opt;
use curvmax_core::{
    curvature, load_instance, solve_with_curvature, Instance, LoadOptions, SearchConfig,
    SetFunction,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::report::ratio;
use crate::{BenchArgs, CliError, Outcome};

pub const ALGORITHMS: [&str; 4] = ["greedy", "oblivious", "non_oblivious", "opt"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub algorithm: &'static str,
    pub status: &'static str,
    pub value: Option<f64>,
    pub opt_value: Option<f64>,
    pub ratio: Option<f64>,
    pub kappa: Option<f64>,
    /// `1 - κ/e - ε` for non_oblivious, `1/(1+κ)` for greedy.
    pub bound: Option<f64>,
    pub bound_met: Option<bool>,
    pub iterations: Option<usize>,
    pub oracle_calls: Option<u64>,
    pub time_ms: Option<f64>,
    pub message: String,
}

struct Measured {
    value: f64,
    iterations: usize,
    oracle_calls: u64,
    time_ms: f64,
    bound: Option<f64>,
}

fn measure(
    inst: &Instance,
    f: impl FnOnce(&Instance) -> curvmax_core::Result<(f64, usize, Option<f64>)>,
) -> curvmax_core::Result<Measured> {
    inst.function.reset();
    let start = Instant::now();
    let (value, iterations, bound) = f(inst)?;
    Ok(Measured {
        value,
        iterations,
        oracle_calls: inst.function.eval_count(),
        time_ms: start.elapsed().as_secs_f64() * 1e3,
        bound,
    })
}

/// All four rows for one instance file.
pub fn bench_instance(path: &Path, epsilon: f64, no_timing: bool) -> Vec<BenchRow> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let blank = |algorithm: &'static str| BenchRow {
        instance: name.clone(),
        algorithm,
        status: "ok",
        value: None,
        opt_value: None,
        ratio: None,
        kappa: None,
        bound: None,
        bound_met: None,
        iterations: None,
        oracle_calls: None,
        time_ms: None,
        message: String::new(),
    };
    let inst = match load_instance(path, LoadOptions { validate: true }) {
        Ok(inst) => inst,
        Err(e) => {
            return ALGORITHMS
                .iter()
                .map(|a| BenchRow {
                    status: "error",
                    message: e.to_string(),
                    ..blank(a)
                })
                .collect()
        }
    };
    let kappa = curvature(&inst.function).ok();
    let cfg = SearchConfig {
        epsilon,
        ell_cap: ell_cap_from_env(),
        ..SearchConfig::default()
    };

    let opt = measure(&inst, |i| {
        let r = brute_force_opt(&i.function, &i.matroid)?;
        Ok((r.opt_value, r.enumerated as usize, Some(1.0)))
    });
    let greedy_run = measure(&inst, |i| {
        let s = greedy(&i.function, &i.matroid);
        Ok((i.function.value(s), s.len(), kappa.map(|k| 1.0 / (1.0 + k))))
    });
    let oblivious = measure(&inst, |i| {
        let r = oblivious_local_search(&i.function, &i.matroid);
        Ok((r.value, r.iterations, None))
    });
    let non_oblivious = measure(&inst, |i| {
        let r = solve_with_curvature(&i.function, &i.matroid, &cfg)?;
        Ok((r.f_value, r.iterations, Some(r.guarantee)))
    });

    let opt_value = opt.as_ref().ok().map(|m| m.value);
    let tol = REL_TOL * inst.function.scale();
    let runs = [greedy_run, oblivious, non_oblivious, opt];
    ALGORITHMS
        .iter()
        .zip(runs)
        .map(|(algorithm, run)| match run {
            Ok(m) => BenchRow {
                value: Some(m.value),
                opt_value,
                ratio: opt_value.map(|o| ratio(m.value, o)),
                kappa,
                bound: m.bound,
                bound_met: opt_value.zip(m.bound).map(|(o, b)| m.value >= b * o - tol),
                iterations: Some(m.iterations),
                oracle_calls: Some(m.oracle_calls),
                time_ms: (!no_timing).then_some(m.time_ms),
                ..blank(algorithm)
            },
            Err(e) => BenchRow {
                status: "error",
                kappa,
                message: e.to_string(),
                ..blank(algorithm)
            },
        })
        .collect()
}

/// `*.json` files directly inside `dir`, sorted by path.
pub fn instance_paths(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let read_err = |source| CliError::Read {
        path: dir.to_path_buf(),
        source,
    };
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(read_err)? {
        let path = entry.map_err(read_err)?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "json") {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

pub fn bench_dir(dir: &Path, epsilon: f64, no_timing: bool) -> Result<Vec<BenchRow>, CliError> {
    let paths = instance_paths(dir)?;
    let rows: Vec<Vec<BenchRow>> = paths
        .par_iter()
        .map(|p| bench_instance(p, epsilon, no_timing))
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

pub fn to_csv(rows: &[BenchRow]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn cmd_bench(a: &BenchArgs) -> Result<Outcome, CliError> {
    if !(a.epsilon > 0.0 && a.epsilon < 1.0) {
        return Err(CliError::Usage(format!(
            "--epsilon must lie in (0, 1), got {}",
            a.epsilon
        )));
    }
    let rows = bench_dir(&a.dir, a.epsilon, a.no_timing)?;
    let text = to_csv(&rows)?;
    match &a.csv {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?,
        None => print!("{text}"),
    }
    Ok(Outcome {
        exit_code: 0,
        warnings: Vec::new(),
    })
}
