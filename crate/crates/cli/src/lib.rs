//! Command-line front end: `solve`, `opt`, `verify`, `bench` and `generate`.
//!
//! Every command writes JSON (CSV for `bench`) and exits with 0 on success,
//! 1 when a check fails, 2 on bad input and 3 when a size cap is exceeded.

pub mod bench;
pub mod error;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use curvmax_core::potential::ell_cap_from_env;
use curvmax_core::search::gamma_guessing_solve;
use curvmax_core::verify::{
    brute_force_opt, check_decomposition, check_lemma1_against, check_lemma2_against, optimal_base,
    ratio_check_of, DecompositionCheck, LemmaCheckReport, BRUTE_FORCE_CAP, DECOMPOSITION_CHECK_CAP,
};
use curvmax_core::{
    corpus, curvature, decompose, load_instance, solve_with_curvature, GammaMode, Instance,
    LoadOptions, PotentialParams, SearchConfig, SetFunction,
};

pub use error::CliError;
use report::{to_json, Checks, OptReport, ReportFile};

#[derive(Debug, Parser)]
#[command(
    name = "curvmax",
    version,
    about = "Curvature-aware submodular maximization over a matroid"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the curvature-aware local search on one instance.
    Solve(SolveArgs),
    /// Brute-force optimum over all independent sets (n <= 20).
    Opt(OptArgs),
    /// Solve, then check the exchange inequality, the local-maximum bound, the
    /// decomposition and the ratio.
    Verify(VerifyArgs),
    /// Compare greedy, oblivious and non-oblivious local search against OPT.
    Bench(BenchArgs),
    /// Write the built-in instance corpus.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Instance file (JSON).
    pub instance: PathBuf,
    /// Skip the monotonicity and submodularity checks on table functions.
    #[arg(long)]
    pub no_validate: bool,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Leave wall-clock times out of the report.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Number of colors; defaults to the smallest ℓ meeting the ε budget.
    #[arg(long)]
    pub ell: Option<usize>,
    /// Submodularity ratio of the residual: a number in (0, 1], or `auto` to
    /// search a grid (needs `linear_weights` in the instance).
    #[arg(long, default_value = "1")]
    pub gamma: GammaArg,
    /// Smallest γ tried by `--gamma auto`.
    #[arg(long, default_value_t = 0.5)]
    pub gamma_min: f64,
    /// Grid step of `--gamma auto`.
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
    /// Evaluate candidate swaps on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaArg {
    Fixed(f64),
    Auto,
}

impl std::str::FromStr for GammaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(GammaArg::Auto);
        }
        match s.parse::<f64>() {
            Ok(g) if g > 0.0 && g <= 1.0 => Ok(GammaArg::Fixed(g)),
            _ => Err(format!("expected a number in (0, 1] or `auto`, got `{s}`")),
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Include every accepted swap in the report.
    #[arg(long)]
    pub trace: bool,
    /// Also compute the brute-force optimum and the achieved ratio.
    #[arg(long)]
    pub opt: bool,
}

#[derive(Debug, Args)]
pub struct OptArgs {
    #[command(flatten)]
    pub input: InputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long)]
    pub ell: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Directory of instance files; every `*.json` is used.
    pub dir: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Leave the time column empty.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Output directory; created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

/// What a command produced: text for stdout or a file, and the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub exit_code: u8,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn ok(warnings: Vec<String>) -> Self {
        Outcome {
            exit_code: 0,
            warnings,
        }
    }
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::Opt(a) => cmd_opt(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Bench(a) => bench::cmd_bench(&a),
        Command::Generate(a) => cmd_generate(&a),
    }
}

pub fn load(input: &InputArgs) -> Result<Instance, CliError> {
    let opts = LoadOptions {
        validate: !input.no_validate,
    };
    match load_instance(&input.instance, opts) {
        Err(curvmax_core::Error::Io(source)) => Err(CliError::Read {
            path: input.instance.clone(),
            source,
        }),
        other => Ok(other?),
    }
}

pub fn instance_name(inst: &Instance, path: &Path) -> String {
    inst.name.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    })
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn elapsed_ms(start: Instant, no_timing: bool) -> Option<f64> {
    (!no_timing).then(|| start.elapsed().as_secs_f64() * 1e3)
}

pub fn search_config(solver: &SolverArgs, trace: bool) -> SearchConfig {
    SearchConfig {
        epsilon: solver.epsilon,
        ell: solver.ell,
        gamma: match solver.gamma {
            GammaArg::Fixed(g) => GammaMode::Fixed(g),
            GammaArg::Auto => GammaMode::Auto {
                gamma_min: solver.gamma_min,
                eta: solver.eta,
            },
        },
        parallel: !solver.sequential,
        trace,
        ell_cap: ell_cap_from_env(),
        ..SearchConfig::default()
    }
}

fn cmd_solve(a: &SolveArgs) -> Result<Outcome, CliError> {
    let inst = load(&a.input)?;
    let name = instance_name(&inst, &a.input.instance);
    let cfg = search_config(&a.solver, a.trace);
    inst.function.reset();
    let start = Instant::now();
    let run = match cfg.gamma {
        GammaMode::Fixed(_) => solve_with_curvature(&inst.function, &inst.matroid, &cfg)?,
        GammaMode::Auto { gamma_min, eta } => {
            let weights = inst.linear_weights.clone().ok_or_else(|| {
                CliError::Usage(format!(
                    "{}: linear_weights: required by --gamma auto",
                    a.input.instance.display()
                ))
            })?;
            gamma_guessing_solve(&inst.function, weights, &inst.matroid, &cfg, gamma_min, eta)?
        }
    };
    let mut report = ReportFile::from_run(name, run, inst.warnings.clone());
    if a.opt {
        let opt = brute_force_opt(&inst.function, &inst.matroid)?;
        report.set_opt(opt.opt_set, opt.opt_value);
    }
    report.wall_time_ms = elapsed_ms(start, a.input.no_timing);
    emit(&to_json(&report), a.input.output.as_deref())?;
    Ok(Outcome::ok(inst.warnings))
}

fn cmd_opt(a: &OptArgs) -> Result<Outcome, CliError> {
    let inst = load(&a.input)?;
    let start = Instant::now();
    let opt = brute_force_opt(&inst.function, &inst.matroid)?;
    let report = OptReport {
        instance: instance_name(&inst, &a.input.instance),
        opt_set: opt.opt_set,
        opt_value: opt.opt_value,
        enumerated: opt.enumerated,
        wall_time_ms: elapsed_ms(start, a.input.no_timing),
    };
    emit(&to_json(&report), a.input.output.as_deref())?;
    Ok(Outcome::ok(inst.warnings))
}

fn cmd_verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let inst = load(&a.input)?;
    let name = instance_name(&inst, &a.input.instance);
    let (f, m) = (&inst.function, &inst.matroid);
    let n = f.ground().len();
    if n > BRUTE_FORCE_CAP {
        return Err(curvmax_core::Error::Resource(format!(
            "verify needs the brute-force optimum, limited to n <= {BRUTE_FORCE_CAP}, got {n}"
        ))
        .into());
    }
    let cfg = SearchConfig {
        epsilon: a.epsilon,
        ell: a.ell,
        ell_cap: ell_cap_from_env(),
        ..SearchConfig::default()
    };
    f.reset();
    let start = Instant::now();
    let run = solve_with_curvature(f, m, &cfg)?;
    let kappa = curvature(f)?;
    let d = decompose(f, kappa)?;
    let params = PotentialParams::new(run.ell, run.gamma, cfg.ell_cap)?;
    let opt = brute_force_opt(f, m)?;
    let opt_base = optimal_base(f, m)?;
    let g_opt_base = optimal_base(&d.g(), m)?;

    let lemma1 = check_lemma1_against(&run.lifted, &d.g(), m, &params, g_opt_base)
        .unwrap_or_else(|e| LemmaCheckReport::skipped(e.to_string()));
    let lemma2 = check_lemma2_against(&run, &d, m, &params, run.theta, opt_base)?;
    let decomposition = if n <= DECOMPOSITION_CHECK_CAP {
        check_decomposition(f, &d)?
    } else {
        DecompositionCheck::skipped(format!(
            "exhaustive checks are limited to n <= {DECOMPOSITION_CHECK_CAP}, got {n}"
        ))
    };
    let ratio = ratio_check_of(&run, opt.opt_value, f.scale());
    let all_pass = lemma1.pass() && lemma2.pass() && decomposition.pass() && ratio.pass();

    let mut report = ReportFile::from_run(name, run, inst.warnings.clone());
    report.set_opt(opt.opt_set, opt.opt_value);
    report.checks = Some(Checks {
        all_pass,
        lemma1,
        lemma2,
        decomposition,
        ratio,
    });
    report.wall_time_ms = elapsed_ms(start, a.input.no_timing);
    emit(&to_json(&report), a.input.output.as_deref())?;
    Ok(Outcome {
        exit_code: if all_pass { 0 } else { 1 },
        warnings: inst.warnings,
    })
}

fn cmd_generate(a: &GenerateArgs) -> Result<Outcome, CliError> {
    let write_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Write { path, source }
    };
    fs::create_dir_all(&a.out).map_err(write_err(&a.out))?;
    for entry in corpus::generate()? {
        let path = a.out.join(format!("{}.json", entry.name));
        fs::write(&path, entry.file.to_json()).map_err(write_err(&path))?;
    }
    Ok(Outcome::ok(Vec::new()))
}
