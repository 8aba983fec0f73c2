//! Batch command-line front end.  Every run prints a single JSON document
//! on standard output (logs go to standard error) and exits with 0 when
//! all checks passed, 1 when a mathematical check failed, and 2 on usage
//! or input errors.

use clap::{Args, Parser, Subcommand};
use itodilate_core::birth::{self, NormalizationMode};
use itodilate_core::coherent::{
    exponent_kernel, kernel_pd_report, log_matrix_element, small_t_generator_check,
    CoherentFunction,
};
use itodilate_core::cpd::{cpd_check, dissipator_pd_check};
use itodilate_core::dilation::{
    assemble_pseudo_hilbert, birth_decomposition, build_dilation, reconstruction_residual,
};
use itodilate_core::germ::{GeneratorForm, GeneratorModel};
use itodilate_core::json::{
    self, cpd_report_to_json, element_from_json, element_to_json, to_canonical_json, ElementJson,
};
use itodilate_core::linalg::{random_cvector, CVector};
use itodilate_core::poisson::{martingale_check, mean_exponent_check};
use itodilate_core::semigroup::{Element, StarSemigroup};
use itodilate_core::Error as CoreError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::time::Instant;

const DEFAULT_SEED: u64 = 0xA11CE;
const DEFAULT_PATHS: usize = 100_000;

#[derive(Parser)]
#[command(
    name = "itodilate",
    version,
    about = "Positivity checks, dilations, exponent kernels, and Poisson simulations for stochastic generators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Generator model JSON file.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Sample JSON: an element array, or a kernel spec for kernel/small-t.
    #[arg(long)]
    sample: Option<PathBuf>,
    /// Eigenvalue acceptance tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Time parameter (horizon, small-time step, or Monte-Carlo time).
    #[arg(long)]
    t: Option<f64>,
    /// Monte-Carlo path count or sampling count.
    #[arg(long)]
    paths: Option<usize>,
    /// Random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Gram eigenvalue cutoff for dilations.
    #[arg(long)]
    rank_tol: Option<f64>,
    /// Also write the report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Conditional positivity of the germ kernel over a sample.
    CheckCpd(CommonArgs),
    /// Plain positivity of the dissipator kernel over a sample.
    DissipatorPd(CommonArgs),
    /// Build the representation data of a conditionally positive model.
    Dilate(CommonArgs),
    /// Build, assemble, and verify the germ reconstruction.
    Reconstruct(CommonArgs),
    /// Coherent exponent kernel and its positivity report.
    Kernel(CommonArgs),
    /// Small-time limit deviation of the exponent against the germ form.
    SmallT(CommonArgs),
    /// Poisson exponent means against the closed form.
    PoissonMc(CommonArgs),
    /// Conditional martingale test of a scalar Poisson model.
    Martingale(CommonArgs),
    /// Birth generator checks: normalization, bounds, decomposition,
    /// and the solution cross-oracle.
    BirthVerify(CommonArgs),
    /// Run the full acceptance suite.
    Selftest(CommonArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CheckCpd(_) => "check-cpd",
            Command::DissipatorPd(_) => "dissipator-pd",
            Command::Dilate(_) => "dilate",
            Command::Reconstruct(_) => "reconstruct",
            Command::Kernel(_) => "kernel",
            Command::SmallT(_) => "small-t",
            Command::PoissonMc(_) => "poisson-mc",
            Command::Martingale(_) => "martingale",
            Command::BirthVerify(_) => "birth-verify",
            Command::Selftest(_) => "selftest",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::CheckCpd(a)
            | Command::DissipatorPd(a)
            | Command::Dilate(a)
            | Command::Reconstruct(a)
            | Command::Kernel(a)
            | Command::SmallT(a)
            | Command::PoissonMc(a)
            | Command::Martingale(a)
            | Command::BirthVerify(a)
            | Command::Selftest(a) => a,
        }
    }
}

enum CliError {
    /// Bad usage or malformed input: exit 2.
    Input(String),
    /// A mathematical check could not be satisfied: exit 1.
    Math(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NotCpd(_)
            | CoreError::GramNotPsd(_)
            | CoreError::ResidualExceeded { .. }
            | CoreError::NonHermitian(_) => CliError::Math(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Serialize)]
struct Tolerances {
    tol: f64,
    rank_tol: f64,
    t: Option<f64>,
    paths: Option<usize>,
}

#[derive(Serialize)]
struct Manifest {
    command: String,
    inputs: Vec<String>,
    seed: u64,
    tolerances: Tolerances,
    version: String,
    duration_ms: u64,
    summary: String,
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_model(args: &CommonArgs) -> Result<GeneratorModel, CliError> {
    let path = args
        .model
        .as_ref()
        .ok_or_else(|| CliError::Input("--model is required for this command".into()))?;
    Ok(json::model_from_str(&read_text(path)?)?)
}

fn load_elements(path: &Path, sg: &StarSemigroup) -> Result<Vec<Element>, CliError> {
    let parsed: Vec<ElementJson> = serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::Input(format!("sample JSON: {e}")))?;
    let elements = parsed
        .iter()
        .map(element_from_json)
        .collect::<Result<Vec<_>, _>>()?;
    for e in &elements {
        sg.validate(e)?;
    }
    Ok(elements)
}

/// Sample for positivity and dilation commands: the file when given, the
/// whole group for finite instances, a seeded draw otherwise.
fn default_sample(model: &GeneratorModel, args: &CommonArgs, seed: u64) -> Result<Vec<Element>, CliError> {
    if let Some(path) = &args.sample {
        return load_elements(path, &model.semigroup);
    }
    Ok(match model.semigroup.all_elements() {
        Some(all) => all,
        None => model.semigroup.sample_elements(8, seed),
    })
}

fn load_kernel_spec(args: &CommonArgs) -> Result<itodilate_core::coherent::KernelSpec, CliError> {
    let path = args
        .sample
        .as_ref()
        .ok_or_else(|| CliError::Input("--sample must point to a kernel spec file".into()))?;
    Ok(json::kernel_spec_from_str(&read_text(path)?)?)
}

fn run(cmd: &Command) -> Result<(bool, Value, String), CliError> {
    let args = cmd.args();
    let seed = args.seed.unwrap_or(DEFAULT_SEED);
    let tol = args.tol.unwrap_or(itodilate_core::cpd::DEFAULT_TOL);
    let rank_tol = args.rank_tol.unwrap_or(itodilate_core::dilation::DEFAULT_RANK_TOL);
    match cmd {
        Command::CheckCpd(_) | Command::DissipatorPd(_) => {
            let model = load_model(args)?;
            let sample = default_sample(&model, args, seed)?;
            let report = if matches!(cmd, Command::CheckCpd(_)) {
                cpd_check(&model, &sample, tol)?
            } else {
                dissipator_pd_check(&model, &sample, tol)?
            };
            let passed = report.verdict;
            let summary = format!(
                "min eigenvalue {:.3e} over {} elements: {}",
                report.min_eigenvalue,
                sample.len(),
                if passed { "positive" } else { "negative" }
            );
            Ok((passed, json!({ "report": cpd_report_to_json(&report) }), summary))
        }
        Command::Dilate(_) => {
            let model = load_model(args)?;
            let sample = default_sample(&model, args, seed)?;
            let dd = build_dilation(&model, &sample, rank_tol)?;
            let summary = format!(
                "K dimension {} with residuals up to {:.3e}",
                dd.k_dim,
                dd.residuals.max()
            );
            Ok((true, json!({ "dilation": json::dilation_to_json(&dd) }), summary))
        }
        Command::Reconstruct(_) => {
            let model = load_model(args)?;
            let sample = default_sample(&model, args, seed)?;
            let dd = build_dilation(&model, &sample, rank_tol)?;
            let ph = assemble_pseudo_hilbert(&dd, &model)?;
            let residual = reconstruction_residual(&ph, &model, &sample)?;
            let bound = args.tol.unwrap_or(1e-9);
            let passed = residual <= bound;
            let summary = format!("reconstruction residual {residual:.3e} (bound {bound:.1e})");
            Ok((
                passed,
                json!({
                    "dilation": json::dilation_to_json(&dd),
                    "pseudo_hilbert": json::pseudo_hilbert_to_json(&ph),
                    "reconstruction_residual": residual,
                }),
                summary,
            ))
        }
        Command::Kernel(_) => {
            let model = load_model(args)?;
            let mut spec = load_kernel_spec(args)?;
            if let Some(t) = args.t {
                spec.t = t;
            }
            let kernel = exponent_kernel(&model, &spec)?;
            let report = kernel_pd_report(&kernel, tol)?;
            let passed = report.verdict;
            let summary = format!(
                "{}x{} kernel at t = {}: min eigenvalue {:.3e}",
                kernel.nrows(),
                kernel.ncols(),
                spec.t,
                report.min_eigenvalue
            );
            Ok((
                passed,
                json!({
                    "kernel": json::matrix_to_json(&kernel),
                    "report": cpd_report_to_json(&report),
                }),
                summary,
            ))
        }
        Command::SmallT(_) => {
            let model = load_model(args)?;
            let spec = load_kernel_spec(args)?;
            let t_small = args.t.unwrap_or(1e-3);
            let dev_full = small_t_generator_check(&model, &spec, t_small)?;
            let dev_half = small_t_generator_check(&model, &spec, t_small / 2.0)?;
            let ratio = if dev_full > 0.0 { dev_half / dev_full } else { 0.5 };
            // first-order scaling: halving t must roughly halve the deviation
            let degenerate = dev_full < 1e-9;
            let passed = degenerate || (ratio > 1.0 / 3.0 && ratio < 0.75);
            let summary = format!(
                "deviation {dev_full:.3e} at t = {t_small:.1e}, halving ratio {ratio:.3}"
            );
            Ok((
                passed,
                json!({
                    "t_small": t_small,
                    "deviation": dev_full,
                    "deviation_half": dev_half,
                    "ratio": ratio,
                }),
                summary,
            ))
        }
        Command::PoissonMc(_) => {
            let model = load_model(args)?;
            let t = args.t.unwrap_or(1.0);
            let paths = args.paths.unwrap_or(DEFAULT_PATHS);
            let elements = match model.semigroup.all_elements() {
                Some(all) => all,
                None => {
                    return Err(CliError::Input(
                        "poisson-mc expects a finite-group scalar Poisson model".into(),
                    ))
                }
            };
            let mut rows = Vec::new();
            let mut passed = true;
            let mut worst = 0.0f64;
            for y in &elements {
                let r = mean_exponent_check(&model, y, t, paths, seed)?;
                let err = (r.estimate - r.exact).norm();
                let sigmas = if r.std_error > 0.0 { err / r.std_error } else { 0.0 };
                worst = worst.max(sigmas);
                if err > 5.0 * r.std_error && err > 1e-12 {
                    passed = false;
                }
                rows.push(json!({
                    "element": element_to_json(y),
                    "estimate": json::cx_to_json(r.estimate),
                    "exact": json::cx_to_json(r.exact),
                    "std_error": r.std_error,
                    "deviation_sigmas": sigmas,
                }));
            }
            let summary = format!(
                "{} elements, {paths} paths, worst deviation {worst:.2}σ",
                elements.len()
            );
            Ok((passed, json!({ "t": t, "paths": paths, "means": rows }), summary))
        }
        Command::Martingale(_) => {
            let model = load_model(args)?;
            let t = args.t.unwrap_or(0.5);
            let s = 2.0 * t;
            let paths = args.paths.unwrap_or(DEFAULT_PATHS);
            let report = martingale_check(&model, t, s, paths, seed, 12)?;
            let passed = report.max_deviation <= 5.0;
            let bins: Vec<Value> = report
                .bins
                .iter()
                .map(|b| {
                    json!({
                        "count_value": b.count_value,
                        "paths": b.paths,
                        "mean": json::cx_to_json(b.mean),
                        "expected": json::cx_to_json(b.expected),
                        "std_error": b.std_error,
                        "deviation": b.deviation,
                    })
                })
                .collect();
            let summary = format!(
                "max conditional deviation {:.2}σ over {} bins (drift {:.2e})",
                report.max_deviation,
                report.bins.len(),
                report.drift
            );
            Ok((
                passed,
                json!({
                    "t": t,
                    "s": s,
                    "paths": paths,
                    "max_deviation": report.max_deviation,
                    "drift": report.drift,
                    "bins": bins,
                    "skipped_bins": report.skipped_bins,
                    "overflow_paths": report.overflow_paths,
                }),
                summary,
            ))
        }
        Command::BirthVerify(_) => {
            let model = load_model(args)?;
            let spec = match &model.form {
                GeneratorForm::Birth(spec) => spec.clone(),
                _ => return Err(CliError::Input("birth-verify expects a birth model".into())),
            };
            let count = args.paths.unwrap_or(200);
            let cond = birth::martingale_condition_check(&spec);
            let bounds = birth::norm_bounds_check(&spec, count, seed)?;
            let sample = model.semigroup.sample_elements(6, seed);
            let decomposition = birth_decomposition(&model, &sample)?;
            // spot check of the factorized solution against the germ route
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x37);
            let mut worst_rel = 0.0f64;
            for _ in 0..20 {
                let y = itodilate_core::semigroup::random_contraction(&mut rng, spec.base_dim);
                let f = random_cvector(&mut rng, spec.n_modes);
                let h = random_cvector(&mut rng, spec.n_modes);
                let t = 0.1 + rng.random::<f64>();
                let direct = birth::eval_solution_37(&spec, &f, &h, &y, t)?;
                let via_germ = log_matrix_element(
                    &model,
                    &CoherentFunction::constant(f),
                    &Element::Matrix(y),
                    &CoherentFunction::constant(h),
                    t,
                )?;
                worst_rel = worst_rel.max((direct - via_germ).norm() / direct.norm().max(1.0));
            }
            let passed = bounds.violations == 0
                && decomposition.zero_residual <= 1e-10
                && decomposition.psd_report.verdict
                && worst_rel <= 1e-12;
            let mode = match cond.mode {
                NormalizationMode::Martingale => "martingale",
                NormalizationMode::Submartingale => "submartingale",
                NormalizationMode::Unnormalized => "unnormalized",
            };
            let summary = format!(
                "{mode} normalization, {} norm violations, cross-oracle error {worst_rel:.2e}",
                bounds.violations
            );
            Ok((
                passed,
                json!({
                    "normalization": { "lhs": cond.lhs, "rhs": cond.rhs, "mode": mode },
                    "norm_bounds": {
                        "samples": bounds.samples,
                        "exchange_norm_at_unit": bounds.exchange_norm_at_unit,
                        "sup_exchange_norm": bounds.sup_exchange_norm,
                        "sup_scalar_abs": bounds.sup_scalar_abs,
                        "violations": bounds.violations,
                    },
                    "decomposition": {
                        "kappa": json::matrix_to_json(&decomposition.kappa),
                        "zero_residual": decomposition.zero_residual,
                        "psd": cpd_report_to_json(&decomposition.psd_report),
                    },
                    "cross_oracle_max_rel_error": worst_rel,
                }),
                summary,
            ))
        }
        Command::Selftest(_) => {
            let results = itodilate_core::selftest::run_all(seed);
            let mut passed = true;
            let rows: Vec<Value> = results
                .iter()
                .map(|r| {
                    eprintln!(
                        "criterion {:>2} [{}] {} — {}",
                        r.id,
                        if r.passed { "PASS" } else { "FAIL" },
                        r.name,
                        r.detail
                    );
                    passed &= r.passed;
                    json!({
                        "id": r.id,
                        "name": r.name,
                        "passed": r.passed,
                        "detail": r.detail,
                    })
                })
                .collect();
            let failures = results.iter().filter(|r| !r.passed).count();
            let summary = format!("{} criteria, {failures} failures", results.len());
            Ok((passed, json!({ "criteria": rows }), summary))
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    if let Ok(threads) = std::env::var("ITODILATE_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => log::warn!("ignoring non-numeric ITODILATE_THREADS = {threads:?}"),
        }
    }
    let cli = Cli::parse();
    let args = cli.command.args().clone();
    let start = Instant::now();
    let outcome = run(&cli.command);
    let duration_ms = start.elapsed().as_millis() as u64;
    let (exit, result, summary) = match outcome {
        Ok((passed, result, summary)) => (if passed { 0 } else { 1 }, result, summary),
        Err(CliError::Math(msg)) => (1, json!({ "error": msg }), format!("failed: {msg}")),
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            (2, json!({ "error": msg }), format!("input error: {msg}"))
        }
    };
    let mut inputs = Vec::new();
    if let Some(p) = &args.model {
        inputs.push(p.display().to_string());
    }
    if let Some(p) = &args.sample {
        inputs.push(p.display().to_string());
    }
    let manifest = Manifest {
        command: cli.command.name().to_string(),
        inputs,
        seed: args.seed.unwrap_or(DEFAULT_SEED),
        tolerances: Tolerances {
            tol: args.tol.unwrap_or(itodilate_core::cpd::DEFAULT_TOL),
            rank_tol: args
                .rank_tol
                .unwrap_or(itodilate_core::dilation::DEFAULT_RANK_TOL),
            t: args.t,
            paths: args.paths,
        },
        version: env!("CARGO_PKG_VERSION").to_string(),
        duration_ms,
        summary,
    };
    let report = json!({
        "manifest": serde_json::to_value(&manifest).expect("manifest"),
        "result": result,
    });
    let rendered = to_canonical_json(&report);
    println!("{rendered}");
    if let Some(out) = &args.out {
        if let Err(e) = std::fs::write(out, rendered.as_bytes()) {
            eprintln!("error: cannot write {}: {e}", out.display());
            std::process::exit(2);
        }
    }
    std::process::exit(exit);
}
