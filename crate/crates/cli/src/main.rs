//! Command-line front end: field generation, single-shot computations,
//! campaign execution and result emission.
//!
//! All machine-readable data goes to stdout as JSON (or to `--out` files);
//! human logs go to stderr. Every run echoes its fully resolved
//! configuration so outputs are self-describing. Exit codes: 0 success,
//! 1 usage or malformed input, 2 infeasible computation (memory guard,
//! incompatible endpoints, undersized field region, I/O failure).

mod resolve;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use lpplab_core::error::Error as CoreError;
use lpplab_core::field::dp;
use lpplab_core::lab::{report, run_campaign, Experiment, ExperimentConfig};
use lpplab_core::{
    mtf_estimate, polymer, sample_field, weight_profile, PlanePoint, PointField, Region,
    ScaledPoint, Side,
};

use resolve::Resolver;

#[derive(Parser)]
#[command(
    name = "lpplab",
    version,
    about = "Poissonian last passage percolation laboratory",
    propagate_version = true
)]
struct Cli {
    /// Plain-text key=value configuration file; explicit flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads for campaign execution (fallback: LPPLAB_WORKERS,
    /// then all cores). Results are independent of this value.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a Poisson field and write it as CSV plus a JSON sidecar.
    Sample(SampleArgs),
    /// Maximal chain count between two plane points.
    Energy(EnergyArgs),
    /// Extremal geodesic between two plane points, written as CSV.
    Geodesic(GeodesicArgs),
    /// Scaled polymer between two scaled endpoints, written as CSV.
    Polymer(PolymerArgs),
    /// Diagonal weight profile of a field on the window [1, 2].
    Profile(ProfileArgs),
    /// Mesh lower bound of the maximum transversal fluctuation.
    Mtf(MtfArgs),
    /// Run a Monte Carlo campaign and emit CSV results plus a JSON summary.
    Campaign(CampaignArgs),
    /// Run the built-in oracle-equivalence and ordering suites.
    Selftest,
}

#[derive(Args)]
struct SampleArgs {
    /// Rectangle region as a_lo,a_hi,b_lo,b_hi.
    #[arg(long)]
    region: Option<String>,
    /// Diagonal strip region as diag_reach,half_width.
    #[arg(long)]
    strip: Option<String>,
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path (sidecar written alongside as <out>.json).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnergyArgs {
    #[arg(long)]
    field: Option<PathBuf>,
    /// Start point as a,b.
    #[arg(long)]
    u: Option<String>,
    /// End point as a,b.
    #[arg(long)]
    v: Option<String>,
}

#[derive(Args)]
struct GeodesicArgs {
    #[arg(long)]
    field: Option<PathBuf>,
    #[arg(long)]
    u: Option<String>,
    #[arg(long)]
    v: Option<String>,
    /// Which extremal geodesic: upper | lower.
    #[arg(long)]
    side: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PolymerArgs {
    #[arg(long)]
    field: Option<PathBuf>,
    #[arg(long)]
    n: Option<f64>,
    /// Scaled start point as x,t.
    #[arg(long)]
    u: Option<String>,
    /// Scaled end point as x,t.
    #[arg(long)]
    v: Option<String>,
    /// Which polymer: left | right.
    #[arg(long)]
    side: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long)]
    field: Option<PathBuf>,
    #[arg(long)]
    n: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MtfArgs {
    #[arg(long)]
    field: Option<PathBuf>,
    #[arg(long)]
    n: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    psi: Option<f64>,
    #[arg(long)]
    refine: Option<u32>,
}

#[derive(Args)]
struct CampaignArgs {
    /// Experiment name (modulus, weight_increment, mtf_scaling, tf_tail,
    /// weight_tail, curvature, tw_convergence, scaling_principle,
    /// min_tf_lower).
    #[arg(long)]
    experiment: Option<String>,
    /// Comma-separated scale parameters.
    #[arg(long)]
    n_values: Option<String>,
    /// Comma-separated lifetimes / window sizes.
    #[arg(long)]
    t_values: Option<String>,
    /// Comma-separated strip widths, thresholds or abscissas.
    #[arg(long)]
    s_values: Option<String>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    k_trunc: Option<f64>,
    #[arg(long)]
    psi: Option<f64>,
    #[arg(long)]
    refine: Option<u32>,
    #[arg(long)]
    point_cap: Option<f64>,
    /// Output directory for <experiment>_results.csv and _summary.json.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

/// Usage-class failures exit 1; infeasible computations exit 2.
fn exit_code_for(err: &CoreError) -> u8 {
    match err {
        CoreError::InvalidRegion(_)
        | CoreError::InvalidParameter(_)
        | CoreError::MalformedField(_)
        | CoreError::DegenerateField(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap renders --help/--version through the error path too.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

enum AppError {
    Usage(String),
    Core(CoreError),
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        AppError::Core(e)
    }
}

impl From<String> for AppError {
    fn from(s: String) -> Self {
        AppError::Usage(s)
    }
}

type AppResult<T> = Result<T, AppError>;

fn parse_pair(s: &str, what: &str) -> AppResult<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("{what} must be two comma-separated numbers, got '{s}'").into());
    }
    let x = parts[0]
        .trim()
        .parse::<f64>()
        .map_err(|_| format!("bad number in {what}: '{s}'"))?;
    let y = parts[1]
        .trim()
        .parse::<f64>()
        .map_err(|_| format!("bad number in {what}: '{s}'"))?;
    Ok((x, y))
}

fn parse_list(s: &str, what: &str) -> AppResult<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number in {what}: '{p}'").into())
        })
        .collect()
}

fn load_field(path: &PathBuf) -> AppResult<PointField> {
    Ok(PointField::read_csv(path)?)
}

fn emit(value: serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(&value).expect("json"));
}

fn install_workers(workers: Option<usize>) -> AppResult<Option<rayon::ThreadPool>> {
    let count = match workers {
        Some(w) => Some(w),
        None => std::env::var("LPPLAB_WORKERS")
            .ok()
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| format!("LPPLAB_WORKERS must be an integer, got '{v}'"))
            })
            .transpose()?,
    };
    match count {
        Some(w) if w >= 1 => Ok(Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| format!("cannot build worker pool: {e}"))?,
        )),
        Some(w) => Err(format!("--workers must be >= 1, got {w}").into()),
        None => Ok(None),
    }
}

fn run(cli: Cli) -> AppResult<()> {
    let resolver = Resolver::load(cli.config.as_deref()).map_err(AppError::Usage)?;
    match cli.cmd {
        Cmd::Sample(args) => cmd_sample(args, &resolver),
        Cmd::Energy(args) => cmd_energy(args, &resolver),
        Cmd::Geodesic(args) => cmd_geodesic(args, &resolver),
        Cmd::Polymer(args) => cmd_polymer(args, &resolver),
        Cmd::Profile(args) => cmd_profile(args, &resolver),
        Cmd::Mtf(args) => cmd_mtf(args, &resolver),
        Cmd::Campaign(args) => cmd_campaign(args, &resolver, cli.workers),
        Cmd::Selftest => {
            let _pool = install_workers(cli.workers)?;
            selftest::run()
        }
    }
}

fn cmd_sample(args: SampleArgs, file: &Resolver) -> AppResult<()> {
    let region_s = file.resolve_opt("region", args.region)?;
    let strip_s = file.resolve_opt("strip", args.strip)?;
    let rate = file.resolve("rate", args.rate, 1.0)?;
    let seed = file.resolve("seed", args.seed, 0u64)?;
    let out = file
        .resolve_path("out", args.out)?
        .ok_or_else(|| "sample requires --out".to_string())?;
    file.finish("sample")?;

    let region = match (&region_s, &strip_s) {
        (Some(r), None) => {
            let parts = parse_list(r, "--region")?;
            if parts.len() != 4 {
                return Err("--region needs a_lo,a_hi,b_lo,b_hi".to_string().into());
            }
            Region::rectangle(parts[0], parts[1], parts[2], parts[3])?
        }
        (None, Some(s)) => {
            let (reach, w) = parse_pair(s, "--strip")?;
            Region::diagonal_strip(reach, w)?
        }
        _ => return Err("give exactly one of --region or --strip".to_string().into()),
    };

    let field = sample_field(region, rate, seed)?;
    field.write_csv(&out)?;
    emit(json!({
        "command": "sample",
        "version": env!("CARGO_PKG_VERSION"),
        "config": {"region": region, "rate": rate, "seed": seed, "out": out},
        "count": field.len(),
    }));
    Ok(())
}

fn cmd_energy(args: EnergyArgs, file: &Resolver) -> AppResult<()> {
    let path = file
        .resolve_path("field", args.field)?
        .ok_or_else(|| "energy requires --field".to_string())?;
    let u = parse_pair(
        &file
            .resolve_opt("u", args.u)?
            .ok_or_else(|| "energy requires --u".to_string())?,
        "--u",
    )?;
    let v = parse_pair(
        &file
            .resolve_opt("v", args.v)?
            .ok_or_else(|| "energy requires --v".to_string())?,
        "--v",
    )?;
    file.finish("energy")?;

    let field = load_field(&path)?;
    let x = dp::energy(&field, PlanePoint::new(u.0, u.1), PlanePoint::new(v.0, v.1))?;
    emit(json!({
        "command": "energy",
        "version": env!("CARGO_PKG_VERSION"),
        "config": {"field": path, "u": u, "v": v, "seed": field.seed()},
        "energy": x,
    }));
    Ok(())
}

fn cmd_geodesic(args: GeodesicArgs, file: &Resolver) -> AppResult<()> {
    let path = file
        .resolve_path("field", args.field)?
        .ok_or_else(|| "geodesic requires --field".to_string())?;
    let u = parse_pair(
        &file
            .resolve_opt("u", args.u)?
            .ok_or_else(|| "geodesic requires --u".to_string())?,
        "--u",
    )?;
    let v = parse_pair(
        &file
            .resolve_opt("v", args.v)?
            .ok_or_else(|| "geodesic requires --v".to_string())?,
        "--v",
    )?;
    let side = file.resolve("side", args.side, "upper".to_string())?;
    let out = file.resolve_path("out", args.out)?;
    file.finish("geodesic")?;

    let field = load_field(&path)?;
    let (gu, gv) = (PlanePoint::new(u.0, u.1), PlanePoint::new(v.0, v.1));
    let chain = match side.as_str() {
        "upper" => dp::uppermost_geodesic(&field, gu, gv)?,
        "lower" => dp::lowermost_geodesic(&field, gu, gv)?,
        other => return Err(format!("--side must be upper or lower, got '{other}'").into()),
    };
    if let Some(out) = &out {
        let mut s = String::from("a,b\n");
        for p in chain.vertices() {
            s.push_str(&format!(
                "{},{}\n",
                lpplab_core::field::fmt_f64(p.a),
                lpplab_core::field::fmt_f64(p.b)
            ));
        }
        std::fs::write(out, s).map_err(CoreError::Io)?;
    }
    emit(json!({
        "command": "geodesic",
        "version": env!("CARGO_PKG_VERSION"),
        "config": {"field": path, "u": u, "v": v, "side": side, "out": out, "seed": field.seed()},
        "energy": chain.energy(),
        "points": chain.points().len(),
    }));
    Ok(())
}

fn cmd_polymer(args: PolymerArgs, file: &Resolver) -> AppResult<()> {
    let path = file
        .resolve_path("field", args.field)?
        .ok_or_else(|| "polymer requires --field".to_string())?;
    let n = file
        .resolve_opt("n", args.n)?
        .ok_or_else(|| "polymer requires --n".to_string())?;
    let u = parse_pair(
        &file
            .resolve_opt("u", args.u)?
            .ok_or_else(|| "polymer requires --u".to_string())?,
        "--u",
    )?;
    let v = parse_pair(
        &file
            .resolve_opt("v", args.v)?
            .ok_or_else(|| "polymer requires --v".to_string())?,
        "--v",
    )?;
    let side_s = file.resolve("side", args.side, "left".to_string())?;
    let out = file.resolve_path("out", args.out)?;
    file.finish("polymer")?;

    let side = match side_s.as_str() {
        "left" => Side::Leftmost,
        "right" => Side::Rightmost,
        other => return Err(format!("--side must be left or right, got '{other}'").into()),
    };
    let field = load_field(&path)?;
    let p = polymer(
        &field,
        n,
        ScaledPoint::new(u.0, u.1),
        ScaledPoint::new(v.0, v.1),
        side,
    )?;
    if let Some(out) = &out {
        p.write_csv(out)?;
    }
    emit(json!({
        "command": "polymer",
        "version": env!("CARGO_PKG_VERSION"),
        "config": {"field": path, "n": n, "u": u, "v": v, "side": side_s, "out": out, "seed": field.seed()},
        "energy": p.chain().energy(),
        "vertices": p.vertices().len(),
        "transversal_fluctuation": p.transversal_fluctuation(),
    }));
    Ok(())
}

fn cmd_profile(args: ProfileArgs, file: &Resolver) -> AppResult<()> {
    let path = file
        .resolve_path("field", args.field)?
        .ok_or_else(|| "profile requires --field".to_string())?;
    let n = file
        .resolve_opt("n", args.n)?
        .ok_or_else(|| "profile requires --n".to_string())?;
    let out = file.resolve_path("out", args.out)?;
    file.finish("profile")?;

    let field = load_field(&path)?;
    let prof = weight_profile(&field, n)?;
    if let Some(out) = &out {
        prof.write_csv(out, Some(field.region()))?;
    }
    emit(json!({
        "command": "profile",
        "version": env!("CARGO_PKG_VERSION"),
        "config": {"field": path, "n": n, "out": out, "seed": field.seed()},
        "base": prof.base(),
        "jumps": prof.jump_times().len(),
        "wgt_at_1": prof.eval_wgt(1.0)?,
        "wgt_at_2": prof.eval_wgt(2.0)?,
    }));
    Ok(())
}

fn cmd_mtf(args: MtfArgs, file: &Resolver) -> AppResult<()> {
    let path = file
        .resolve_path("field", args.field)?
        .ok_or_else(|| "mtf requires --field".to_string())?;
    let n = file
        .resolve_opt("n", args.n)?
        .ok_or_else(|| "mtf requires --n".to_string())?;
    let t = file.resolve("t", args.t, 1.0)?;
    let psi = file.resolve("psi", args.psi, lpplab_core::lab::DEFAULT_PSI)?;
    let refine = file.resolve("refine", args.refine, lpplab_core::lab::DEFAULT_REFINE)?;
    file.finish("mtf")?;

    let field = load_field(&path)?;
    let est = mtf_estimate(&field, n, t, psi, refine)?;
    emit(json!({
        "command": "mtf",
        "version": env!("CARGO_PKG_VERSION"),
        "config": {"field": path, "n": n, "t": t, "psi": psi, "refine": refine, "seed": field.seed()},
        "mtf_lower_bound": est,
    }));
    Ok(())
}

fn cmd_campaign(args: CampaignArgs, file: &Resolver, workers: Option<usize>) -> AppResult<()> {
    let name = file
        .resolve_opt("experiment", args.experiment)?
        .ok_or_else(|| "campaign requires --experiment".to_string())?;
    let experiment = Experiment::parse(&name)
        .ok_or_else(|| format!("unknown experiment '{name}'"))?;
    let mut config = ExperimentConfig::new(experiment);
    config.n_values = parse_list(
        &file
            .resolve_opt("n_values", args.n_values)?
            .ok_or_else(|| "campaign requires --n-values".to_string())?,
        "--n-values",
    )?;
    if let Some(ts) = file.resolve_opt("t_values", args.t_values)? {
        config.t_values = parse_list(&ts, "--t-values")?;
    }
    if let Some(ss) = file.resolve_opt("s_values", args.s_values)? {
        config.s_or_k_values = parse_list(&ss, "--s-values")?;
    }
    config.replicas = file.resolve("replicas", args.replicas, 1usize)?;
    config.base_seed = file.resolve("seed", args.seed, 0u64)?;
    config.k_trunc = file.resolve("k_trunc", args.k_trunc, lpplab_core::lab::DEFAULT_K_TRUNC)?;
    config.psi = file.resolve("psi", args.psi, lpplab_core::lab::DEFAULT_PSI)?;
    config.refine = file.resolve("refine", args.refine, lpplab_core::lab::DEFAULT_REFINE)?;
    config.point_cap =
        file.resolve("point_cap", args.point_cap, lpplab_core::lab::DEFAULT_POINT_CAP)?;
    let out_dir = file
        .resolve_path("out_dir", args.out_dir)?
        .ok_or_else(|| "campaign requires --out-dir".to_string())?;
    file.finish("campaign")?;

    std::fs::create_dir_all(&out_dir).map_err(CoreError::Io)?;
    let pool = install_workers(workers)?;
    let results = match &pool {
        Some(p) => p.install(|| run_campaign(&config))?,
        None => run_campaign(&config)?,
    };

    let csv_path = out_dir.join(format!("{}_results.csv", experiment.name()));
    report::write_results_csv(&csv_path, &config, &results)?;
    let summary_path = out_dir.join(format!("{}_summary.json", experiment.name()));
    report::write_summary_json(&summary_path, &config, &results)?;

    let analysis = report::analyze(&config, &results)?;
    emit(json!({
        "command": "campaign",
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "results_csv": csv_path,
        "summary_json": summary_path,
        "result_count": results.len(),
        "analysis": analysis,
    }));
    Ok(())
}
