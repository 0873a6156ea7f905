//! Command-line surface: Holevo capacity, Voronoi diagram generation and
//! export, and the library's verification suites.
//!
//! Exit codes: 0 success, 1 verification/solver failure, 2 configuration
//! error, 3 invalid channel (image leaves the Bloch ball), 4 diagram mode
//! misuse (purity/interiority violations).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bloch_voronoi::capacity::{holevo_capacity, sample_sphere};
use bloch_voronoi::channels::AffineChannel;
use bloch_voronoi::state::BlochVector;
use bloch_voronoi::verify;
use bloch_voronoi::voronoi::{
    classify_batch, export_cells, pure_limit_section, DiagramMode, ExportFormat, SiteSet,
};
use bloch_voronoi::Error;

#[derive(Parser)]
#[command(
    name = "bloch-voronoi",
    version,
    about = "Distances, divergences and Voronoi diagrams on the Bloch ball; Holevo capacity of 1-qubit affine channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the Holevo capacity of a channel as the radius of the
    /// smallest enclosing divergence ball of its image.
    Capacity(CapacityArgs),
    /// Classify a deterministic query lattice under a diagram mode and
    /// emit the assignment (CSV) or cell geometry (OFF/SVG).
    Voronoi(VoronoiArgs),
    /// Run the property verification suites and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CapacityArgs {
    /// Built-in channel family: identity, depolarizing, planar,
    /// amplitude-damping, phase-damping, rotation.
    #[arg(long)]
    channel: Option<String>,
    /// Channel parameter as K=V; repeatable (e.g. --param t=0.5).
    #[arg(long = "param")]
    params: Vec<String>,
    /// JSON file with {"matrix": [[..],[..],[..]], "offset": [..], "label": ..}.
    #[arg(long = "channel-file")]
    channel_file: Option<PathBuf>,
    /// Number of sphere samples pushed through the channel.
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Solver radius tolerance in nats.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Report format; capacity reports are JSON.
    #[arg(long, default_value = "json")]
    format: String,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VoronoiArgs {
    /// Site file: CSV lines x,y,z (header optional).
    #[arg(long)]
    sites: PathBuf,
    /// Diagram mode: fubini-study, bures, geodesic, euclidean,
    /// divergence-primal, divergence-dual.
    #[arg(long)]
    mode: String,
    /// Section radius offset(s); repeatable. Runs a pure-state limit
    /// section per value (divergence modes only).
    #[arg(long = "epsilon")]
    epsilons: Vec<f64>,
    /// Query count for sphere lattices (divergence modes without
    /// --epsilon use a fixed 41^3 ball grid instead).
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; stdout when omitted. With several --epsilon values a
    /// -eps<value> suffix is inserted per section.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv (assignment), off (cell mesh) or svg (stereographic picture).
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only the named suite(s); repeatable. Known suites: roundtrip,
    /// lemma, duality, distances, divergence, channels, voronoi,
    /// equivalence, sections, asymmetry, solvers, capacity.
    #[arg(long = "only")]
    only: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

struct Failure {
    message: String,
    code: u8,
}

impl Failure {
    fn new(message: impl Into<String>, code: u8) -> Self {
        Self {
            message: message.into(),
            code,
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvalidChannel { .. } => 3,
        Error::ModeMisuse { .. }
        | Error::PureStateRequired { .. }
        | Error::DivergenceUndefined { .. }
        | Error::DualDiverges { .. } => 4,
        Error::SolverStalled { .. } => 1,
        _ => 2,
    }
}

fn lift(e: Error) -> Failure {
    Failure::new(e.to_string(), exit_code_for(&e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Capacity(args) => cmd_capacity(args),
        Command::Voronoi(args) => cmd_voronoi(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Failure::new(format!("cannot write {}: {e}", path.display()), 2)),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// capacity

fn parse_params(raw: &[String]) -> Result<Vec<(String, String)>, Failure> {
    raw.iter()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Failure::new(format!("--param expects K=V, got '{kv}'"), 2))
        })
        .collect()
}

fn param_value(params: &[(String, String)], key: &str) -> Result<f64, Failure> {
    let raw = params
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v)
        .ok_or_else(|| Failure::new(format!("channel requires --param {key}=<value>"), 2))?;
    raw.parse::<f64>()
        .map_err(|_| Failure::new(format!("parameter {key} is not a number: '{raw}'"), 2))
}

fn build_channel(args: &CapacityArgs) -> Result<AffineChannel, Failure> {
    match (&args.channel, &args.channel_file) {
        (Some(_), Some(_)) => Err(Failure::new(
            "--channel and --channel-file are mutually exclusive",
            2,
        )),
        (None, None) => Err(Failure::new(
            "one of --channel or --channel-file is required",
            2,
        )),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::new(format!("cannot read {}: {e}", path.display()), 2))?;
            AffineChannel::from_json(&text).map_err(|e| match e {
                Error::ModeMisuse { reason } => Failure::new(reason, 2),
                other => lift(other),
            })
        }
        (Some(name), None) => {
            let params = parse_params(&args.params)?;
            let config_err = |e: Error| match e {
                Error::ParameterOutOfRange { .. } => Failure::new(e.to_string(), 2),
                other => lift(other),
            };
            match name.as_str() {
                "identity" => Ok(AffineChannel::identity()),
                "depolarizing" => {
                    AffineChannel::depolarizing(param_value(&params, "t")?).map_err(config_err)
                }
                "planar" => {
                    AffineChannel::planar(param_value(&params, "tx")?, param_value(&params, "ty")?)
                        .map_err(config_err)
                }
                "amplitude-damping" | "amplitude_damping" => {
                    AffineChannel::amplitude_damping(param_value(&params, "gamma")?)
                        .map_err(config_err)
                }
                "phase-damping" | "phase_damping" => {
                    AffineChannel::phase_damping(param_value(&params, "lambda")?)
                        .map_err(config_err)
                }
                "rotation" => {
                    let axis_raw = params
                        .iter()
                        .find(|(k, _)| k == "axis")
                        .map(|(_, v)| v.clone())
                        .unwrap_or_else(|| "z".to_string());
                    let axis = match axis_raw.as_str() {
                        "x" => [1.0, 0.0, 0.0],
                        "y" => [0.0, 1.0, 0.0],
                        "z" => [0.0, 0.0, 1.0],
                        other => {
                            let parts: Vec<f64> = other
                                .split(',')
                                .filter_map(|t| t.trim().parse().ok())
                                .collect();
                            if parts.len() != 3 {
                                return Err(Failure::new(
                                    format!("axis must be x, y, z or ax,ay,az (got '{other}')"),
                                    2,
                                ));
                            }
                            [parts[0], parts[1], parts[2]]
                        }
                    };
                    AffineChannel::rotation(axis, param_value(&params, "angle")?)
                        .map_err(config_err)
                }
                other => Err(Failure::new(
                    format!(
                        "unknown channel '{other}'; expected identity, depolarizing, planar, \
                         amplitude-damping, phase-damping or rotation"
                    ),
                    2,
                )),
            }
        }
    }
}

fn cmd_capacity(args: CapacityArgs) -> Result<u8, Failure> {
    if args.format != "json" {
        return Err(Failure::new(
            format!("capacity reports are JSON (got --format {})", args.format),
            2,
        ));
    }
    let channel = build_channel(&args)?;
    let report = holevo_capacity(&channel, args.samples, args.seed, args.tol).map_err(lift)?;
    write_output(&args.out, &format!("{}\n", report.to_json()))?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// voronoi

/// 41^3 lattice over [-1,1]^3 clipped to radius 0.999: the default query
/// set for the divergence modes.
fn ball_grid() -> Vec<BlochVector> {
    let n = 41;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let c = |idx: usize| -1.0 + 2.0 * idx as f64 / (n - 1) as f64;
                let p = [c(i), c(j), c(k)];
                if bloch_voronoi::state::norm3(p) <= 0.999 {
                    out.push(BlochVector::new(p[0], p[1], p[2]).expect("grid point in ball"));
                }
            }
        }
    }
    out
}

fn section_path(base: &Path, epsilon: f64) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "assignment".to_string());
    let ext = base
        .extension()
        .map(|s| format!(".{}", s.to_string_lossy()))
        .unwrap_or_default();
    base.with_file_name(format!("{stem}-eps{epsilon:e}{ext}"))
}

fn cmd_voronoi(args: VoronoiArgs) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(&args.sites)
        .map_err(|e| Failure::new(format!("cannot read {}: {e}", args.sites.display()), 2))?;
    let sites = SiteSet::from_csv(&text).map_err(|e| Failure::new(e.to_string(), 2))?;
    let mode = DiagramMode::parse(&args.mode)
        .ok_or_else(|| Failure::new(format!("unknown mode '{}'", args.mode), 2))?;

    if !args.epsilons.is_empty() {
        if args.format != "csv" {
            return Err(Failure::new(
                "epsilon sections are emitted as CSV assignments only",
                2,
            ));
        }
        if !mode.is_divergence() {
            return Err(Failure::new(
                format!(
                    "--epsilon runs pure-state limit sections, which need a divergence mode \
                     (got {})",
                    mode.name()
                ),
                4,
            ));
        }
        let queries = sample_sphere(args.samples, args.seed).map_err(lift)?;
        let mut stdout_blocks = String::new();
        for &eps in &args.epsilons {
            let assignment = pure_limit_section(&sites, eps, mode, &queries).map_err(lift)?;
            let csv = assignment.to_csv();
            match &args.out {
                Some(path) => {
                    let target = if args.epsilons.len() == 1 {
                        path.clone()
                    } else {
                        section_path(path, eps)
                    };
                    std::fs::write(&target, csv).map_err(|e| {
                        Failure::new(format!("cannot write {}: {e}", target.display()), 2)
                    })?;
                }
                None => {
                    stdout_blocks.push_str(&format!("# epsilon = {eps:e}\n"));
                    stdout_blocks.push_str(&csv);
                }
            }
        }
        if args.out.is_none() {
            print!("{stdout_blocks}");
        }
        return Ok(0);
    }

    match args.format.as_str() {
        "csv" => {
            let queries = if mode.is_divergence() {
                ball_grid()
            } else {
                sample_sphere(args.samples, args.seed).map_err(lift)?
            };
            let assignment = classify_batch(mode, &sites, &queries).map_err(lift)?;
            write_output(&args.out, &assignment.to_csv())?;
            Ok(0)
        }
        "off" | "svg" => {
            let format = ExportFormat::parse(&args.format).expect("matched above");
            let content = export_cells(&sites, mode, 32, format).map_err(lift)?;
            write_output(&args.out, &content)?;
            Ok(0)
        }
        other => Err(Failure::new(
            format!("unknown format '{other}'; expected csv, off or svg"),
            2,
        )),
    }
}

// ---------------------------------------------------------------------------
// verify

fn cmd_verify(args: VerifyArgs) -> Result<u8, Failure> {
    let suites: Vec<String> = if args.only.is_empty() {
        verify::SUITE_NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        args.only.clone()
    };

    let mut results = Vec::new();
    for name in &suites {
        let mut batch =
            verify::run_suite(name, args.seed).map_err(|e| Failure::new(e.to_string(), 2))?;
        results.append(&mut batch);
    }

    println!(
        "{:<10} {:<46} {:>10} {:>13} {:>10} {:>6}",
        "suite", "property", "samples", "max_error", "tolerance", "result"
    );
    let mut all_passed = true;
    for r in &results {
        all_passed &= r.passed;
        println!(
            "{:<10} {:<46} {:>10} {:>13.3e} {:>10.1e} {:>6}",
            r.suite,
            r.name,
            r.samples,
            r.max_error,
            r.tolerance,
            if r.passed { "pass" } else { "FAIL" }
        );
        if let Some(details) = &r.details {
            println!("           {details}");
        }
        eprintln!("timing: {} / {} took {:.2?}", r.suite, r.name, r.elapsed);
    }
    println!(
        "{} of {} properties passed",
        results.iter().filter(|r| r.passed).count(),
        results.len()
    );
    Ok(if all_passed { 0 } else { 1 })
}
