//! Command-line front end of the `hedgemap` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::diagnostics::{self, lsc_probe, selection_oscillation, Schedule, SequenceSpec};
use crate::error::{Error, Result};
use crate::geometry::{BoatSet, Point3};
use crate::mesh;
use crate::model::{AdmissibleTriple, ModelDescriptor, ModelKind};
use crate::solver::{optimal_set, rho_with_path, SolverConfig};
use crate::verify::{self, VerifyReport};

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hedgemap", version, about = "Optimal value and optimal set of a hedging problem in R^3")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the optimal value at a point.
    Rho(PointArgs),
    /// Print the optimal set at a point as JSON.
    Optset(PointArgs),
    /// Probe lower semicontinuity of the optimal set at a point.
    ProbeLsc(ProbeArgs),
    /// Measure how far the optimal sets along a sequence oscillate.
    ProbeSelection(ProbeArgs),
    /// Run every property check and write a report.
    Verify(VerifyArgs),
    /// Export a triangulated boundary sample and the profile outline.
    Mesh(MeshArgs),
}

#[derive(Debug, Args)]
pub struct ModelArg {
    /// `basic`, `twisted`, or a path to a JSON model descriptor.
    #[arg(long, default_value = "basic")]
    pub model: String,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub model: ModelArg,
    /// Point as `a,b,c`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
    pub x: Point3,
    /// Read `--x` in rotated coordinates, i.e. evaluate at `Φ(x)`.
    #[arg(long)]
    pub pre_rotated: bool,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[command(flatten)]
    pub model: ModelArg,
    /// Largest sequence index.
    #[arg(long, default_value_t = 100)]
    pub n: u64,
    /// `linear` or `geometric:<ratio>`.
    #[arg(long, default_value = "linear", value_parser = parse_schedule)]
    pub schedule: Schedule,
    /// Perturbation sequence; defaults to the one matching the model.
    #[arg(long, value_parser = ["basic-lsc", "twisted-alternating"])]
    pub sequence: Option<String>,
    /// Base point of the lsc probe (`a,b,c`).
    #[arg(long, allow_hyphen_values = true, value_parser = parse_point, default_value = "0,0,0")]
    pub at: Point3,
    /// Output prefix: writes `<out>.json` and `<out>.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, env = "HEDGEMAP_SEED", default_value_t = 0)]
    pub seed: u64,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    #[command(flatten)]
    pub model: ModelArg,
    /// Overrides the shape parameter `r` of the body (geometry only).
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
    /// Vertex CSV; triangles and outline go to sibling files.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn parse_point(s: &str) -> std::result::Result<Point3, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated reals, got {s:?}"));
    }
    let mut c = [0.0; 3];
    for (slot, p) in c.iter_mut().zip(&parts) {
        *slot = p.parse::<f64>().map_err(|e| format!("{p:?}: {e}"))?;
        if !slot.is_finite() {
            return Err(format!("{p:?} is not finite"));
        }
    }
    Ok(Point3::new(c[0], c[1], c[2]))
}

pub fn parse_schedule(s: &str) -> std::result::Result<Schedule, String> {
    match s.split_once(':') {
        None if s == "linear" => Ok(Schedule::Linear),
        None if s == "geometric" => Ok(Schedule::Geometric { ratio: 2 }),
        Some(("geometric", k)) => match k.parse::<u64>() {
            Ok(ratio) if ratio >= 2 => Ok(Schedule::Geometric { ratio }),
            _ => Err(format!("bad geometric ratio {k:?}")),
        },
        _ => Err(format!("unknown schedule {s:?}; use linear or geometric:<ratio>")),
    }
}

/// `%.12g`-style formatting, independent of locale.
pub fn format_sig(v: f64) -> String {
    const DIGITS: i32 = 12;
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    let trim = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-5..DIGITS).contains(&exp) {
        trim(format!("{:.*}", (DIGITS - 1 - exp) as usize, v))
    } else {
        format!("{}e{}", trim(mantissa.to_string()), exp)
    }
}

pub fn load_model(spec: &str) -> Result<AdmissibleTriple> {
    match spec {
        "basic" => Ok(AdmissibleTriple::basic_triple()),
        "twisted" => Ok(AdmissibleTriple::twisted_triple()),
        path => ModelDescriptor::load(Path::new(path))?.build(),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible(_) | Error::InfeasibleColumn { .. } => EXIT_INFEASIBLE,
        Error::InvalidArgument(_) | Error::InvalidModel(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

fn point(args: &PointArgs, triple: &AdmissibleTriple) -> Point3 {
    if args.pre_rotated {
        triple.from_rotated(args.x)
    } else {
        args.x
    }
}

fn default_sequence(triple: &AdmissibleTriple, name: Option<&str>, n: u64) -> SequenceSpec {
    let r = triple.r();
    match name {
        Some("twisted-alternating") => SequenceSpec::twisted_alternating(r, n),
        Some(_) => SequenceSpec::basic_lsc(r, n),
        None if triple.kind == ModelKind::Twisted => SequenceSpec::twisted_alternating(r, n),
        None => SequenceSpec::basic_lsc(r, n),
    }
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let cfg = SolverConfig::default();
    match cli.command {
        Command::Rho(args) => {
            let triple = load_model(&args.model.model)?;
            let (value, path) = rho_with_path(point(&args, &triple), &triple, &cfg)?;
            writeln!(out, "{}", format_sig(value))?;
            writeln!(out, "path: {path}")?;
        }
        Command::Optset(args) => {
            let triple = load_model(&args.model.model)?;
            let set = optimal_set(point(&args, &triple), &triple, &cfg)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&set)?)?;
        }
        Command::ProbeLsc(args) => {
            let triple = load_model(&args.model.model)?;
            let seq = default_sequence(&triple, args.sequence.as_deref(), args.n).with_schedule(args.schedule);
            let report = lsc_probe(args.at, &seq, &triple, &cfg)?;
            if let Some(prefix) = &args.out {
                diagnostics::write_json(&report, &with_ext(prefix, "json"))?;
                diagnostics::write_csv(&report.csv_rows(), &with_ext(prefix, "csv"))?;
            }
            writeln!(out, "gap: {}", format_sig(report.gap))?;
            writeln!(out, "witness: {}", fmt_point(report.witness))?;
        }
        Command::ProbeSelection(args) => {
            let triple = load_model(&args.model.model)?;
            let seq = default_sequence(&triple, args.sequence.as_deref(), args.n).with_schedule(args.schedule);
            let report = selection_oscillation(&seq, &triple, &cfg)?;
            if let Some(prefix) = &args.out {
                diagnostics::write_json(&report, &with_ext(prefix, "json"))?;
                diagnostics::write_csv(&report.csv_rows(), &with_ext(prefix, "csv"))?;
            }
            writeln!(out, "oscillation: {}", format_sig(report.oscillation))?;
            writeln!(out, "odd limit: {}", fmt_point(report.odd_limit))?;
            writeln!(out, "even limit: {}", fmt_point(report.even_limit))?;
        }
        Command::Verify(args) => {
            let report = VerifyReport { seed: args.seed, claims: verify::run_all(args.seed) };
            if let Some(path) = &args.out {
                diagnostics::write_json(&report, path)?;
            }
            for c in &report.claims {
                writeln!(
                    out,
                    "{:<4} {:<28} worst {:>14} tol {:>8} n {}",
                    if c.passed() { "ok" } else { "FAIL" },
                    c.claim_id,
                    format_sig(c.worst_violation),
                    format_sig(c.tolerance),
                    c.samples
                )?;
            }
            let failed = report.claims.iter().filter(|c| !c.passed()).count();
            writeln!(out, "{} of {} checks passed", report.claims.len() - failed, report.claims.len())?;
            if failed > 0 {
                return Ok(EXIT_FAILURE);
            }
        }
        Command::Mesh(args) => {
            let triple = load_model(&args.model.model)?;
            let boat = match args.r {
                Some(r) => BoatSet::new(r, triple.boat.profile().clone())?,
                None => triple.boat.clone(),
            };
            let written = mesh::write_mesh(&boat, args.resolution, &args.out)?;
            for p in written {
                writeln!(out, "wrote {}", p.display())?;
            }
        }
    }
    Ok(0)
}

fn fmt_point(p: Point3) -> String {
    format!("{},{},{}", format_sig(p.x1), format_sig(p.x2), format_sig(p.x3))
}

/// Parses `args` and runs the command; returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
