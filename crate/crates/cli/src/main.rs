//! `rrmf`: sample analytic curves, interpolate point streams, evaluate and
//! validate stored splines.
//!
//! Exit codes: 0 success, 2 validation failure, 3 infeasible data,
//! 4 I/O, parse or usage errors, 1 anything else.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use rrmf_core::io::curves::{self, Curve};
use rrmf_core::io::{self, SplineFile, StreamFile};
use rrmf_core::spline::{self, SegmentReport};
use rrmf_core::tol::Tolerances;
use rrmf_core::{Error, KnotMode};

const EXIT_VALIDATION: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_INPUT: u8 = 4;

#[derive(Parser)]
#[command(name = "rrmf", version, about = "PH quintic splines with rational rotation-minimizing frames")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample an analytic curve at N+1 uniform parameters with exact tangents.
    Sample {
        #[arg(long)]
        curve: Curve,
        #[arg(long)]
        n: usize,
        /// Output stream file (.json keeps tangents, .csv holds points only).
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a spline through a point stream.
    Interpolate {
        #[arg(long = "in")]
        input: PathBuf,
        /// Knot spacing; defaults to uniform for sampled curves, chord otherwise.
        #[arg(long)]
        mode: Option<KnotMode>,
        /// JSON frame `{u, v, w}` overriding the initial frame.
        #[arg(long)]
        frame: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Per-segment report (JSON); printed to stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Evaluate a stored spline at M+1 uniform global parameters.
    Eval {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a stored spline against the independent oracles.
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
        /// Validation report (JSON); printed to stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        /// ODE samples per segment.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

#[derive(Serialize)]
struct InterpolationReport<'a> {
    segments: usize,
    knots: &'a [f64],
    max_class_i_residual: f64,
    max_ph_residual: f64,
    reports: &'a [SegmentReport],
}

fn exit_code(e: &Error) -> u8 {
    if e.is_infeasible() {
        return EXIT_INFEASIBLE;
    }
    match e.root() {
        Error::Io(_) | Error::Parse { .. } | Error::Json(_) | Error::Schema(_) | Error::Validation(_) => EXIT_INPUT,
        _ => 1,
    }
}

fn write_json(path: Option<&Path>, value: &impl Serialize) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn run(cmd: Command) -> Result<u8, Error> {
    match cmd {
        Command::Sample { curve, n, out } => {
            let s = curves::sample(curve, n)?;
            StreamFile::from(&s).write(&out)?;
            eprintln!("{}: {} points written to {}", curve.name(), s.points.len(), out.display());
        }
        Command::Interpolate {
            input,
            mode,
            frame,
            out,
            report,
        } => {
            let file = StreamFile::read(&input)?;
            let mode = file.knot_mode(mode);
            let frame = frame.as_deref().map(io::read_frame).transpose()?;
            let stream = file.to_stream(mode, frame)?;
            let path = spline::build_with(&stream, mode, file.tangents.as_deref(), &Tolerances::from_env())?;
            SplineFile::from_path(&path).write(&out)?;
            let (ci, ph) = path.max_residuals();
            write_json(
                report.as_deref(),
                &InterpolationReport {
                    segments: path.segments.len(),
                    knots: &path.knots,
                    max_class_i_residual: ci,
                    max_ph_residual: ph,
                    reports: &path.reports,
                },
            )?;
            eprintln!("{} segments written to {}", path.segments.len(), out.display());
        }
        Command::Eval { input, samples, out } => {
            if samples == 0 {
                return Err(Error::Validation("--samples must be at least 1".into()));
            }
            let path = SplineFile::read(&input)?.to_path()?;
            let rows = path.sample(samples);
            let mut w = BufWriter::new(File::create(&out)?);
            io::write_eval_csv(&mut w, &rows)?;
            w.flush()?;
        }
        Command::Validate { input, report, samples } => {
            let path = SplineFile::read(&input)?.to_path()?;
            let r = io::validate(&path, samples.max(2));
            write_json(report.as_deref(), &r)?;
            for c in r.checks.iter().filter(|c| !c.pass) {
                let seg = c.segment.map(|s| format!(" (segment {s})")).unwrap_or_default();
                eprintln!("FAIL {}{seg}: {:e} > {:e}", c.name, c.value, c.tolerance);
            }
            if !r.pass {
                return Ok(EXIT_VALIDATION);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
