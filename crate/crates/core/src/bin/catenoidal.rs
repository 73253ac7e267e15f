use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use catenoidal::catenoid::{total_curvature, CatenoidFamily};
use catenoidal::ends::{fit_end, read_samples, EndKind};
use catenoidal::export::{angle_range, meridian_curve, profile_table, sweep, write_csv, SurfaceMesh};
use catenoidal::geometry_checks::{verify, VerifyOptions};
use catenoidal::jacobi::critical_angle;
use catenoidal::spectrum::{morse_index, IndexOptions, DEFAULT_L_MAX, DEFAULT_TRUNCATIONS};
use catenoidal::Error;

#[derive(Debug, Parser, Serialize)]
#[command(name = "catenoidal", version, about = "Catenoidal free boundary minimal hypersurfaces")]
struct Cli {
    /// Read every angle argument in degrees instead of radians.
    #[arg(long, global = true)]
    degrees: bool,
    /// Print the resolved configuration, including defaults, as JSON and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Table of phi and phi' on (1, r_max].
    Profile(ProfileArgs),
    /// Constants of one member of the family, as JSON.
    Family(FamilyArgs),
    /// Index and asymptotic data over a range of angles, as CSV.
    Sweep(SweepArgs),
    /// Morse index with the truncation sweep, as JSON.
    Index(IndexArgs),
    /// Angle at which the index jumps from 0 to 1.
    CriticalAngle(CriticalArgs),
    /// Geometric and Jacobi-field checks; exit code 1 on failure.
    Verify(VerifyArgs),
    /// Fit the end expansion to a two-column CSV of samples.
    EndFit(EndFitArgs),
    /// Total curvature of an n = 2 member.
    TotalCurvature(TotalCurvatureArgs),
    /// OBJ surface for n = 2, meridian CSV for n > 2.
    Mesh(MeshArgs),
}

#[derive(Debug, Args, Serialize)]
struct ProfileArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 10.0)]
    r_max: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct FamilyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    /// Accepted for symmetry with other commands; output is always JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args, Serialize)]
struct SweepArgs {
    #[arg(long)]
    n: usize,
    /// `lo:hi:steps`, inclusive.
    #[arg(long)]
    alphas: String,
    #[arg(long, default_value_t = DEFAULT_L_MAX)]
    l_max: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct IndexArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_L_MAX)]
    l_max: usize,
    /// Truncation radii as multiples of R_alpha, increasing.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_TRUNCATIONS.to_vec())]
    truncations: Vec<f64>,
    /// Use only the given truncations, without extending the ladder.
    #[arg(long)]
    fixed: bool,
    /// Number of lowest mode-0 eigenvalues to report.
    #[arg(long, default_value_t = 0)]
    eigenvalues: usize,
}

#[derive(Debug, Args, Serialize)]
struct CriticalArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1e-13)]
    tol: f64,
}

#[derive(Debug, Args, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    /// Shift the height by this amount (negative control).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    height_offset: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum KindArg {
    Graph,
    Jacobi,
}

#[derive(Debug, Args, Serialize)]
struct EndFitArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = KindArg::Graph)]
    kind: KindArg,
}

#[derive(Debug, Args, Serialize)]
struct TotalCurvatureArgs {
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
}

#[derive(Debug, Args, Serialize)]
struct MeshArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 10.0)]
    r_max: f64,
    /// Rings and angular segments (n = 2) or curve points (n > 2).
    #[arg(long, default_value_t = 64)]
    res: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure classes mapped to exit codes.
enum Failure {
    /// Bad input: exit code 2.
    Usage(String),
    /// Computation or verification failed: exit code 1.
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Dimension(_) | Error::UnsupportedDimension { .. } => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json<T: Serialize>(value: &T) -> Outcome {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn family(n: usize, alpha: f64) -> std::result::Result<CatenoidFamily, Failure> {
    Ok(CatenoidFamily::new(n, alpha)?)
}

fn parse_range(spec: &str, scale: f64) -> std::result::Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Failure::Usage(format!("expected lo:hi:steps, got '{spec}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
    Ok(angle_range(lo * scale, hi * scale, steps)?)
}

fn run(cli: &Cli) -> Outcome {
    let scale = if cli.degrees { std::f64::consts::PI / 180.0 } else { 1.0 };
    match &cli.command {
        Command::Profile(a) => {
            let rows = profile_table(a.n, a.r_max, a.points)?;
            write_csv(output(&a.out)?, &rows)?;
        }
        Command::Family(a) => print_json(&family(a.n, a.alpha * scale)?.record())?,
        Command::Sweep(a) => {
            let alphas = parse_range(&a.alphas, scale)?;
            let options = IndexOptions {
                l_max: a.l_max,
                ..IndexOptions::default()
            };
            let rows = sweep(a.n, &alphas, &options)?;
            write_csv(output(&a.out)?, &rows)?;
        }
        Command::Index(a) => {
            let cat = family(a.n, a.alpha * scale)?;
            let options = IndexOptions {
                truncations: a.truncations.clone(),
                l_max: a.l_max,
                adaptive: !a.fixed,
                eigenvalues: a.eigenvalues,
            };
            let result = morse_index(&cat, &options)?;
            print_json(&result)?;
            if !result.is_conclusive() {
                return Err(Failure::Runtime("index did not stabilize over the truncations".into()));
            }
        }
        Command::CriticalAngle(a) => print_json(&critical_angle(a.n, a.tol)?)?,
        Command::Verify(a) => {
            let cat = family(a.n, a.alpha * scale)?.with_height_offset(a.height_offset);
            let report = verify(&cat, &VerifyOptions::default())?;
            print_json(&report)?;
            if !report.passed {
                return Err(Failure::Runtime("verification failed".into()));
            }
        }
        Command::EndFit(a) => {
            let samples = read_samples(&a.input)?;
            let kind = match a.kind {
                KindArg::Graph => EndKind::Graph,
                KindArg::Jacobi => EndKind::Jacobi,
            };
            print_json(&fit_end(&samples, a.n, kind)?)?;
        }
        Command::TotalCurvature(a) => println!("{}", total_curvature(a.alpha * scale)?),
        Command::Mesh(a) => {
            let cat = family(a.n, a.alpha * scale)?;
            let out = output(&a.out)?;
            if a.n == 2 {
                SurfaceMesh::catenoid(&cat, a.r_max, a.res, a.res)?.write_obj(out)?;
            } else {
                write_csv(out, &meridian_curve(&cat, a.r_max, a.res)?)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.print_config {
        return match print_json(&cli) {
            Ok(()) => ExitCode::SUCCESS,
            Err(_) => ExitCode::from(1),
        };
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
