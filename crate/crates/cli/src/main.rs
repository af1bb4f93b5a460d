//! `fuglede`: spectra, boundary matrices, local translations and the two
//! planar examples from the command line.
//!
//! Exit status is 0 when every check passes, 1 when a verification fails and
//! 2 on bad input.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "fuglede", version, about = "Spectral sets and local translations on unions of intervals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Write the report (or CSV) here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for every random choice a command makes.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Include wall-clock time in the report (makes it non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Spectral,
    Boundary,
    Both,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues of the self-adjoint restriction given by a boundary matrix.
    Spectrum(SpectrumArgs),
    /// Boundary matrix of a spectrum.
    Bmatrix(BmatrixArgs),
    /// Orthogonality, Parseval defect and optional tiling check.
    Verify(VerifyArgs),
    /// Apply U(t) through the spectrum, the boundary matrix, or both.
    Evolve(EvolveArgs),
    /// Gram matrix of the exponentials of a spectrum.
    Gram(GramArgs),
    /// Exact tiling check.
    Tile(TileArgs),
    /// Poincaré quotients on the dumbbell-chain domain.
    Nikodym(NikodymArgs),
    /// The unit square with the mixed lattice spectrum.
    Square2d(Square2dArgs),
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    /// Domain JSON.
    #[arg(long)]
    domain: PathBuf,
    /// Boundary matrix JSON.
    #[arg(long)]
    bmatrix: PathBuf,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    window: Option<Vec<f64>>,
    /// Acceptance threshold for the smallest singular value.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Scan step; defaults to a safe fraction of the endpoint scale.
    #[arg(long)]
    scan_step: Option<f64>,
    /// Also check that every eigenfunction in the window is an exponential.
    #[arg(long)]
    check_spectral: bool,
}

#[derive(Args, Debug)]
pub struct BmatrixArgs {
    #[arg(long)]
    domain: PathBuf,
    /// Spectrum spec such as "2Z u 2Z+1/2", or a spectrum file.
    #[arg(long)]
    spectrum: String,
    /// Truncation bound |λ| <= K for specs without one.
    #[arg(long, default_value_t = 10.0)]
    truncate: f64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long)]
    spectrum: String,
    /// Translation set "period=T;residues=r1,r2,…".
    #[arg(long)]
    tiling: Option<String>,
    /// Truncation bound for the orthogonality check.
    #[arg(long, default_value_t = 10.0)]
    truncate: f64,
    /// Orthogonality tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Test function for the Parseval defect, "indicator:a:b". Defaults to
    /// the left half of the first interval.
    #[arg(long = "f")]
    f: Option<String>,
    /// Largest allowed Parseval defect at K = 100, relative to ‖f‖².
    #[arg(long, default_value_t = 0.01)]
    parseval_tol: f64,
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long)]
    spectrum: Option<String>,
    #[arg(long)]
    bmatrix: Option<PathBuf>,
    /// "indicator:a:b" or "exp:λ".
    #[arg(long = "f")]
    f: String,
    #[arg(long, allow_negative_numbers = true)]
    t: f64,
    #[arg(long, value_enum, default_value_t = Method::Both)]
    method: Method,
    #[arg(long, default_value_t = 10.0)]
    truncate: f64,
    /// Samples per interval.
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Args, Debug)]
pub struct GramArgs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long)]
    spectrum: String,
    #[arg(long, default_value_t = 10.0)]
    truncate: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args, Debug)]
pub struct TileArgs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long)]
    tiling: String,
}

#[derive(Args, Debug)]
pub struct NikodymArgs {
    #[arg(long, default_value_t = 3)]
    p_max: usize,
    /// Number of squares and bands to build.
    #[arg(long, default_value_t = 16)]
    n_max: usize,
    /// Also write the domain geometry as CSV.
    #[arg(long)]
    geometry_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct Square2dArgs {
    /// Run the eigenvector check for every lattice point.
    #[arg(long)]
    check_eigen: bool,
    /// Largest |λ₁|, |λ₂| considered.
    #[arg(long, default_value_t = 4.0)]
    lmax: f64,
    /// Grid size (even).
    #[arg(long = "G", default_value_t = 64)]
    g: usize,
    /// Number of random grid translations.
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let name = match &cli.command {
        Command::Spectrum(_) => "spectrum",
        Command::Bmatrix(_) => "bmatrix",
        Command::Verify(_) => "verify",
        Command::Evolve(_) => "evolve",
        Command::Gram(_) => "gram",
        Command::Tile(_) => "tile",
        Command::Nikodym(_) => "nikodym",
        Command::Square2d(_) => "square2d",
    };
    let result = match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Bmatrix(a) => commands::bmatrix(a),
        Command::Verify(a) => commands::verify(a),
        Command::Evolve(a) => commands::evolve(a),
        Command::Gram(a) => commands::gram(a),
        Command::Tile(a) => commands::tile(a),
        Command::Nikodym(a) => commands::nikodym(a),
        Command::Square2d(a) => commands::square2d(a, cli.common.seed),
    };
    let mut output = match result {
        Ok(o) => o,
        Err(e) => {
            report::input_error(&e.to_string());
            return ExitCode::from(2);
        }
    };
    if cli.common.timing {
        output.report.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    let text = match cli.common.format {
        Format::Json => output.report.to_json(),
        Format::Csv => output.csv.clone(),
    };
    if let Err(e) = report::write_text(cli.common.out.as_deref(), &text) {
        report::input_error(&format!("cannot write output: {e}"));
        return ExitCode::from(2);
    }
    report::status(output.report.pass, name);
    if output.report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
