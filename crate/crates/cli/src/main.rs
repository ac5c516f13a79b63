use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaussform::engineering::engineer;
use gaussform::entanglement::{full_report_in, log_negativity_pair, EntanglementReport, EntropyUnit};
use gaussform::gmps::parity_table;
use gaussform::io::{self, CmDocument, StandardFormDocument, ROUND_TRIP_DIGITS};
use gaussform::standard_form::{harmonic_ground_state, reconstruct_diagonal, reduce, ring_potential, StandardForm};
use gaussform::{CovarianceMatrix, Error, Tolerances};
use serde::Serialize;

const TOL_ENV: &str = "GF_TOL_OVERRIDE";

#[derive(Parser)]
#[command(name = "gaussform", version, about = "Engineer, normalize and analyze pure multimode Gaussian states")]
struct Cli {
    /// Significant digits for floats on stdout (17 round-trips exactly).
    #[arg(long, global = true, default_value_t = ROUND_TRIP_DIGITS as u32, value_parser = clap::value_parser!(u32).range(1..=40))]
    precision: u32,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prepare a state from a squeezer/beam-splitter recipe.
    Engineer {
        #[arg(long)]
        recipe: PathBuf,
        /// Write the covariance matrix here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Symplectic spectrum, purity and entanglement of a covariance matrix.
    Analyze {
        #[arg(long)]
        cm: PathBuf,
        #[arg(long, value_enum, default_value_t = AnalyzeFormat::Json)]
        format: AnalyzeFormat,
        /// Report entropies and log-negativities in nats.
        #[arg(long)]
        nats: bool,
    },
    /// Convert between covariance matrices and the standard form.
    StandardForm(StandardFormArgs),
    /// Bond-number lower bounds for Gaussian matrix product states.
    Gmps {
        #[arg(long)]
        n_min: u64,
        #[arg(long)]
        n_max: u64,
        #[arg(long, value_enum, default_value_t = TableFormat::Json)]
        format: TableFormat,
    },
    /// Ground state of a translationally invariant harmonic ring.
    Ring {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        coupling: f64,
    },
}

#[derive(Args)]
#[group(skip)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["cm", "vq"])))]
struct StandardFormArgs {
    /// Covariance matrix to bring into standard form.
    #[arg(long)]
    cm: Option<PathBuf>,
    /// Standard-form document (`{"n_modes", "vq"}`).
    #[arg(long)]
    vq: Option<PathBuf>,
    /// Recompute the diagonal of V_Q from its off-diagonal entries.
    #[arg(long)]
    reconstruct: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnalyzeFormat {
    Json,
    /// Pairwise log-negativity matrix.
    LognegCsv,
    /// Pairwise det εᵢⱼ matrix.
    DetCsv,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Json,
    Csv,
}

/// Exit status: 1 for domain errors, 2 for unusable input.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Format(_) => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

type CmdResult = Result<String, Failure>;

fn tolerances() -> Result<Tolerances, Failure> {
    match std::env::var(TOL_ENV) {
        Err(_) => Ok(Tolerances::default()),
        Ok(raw) => match raw.trim().parse::<f64>() {
            Ok(f) if f.is_finite() && f > 0.0 => {
                eprintln!("{TOL_ENV}: scaling all tolerances by {f}");
                Ok(Tolerances::default().scaled(f))
            }
            _ => Err(Failure::input(format!("{TOL_ENV} must be a positive number, got {raw:?}"))),
        },
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn load_cm(path: &Path, tol: &Tolerances) -> Result<CovarianceMatrix, Failure> {
    let doc: CmDocument = serde_json::from_str(&read(path)?)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let data = doc.matrix()?;
    Ok(CovarianceMatrix::with_tolerances(data, tol)?)
}

fn json<T: Serialize>(value: &T, digits: usize) -> CmdResult {
    Ok(io::to_json(value, digits)? + "\n")
}

fn cmd_engineer(recipe: &Path, out: Option<&Path>, digits: usize, tol: &Tolerances) -> CmdResult {
    let recipe = io::recipe_from_json(&read(recipe)?)?;
    let check = recipe.validate();
    for w in &check.warnings {
        eprintln!("warning: {w}");
    }
    let built = engineer(&recipe)?;
    let purity = built.cm.purity_with(tol);
    eprintln!("purity residual {:e} (tolerance {:e})", purity.residual, purity.tolerance);
    eprintln!("{} parameters", built.free_parameters());
    let text = io::cm_to_json(&built.cm, digits)? + "\n";
    match out {
        Some(path) => {
            fs::write(path, &text).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
            eprintln!("wrote {}", path.display());
            Ok(String::new())
        }
        None => Ok(text),
    }
}

#[derive(Serialize)]
struct PurityOut {
    pure: bool,
    residual: f64,
    tolerance: f64,
}

#[derive(Serialize)]
struct AnalyzeOut {
    n_modes: usize,
    spectrum: Vec<f64>,
    rank: usize,
    purity: PurityOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<EntanglementReport>,
}

fn cmd_analyze(path: &Path, format: AnalyzeFormat, nats: bool, digits: usize, tol: &Tolerances) -> CmdResult {
    let cm = load_cm(path, tol)?;
    let spectrum = cm.spectrum_with(tol)?;
    let purity = cm.purity_with(tol);
    let unit = if nats { EntropyUnit::Nats } else { EntropyUnit::Bits };
    let report = if purity.pure {
        Some(full_report_in(&cm, unit)?)
    } else {
        eprintln!("state is not pure (rank {}); entanglement report skipped", spectrum.rank);
        None
    };
    match format {
        AnalyzeFormat::Json => json(
            &AnalyzeOut {
                n_modes: cm.n_modes(),
                spectrum: spectrum.values,
                rank: spectrum.rank,
                purity: PurityOut { pure: purity.pure, residual: purity.residual, tolerance: purity.tolerance },
                report,
            },
            digits,
        ),
        AnalyzeFormat::LognegCsv | AnalyzeFormat::DetCsv => {
            let report = report.ok_or_else(|| Failure { code: 1, message: "pairwise matrices need a pure state".into() })?;
            let m = match format {
                AnalyzeFormat::LognegCsv => &report.pairwise_logneg,
                _ => &report.pairwise_detblocks,
            };
            Ok(io::matrix_csv(m, digits))
        }
    }
}

#[derive(Serialize)]
struct FormOut {
    standard_form: StandardFormDocument,
    cm: CmDocument,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
}

fn cmd_standard_form(args: &StandardFormArgs, digits: usize, tol: &Tolerances) -> CmdResult {
    if let Some(path) = &args.cm {
        if args.reconstruct {
            return Err(Failure::input("--reconstruct works on a --vq document"));
        }
        let cm = load_cm(path, tol)?;
        let r = reduce(&cm, tol).inspect_err(|e| eprintln!("{e}"))?;
        eprintln!(
            "q-p residual {:e}, p-block residual {:e}, {} correlations",
            r.qp_residual,
            r.inverse_residual,
            r.form.parameters().len()
        );
        return Ok(io::standard_form_to_json(&r.form, digits)? + "\n");
    }
    let path = args.vq.as_ref().expect("clap enforces one source");
    let doc: StandardFormDocument = serde_json::from_str(&read(path)?)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let vq = doc.matrix()?;
    let (form, iterations, residual) = if args.reconstruct {
        let n = vq.nrows();
        let offdiag: Vec<f64> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| vq[(i, j)]).collect();
        let rec = reconstruct_diagonal(&offdiag, n).inspect_err(|e| eprintln!("{e}"))?;
        eprintln!("newton converged in {} iterations, residual {:e}", rec.iterations, rec.residual);
        (rec.form, Some(rec.iterations), Some(rec.residual))
    } else {
        (StandardForm::with_tolerances(vq, tol)?, None, None)
    };
    let out = FormOut {
        standard_form: StandardFormDocument::from_form(&form),
        cm: CmDocument::from_cm(&form.to_cm()),
        iterations,
        residual,
    };
    json(&out, digits)
}

fn cmd_gmps(n_min: u64, n_max: u64, format: TableFormat, digits: usize) -> CmdResult {
    let table = parity_table(n_min, n_max).map_err(|e| Failure::input(e.to_string()))?;
    match format {
        TableFormat::Json => json(&table, digits),
        TableFormat::Csv => Ok(io::bond_table_csv(&table)),
    }
}

#[derive(Serialize)]
struct RingOut {
    n_modes: usize,
    coupling: f64,
    cm: CmDocument,
    per_mode_entropy: Vec<f64>,
    nearest_neighbor_logneg: f64,
}

fn cmd_ring(n: usize, coupling: f64, digits: usize, tol: &Tolerances) -> CmdResult {
    if n < 3 {
        return Err(Failure::input(format!("ring needs n >= 3, got {n}")));
    }
    let potential = ring_potential(n, coupling).map_err(|e| Failure::input(e.to_string()))?;
    let cm = harmonic_ground_state(&potential)?;
    let purity = cm.purity_with(tol);
    eprintln!("purity residual {:e}", purity.residual);
    let report = full_report_in(&cm, EntropyUnit::Bits)?;
    let out = RingOut {
        n_modes: n,
        coupling,
        cm: CmDocument::from_cm(&cm),
        per_mode_entropy: report.per_mode_entropy,
        nearest_neighbor_logneg: log_negativity_pair(&cm, 1, 2)?,
    };
    json(&out, digits)
}

fn run(cli: &Cli) -> CmdResult {
    let tol = tolerances()?;
    let digits = cli.precision as usize;
    match &cli.command {
        Command::Engineer { recipe, out } => cmd_engineer(recipe, out.as_deref(), digits, &tol),
        Command::Analyze { cm, format, nats } => cmd_analyze(cm, *format, *nats, digits, &tol),
        Command::StandardForm(args) => cmd_standard_form(args, digits, &tol),
        Command::Gmps { n_min, n_max, format } => cmd_gmps(*n_min, *n_max, *format, digits),
        Command::Ring { n, coupling } => cmd_ring(*n, *coupling, digits, &tol),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
