use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lapweil::riemann::SignConvention;
use lapweil_cli::commands::{self, CliError, Outcome, RunOptions};
use lapweil_cli::manifest::{Manifest, Mode};
use lapweil_cli::report;
use lapweil_cli::suite::SuiteOptions;

#[derive(Parser)]
#[command(name = "lapweil", version, about = "Exact checks of Laplacians and harmonic morphisms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the Laplacian of functions at the manifest points.
    Laplacian {
        manifest: PathBuf,
        /// Function to evaluate; overrides the manifest's [laplacian] list. Repeatable.
        #[arg(long = "function", short = 'f')]
        functions: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Classify a map as semi-conformal, harmonic or a harmonic morphism.
    CheckMap {
        manifest: PathBuf,
        /// Also compare against the harmonic-2-jet pullback route.
        #[arg(long)]
        fi: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Decide whether a 2-jet is harmonic at the manifest points.
    CheckJet {
        manifest: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run the built-in suite of executable statements.
    VerifyPaper {
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        output: Output,
        #[arg(long = "flip-gamma-sign", hide = true)]
        flip_gamma_sign: bool,
    },
}

#[derive(Args)]
struct Common {
    /// Arithmetic; defaults to the manifest's [options] mode, else exact.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Float64 tolerance; defaults to the manifest's, else 1e-9.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float64,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float64 => Mode::Float64,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Summary,
}

fn run_manifest(
    path: &Path,
    common: &Common,
    fi: bool,
    functions: Vec<String>,
    cmd: fn(&Manifest, &RunOptions) -> Result<Outcome, CliError>,
) -> Result<Outcome, CliError> {
    if let Some(t) = common.tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Usage(format!("--tol {t}: must be a finite non-negative number")));
        }
    }
    let m = Manifest::load(path)?;
    let opts = RunOptions {
        mode: common.mode.map(Mode::from),
        tol: common.tol,
        fi,
        functions,
    };
    cmd(&m, &opts)
}

fn emit(outcome: &Outcome, output: Output) -> ExitCode {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let written = match output {
        Output::Json => out
            .write_all(report::render(&outcome.report).as_bytes())
            .map(|()| eprintln!("{}", outcome.summary)),
        Output::Summary => writeln!(out, "{}", outcome.summary),
    };
    if written.is_err() {
        return ExitCode::from(2);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, output) = match cli.command {
        Command::Laplacian { manifest, functions, common } => (
            run_manifest(&manifest, &common, false, functions, commands::laplacian_cmd),
            common.output,
        ),
        Command::CheckMap { manifest, fi, common } => (
            run_manifest(&manifest, &common, fi, Vec::new(), commands::check_map_cmd),
            common.output,
        ),
        Command::CheckJet { manifest, common } => (
            run_manifest(&manifest, &common, false, Vec::new(), commands::check_jet_cmd),
            common.output,
        ),
        Command::VerifyPaper { mode, seed, output, flip_gamma_sign } => {
            let opts = SuiteOptions {
                seed,
                sign: if flip_gamma_sign {
                    SignConvention::Flipped
                } else {
                    SignConvention::Standard
                },
            };
            (Ok(commands::verify_paper_cmd(mode.into(), &opts)), output)
        }
    };
    match result {
        Ok(outcome) => emit(&outcome, output),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
