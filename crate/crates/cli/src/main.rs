use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ctc_cli::config::{ConfigError, Model, RawConfig};
use ctc_cli::sweep::run_sweep;
use ctc_cli::verify::{report_csv, verify, Suite};

const EXIT_INVALID: u8 = 1;
const EXIT_VERIFY_FAILED: u8 = 2;
const EXIT_FORBIDDEN: u8 = 3;

#[derive(Parser)]
#[command(name = "ctc", version, about = "Billiard-ball clocks on a closed timelike curve")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the Deutsch-model closed forms
    Dctc(RunArgs),
    /// Sweep the postselected-teleportation closed forms
    Pctc(RunArgs),
    /// Run a verification suite
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Flat key=value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of clock levels
    #[arg(long = "N", value_name = "N")]
    levels: Option<String>,
    /// Comma-separated vacuum weights
    #[arg(long)]
    omega: Option<String>,
    /// Comma-separated vacuum amplitudes, squared into omega
    #[arg(long)]
    sqrt_omega: Option<String>,
    /// Comma-separated empty-CTC probabilities (dctc only)
    #[arg(long)]
    g: Option<String>,
    /// Delay grid in units of t_perp
    #[arg(long, value_name = "START:STOP:POINTS")]
    dt_grid: Option<String>,
    /// Ground-state energy
    #[arg(long, allow_hyphen_values = true)]
    e1: Option<String>,
    /// Constrained delay and ground energy
    #[arg(long, value_name = "P,Q")]
    constrained: Option<String>,
    /// Any of populations, clock_probs, cv_probs
    #[arg(long)]
    observables: Option<String>,
    /// CSV destination (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Winding-series truncation (dctc only)
    #[arg(long)]
    tol: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Unitarity,
    Fixedpoint,
    Oracle,
    Constraints,
    Figures,
}

impl RunArgs {
    fn into_raw(self) -> Result<RawConfig, String> {
        let mut raw = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                RawConfig::from_text(&text).map_err(|e| format!("{}: {e}", path.display()))?
            }
            None => RawConfig::default(),
        };
        let out = self.out.map(|p| p.to_string_lossy().into_owned());
        let flags = [
            ("N", self.levels),
            ("omega", self.omega),
            ("sqrt-omega", self.sqrt_omega),
            ("g", self.g),
            ("dt-grid", self.dt_grid),
            ("e1", self.e1),
            ("constrained", self.constrained),
            ("observables", self.observables),
            ("out", out),
            ("tol", self.tol),
        ];
        for (flag, value) in flags {
            if let Some(v) = value {
                raw.set_flag(flag, &v).map_err(|e: ConfigError| e.to_string())?;
            }
        }
        Ok(raw)
    }
}

fn run(model: Model, args: RunArgs) -> ExitCode {
    let config = match args.into_raw().and_then(|raw| raw.resolve(Some(model)).map_err(|e| e.to_string())) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let sweep = match run_sweep(&config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let csv = match sweep.to_csv() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    match &config.output_path {
        Some(path) => {
            if let Err(e) = fs::write(path, &csv) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_INVALID);
            }
        }
        None => print!("{csv}"),
    }
    if config.is_single_point() && sweep.forbidden_count() > 0 {
        eprintln!("forbidden initial data: the reduced operator annihilates the input");
        return ExitCode::from(EXIT_FORBIDDEN);
    }
    ExitCode::SUCCESS
}

fn run_verify(suite: SuiteArg, tol: Option<f64>) -> ExitCode {
    let suites: Vec<Suite> = match suite {
        SuiteArg::All => Suite::ALL.to_vec(),
        SuiteArg::Unitarity => vec![Suite::Unitarity],
        SuiteArg::Fixedpoint => vec![Suite::Fixedpoint],
        SuiteArg::Oracle => vec![Suite::Oracle],
        SuiteArg::Constraints => vec![Suite::Constraints],
        SuiteArg::Figures => vec![Suite::Figures],
    };
    if let Some(t) = tol {
        if !(t >= 0.0) {
            eprintln!("error: --tol must be non-negative");
            return ExitCode::from(EXIT_INVALID);
        }
    }
    let checks: Vec<_> = suites.into_iter().flat_map(|s| verify(s, tol)).collect();
    match report_csv(&checks) {
        Ok(report) => print!("{report}"),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    }
    if checks.iter().all(|c| c.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY_FAILED)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Dctc(args) => run(Model::Dctc, args),
        Command::Pctc(args) => run(Model::Pctc, args),
        Command::Verify { suite, tol } => run_verify(suite, tol),
    }
}
