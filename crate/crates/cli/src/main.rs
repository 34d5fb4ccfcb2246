use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qmeas_cli::config::Format;
use qmeas_cli::{commands, CliError, Report, RunConfig};

#[derive(Parser)]
#[command(name = "qmeas", version, about = "Measurement-theory experiments as reproducible CSV/JSON tables")]
struct Cli {
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Significant digits per number.
    #[arg(long, global = true)]
    precision: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Outcome probabilities and post-measurement states for an observable fixture.
    Measure {
        #[arg(long)]
        fixture: Option<PathBuf>,
    },
    /// Dimensionless position distribution W(ξ) for several ε₀.
    Fig1 {
        #[arg(long, value_delimiter = ',')]
        eps0: Option<Vec<f64>>,
    },
    /// Survival-averaged position and momentum densities of the Gaussian packet.
    Survival,
    /// Negative-region moments, exact against asymptotic.
    Asymptotics {
        #[arg(long, value_delimiter = ',')]
        sigma: Option<Vec<f64>>,
    },
    /// Wave operators, S-matrix defects, normalizations and the ε³/ν probe.
    ScatteringDemo {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        nu: Option<Vec<f64>>,
    },
}

fn run(cli: Cli) -> Result<(Report, RunConfig), CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_path(p)?,
        None => RunConfig::default(),
    };
    if let Some(f) = cli.format {
        cfg.output.format = f;
    }
    if let Some(p) = cli.precision {
        cfg.output.precision = p;
    }
    if let Some(o) = cli.out {
        cfg.output.path = Some(o);
    }
    if let Command::Fig1 { eps0: Some(e) } = &cli.command {
        cfg.fig1.eps0 = e.clone();
    }
    cfg.validate()?;
    let report = match &cli.command {
        Command::Measure { fixture } => commands::measure(&cfg, fixture.as_deref())?,
        Command::Fig1 { .. } => commands::fig1(&cfg)?,
        Command::Survival => commands::survival(&cfg)?,
        Command::Asymptotics { sigma } => commands::asymptotics(&cfg, sigma.as_deref())?,
        Command::ScatteringDemo { model, nu } => commands::scattering_demo(&cfg, model.as_deref(), nu.as_deref())?,
    };
    Ok((report, cfg))
}

fn emit(report: &Report, cfg: &RunConfig) -> Result<(), CliError> {
    let text = report.render(cfg.output.format, cfg.output.precision);
    match &cfg.output.path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.clone(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli).and_then(|(report, cfg)| {
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
        emit(&report, &cfg)?;
        let failed: Vec<&str> = report.failed().iter().map(|c| c.name.as_str()).collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(CliError::Check(failed.join(", ")))
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
