use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use needlecomp::model1d::{self, CurvatureDimension, JacobianParams};
use needlecomp_cli::config::{self, Format, RawConfig};
use needlecomp_cli::{emit, run};

#[derive(Parser)]
#[command(
    name = "needlecomp",
    version,
    about = "Needle decomposition and Heintze-Karcher experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks listed in an experiment file.
    Run {
        config: PathBuf,
        /// Override a key, as `section.key=value`. Repeatable.
        #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
        set: Vec<String>,
        /// Same as `--set output.format=...`.
        #[arg(long)]
        format: Option<String>,
        /// Same as `--set output.path=...`.
        #[arg(long, short)]
        output: Option<String>,
        /// Same as `--set tolerances.equality=...`.
        #[arg(long)]
        tol: Option<String>,
    },
    /// Evaluate J_{H,K,N}(r).
    #[command(allow_negative_numbers = true)]
    Jacobian {
        #[arg(long = "H")]
        h: f64,
        #[arg(long = "K")]
        k: f64,
        #[arg(long = "N")]
        n: f64,
        #[arg(long)]
        r: f64,
    },
    /// Evaluate the model isoperimetric profile I_{K,N}(v).
    #[command(allow_negative_numbers = true)]
    Profile {
        #[arg(long = "K")]
        k: f64,
        #[arg(long = "N")]
        n: f64,
        #[arg(long)]
        v: f64,
    },
    /// Print the version.
    Version,
}

fn run_experiment(
    path: PathBuf,
    mut set: Vec<String>,
    format: Option<String>,
    output: Option<String>,
    tol: Option<String>,
) -> anyhow::Result<ExitCode> {
    let text =
        std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let mut raw = RawConfig::parse(&text).with_context(|| path.display().to_string())?;
    set.extend(format.map(|v| format!("output.format={v}")));
    set.extend(output.map(|v| format!("output.path={v}")));
    set.extend(tol.map(|v| format!("tolerances.equality={v}")));
    for s in &set {
        raw.set(s)?;
    }
    let cfg = raw
        .into_config(config::env_tolerance()?)
        .with_context(|| path.display().to_string())?;
    let outcome = run(&cfg)?;
    emit::emit(&outcome, cfg.format, cfg.path.as_deref())?;
    if cfg.path.is_some() && cfg.format != Format::Report {
        eprint!("{}", outcome.report);
    }
    if outcome.passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        for f in &outcome.failures {
            eprintln!("FAIL check={} reason={}", f.check, f.reason);
        }
        Ok(ExitCode::from(1))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            set,
            format,
            output,
            tol,
        } => run_experiment(config, set, format, output, tol),
        Command::Jacobian { h, k, n, r } => (|| {
            let p = JacobianParams::new(h, CurvatureDimension::new(k, n)?)?;
            println!("{}", model1d::jacobian(&p, r));
            Ok(ExitCode::SUCCESS)
        })(),
        Command::Profile { k, n, v } => (|| {
            println!(
                "{}",
                model1d::model_profile(&CurvatureDimension::new(k, n)?, v)?
            );
            Ok(ExitCode::SUCCESS)
        })(),
        Command::Version => {
            println!("needlecomp {}", env!("CARGO_PKG_VERSION"));
            Ok(ExitCode::SUCCESS)
        }
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}
