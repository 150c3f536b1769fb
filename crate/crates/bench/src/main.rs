use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use apdpro_bench::experiment::prepare;
use apdpro_bench::reference::cache_path;
use apdpro_bench::selftest::run_selftest;
use apdpro_bench::{run_comparison, run_experiment, ExperimentConfig, Outcome};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "apdpro-bench", version, about = "Run primal-dual solver experiments and write CSV traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the first solver of a config and write its trace.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run every solver listed in a config, one CSV each.
    Compare {
        #[arg(long)]
        config: PathBuf,
    },
    /// Compute (and cache) the reference solution only.
    Reference {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the built-in oracle and property checks.
    Selftest,
}

fn load(path: &PathBuf) -> anyhow::Result<ExperimentConfig> {
    ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))
}

fn report(out: &Outcome) {
    if let Some(w) = &out.reference_warning {
        eprintln!("warning: {w}; reference metrics left empty");
    }
    let summary = out
        .last
        .as_ref()
        .map(|r| {
            let gap = r.rel_gap.map(|g| format!("{g:.3e}")).unwrap_or_else(|| "-".into());
            format!("objective {:.10e}, rel_gap {gap}, feas {:.3e}", r.objective, r.feas_violation)
        })
        .unwrap_or_else(|| "no iterations".into());
    println!(
        "{}: {} iterations ({}), {} rows -> {}; {summary}",
        out.run.variant,
        out.run.iterations(),
        out.run.termination.as_str(),
        out.rows,
        out.csv_path.display()
    );
}

fn main() -> anyhow::Result<ExitCode> {
    match Cli::parse().command {
        Command::Run { config } => report(&run_experiment(&load(&config)?)?),
        Command::Compare { config } => run_comparison(&load(&config)?)?.iter().for_each(report),
        Command::Reference { config } => {
            let config = load(&config)?;
            let (instance, reference, warning) = prepare(&config)?;
            if let Some(w) = warning {
                anyhow::bail!(w);
            }
            match reference {
                Some(r) => {
                    println!("f* = {:.16e}", r.f_star);
                    if let Some(p) = cache_path(&instance, &config.reference) {
                        println!("cached at {}", p.display());
                    }
                }
                None => println!("reference mode is 'none'; nothing to compute"),
            }
        }
        Command::Selftest => {
            let checks = run_selftest();
            for c in &checks {
                println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if checks.iter().any(|c| !c.passed) {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
