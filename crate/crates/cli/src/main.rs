use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tvp_cli::commands::{
    cmd_backtest, cmd_fit, cmd_lpds, cmd_simulate, BacktestArgs, FitArgs, LpdsArgs, SimulateArgs,
};
use tvp_cli::io::fmt;
use tvp_cli::Result;

#[derive(Parser)]
#[command(name = "tvp", version, about = "Bayesian time-varying parameter regression with shrinkage priors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a dataset and its true coefficient paths
    Simulate(SimulateArgs),
    /// Run the sampler on a CSV and write draws, summary and manifest
    Fit(Box<FitArgs>),
    /// Log predictive density scores and predictive density evaluation
    Lpds(Box<LpdsArgs>),
    /// Rolling one-step-ahead LPDS over a range of origins
    Backtest(Box<BacktestArgs>),
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(a) => {
            let r = cmd_simulate(&a)?;
            println!("wrote {} rows to {} and true paths to {}", r.rows, r.data.display(), r.truth.display());
        }
        Command::Fit(a) => {
            let r = cmd_fit(&a)?;
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", r.summary);
            println!("\noutputs in {}", r.out.display());
        }
        Command::Lpds(a) => {
            let r = cmd_lpds(&a)?;
            if !r.scores.is_empty() {
                println!("row,y,lpds");
                for s in &r.scores {
                    println!("{},{},{}", s.row, fmt(s.y), fmt(s.lpds));
                }
            }
            if !r.eval.is_empty() {
                println!("point,density");
                for (p, d) in &r.eval {
                    println!("{},{}", fmt(*p), fmt(*d));
                }
            }
            if !r.grid.is_empty() && a.grid_out.is_none() {
                println!("y,density");
                for (p, d) in &r.grid {
                    println!("{},{}", fmt(*p), fmt(*d));
                }
            }
        }
        Command::Backtest(a) => {
            let r = cmd_backtest(&a)?;
            println!("{} fits, {} failed; outputs in {}", r.results.len(), r.failures, r.out.display());
            for f in r.results.iter().filter(|f| f.error.is_some()) {
                eprintln!("origin {} spec {}: {}", f.origin, f.spec, f.error.as_deref().unwrap_or(""));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let summary = serde_json::to_string(&e.summary()).unwrap_or_else(|_| format!("{{\"message\":{:?}}}", e.to_string()));
            eprintln!("{summary}");
            ExitCode::FAILURE
        }
    }
}
