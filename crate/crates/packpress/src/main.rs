use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use packpress::config::{DisjointChoice, StrategyChoice};
use packpress::{execute, Overrides, RunConfig};

/// Neutralized packing pressure of free semigroup actions.
#[derive(Debug, Parser)]
#[command(name = "packpress", version)]
struct Args {
    /// Run config (JSON), or a manifest from an earlier run.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 lets the pool decide.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum)]
    strategy: Option<StrategyChoice>,
    #[arg(long, value_enum)]
    disjoint: Option<DisjointChoice>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let overrides = Overrides { seed: args.seed, threads: args.threads, strategy: args.strategy, disjoint: args.disjoint };
    let outcome = RunConfig::load(&args.config, overrides).and_then(|config| execute(&config, &args.out));
    match outcome {
        Ok(o) => {
            for line in &o.summary {
                println!("{}: {line}", o.command.name());
            }
            for a in &o.artifacts {
                println!("wrote {}", args.out.join(a).display());
            }
            if o.asserted_failures > 0 {
                eprintln!("{} asserted check(s) failed", o.asserted_failures);
            }
            ExitCode::from(o.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
