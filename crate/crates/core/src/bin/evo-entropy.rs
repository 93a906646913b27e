use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use evo_entropy::config::load_config_with_seed;
use evo_entropy::output::{write_outputs, OutputFlags};
use evo_entropy::runner::run_sweep;

#[derive(Parser)]
#[command(
    version,
    about = "Entropy and LZ complexity of a sexual-selection genetic algorithm"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment in a sweep file and write traces and a summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Master seed; replaces `[defaults].seed`.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        parallelism: usize,
        /// Emit SVG charts.
        #[arg(long)]
        plots: bool,
        /// Dump the LZ78 tokens of each run's final snapshot.
        #[arg(long)]
        dump_tokens: bool,
        /// Add a Spearman column to the summary.
        #[arg(long)]
        spearman: bool,
    },
    /// Parse and range-check a sweep file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Validate { config } => {
            let configs = load_config_with_seed(&config, None)?;
            println!("{}: {} experiment(s) OK", config.display(), configs.len());
            for c in &configs {
                println!(
                    "  {}: N={} gens={} loci={} model={} alpha={} sc={} p_opt={} seed={}",
                    c.label,
                    c.population_size,
                    c.generations,
                    c.loci,
                    c.phenotype_model,
                    c.alpha,
                    c.sc,
                    c.p_opt,
                    c.seed
                );
            }
        }
        Command::Run {
            config,
            out,
            seed,
            parallelism,
            plots,
            dump_tokens,
            spearman,
        } => {
            anyhow::ensure!(parallelism >= 1, "--parallelism must be at least 1");
            let configs = load_config_with_seed(&config, seed)?;
            let sweep = run_sweep(&configs, parallelism).context("running sweep")?;
            let flags = OutputFlags {
                plots,
                dump_tokens,
                spearman,
            };
            let written = write_outputs(&sweep, &out, flags)?;
            for row in &sweep.summary.rows {
                let r = row
                    .pearson_h_vs_k
                    .map_or_else(|| "n/a".to_owned(), |r| format!("{r:.4}"));
                println!(
                    "{:<28} r(H,K)={r:<8} gens={:<6} {}",
                    row.label, row.generations_completed, row.termination
                );
            }
            println!("wrote {} file(s) to {}", written.len(), out.display());
        }
    }
    Ok(())
}
