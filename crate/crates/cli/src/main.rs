//! `netpeace`: network-structure pre-training for knowledge-graph completion.

mod commands;
mod config;
mod error;
mod manifest;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::Context;
use crate::config::{extract_overrides, RunConfig};
use crate::error::CliError;

/// Any config key can also be given as a flag, e.g. `--pretrain.dim 64`.
#[derive(Debug, Parser)]
#[command(name = "netpeace", version, about)]
struct Cli {
    /// `key = value` config file with dotted keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "netpeace-out")]
    out: PathBuf,
    /// Worker threads (default 1; only single-threaded runs are bit-reproducible).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Network statistics of the projection graph.
    Stats { dataset: PathBuf },
    /// Pre-train entity embeddings on the projection graph.
    Pretrain { dataset: PathBuf },
    /// Train a link predictor, optionally from pre-trained entity embeddings.
    Train {
        dataset: PathBuf,
        #[arg(long)]
        pretrained: Option<PathBuf>,
    },
    /// Filtered ranking evaluation of a checkpoint on the test split.
    Eval { checkpoint: PathBuf, dataset: PathBuf },
    /// Write a training split with at most `cap` triples per relation.
    Lowres {
        dataset: PathBuf,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// 2-D projection of an embedding file.
    Project { embeddings: PathBuf },
}

fn run(args: Vec<String>) -> Result<(), CliError> {
    let (args, mut overrides) = extract_overrides(args)?;
    let cli = Cli::try_parse_from(args).unwrap_or_else(|e| e.exit());
    if let Some(seed) = cli.seed {
        overrides.push(("seed".into(), seed.to_string()));
    }
    if let Some(threads) = cli.threads {
        overrides.push(("threads".into(), threads.to_string()));
    }
    let config = RunConfig::resolve(cli.config.as_deref(), &overrides)?;
    let threads: usize = config.get("threads")?;
    if threads == 0 {
        return Err(CliError::Usage("threads must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    std::fs::create_dir_all(&cli.out)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", cli.out.display())))?;
    let mut ctx = Context { config, out: cli.out };
    match &cli.command {
        Command::Stats { dataset } => commands::stats(&ctx, dataset),
        Command::Pretrain { dataset } => commands::pretrain_cmd(&ctx, dataset),
        Command::Train { dataset, pretrained } => commands::train(&mut ctx, dataset, pretrained.as_deref()),
        Command::Eval { checkpoint, dataset } => commands::eval(&ctx, checkpoint, dataset),
        Command::Lowres { dataset, cap } => commands::lowres(&mut ctx, dataset, *cap),
        Command::Project { embeddings } => commands::project(&ctx, embeddings),
    }
}

fn main() {
    if let Err(e) = run(std::env::args().collect()) {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
