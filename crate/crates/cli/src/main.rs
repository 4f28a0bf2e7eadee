mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{ExperimentConfig, Settings};

#[derive(Parser)]
#[command(
    name = "polar-harq",
    version,
    about = "Subset polar codes and polar H-ARQ experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment file of `section.key=value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Random seed (overrides channel.seed).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output file (directory for `harq`); stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(flatten)]
    overrides: Overrides,
}

/// Flags mirroring config keys; a flag beats the file.
#[derive(Args, Default)]
struct Overrides {
    /// Any config key, as KEY=VALUE. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// mother.n (log2 of the block length)
    #[arg(long, global = true)]
    n: Option<String>,
    /// mother.k (payload bits, CRC excluded)
    #[arg(long, global = true)]
    k: Option<String>,
    /// mother.crc_len (0, 8, 16 or 24)
    #[arg(long, global = true)]
    crc_len: Option<String>,
    /// mother.eps (design BEC erasure probability)
    #[arg(long, global = true)]
    eps: Option<String>,
    /// subset.m (transmitted coded bits)
    #[arg(long, global = true)]
    m: Option<String>,
    /// subset.algorithm: greedy, symmetric, fixed_eps or frozen
    #[arg(long, global = true)]
    algorithm: Option<String>,
    /// subset.x (XOR offset of the second redundancy version)
    #[arg(long, global = true)]
    x: Option<String>,
    /// subset.extra_offsets (comma-separated offsets of further versions)
    #[arg(long, global = true)]
    extra_offsets: Option<String>,
    /// subset.eps (ε for the fixed_eps construction)
    #[arg(long, global = true)]
    fixed_eps: Option<String>,
    /// subset.pattern (pattern file to simulate instead of constructing one)
    #[arg(long, global = true)]
    pattern: Option<String>,
    /// decoder.l (list size)
    #[arg(long = "list-size", short = 'L', global = true)]
    list_size: Option<String>,
    /// decoder.llr_clip
    #[arg(long, global = true)]
    llr_clip: Option<String>,
    /// channel.snr (comma-separated Eb/N0 in dB)
    #[arg(long, global = true)]
    snr: Option<String>,
    /// policy.min_errors
    #[arg(long, global = true)]
    min_errors: Option<String>,
    /// policy.max_trials
    #[arg(long, global = true)]
    max_trials: Option<String>,
    /// policy.min_trials
    #[arg(long, global = true)]
    min_trials: Option<String>,
}

impl Overrides {
    fn apply(&self, s: &mut Settings) -> Result<()> {
        let named = [
            ("mother.n", &self.n),
            ("mother.k", &self.k),
            ("mother.crc_len", &self.crc_len),
            ("mother.eps", &self.eps),
            ("subset.m", &self.m),
            ("subset.algorithm", &self.algorithm),
            ("subset.x", &self.x),
            ("subset.extra_offsets", &self.extra_offsets),
            ("subset.eps", &self.fixed_eps),
            ("subset.pattern", &self.pattern),
            ("decoder.l", &self.list_size),
            ("decoder.llr_clip", &self.llr_clip),
            ("channel.snr", &self.snr),
            ("policy.min_errors", &self.min_errors),
            ("policy.max_trials", &self.max_trials),
            ("policy.min_trials", &self.min_trials),
        ];
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .with_context(|| format!("--set expects KEY=VALUE, got {kv:?}"))?;
            s.set(k.trim(), v.trim())?;
        }
        for (key, value) in named {
            if let Some(v) = value {
                s.set(key, v)?;
            }
        }
        Ok(())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Design a mother code and write its non-frozen set.
    Design,
    /// Construct a puncturing pattern and write it as a pattern file.
    Puncture,
    /// Simulate the BLER of a mother or subset code over an Eb/N0 sweep.
    Simulate,
    /// Simulate RV0 alone, RV1 alone and both combined.
    Harq,
    /// Check equivalence of XOR-translated subset codes.
    EquivCheck,
}

fn load(cli: &Cli) -> Result<ExperimentConfig> {
    let mut settings = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Settings::parse(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => Settings::default(),
    };
    cli.overrides.apply(&mut settings)?;
    if let Some(seed) = cli.seed {
        settings.set("channel.seed", &seed.to_string())?;
    }
    ExperimentConfig::from_settings(&settings)
}

fn run(cli: &Cli) -> Result<bool> {
    let cfg = load(cli)?;
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring worker threads")?;
    }
    let out = cli.out.as_deref();
    match cli.command {
        Command::Design => commands::design(&cfg, out).map(|_| true),
        Command::Puncture => commands::puncture(&cfg, out).map(|_| true),
        Command::Simulate => commands::simulate(&cfg, out).map(|_| true),
        Command::Harq => commands::harq(&cfg, out).map(|_| true),
        Command::EquivCheck => commands::equiv_check(&cfg, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
