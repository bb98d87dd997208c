use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use zpg_cli::campaign::run_campaign;
use zpg_cli::config::CampaignConfig;
use zpg_cli::oracle::{run_oracle, DEFAULT_RANK_CAP};
use zpg_cli::record::{analyze_spec, AnalyzeOptions};
use zpg_cli::sampling::{sample_spec, trial_seed, SpecOptions};
use zpg_cli::spec_io::{read_spec, spec_to_json};
use zpg_core::cohomology::DEFAULT_K_CAP;

/// Exact Tate cohomology and lambda-invariant identities for Z_p[Z/p^n]-lattices.
#[derive(Parser)]
#[command(name = "zpg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a block spec (the spec of campaign trial `--trial`).
    Gen(GenArgs),
    /// Analyze one spec and print its trial record.
    Analyze(AnalyzeArgs),
    /// Like `analyze`, but exit 1 when any identity fails.
    Verify(AnalyzeArgs),
    /// Seeded campaign over every (p, n) pair; JSONL records, JSON summary.
    Campaign(CampaignArgs),
    /// Recompute a small module by brute force and diff with the main pipeline.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct SamplingArgs {
    #[arg(long, default_value_t = 20)]
    max_rank: u64,
    #[arg(long, default_value_t = 4)]
    max_multiplicity: u64,
    #[arg(long, default_value_t = 2)]
    conjugator_bound: u64,
    /// Add finite torsion blocks (checked by the chi-property reports only).
    #[arg(long)]
    finite_blocks: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 0)]
    trial: u64,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Spec file, or `-` for stdin.
    spec: PathBuf,
    #[arg(long, default_value_t = DEFAULT_K_CAP)]
    k_cap: u32,
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CampaignArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "p", value_delimiter = ',', default_value = "2,3,5")]
    primes: Vec<u64>,
    #[arg(long = "n", value_delimiter = ',', default_value = "1,2,3")]
    exponents: Vec<u32>,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[arg(long, default_value_t = DEFAULT_K_CAP)]
    k_cap: u32,
    /// Worker threads (0: one per core). Output does not depend on it.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Record per-trial wall time (makes output run-dependent).
    #[arg(long)]
    timings: bool,
    /// JSONL destination; stdout when absent, in which case the summary
    /// goes to stderr.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    spec: PathBuf,
    #[arg(long, default_value_t = DEFAULT_RANK_CAP)]
    cap: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn json_line(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string(v).expect("report serializes");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen(a) => {
            zpg_core::CyclicPGroup::new(a.p, a.n)?;
            let opts = SpecOptions {
                max_rank: a.sampling.max_rank,
                max_multiplicity: a.sampling.max_multiplicity,
                conjugator_bound: a.sampling.conjugator_bound,
                finite_blocks: a.sampling.finite_blocks,
            };
            let spec = sample_spec(a.p, a.n, trial_seed(a.seed, a.p, a.n, a.trial), &opts);
            emit(&spec_to_json(&spec), a.out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze(a) => analyze(a, false),
        Command::Verify(a) => analyze(a, true),
        Command::Campaign(a) => {
            let config = CampaignConfig {
                seed: a.seed,
                primes: a.primes,
                exponents: a.exponents,
                max_multiplicity: a.sampling.max_multiplicity,
                max_rank: a.sampling.max_rank,
                conjugator_bound: a.sampling.conjugator_bound,
                trials: a.trials,
                include_finite_blocks: a.sampling.finite_blocks,
                output_path: a.out,
                k_cap: a.k_cap,
                threads: a.threads,
                timings: a.timings,
            };
            let summary = run_campaign(&config)?;
            let text = serde_json::to_string_pretty(&summary)?;
            // a closed pipe on the summary stream is not a campaign failure
            let _ = if config.output_path.is_some() {
                writeln!(std::io::stdout(), "{text}")
            } else {
                writeln!(std::io::stderr(), "{text}")
            };
            Ok(if summary.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Oracle(a) => {
            let spec = read_spec(&a.spec)?;
            let report = run_oracle(&spec, a.cap)?;
            emit(&json_line(&report), a.out.as_deref())?;
            Ok(if report.agree { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn analyze(a: AnalyzeArgs, strict: bool) -> Result<ExitCode> {
    let spec = read_spec(&a.spec)?;
    let opts = AnalyzeOptions {
        k_cap: a.k_cap,
        timings: a.timings,
    };
    let record = analyze_spec(&spec, 0, None, &opts);
    emit(&json_line(&record), a.out.as_deref())?;
    Ok(if strict && !record.pass { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
