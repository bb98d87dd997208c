use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::CampaignConfig;
use crate::record::{analyze_spec, AnalyzeOptions, TrialRecord};
use crate::sampling::{sample_spec, trial_seed};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityTally {
    #[serde(with = "zpg_core::serde_util::dec")]
    pub passed: u64,
    #[serde(with = "zpg_core::serde_util::dec")]
    pub failed: u64,
    #[serde(with = "zpg_core::serde_util::dec")]
    pub not_applicable: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignSummary {
    #[serde(with = "zpg_core::serde_util::dec")]
    pub seed: u64,
    #[serde(with = "zpg_core::serde_util::dec")]
    pub trials: u64,
    #[serde(with = "zpg_core::serde_util::dec")]
    pub passed: u64,
    #[serde(with = "zpg_core::serde_util::dec")]
    pub failed: u64,
    #[serde(with = "zpg_core::serde_util::dec")]
    pub errors: u64,
    pub identities: BTreeMap<String, IdentityTally>,
}

impl CampaignSummary {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// Every trial of every `(p, n)` pair, in pair order then trial order,
/// whatever the thread count.
pub fn campaign_records(config: &CampaignConfig) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .context("building thread pool")?;
    let spec_opts = config.spec_options();
    let analyze_opts = AnalyzeOptions {
        k_cap: config.k_cap,
        timings: config.timings,
    };
    let pairs: Vec<(u64, u32)> = config
        .primes
        .iter()
        .flat_map(|&p| config.exponents.iter().map(move |&n| (p, n)))
        .collect();
    let jobs: Vec<(u64, u32, u64)> = pairs
        .iter()
        .flat_map(|&(p, n)| (0..config.trials).map(move |t| (p, n, t)))
        .collect();
    Ok(pool.install(|| {
        jobs.par_iter()
            .map(|&(p, n, t)| {
                let seed = trial_seed(config.seed, p, n, t);
                let spec = sample_spec(p, n, seed, &spec_opts);
                analyze_spec(&spec, t, Some(seed), &analyze_opts)
            })
            .collect()
    }))
}

pub fn summarize(seed: u64, records: &[TrialRecord]) -> CampaignSummary {
    let mut identities: BTreeMap<String, IdentityTally> = BTreeMap::new();
    for rep in records.iter().flat_map(|r| &r.identities) {
        let tally = identities.entry(rep.name.clone()).or_default();
        match (rep.applicable, rep.pass) {
            (false, _) => tally.not_applicable += 1,
            (true, true) => tally.passed += 1,
            (true, false) => tally.failed += 1,
        }
    }
    let passed = records.iter().filter(|r| r.pass).count() as u64;
    CampaignSummary {
        seed,
        trials: records.len() as u64,
        passed,
        failed: records.len() as u64 - passed,
        errors: records.iter().filter(|r| r.error.is_some()).count() as u64,
        identities,
    }
}

pub fn write_jsonl(records: &[TrialRecord], out: &mut impl Write) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut *out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Runs the campaign and writes JSONL to the configured path, or to stdout
/// when there is none.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignSummary> {
    let records = campaign_records(config)?;
    match &config.output_path {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            write_jsonl(&records, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            write_jsonl(&records, &mut w)?;
            w.flush()?;
        }
    }
    Ok(summarize(config.seed, &records))
}
