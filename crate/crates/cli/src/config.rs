use std::path::PathBuf;

use anyhow::{bail, Result};
use zpg_core::cohomology::DEFAULT_K_CAP;
use zpg_core::modules::is_prime;

use crate::sampling::SpecOptions;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CampaignConfig {
    pub seed: u64,
    pub primes: Vec<u64>,
    pub exponents: Vec<u32>,
    pub max_multiplicity: u64,
    /// Cap on `sum_t r_t phi(p^t)`.
    pub max_rank: u64,
    pub conjugator_bound: u64,
    pub trials: u64,
    pub include_finite_blocks: bool,
    pub output_path: Option<PathBuf>,
    pub k_cap: u32,
    /// Worker threads; 0 lets rayon decide.
    pub threads: usize,
    pub timings: bool,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            seed: 0,
            primes: vec![2, 3, 5],
            exponents: vec![1, 2, 3],
            max_multiplicity: 4,
            max_rank: 20,
            conjugator_bound: 2,
            trials: 100,
            include_finite_blocks: false,
            output_path: None,
            k_cap: DEFAULT_K_CAP,
            threads: 0,
            timings: false,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            bail!("trials must be at least 1");
        }
        if self.max_rank < 1 {
            bail!("max_rank must be at least 1");
        }
        if self.conjugator_bound < 1 {
            bail!("conjugator_bound must be a positive integer");
        }
        if self.primes.is_empty() || self.exponents.is_empty() {
            bail!("need at least one prime and one exponent");
        }
        if let Some(p) = self.primes.iter().find(|&&p| !is_prime(p)) {
            bail!("{p} is not prime");
        }
        for &p in &self.primes {
            for &n in &self.exponents {
                if p.checked_pow(n).is_none() {
                    bail!("group order {p}^{n} does not fit in 64 bits");
                }
            }
        }
        Ok(())
    }

    pub fn spec_options(&self) -> SpecOptions {
        SpecOptions {
            max_rank: self.max_rank,
            max_multiplicity: self.max_multiplicity,
            conjugator_bound: self.conjugator_bound,
            finite_blocks: self.include_finite_blocks,
        }
    }
}
