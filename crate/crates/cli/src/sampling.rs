use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use zpg_core::modules::phi_prime_power;
use zpg_core::{BlockSpec, FiniteSpec};

/// Seed of trial `trial` for the pair `(p, n)`: the first eight bytes,
/// little-endian, of `SHA-256("{seed}:{p}:{n}:{trial}")`.
pub fn trial_seed(seed: u64, p: u64, n: u32, trial: u64) -> u64 {
    let digest = Sha256::digest(format!("{seed}:{p}:{n}:{trial}").as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpecOptions {
    pub max_rank: u64,
    pub max_multiplicity: u64,
    pub conjugator_bound: u64,
    pub finite_blocks: bool,
}

/// Draws a spec whose free rank stays within `max_rank`.
///
/// Levels `t` are visited in random order and `r_t` is uniform on
/// `0..=min(max_multiplicity, remaining / phi(p^t))`.
pub fn sample_spec(p: u64, n: u32, seed: u64, opts: &SpecOptions) -> BlockSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<u32> = (0..=n).collect();
    order.shuffle(&mut rng);
    let mut multiplicities = vec![0u64; n as usize + 1];
    let mut remaining = opts.max_rank;
    for t in order {
        let phi = phi_prime_power(p, t);
        let hi = opts.max_multiplicity.min(remaining / phi);
        let r = rng.gen_range(0..=hi);
        multiplicities[t as usize] = r;
        remaining -= r * phi;
    }
    let finite_specs = if opts.finite_blocks {
        (0..rng.gen_range(1..=2))
            .map(|_| FiniteSpec {
                k: rng.gen_range(1..=3),
                e: rng.gen_range(1..=2),
                seed: rng.gen(),
            })
            .collect()
    } else {
        Vec::new()
    };
    BlockSpec {
        p,
        n,
        multiplicities,
        finite_specs,
        conjugator_seed: rng.gen(),
        conjugator_bound: opts.conjugator_bound,
    }
}
