#![allow(dead_code)]

use num_bigint::BigInt;
use proptest::prelude::*;
use zpg_core::modules::phi_prime_power;
use zpg_core::{BlockSpec, IntMatrix};

/// Block specs over p in {2,3,5}, n <= 3, with total rank at most `max_rank`.
pub fn block_spec(max_rank: u64) -> impl Strategy<Value = BlockSpec> {
    (prop::sample::select(vec![2u64, 3, 5]), 0u32..=3)
        .prop_flat_map(move |(p, n)| {
            let mults = prop::collection::vec(0u64..=3, n as usize + 1);
            (Just(p), Just(n), mults, any::<u64>(), 0u64..=3)
        })
        .prop_map(move |(p, n, mut r, seed, bound)| {
            trim_to_rank(p, &mut r, max_rank);
            BlockSpec {
                p,
                n,
                multiplicities: r,
                finite_specs: vec![],
                conjugator_seed: seed,
                conjugator_bound: bound,
            }
        })
}

/// Lowers the highest multiplicities until `sum r_t phi(p^t) <= max_rank`.
pub fn trim_to_rank(p: u64, r: &mut [u64], max_rank: u64) {
    let rank = |r: &[u64]| -> u64 {
        r.iter().enumerate().map(|(t, x)| x * phi_prime_power(p, t as u32)).sum()
    };
    for t in (0..r.len()).rev() {
        while r[t] > 0 && rank(r) > max_rank {
            r[t] -= 1;
        }
    }
}

pub fn int_matrix(max_rows: usize, max_cols: usize, entry: i64) -> impl Strategy<Value = IntMatrix> {
    (0..=max_rows, 0..=max_cols).prop_flat_map(move |(r, c)| {
        prop::collection::vec(-entry..=entry, r * c)
            .prop_map(move |v| IntMatrix::new(r, c, v.into_iter().map(BigInt::from).collect()).unwrap())
    })
}

pub fn square_matrix(d: usize, entry: i64) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(-entry..=entry, d * d)
        .prop_map(move |v| IntMatrix::new(d, d, v.into_iter().map(BigInt::from).collect()).unwrap())
}
