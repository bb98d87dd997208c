use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::IntMatrix;

/// Number of elementary operations composed by [`unimodular_random`].
pub fn default_op_count(d: usize) -> usize {
    2 * d + 2
}

/// Seed-deterministic `d x d` matrix of determinant ±1.
///
/// A product of [`default_op_count`] random elementary operations (row
/// additions with multiplier in `[-bound, bound]`, row swaps, sign flips).
/// `bound == 0` yields the identity.
pub fn unimodular_random(d: usize, seed: u64, bound: u64) -> IntMatrix {
    unimodular_random_with_inverse(d, seed, bound, default_op_count(d)).0
}

/// Same generator with an explicit operation count; also returns the exact
/// inverse, accumulated alongside.
pub fn unimodular_random_with_inverse(
    d: usize,
    seed: u64,
    bound: u64,
    ops: usize,
) -> (IntMatrix, IntMatrix) {
    let mut m = IntMatrix::identity(d);
    let mut inv = IntMatrix::identity(d);
    if bound == 0 || d == 0 {
        return (m, inv);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = i64::try_from(bound).unwrap_or(i64::MAX);
    for _ in 0..ops {
        let kind = if d == 1 { 7 } else { rng.gen_range(0..8u8) };
        match kind {
            // row_i += c * row_j; inverse gets col_j -= c * col_i
            0..=5 => {
                let i = rng.gen_range(0..d);
                let mut j = rng.gen_range(0..d - 1);
                if j >= i {
                    j += 1;
                }
                let mut c = rng.gen_range(-bound..=bound - 1);
                if c >= 0 {
                    c += 1;
                }
                let c = BigInt::from(c);
                for col in 0..d {
                    let delta = &c * m.get(j, col);
                    *m.get_mut(i, col) += delta;
                }
                for row in 0..d {
                    let delta = &c * inv.get(row, i);
                    *inv.get_mut(row, j) -= delta;
                }
            }
            6 => {
                let i = rng.gen_range(0..d);
                let j = rng.gen_range(0..d);
                for col in 0..d {
                    let a = m.get(i, col).clone();
                    let b = m.get(j, col).clone();
                    m.set(i, col, b);
                    m.set(j, col, a);
                }
                for row in 0..d {
                    let a = inv.get(row, i).clone();
                    let b = inv.get(row, j).clone();
                    inv.set(row, i, b);
                    inv.set(row, j, a);
                }
            }
            _ => {
                let i = rng.gen_range(0..d);
                for col in 0..d {
                    let v = -m.get(i, col);
                    m.set(i, col, v);
                }
                for row in 0..d {
                    let v = -inv.get(row, i);
                    inv.set(row, i, v);
                }
            }
        }
    }
    (m, inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Signed};

    #[test]
    fn one_by_one_is_sign() {
        for seed in 0..10 {
            let m = unimodular_random(1, seed, 3);
            assert!(m.get(0, 0).abs().is_one());
        }
    }

    #[test]
    fn determinant_and_inverse() {
        for d in 1..8 {
            for seed in 0..5 {
                let (m, inv) = unimodular_random_with_inverse(d, seed, 3, default_op_count(d));
                assert!(m.determinant().unwrap().abs().is_one());
                assert!((&m * &inv).is_identity());
            }
        }
    }

    #[test]
    fn deterministic_in_seed() {
        assert_eq!(unimodular_random(6, 42, 2), unimodular_random(6, 42, 2));
        assert_ne!(unimodular_random(6, 42, 2), unimodular_random(6, 43, 2));
        assert!(unimodular_random(5, 1, 0).is_identity());
    }
}
