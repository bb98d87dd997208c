//! Elimination over `Z/p^k`, a local ring: every entry is `p^v * unit`, so
//! pivoting on an entry of least valuation clears its row and column exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::matrix::IntMatrix;

fn valuation_below(x: &BigInt, p: &BigInt, cap: u32) -> u32 {
    if x.is_zero() {
        return cap;
    }
    let mut v = 0;
    let mut c = x.clone();
    while v < cap {
        let (q, r) = c.div_rem(p);
        if !r.is_zero() {
            break;
        }
        c = q;
        v += 1;
    }
    v
}

/// Inverse of a unit modulo `m`.
pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

/// Valuations of the Smith invariants of `m` over `Z/p^k`, one per diagonal
/// position (`min(rows, cols)` values); a zero invariant reports `k`.
pub fn local_divisor_valuations(m: &IntMatrix, p: u64, k: u32) -> Vec<u32> {
    let pb = BigInt::from(p);
    let modulus = num_traits::pow(pb.clone(), k as usize);
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.reduce_mod(&modulus).to_row_vecs();
    let diag = rows.min(cols);
    let mut vals = Vec::with_capacity(diag);
    for t in 0..diag {
        let mut best: Option<(usize, usize, u32)> = None;
        'search: for (i, row) in a.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                let v = valuation_below(x, &pb, k);
                if v < best.map_or(k, |b| b.2) {
                    best = Some((i, j, v));
                    if v == 0 {
                        break 'search;
                    }
                }
            }
        }
        let Some((bi, bj, v)) = best else {
            vals.resize(diag, k);
            break;
        };
        a.swap(t, bi);
        for row in a.iter_mut() {
            row.swap(t, bj);
        }
        let pv = num_traits::pow(pb.clone(), v as usize);
        let unit = &a[t][t] / &pv;
        let inv = mod_inverse(&unit, &modulus).expect("pivot cofactor is a unit");
        // Clear column t below the pivot.
        let pivot_row = a[t].clone();
        for row in a.iter_mut().skip(t + 1) {
            if row[t].is_zero() {
                continue;
            }
            let f = (&row[t] / &pv * &inv).mod_floor(&modulus);
            for (x, y) in row[t..].iter_mut().zip(&pivot_row[t..]) {
                *x = (&*x - &f * y).mod_floor(&modulus);
            }
        }
        // Clearing row t only changes row t itself, which is never read again.
        vals.push(v);
    }
    vals
}

/// `ord_p |ker f|` for `f` acting on `(Z/p^k)^cols`.
pub fn local_kernel_order(m: &IntMatrix, p: u64, k: u32) -> u64 {
    let vals = local_divisor_valuations(m, p, k);
    let missing = m.cols() - vals.len();
    vals.iter().map(|&v| u64::from(v)).sum::<u64>() + missing as u64 * u64::from(k)
}

/// `ord_p |im f|` for `f` acting on `(Z/p^k)^cols`.
pub fn local_image_order(m: &IntMatrix, p: u64, k: u32) -> u64 {
    local_divisor_valuations(m, p, k)
        .iter()
        .map(|&v| u64::from(k - v))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_valuations() {
        let m = IntMatrix::from_rows(&[vec![4, 0], vec![0, 6]]);
        let mut v = local_divisor_valuations(&m, 2, 5);
        v.sort();
        assert_eq!(v, vec![1, 2]);
        // 2^5 kills everything at level 3
        let z = IntMatrix::identity(2).scale(&BigInt::from(32));
        assert_eq!(local_divisor_valuations(&z, 2, 3), vec![3, 3]);
    }

    #[test]
    fn agrees_with_integer_smith() {
        let m = IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let ints = crate::linalg::elementary_divisors(&m);
        for k in 1..8 {
            let mut local = local_divisor_valuations(&m, 2, k);
            local.sort();
            let mut expect: Vec<u32> = ints
                .iter()
                .map(|d| crate::linalg::p_valuation(d, 2).0.min(k))
                .collect();
            expect.resize(3, k);
            expect.sort();
            assert_eq!(local, expect, "k={k}");
        }
    }

    #[test]
    fn kernel_and_image_orders_partition() {
        let m = IntMatrix::from_rows(&[vec![3, 1], vec![0, 9]]);
        for k in 1..5 {
            assert_eq!(local_kernel_order(&m, 3, k) + local_image_order(&m, 3, k), 2 * u64::from(k));
        }
    }
}
