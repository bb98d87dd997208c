//! Sublattices of `Z^d`, always given by generator columns.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;
use super::smith::{elementary_divisors, nearest_quotient, snf};
use crate::error::{Error, Result};

/// Row-style Hermite normal form of a list of generator rows of length `width`.
/// Zero rows are dropped; pivots are positive and entries above each pivot
/// lie in `[0, pivot)`.
fn row_hnf(mut a: Vec<Vec<BigInt>>, width: usize) -> Vec<Vec<BigInt>> {
    let mut r = 0;
    for c in 0..width {
        if r == a.len() {
            break;
        }
        let mut have_pivot = false;
        loop {
            let best = (r..a.len())
                .filter(|&i| !a[i][c].is_zero())
                .min_by(|&i, &j| a[i][c].abs().cmp(&a[j][c].abs()));
            let Some(best) = best else { break };
            have_pivot = true;
            a.swap(r, best);
            let mut clean = true;
            for i in r + 1..a.len() {
                if a[i][c].is_zero() {
                    continue;
                }
                let q = nearest_quotient(&a[i][c], &a[r][c]);
                axpy_row(&mut a, i, r, &q, c);
                clean &= a[i][c].is_zero();
            }
            if clean {
                break;
            }
        }
        if !have_pivot {
            continue;
        }
        if a[r][c].is_negative() {
            for x in &mut a[r][c..] {
                *x = -&*x;
            }
        }
        for i in 0..r {
            if a[i][c].is_zero() {
                continue;
            }
            let q = a[i][c].div_floor(&a[r][c]);
            axpy_row(&mut a, i, r, &q, c);
        }
        r += 1;
    }
    a.truncate(r);
    a
}

/// a[dst] -= q * a[src], touching columns from `from` onward.
fn axpy_row(a: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt, from: usize) {
    if q.is_zero() {
        return;
    }
    let src_row = a[src][from..].to_vec();
    for (x, y) in a[dst][from..].iter_mut().zip(&src_row) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

/// Canonical basis (column Hermite form) of the lattice spanned by the
/// columns of `gens`. Two generator sets span the same lattice iff their
/// Hermite forms are equal.
pub fn hermite_form(gens: &IntMatrix) -> IntMatrix {
    let d = gens.rows();
    let rows = row_hnf(gens.transpose().to_row_vecs(), d);
    IntMatrix::from_columns(d, &rows)
}

/// Basis of the integer kernel `{x : m x = 0}` as columns, in Hermite form.
/// The kernel of an integer matrix is automatically saturated.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let dec = snf(m);
    let raw = dec.v.select_columns(dec.rank()..m.cols());
    hermite_form(&raw)
}

/// Pure closure `{v : k v in span(basis) for some k != 0}` of the column lattice.
pub fn saturate(basis: &IntMatrix, ambient_rank: usize) -> Result<IntMatrix> {
    if basis.rows() != ambient_rank {
        return Err(Error::Dimension(format!(
            "basis vectors have length {}, ambient rank is {ambient_rank}",
            basis.rows()
        )));
    }
    let rank = basis.rank();
    if rank < basis.cols() {
        return Err(Error::MalformedBasis {
            rank,
            cols: basis.cols(),
        });
    }
    // The annihilator of the annihilator is the saturation.
    let perp = kernel_basis(&basis.transpose());
    Ok(kernel_basis(&perp.transpose()))
}

/// Pivot row of each column of a column-Hermite matrix.
fn pivot_rows(h: &IntMatrix) -> Option<Vec<usize>> {
    let mut pivots = Vec::with_capacity(h.cols());
    for j in 0..h.cols() {
        let r = (0..h.rows()).find(|&i| !h.get(i, j).is_zero())?;
        if pivots.last().is_some_and(|&prev| prev >= r) {
            return None;
        }
        pivots.push(r);
    }
    Some(pivots)
}

/// Integer coordinates `x` with `h x = y`, where `h` is in column Hermite form.
/// `None` when some column of `y` is outside the lattice of `h`.
pub fn coordinates(h: &IntMatrix, y: &IntMatrix) -> Result<Option<IntMatrix>> {
    if h.rows() != y.rows() {
        return Err(Error::Dimension(format!(
            "basis vectors have length {}, targets have length {}",
            h.rows(),
            y.rows()
        )));
    }
    let pivots = pivot_rows(h).ok_or_else(|| {
        Error::Dimension("coordinate basis is not in column Hermite form".into())
    })?;
    let r = h.cols();
    let mut x = IntMatrix::zeros(r, y.cols());
    for col in 0..y.cols() {
        for (j, &row) in pivots.iter().enumerate() {
            let mut acc = y.get(row, col).clone();
            for l in 0..j {
                let c = h.get(row, l);
                if !c.is_zero() {
                    acc -= c * x.get(l, col);
                }
            }
            let (q, rem) = acc.div_rem(h.get(row, j));
            if !rem.is_zero() {
                return Ok(None);
            }
            x.set(j, col, q);
        }
    }
    if &(h * &x) != y {
        return Ok(None);
    }
    Ok(Some(x))
}

/// Index `[sup : sub]` of two lattices of equal rank, given by generator columns.
pub fn sublattice_index(sub: &IntMatrix, sup: &IntMatrix) -> Result<BigInt> {
    if sub.rows() != sup.rows() {
        return Err(Error::Dimension(format!(
            "sublattice lives in Z^{}, superlattice in Z^{}",
            sub.rows(),
            sup.rows()
        )));
    }
    let h = hermite_form(sup);
    let x = coordinates(&h, sub)?.ok_or(Error::NotContained)?;
    let divisors = elementary_divisors(&x);
    if divisors.len() != h.cols() {
        return Err(Error::RankMismatch {
            sub: divisors.len(),
            sup: h.cols(),
        });
    }
    Ok(divisors.iter().product())
}

/// `ord_p [sup : sub]`.
pub fn sublattice_index_valuation(sub: &IntMatrix, sup: &IntMatrix, p: u64) -> Result<u32> {
    Ok(p_valuation(&sublattice_index(sub, sup)?, p).0)
}

/// Splits `x != 0` as `p^v * cofactor`; returns `(v, cofactor)`.
pub fn p_valuation(x: &BigInt, p: u64) -> (u32, BigInt) {
    assert!(!x.is_zero(), "valuation of zero");
    let p = BigInt::from(p);
    let mut v = 0;
    let mut c = x.abs();
    loop {
        let (q, r) = c.div_rem(&p);
        if !r.is_zero() {
            break;
        }
        c = q;
        v += 1;
    }
    (v, c)
}

/// True when `x` is `±p^v` for some `v >= 0`.
pub fn is_p_power(x: &BigInt, p: u64) -> bool {
    !x.is_zero() && p_valuation(x, p).1.is_one()
}
