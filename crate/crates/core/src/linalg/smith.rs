//! Smith normal form over the integers.
//!
//! The elimination pivots on an entry of minimal absolute value and uses
//! nearest-integer quotients, so remainders are at most half the pivot and
//! intermediate entries stay close to the size of the input.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// `u * input * v == s`, with `u`, `v` unimodular and `s` diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    /// Nonzero diagonal entries of `s`, positive, each dividing the next.
    pub divisors: Vec<BigInt>,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.divisors.len()
    }
}

/// Nearest-integer quotient `q` so that `|a - q*b| <= |b|/2`.
pub(crate) fn nearest_quotient(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut q, r) = a.div_mod_floor(b);
    let twice: BigInt = r.abs() * 2;
    if twice > b.abs() {
        q += 1;
    }
    q
}

struct Elimination {
    a: Vec<Vec<BigInt>>,
    u: Option<Vec<Vec<BigInt>>>,
    v: Option<Vec<Vec<BigInt>>>,
    rows: usize,
    cols: usize,
}

impl Elimination {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        if let Some(u) = &mut self.u {
            u.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in &mut self.a {
            row.swap(i, j);
        }
        if let Some(v) = &mut self.v {
            for row in v {
                row.swap(i, j);
            }
        }
    }

    /// row[dst] -= q * row[src]; columns before `from` are zero in both rows.
    fn sub_row(&mut self, dst: usize, src: usize, q: &BigInt, from: usize) {
        if q.is_zero() {
            return;
        }
        let (d, s) = pair_mut(&mut self.a, dst, src);
        for (x, y) in d[from..].iter_mut().zip(&s[from..]) {
            if !y.is_zero() {
                *x -= q * y;
            }
        }
        if let Some(u) = &mut self.u {
            let (d, s) = pair_mut(u, dst, src);
            for (x, y) in d.iter_mut().zip(s.iter()) {
                if !y.is_zero() {
                    *x -= q * y;
                }
            }
        }
    }

    /// col[dst] -= q * col[src]; rows before `from` are zero in both columns.
    fn sub_col(&mut self, dst: usize, src: usize, q: &BigInt, from: usize) {
        if q.is_zero() {
            return;
        }
        for row in &mut self.a[from..] {
            if !row[src].is_zero() {
                let delta = q * &row[src];
                row[dst] -= delta;
            }
        }
        if let Some(v) = &mut self.v {
            for row in v {
                if !row[src].is_zero() {
                    let delta = q * &row[src];
                    row[dst] -= delta;
                }
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.a[i] {
            *x = -&*x;
        }
        if let Some(u) = &mut self.u {
            for x in &mut u[i] {
                *x = -&*x;
            }
        }
    }

    fn min_abs_in_block(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                let ax = x.abs();
                if best.as_ref().map_or(true, |(_, _, b)| ax < *b) {
                    let done = ax.is_one();
                    best = Some((i, j, ax));
                    if done {
                        break;
                    }
                }
            }
            if best.as_ref().is_some_and(|b| b.2.is_one()) {
                break;
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    fn run(&mut self) -> Vec<BigInt> {
        let mut divisors = Vec::new();
        let mut t = 0;
        while t < self.rows.min(self.cols) {
            let Some((pi, pj)) = self.min_abs_in_block(t) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut dirty = false;
                for i in t + 1..self.rows {
                    if self.a[i][t].is_zero() {
                        continue;
                    }
                    let q = nearest_quotient(&self.a[i][t], &self.a[t][t]);
                    self.sub_row(i, t, &q, t);
                    dirty |= !self.a[i][t].is_zero();
                }
                for j in t + 1..self.cols {
                    if self.a[t][j].is_zero() {
                        continue;
                    }
                    let q = nearest_quotient(&self.a[t][j], &self.a[t][t]);
                    self.sub_col(j, t, &q, t);
                    dirty |= !self.a[t][j].is_zero();
                }
                if dirty {
                    self.promote_smallest_remainder(t);
                    continue;
                }
                // Row and column t are clear; enforce the divisibility chain.
                let pivot = self.a[t][t].clone();
                let offender = (t + 1..self.rows).find(|&i| {
                    self.a[i][t + 1..]
                        .iter()
                        .any(|x| !x.is_zero() && !x.is_multiple_of(&pivot))
                });
                match offender {
                    Some(i) => self.sub_row(t, i, &BigInt::from(-1), t),
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
            divisors.push(self.a[t][t].clone());
            t += 1;
        }
        divisors
    }

    fn promote_smallest_remainder(&mut self, t: usize) {
        let mut best = (t, t, self.a[t][t].abs());
        for i in t + 1..self.rows {
            let x = self.a[i][t].abs();
            if !x.is_zero() && x < best.2 {
                best = (i, t, x);
            }
        }
        for j in t + 1..self.cols {
            let x = self.a[t][j].abs();
            if !x.is_zero() && x < best.2 {
                best = (t, j, x);
            }
        }
        self.swap_rows(t, best.0);
        self.swap_cols(t, best.1);
    }
}

fn pair_mut<T>(v: &mut [T], i: usize, j: usize) -> (&mut T, &T) {
    assert_ne!(i, j);
    if i < j {
        let (lo, hi) = v.split_at_mut(j);
        (&mut lo[i], &hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(i);
        (&mut hi[0], &lo[j])
    }
}

fn identity_rows(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

fn rows_to_matrix(rows: usize, cols: usize, data: Vec<Vec<BigInt>>) -> IntMatrix {
    IntMatrix::new(rows, cols, data.into_iter().flatten().collect()).expect("shape preserved")
}

/// Full Smith decomposition with both unimodular transforms.
pub fn snf(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (m.rows(), m.cols());
    let mut e = Elimination {
        a: m.to_row_vecs(),
        u: Some(identity_rows(rows)),
        v: Some(identity_rows(cols)),
        rows,
        cols,
    };
    let divisors = e.run();
    SmithDecomposition {
        u: rows_to_matrix(rows, rows, e.u.take().unwrap()),
        v: rows_to_matrix(cols, cols, e.v.take().unwrap()),
        s: rows_to_matrix(rows, cols, e.a),
        divisors,
    }
}

/// Nonzero elementary divisors only; skips transform bookkeeping.
pub fn elementary_divisors(m: &IntMatrix) -> Vec<BigInt> {
    let mut e = Elimination {
        a: m.to_row_vecs(),
        u: None,
        v: None,
        rows: m.rows(),
        cols: m.cols(),
    };
    e.run()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn check(m: &IntMatrix) -> SmithDecomposition {
        let d = snf(m);
        assert_eq!(&(&d.u * m) * &d.v, d.s);
        assert!(d.u.determinant().unwrap().abs().is_one());
        assert!(d.v.determinant().unwrap().abs().is_one());
        for w in d.divisors.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        assert_eq!(d.divisors, elementary_divisors(m));
        d
    }

    #[test]
    fn zero_matrix_has_no_divisors() {
        assert!(check(&IntMatrix::zeros(2, 2)).divisors.is_empty());
    }

    #[test]
    fn identity_divisors() {
        assert_eq!(check(&IntMatrix::identity(3)).divisors, ints(&[1, 1, 1]));
    }

    #[test]
    fn small_example() {
        // gcd of entries 2, |det| 8
        let m = IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(check(&m).divisors, ints(&[2, 4]));
    }

    #[test]
    fn rectangular_and_empty() {
        let m = IntMatrix::from_rows(&[vec![2, 0, 0], vec![0, 3, 0]]);
        assert_eq!(check(&m).divisors, ints(&[1, 6]));
        assert!(check(&IntMatrix::zeros(0, 3)).divisors.is_empty());
        assert!(check(&IntMatrix::zeros(3, 0)).divisors.is_empty());
    }

    #[test]
    fn nearest_quotient_halves_remainder() {
        for a in -20i64..=20 {
            for b in [-7i64, -4, -1, 1, 3, 6] {
                let (a, b) = (BigInt::from(a), BigInt::from(b));
                let q = nearest_quotient(&a, &b);
                let r: BigInt = &a - &q * &b;
                assert!(r.abs() * 2 <= b.abs(), "a={a} b={b} q={q}");
            }
        }
    }
}
