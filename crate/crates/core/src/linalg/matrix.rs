use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense integer matrix with arbitrary-precision entries, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from row slices of anything convertible to `BigInt`.
    ///
    /// Panics on ragged input; intended for literals and tests.
    pub fn from_rows<T: Clone + Into<BigInt>>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().cloned().map(Into::into));
        }
        IntMatrix { rows: r, cols: c, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntMatrix { rows, cols, data }
    }

    /// Matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i].clone())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.data.iter().map(BigInt::abs).max().unwrap_or_default()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Columns `range` of `self` as a new matrix.
    pub fn select_columns(&self, range: std::ops::Range<usize>) -> Self {
        let start = range.start;
        Self::from_fn(self.rows, range.len(), |i, j| self.get(i, start + j).clone())
    }

    pub fn hconcat(&self, other: &IntMatrix) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Dimension(format!(
                "cannot place a {}-row matrix beside a {}-row matrix",
                other.rows, self.rows
            )));
        }
        Ok(Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        }))
    }

    pub fn block_diag(blocks: &[&IntMatrix]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn checked_mul(&self, rhs: &IntMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        *out.get_mut(i, j) += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, rhs: &IntMatrix, f: impl Fn(&BigInt, &BigInt) -> BigInt) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch in elementwise op"
        );
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    /// `self - I`; square only.
    pub fn minus_identity(&self) -> Self {
        assert!(self.is_square(), "minus_identity on a non-square matrix");
        let mut m = self.clone();
        for i in 0..self.rows {
            *m.get_mut(i, i) -= 1;
        }
        m
    }

    /// `self + I`; square only.
    pub fn plus_identity(&self) -> Self {
        assert!(self.is_square(), "plus_identity on a non-square matrix");
        let mut m = self.clone();
        for i in 0..self.rows {
            *m.get_mut(i, i) += 1;
        }
        m
    }

    /// Exponentiation by squaring; square only.
    pub fn pow(&self, mut e: u64) -> Self {
        assert!(self.is_square(), "pow on a non-square matrix");
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `self^(p^k)` by `k` successive `p`-th powers.
    pub fn pow_prime_power(&self, p: u64, k: u32) -> Self {
        (0..k).fold(self.clone(), |acc, _| acc.pow(p))
    }

    /// Entries reduced into `[0, modulus)`.
    pub fn reduce_mod(&self, modulus: &BigInt) -> Self {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.mod_floor(modulus)).collect(),
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut a = self.to_row_vecs();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(piv) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(BigInt::zero());
            };
            if piv != k {
                a.swap(piv, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        Ok(if n == 0 { sign } else { sign * prev })
    }

    /// Rank over the rationals (Bareiss elimination with row/column search).
    pub fn rank(&self) -> usize {
        let mut a = self.to_row_vecs();
        let (m, n) = (self.rows, self.cols);
        let mut prev = BigInt::one();
        let mut rank = 0;
        let mut col = 0;
        while rank < m && col < n {
            let Some(piv) = (rank..m).find(|&i| !a[i][col].is_zero()) else {
                col += 1;
                continue;
            };
            a.swap(piv, rank);
            for i in rank + 1..m {
                for j in col + 1..n {
                    let v = &a[i][j] * &a[rank][col] - &a[i][col] * &a[rank][j];
                    a[i][j] = v / &prev;
                }
                a[i][col] = BigInt::zero();
            }
            prev = a[rank][col].clone();
            rank += 1;
            col += 1;
        }
        rank
    }
}

impl<'a> Mul<&'a IntMatrix> for &'a IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &'a IntMatrix) -> IntMatrix {
        self.checked_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl<'a> Add<&'a IntMatrix> for &'a IntMatrix {
    type Output = IntMatrix;

    fn add(self, rhs: &'a IntMatrix) -> IntMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<'a> Sub<&'a IntMatrix> for &'a IntMatrix {
    type Output = IntMatrix;

    fn sub(self, rhs: &'a IntMatrix) -> IntMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &IntMatrix {
    type Output = IntMatrix;

    fn neg(self) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{}x{}[", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

/// Wire form: dimensions plus row-major decimal strings.
#[derive(Serialize, Deserialize)]
struct RawMatrix {
    #[serde(with = "crate::serde_util::dec")]
    rows: usize,
    #[serde(with = "crate::serde_util::dec")]
    cols: usize,
    entries: Vec<String>,
}

impl From<IntMatrix> for RawMatrix {
    fn from(m: IntMatrix) -> Self {
        RawMatrix {
            rows: m.rows,
            cols: m.cols,
            entries: m.data.iter().map(ToString::to_string).collect(),
        }
    }
}

impl TryFrom<RawMatrix> for IntMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        let data = raw
            .entries
            .iter()
            .map(|s| {
                s.parse::<BigInt>()
                    .map_err(|_| Error::InvalidSpec(format!("matrix entry {s:?} is not an integer")))
            })
            .collect::<Result<Vec<_>>>()?;
        IntMatrix::new(raw.rows, raw.cols, data)
    }
}
