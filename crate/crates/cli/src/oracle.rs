//! Slow, independent recomputation of cohomology orders and tower data.
//!
//! Nothing here touches the Smith form, Hermite form, telescoped norm, or
//! local elimination of the main pipeline: norms are literal sums, kernels
//! come from gcd row reduction of `[f^T | I]`, lattice indices are ratios of
//! gcds of maximal minors, and finite blocks are enumerated element by
//! element.

use anyhow::{bail, Context, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use zpg_core::cohomology::{tate_orders, CohomologyOrders};
use zpg_core::modules::build_module;
use zpg_core::towers::{analyze_tower, TowerInvariants};
use zpg_core::{BlockSpec, GModule, IntMatrix, Rational};

pub const DEFAULT_RANK_CAP: usize = 8;
/// Finite blocks with more elements than this are not enumerated.
pub const FINITE_ENUMERATION_CAP: u64 = 1 << 14;

type Row = Vec<BigInt>;

fn rows_of(m: &IntMatrix) -> Vec<Row> {
    m.to_row_vecs()
}

fn mul(a: &[Row], b: &[Row], cols: usize) -> Vec<Row> {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).map(|(x, brow)| x * &brow[j]).sum())
                .collect()
        })
        .collect()
}

fn identity(d: usize) -> Vec<Row> {
    (0..d)
        .map(|i| (0..d).map(|j| BigInt::from((i == j) as u8)).collect())
        .collect()
}

fn power(a: &[Row], e: u64) -> Vec<Row> {
    let d = a.len();
    let mut acc = identity(d);
    for _ in 0..e {
        acc = mul(&acc, a, d);
    }
    acc
}

/// `I + b + b^2 + ... + b^(q-1)`, one term at a time.
fn literal_norm(b: &[Row], q: u64) -> Vec<Row> {
    let d = b.len();
    let mut term = identity(d);
    let mut sum = vec![vec![BigInt::zero(); d]; d];
    for _ in 0..q {
        for (srow, trow) in sum.iter_mut().zip(&term) {
            for (s, t) in srow.iter_mut().zip(trow) {
                *s += t;
            }
        }
        term = mul(&term, b, d);
    }
    sum
}

fn minus_identity(a: &[Row]) -> Vec<Row> {
    let mut out = a.to_vec();
    for (i, row) in out.iter_mut().enumerate() {
        row[i] -= 1;
    }
    out
}

/// Kernel of the `r x c` matrix `f` as column vectors, by gcd row reduction
/// of `[f^T | I_c]`. The row operations are unimodular, so the kernel rows
/// of the transform span a saturated lattice.
fn gcd_kernel(f: &[Row], c: usize) -> Vec<Vec<BigInt>> {
    let r = f.len();
    let mut rows: Vec<(Row, Row)> = (0..c)
        .map(|j| {
            let left = (0..r).map(|i| f[i][j].clone()).collect();
            let mut right = vec![BigInt::zero(); c];
            right[j] = BigInt::one();
            (left, right)
        })
        .collect();
    let mut top = 0;
    for col in 0..r {
        loop {
            // smallest nonzero entry in this column among unreduced rows
            let pivot = (top..c)
                .filter(|&i| !rows[i].0[col].is_zero())
                .min_by_key(|&i| rows[i].0[col].abs());
            let Some(pivot) = pivot else { break };
            rows.swap(top, pivot);
            let mut clean = true;
            for i in top + 1..c {
                if rows[i].0[col].is_zero() {
                    continue;
                }
                let factor = rows[i].0[col].div_floor(&rows[top].0[col]);
                let (head, tail) = rows.split_at_mut(i);
                let (prow, trow) = (&head[top], &mut tail[0]);
                for (x, y) in trow.0.iter_mut().zip(&prow.0) {
                    *x -= &factor * y;
                }
                for (x, y) in trow.1.iter_mut().zip(&prow.1) {
                    *x -= &factor * y;
                }
                if !trow.0[col].is_zero() {
                    clean = false;
                }
            }
            if clean {
                top += 1;
                break;
            }
        }
    }
    rows.into_iter()
        .filter(|(left, _)| left.iter().all(Zero::is_zero))
        .map(|(_, right)| right)
        .collect()
}

fn rat_det(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&i| !m[i][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let pv = m[col][col].clone();
        det *= &pv;
        for i in col + 1..n {
            let factor = &m[i][col] / &pv;
            if factor.is_zero() {
                continue;
            }
            for j in col..n {
                let delta = &factor * &m[col][j];
                m[i][j] -= delta;
            }
        }
    }
    det
}

fn rat_rank(cols: &[Vec<BigInt>], rows: usize) -> usize {
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|i| cols.iter().map(|c| Rational::from_integer(c[i].clone())).collect())
        .collect();
    let ncols = cols.len();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..rows).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(rank, p);
        for i in rank + 1..rows {
            let factor = &m[i][col] / &m[rank][col];
            for j in col..ncols {
                let delta = &factor * &m[rank][j];
                m[i][j] -= delta;
            }
        }
        rank += 1;
    }
    rank
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// gcd of the `rank x rank` minors of the matrix with columns `cols`.
fn minor_gcd(cols: &[Vec<BigInt>], rows: usize, rank: usize) -> BigInt {
    let mut g = BigInt::zero();
    for rs in subsets(rows, rank) {
        for cs in subsets(cols.len(), rank) {
            let sub = rs
                .iter()
                .map(|&i| cs.iter().map(|&j| Rational::from_integer(cols[j][i].clone())).collect())
                .collect();
            let det = rat_det(sub);
            g = g.gcd(&det.to_integer());
            if g.is_one() {
                return g;
            }
        }
    }
    if rank == 0 {
        BigInt::one()
    } else {
        g
    }
}

fn columns(m: &[Row]) -> Vec<Vec<BigInt>> {
    let d = m.first().map_or(0, Vec::len);
    (0..d).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

/// `ord_p [sup : sub]` for same-rank lattices `sub ⊆ sup`, as
/// `gcd-minors(sub) / gcd-minors(sup)`.
fn index_valuation(sub: &[Vec<BigInt>], sup: &[Vec<BigInt>], rows: usize, p: u64) -> Result<u64> {
    let (rs, rp) = (rat_rank(sub, rows), rat_rank(sup, rows));
    if rs != rp {
        bail!("oracle: rank {rs} sublattice inside rank {rp} lattice");
    }
    let (a, b) = (minor_gcd(sub, rows, rs), minor_gcd(sup, rows, rp));
    let (mut idx, rem) = a.div_rem(&b);
    if !rem.is_zero() {
        bail!("oracle: index {a}/{b} is not an integer");
    }
    let p = BigInt::from(p);
    let mut v = 0;
    while !idx.is_one() {
        let (q, r) = idx.div_rem(&p);
        if !r.is_zero() {
            bail!("oracle: index has a factor prime to {p}");
        }
        idx = q;
        v += 1;
    }
    Ok(v)
}

/// Orders of `H^1, H^2` of the cyclic group generated by `b` (of order `q`)
/// acting on `Z^d`.
fn lattice_orders(b: &[Row], q: u64, p: u64) -> Result<CohomologyOrders> {
    let d = b.len();
    if q == 1 || d == 0 {
        return Ok(CohomologyOrders::default());
    }
    let norm = literal_norm(b, q);
    let bm1 = minus_identity(b);
    let ker_norm = gcd_kernel(&norm, d);
    let fixed = gcd_kernel(&bm1, d);
    let v1 = index_valuation(&columns(&bm1), &ker_norm, d, p)?;
    let v2 = index_valuation(&columns(&norm), &fixed, d, p)?;
    Ok(CohomologyOrders::new(v1, v2))
}

fn mod_matrix(m: &[Row], modulus: &BigInt) -> Vec<Row> {
    m.iter().map(|r| r.iter().map(|x| x.mod_floor(modulus)).collect()).collect()
}

/// `ord_p |ker f|` on `(Z/p^k)^e` by walking every element.
fn enumerated_kernel(f: &[Row], p: u64, k: u32) -> u64 {
    let e = f.len();
    let modulus = p.pow(k);
    let m = BigInt::from(modulus);
    let mut count = 0u64;
    let mut v = vec![0u64; e];
    loop {
        let zero = f.iter().all(|row| {
            let s: BigInt = row.iter().zip(&v).map(|(a, x)| a * BigInt::from(*x)).sum();
            s.mod_floor(&m).is_zero()
        });
        count += zero as u64;
        let mut pos = 0;
        while pos < e {
            v[pos] += 1;
            if v[pos] < modulus {
                break;
            }
            v[pos] = 0;
            pos += 1;
        }
        if pos == e {
            break;
        }
    }
    let mut val = 0;
    while count > 1 {
        count /= p;
        val += 1;
    }
    val
}

fn finite_orders(action: &[Row], p: u64, k: u32, step: u64, q: u64) -> CohomologyOrders {
    if q == 1 {
        return CohomologyOrders::default();
    }
    let modulus = BigInt::from(p.pow(k));
    let e = action.len() as u64;
    let b = mod_matrix(&power(action, step), &modulus);
    let norm = mod_matrix(&literal_norm(&b, q), &modulus);
    let ker_norm = enumerated_kernel(&norm, p, k);
    let ker_b = enumerated_kernel(&minus_identity(&b), p, k);
    let total = u64::from(k) * e;
    // |im f| = |M| / |ker f|
    CohomologyOrders::new(ker_norm - (total - ker_b), ker_b - (total - ker_norm))
}

fn free_orders(action: &[Row], p: u64, n: u32, i: u32) -> Result<CohomologyOrders> {
    let b = power(action, p.pow(i));
    lattice_orders(&b, p.pow(n - i), p)
}

/// Coordinates `x` with `basis x = target`, by exact rational elimination.
fn solve_in_basis(basis: &[Vec<BigInt>], target: &[Vec<BigInt>], d: usize) -> Result<Vec<Row>> {
    let r = basis.len();
    // augmented system [basis | target] over Q
    let mut m: Vec<Vec<Rational>> = (0..d)
        .map(|i| {
            basis.iter().chain(target).map(|c| Rational::from_integer(c[i].clone())).collect()
        })
        .collect();
    let width = r + target.len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..r {
        let Some(p) = (row..d).find(|&i| !m[i][col].is_zero()) else {
            bail!("oracle: kernel basis is not independent");
        };
        m.swap(row, p);
        let pv = m[row][col].clone();
        for j in 0..width {
            m[row][j] = &m[row][j] / &pv;
        }
        for i in 0..d {
            if i != row && !m[i][col].is_zero() {
                let factor = m[i][col].clone();
                for j in 0..width {
                    let delta = &factor * &m[row][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(row);
        row += 1;
    }
    if m[row..].iter().any(|rw| rw[r..].iter().any(|x| !x.is_zero())) {
        bail!("oracle: sublattice is not stable under the action");
    }
    let mut out = vec![vec![BigInt::zero(); target.len()]; r];
    for (bi, &pr) in pivots.iter().enumerate() {
        for t in 0..target.len() {
            let x = &m[pr][r + t];
            if !x.is_integer() {
                bail!("oracle: induced action is not integral");
            }
            out[bi][t] = x.to_integer();
        }
    }
    Ok(out)
}

fn oracle_tower(m: &GModule) -> Result<TowerInvariants> {
    let g = m.group();
    let (p, n) = (g.p(), g.n());
    let a = rows_of(m.action());
    let d = a.len();
    let mut lambda = Vec::new();
    let mut chi_quotient = Vec::new();
    let mut chi_layer = Vec::new();
    for i in 0..=n {
        let basis = gcd_kernel(&minus_identity(&power(&a, p.pow(i))), d);
        lambda.push(basis.len() as u64);
        if i == 0 || basis.is_empty() {
            if i > 0 {
                chi_quotient.push(0);
                chi_layer.push(0);
            }
            continue;
        }
        let images: Vec<Vec<BigInt>> = basis
            .iter()
            .map(|v| a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect())
            .collect();
        let induced = solve_in_basis(&basis, &images, d)?;
        chi_quotient.push(-free_orders(&induced, p, i, 0)?.chi);
        chi_layer.push(-free_orders(&induced, p, i, i - 1)?.chi);
    }
    let chi_subgroup = (0..n)
        .map(|i| free_orders(&a, p, n, i).map(|o| -o.chi))
        .collect::<Result<Vec<_>>>()?;
    Ok(TowerInvariants {
        p,
        n,
        lambda,
        chi_quotient,
        chi_subgroup,
        chi_layer,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleRow {
    #[serde(with = "zpg_core::serde_util::dec")]
    pub subgroup_index: u32,
    pub main: CohomologyOrders,
    pub oracle: CohomologyOrders,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub spec: BlockSpec,
    pub cohomology: Vec<OracleRow>,
    /// Tower data of the free part, main pipeline then oracle.
    pub tower_main: TowerInvariants,
    pub tower_oracle: TowerInvariants,
    #[serde(with = "zpg_core::serde_util::dec")]
    pub finite_blocks_skipped: usize,
    pub agree: bool,
}

/// Recomputes everything for `spec` and diffs it against the main pipeline.
/// Refuses modules of free rank above `rank_cap`.
pub fn run_oracle(spec: &BlockSpec, rank_cap: usize) -> Result<OracleReport> {
    let m = build_module(spec).context("building module")?;
    if m.rank() > rank_cap {
        bail!("module rank {} exceeds the oracle cap {rank_cap}", m.rank());
    }
    let g = m.group();
    let (p, n) = (g.p(), g.n());
    let a = rows_of(m.action());
    let enumerable: Vec<_> = m
        .finite_blocks()
        .iter()
        .filter(|b| (p as f64).powi((b.k as usize * b.size()) as i32) <= FINITE_ENUMERATION_CAP as f64)
        .collect();
    let skipped = m.finite_blocks().len() - enumerable.len();
    // the main pipeline restricted to what the oracle can see
    let visible = GModule::new(
        g,
        m.action().clone(),
        enumerable.iter().map(|&b| b.clone()).collect(),
    )?;
    let mut rows = Vec::new();
    for i in 0..=n {
        let main = tate_orders(&visible, i)?;
        let mut oracle = free_orders(&a, p, n, i)?;
        for b in &enumerable {
            oracle = oracle + finite_orders(&rows_of(&b.action), p, b.k, p.pow(i), p.pow(n - i));
        }
        rows.push(OracleRow {
            subgroup_index: i,
            agree: main == oracle,
            main,
            oracle,
        });
    }
    let free = m.free_part();
    let tower_main = analyze_tower(&free)?;
    let tower_oracle = oracle_tower(&free)?;
    let agree = rows.iter().all(|r| r.agree) && tower_main == tower_oracle;
    Ok(OracleReport {
        spec: spec.clone(),
        cohomology: rows,
        tower_main,
        tower_oracle,
        finite_blocks_skipped: skipped,
        agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use zpg_core::FiniteSpec;

    fn spec(p: u64, n: u32, r: Vec<u64>) -> BlockSpec {
        BlockSpec {
            p,
            n,
            multiplicities: r,
            finite_specs: vec![],
            conjugator_seed: 77,
            conjugator_bound: 2,
        }
    }

    #[test]
    fn gcd_kernel_is_saturated() {
        // kernel of [2 4] is spanned by (2, -1)
        let k = gcd_kernel(&[vec![BigInt::from(2), BigInt::from(4)]], 2);
        assert_eq!(k.len(), 1);
        let g = k[0][0].gcd(&k[0][1]);
        assert!(g.is_one());
    }

    #[test]
    fn minor_gcd_index() {
        let col = |a: i64, b: i64| vec![BigInt::from(a), BigInt::from(b)];
        let sub = vec![col(2, 0), col(0, 4)];
        let sup = vec![col(1, 0), col(0, 1)];
        assert_eq!(index_valuation(&sub, &sup, 2, 2).unwrap(), 3);
    }

    #[test]
    fn worked_example_agrees() {
        let rep = run_oracle(&spec(2, 2, vec![1, 0, 1]), DEFAULT_RANK_CAP).unwrap();
        assert!(rep.agree, "{rep:?}");
        assert_eq!(rep.tower_oracle.lambda, vec![1, 1, 3]);
    }

    #[test]
    fn agrees_on_small_modules() {
        for (p, n, r) in [(3, 1, vec![1, 2]), (2, 3, vec![1, 1, 1, 1]), (5, 1, vec![2, 1]), (3, 2, vec![0, 1, 0])] {
            let rep = run_oracle(&spec(p, n, r), DEFAULT_RANK_CAP).unwrap();
            assert!(rep.agree, "{rep:?}");
        }
    }

    #[test]
    fn finite_blocks_enumerated() {
        let mut s = spec(2, 2, vec![1, 1, 0]);
        s.finite_specs = vec![FiniteSpec { k: 2, e: 2, seed: 5 }, FiniteSpec { k: 3, e: 1, seed: 6 }];
        let rep = run_oracle(&s, DEFAULT_RANK_CAP).unwrap();
        assert_eq!(rep.finite_blocks_skipped, 0);
        assert!(rep.agree, "{rep:?}");
    }

    #[test]
    fn refuses_large_modules() {
        let err = run_oracle(&spec(3, 2, vec![0, 0, 2]), DEFAULT_RANK_CAP).unwrap_err();
        assert!(err.to_string().contains("exceeds"));
    }
}
