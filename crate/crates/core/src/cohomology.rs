//! Tate cohomology of a cyclic group `H = <h>` of order `q`:
//! `H^1 = ker(Norm) / im(h - 1)` and `H^2 = M^H / im(Norm)`, with
//! `Norm = 1 + h + ... + h^(q-1)`. The Euler characteristic is
//! `chi = ord_p |H^2| - ord_p |H^1|`.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, IntMatrix};
use crate::modules::{phi_prime_power, FiniteBlock, GModule};

/// Default ceiling on the torsion level used by [`dual_euler_char`].
pub const DEFAULT_K_CAP: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CohomologyOrders {
    /// `ord_p |H^1|`
    #[serde(with = "crate::serde_util::dec")]
    pub v1: u64,
    /// `ord_p |H^2|`
    #[serde(with = "crate::serde_util::dec")]
    pub v2: u64,
    #[serde(with = "crate::serde_util::dec")]
    pub chi: i64,
}

impl CohomologyOrders {
    pub fn new(v1: u64, v2: u64) -> Self {
        CohomologyOrders {
            v1,
            v2,
            chi: v2 as i64 - v1 as i64,
        }
    }
}

impl std::ops::Add for CohomologyOrders {
    type Output = CohomologyOrders;

    fn add(self, rhs: Self) -> Self {
        CohomologyOrders::new(self.v1 + rhs.v1, self.v2 + rhs.v2)
    }
}

/// `1 + h + ... + h^(p^e - 1)`, assembled through the factorization
/// `Norm_(p^(a+1)) = Norm_(p^a) * (1 + h^(p^a) + ... + h^((p-1) p^a))`,
/// so the cost is `O(p e)` products rather than `O(p^e)`.
pub fn norm_matrix(h: &IntMatrix, p: u64, e: u32) -> IntMatrix {
    norm_matrix_with(h, p, e, |m| m)
}

fn norm_matrix_with(
    h: &IntMatrix,
    p: u64,
    e: u32,
    reduce: impl Fn(IntMatrix) -> IntMatrix,
) -> IntMatrix {
    let d = h.rows();
    let mut norm = IntMatrix::identity(d);
    let mut step = h.clone();
    for _ in 0..e {
        let mut partial = IntMatrix::identity(d);
        let mut term = IntMatrix::identity(d);
        for _ in 1..p {
            term = reduce(&term * &step);
            partial = &partial + &term;
        }
        norm = reduce(&norm * &reduce(partial));
        step = reduce(step.pow(p));
    }
    norm
}

fn p_power_valuation(index: &BigInt, p: u64) -> Result<u64> {
    let (v, cofactor) = linalg::p_valuation(index, p);
    if !num_traits::One::is_one(&cofactor) {
        return Err(Error::NotPTorsion {
            index: index.to_string(),
            p,
        });
    }
    Ok(u64::from(v))
}

/// Cohomology of the lattice `Z^d` under `h` of order dividing `p^e`.
fn lattice_orders(h: &IntMatrix, p: u64, e: u32) -> Result<CohomologyOrders> {
    if h.rows() == 0 || e == 0 {
        return Ok(CohomologyOrders::default());
    }
    let h_minus_1 = h.minus_identity();
    let norm = norm_matrix(h, p, e);
    let fixed = linalg::kernel_basis(&h_minus_1);
    let v2 = p_power_valuation(&linalg::sublattice_index(&norm, &fixed)?, p)?;
    let norm_kernel = linalg::kernel_basis(&norm);
    let v1 = p_power_valuation(&linalg::sublattice_index(&h_minus_1, &norm_kernel)?, p)?;
    Ok(CohomologyOrders::new(v1, v2))
}

fn finite_orders(block: &FiniteBlock, p: u64, i: u32, e: u32) -> CohomologyOrders {
    if e == 0 || block.size() == 0 {
        return CohomologyOrders::default();
    }
    let modulus = block.modulus(p);
    let reduce = |m: IntMatrix| m.reduce_mod(&modulus);
    let h = reduce(block.action.pow_prime_power(p, i));
    let norm = norm_matrix_with(&h, p, e, reduce);
    let h_minus_1 = h.minus_identity();
    let k = block.k;
    let ker_h = linalg::local_kernel_order(&h_minus_1, p, k);
    let im_h = linalg::local_image_order(&h_minus_1, p, k);
    let ker_n = linalg::local_kernel_order(&norm, p, k);
    let im_n = linalg::local_image_order(&norm, p, k);
    CohomologyOrders::new(ker_n - im_h, ker_h - im_n)
}

/// Cohomology of `N_i = <g^(p^i)>` acting on `m`; free part and finite
/// blocks contribute additively. `i = n` (trivial subgroup) gives zeros.
pub fn tate_orders(m: &GModule, i: u32) -> Result<CohomologyOrders> {
    let group = m.group();
    group.check_index(i)?;
    if i == group.n() {
        return Ok(CohomologyOrders::default());
    }
    let (p, e) = (group.p(), group.n() - i);
    let h = m.action().pow_prime_power(p, i);
    let mut total = lattice_orders(&h, p, e)?;
    for block in m.finite_blocks() {
        total = total + finite_orders(block, p, i, e);
    }
    Ok(total)
}

/// `chi(N_i, Z_p[zeta_(p^j)])` in a group of order `p^n`:
/// `(n - i) * phi(p^j)` when `j <= i`, else `-p^i`.
pub fn cyclotomic_chi_closed_form(p: u64, n: u32, i: u32, j: u32) -> i64 {
    if j <= i {
        (n - i) as i64 * phi_prime_power(p, j) as i64
    } else {
        -(p.pow(i) as i64)
    }
}

/// Contribution of one torsion level to the dual cohomology.
///
/// Works in `(Z/p^(2k))^d` and counts only elements killed by `p^k`:
/// kernels restricted to that layer, and images of the larger level
/// intersected with it. Once `k` exceeds every invariant valuation this is
/// exactly the cohomology of the divisible dual module.
fn dual_level_chi(h_minus_1: &IntMatrix, norm: &IntMatrix, p: u64, k: u32) -> i64 {
    let level = 2 * k;
    let vh = linalg::local_divisor_valuations(h_minus_1, p, level);
    let vn = linalg::local_divisor_valuations(norm, p, level);
    let ker = |vals: &[u32]| -> i64 { vals.iter().map(|&v| i64::from(v.min(k))).sum() };
    let img = |vals: &[u32]| -> i64 { vals.iter().map(|&v| i64::from(k.min(level - v))).sum() };
    let v1 = ker(&vn) - img(&vh);
    let v2 = ker(&vh) - img(&vn);
    v2 - v1
}

/// `chi(N_i, M*)` for the Pontryagin dual `M* = Hom(M, Q_p/Z_p)` of the
/// free part (finite blocks are excluded from the dual model).
///
/// The dual is `(Q_p/Z_p)^d` with the contragredient action `(A^-1)^T`.
/// Its torsion levels are evaluated starting at `k = n + 2`, doubling `k`
/// until three successive levels agree; exceeding `k_cap` is an error.
pub fn dual_euler_char(m: &GModule, i: u32, k_cap: u32) -> Result<i64> {
    let group = m.group();
    group.check_index(i)?;
    if i == group.n() || m.rank() == 0 {
        return Ok(0);
    }
    let (p, n) = (group.p(), group.n());
    // g^(p^n) = 1, so g^-1 = g^(p^n - 1) exactly over Z.
    let inverse = m.action().pow(group.order() - 1);
    let contragredient = inverse.transpose();
    let h = contragredient.pow_prime_power(p, i);
    let norm = norm_matrix(&h, p, n - i);
    let h_minus_1 = h.minus_identity();

    let mut k = n + 2;
    let mut history: Vec<i64> = Vec::new();
    while k <= k_cap {
        history.push(dual_level_chi(&h_minus_1, &norm, p, k));
        if let [.., a, b, c] = history[..] {
            if a == b && b == c {
                return Ok(c);
            }
        }
        k *= 2;
    }
    Err(Error::DualNotStabilized { k_cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modules::{build_module, cyclotomic_block, finite_block, BlockSpec, CyclicPGroup};

    fn worked(bound: u64) -> GModule {
        build_module(&BlockSpec {
            p: 2,
            n: 2,
            multiplicities: vec![1, 0, 1],
            finite_specs: vec![],
            conjugator_seed: 11,
            conjugator_bound: bound,
        })
        .unwrap()
    }

    /// Literal `q - 1` term sum.
    fn naive_norm(h: &IntMatrix, q: u64) -> IntMatrix {
        let mut acc = IntMatrix::identity(h.rows());
        let mut term = IntMatrix::identity(h.rows());
        for _ in 1..q {
            term = &term * h;
            acc = &acc + &term;
        }
        acc
    }

    #[test]
    fn telescoped_norm_matches_literal_sum() {
        for (p, t, e) in [(2u64, 2u32, 2u32), (3, 1, 1), (3, 2, 2), (5, 1, 1), (2, 3, 3)] {
            let h = cyclotomic_block(p, t);
            assert_eq!(norm_matrix(&h, p, e), naive_norm(&h, p.pow(e)));
        }
    }

    #[test]
    fn trivial_subgroup_is_zero() {
        let m = worked(2);
        assert_eq!(tate_orders(&m, 2).unwrap(), CohomologyOrders::default());
    }

    #[test]
    fn trivial_rank_one() {
        for (p, n) in [(2u64, 1u32), (2, 3), (3, 2), (5, 1)] {
            let g = CyclicPGroup::new(p, n).unwrap();
            let o = tate_orders(&GModule::trivial(g, 1), 0).unwrap();
            assert_eq!(o, CohomologyOrders::new(0, u64::from(n)));
        }
    }

    #[test]
    fn top_cyclotomic_block() {
        for (p, n) in [(2u64, 2u32), (3, 1), (3, 2), (5, 1)] {
            let g = CyclicPGroup::new(p, n).unwrap();
            let m = GModule::free(g, cyclotomic_block(p, n)).unwrap();
            for i in 0..n {
                let o = tate_orders(&m, i).unwrap();
                assert_eq!((o.v1, o.v2, o.chi), (p.pow(i), 0, -(p.pow(i) as i64)));
            }
        }
    }

    #[test]
    fn worked_example_chi() {
        for bound in [0, 3] {
            let m = worked(bound);
            assert_eq!(tate_orders(&m, 0).unwrap().chi, 1);
            assert_eq!(tate_orders(&m, 1).unwrap().chi, -1);
        }
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(cyclotomic_chi_closed_form(3, 2, 1, 2), -3);
        assert_eq!(cyclotomic_chi_closed_form(2, 2, 1, 0), 1);
        for j in 0..=3 {
            assert_eq!(cyclotomic_chi_closed_form(5, 3, 3, j), 0);
        }
    }

    #[test]
    fn finite_blocks_have_zero_chi() {
        let g = CyclicPGroup::new(3, 2).unwrap();
        for seed in 0..5 {
            let b = finite_block(g, 2, 3, seed);
            let m = GModule::new(g, IntMatrix::zeros(0, 0), vec![b]).unwrap();
            for i in 0..=2 {
                assert_eq!(tate_orders(&m, i).unwrap().chi, 0);
            }
        }
        // trivial action on Z/p^k: H^1 and H^2 are both nonzero
        let triv = FiniteBlock {
            k: 3,
            action: IntMatrix::identity(1),
        };
        let m = GModule::new(g, IntMatrix::zeros(0, 0), vec![triv]).unwrap();
        assert_eq!(tate_orders(&m, 0).unwrap(), CohomologyOrders::new(2, 2));
    }

    #[test]
    fn dual_sign_examples() {
        let g = CyclicPGroup::new(3, 2).unwrap();
        assert_eq!(dual_euler_char(&GModule::trivial(g, 1), 0, DEFAULT_K_CAP).unwrap(), -2);
        let block = GModule::free(g, cyclotomic_block(3, 2)).unwrap();
        assert_eq!(dual_euler_char(&block, 0, DEFAULT_K_CAP).unwrap(), 1);
        assert_eq!(dual_euler_char(&block, 1, DEFAULT_K_CAP).unwrap(), 3);
        assert_eq!(dual_euler_char(&worked(3), 0, DEFAULT_K_CAP).unwrap(), -1);
    }

    #[test]
    fn dual_cap_too_small() {
        let g = CyclicPGroup::new(2, 2).unwrap();
        assert_eq!(
            dual_euler_char(&GModule::trivial(g, 1), 0, 4),
            Err(Error::DualNotStabilized { k_cap: 4 })
        );
    }
}
