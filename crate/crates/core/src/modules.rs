//! Lattices with an action of a cyclic `p`-group `G = <g>` of order `p^n`.
//!
//! A [`GModule`] is a free part (a `d x d` integer matrix for `g` on `Z^d`)
//! plus optional finite summands `(Z/p^k)^e`. Subgroups are indexed by `i`:
//! `N_i = <g^(p^i)>` has order `p^(n-i)`, and `G/N_i` is cyclic of order `p^i`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, IntMatrix};

/// Attempts at drawing an invertible matrix mod `p` before a finite block
/// falls back to the identity action.
const FINITE_BLOCK_ATTEMPTS: usize = 32;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut f = 2u64;
    while f.saturating_mul(f) <= p {
        if p % f == 0 {
            return false;
        }
        f += 1;
    }
    true
}

/// Euler's totient of `p^t`.
pub fn phi_prime_power(p: u64, t: u32) -> u64 {
    if t == 0 {
        1
    } else {
        (p - 1) * p.pow(t - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CyclicPGroup {
    #[serde(with = "crate::serde_util::dec")]
    p: u64,
    #[serde(with = "crate::serde_util::dec")]
    n: u32,
}

impl CyclicPGroup {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p.checked_pow(n).is_none() {
            return Err(Error::GroupTooLarge { p, n });
        }
        Ok(CyclicPGroup { p, n })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.n)
    }

    pub fn check_index(&self, i: u32) -> Result<()> {
        if i > self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        Ok(())
    }

    /// Order of `N_i`, i.e. `p^(n-i)`.
    pub fn subgroup_order(&self, i: u32) -> u64 {
        self.p.pow(self.n - i)
    }
}

/// `(Z/p^k)^e` with the generator acting by `action` (entries in `[0, p^k)`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteBlock {
    #[serde(with = "crate::serde_util::dec")]
    pub k: u32,
    pub action: IntMatrix,
}

impl FiniteBlock {
    pub fn size(&self) -> usize {
        self.action.rows()
    }

    pub fn modulus(&self, p: u64) -> BigInt {
        num_traits::pow(BigInt::from(p), self.k as usize)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GModule {
    group: CyclicPGroup,
    action: IntMatrix,
    finite: Vec<FiniteBlock>,
}

impl GModule {
    /// Checks `action^(p^n) = I` on the free part and mod `p^k` on each
    /// finite block.
    pub fn new(group: CyclicPGroup, action: IntMatrix, finite: Vec<FiniteBlock>) -> Result<Self> {
        if !action.is_square() {
            return Err(Error::Dimension(format!(
                "action must be square, got {}x{}",
                action.rows(),
                action.cols()
            )));
        }
        if !action.pow_prime_power(group.p, group.n).is_identity() {
            return Err(Error::ActionOrder(format!(
                "free action does not satisfy g^({}^{}) = 1",
                group.p, group.n
            )));
        }
        let finite = finite
            .into_iter()
            .map(|b| check_finite_block(group, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(GModule { group, action, finite })
    }

    pub fn free(group: CyclicPGroup, action: IntMatrix) -> Result<Self> {
        Self::new(group, action, Vec::new())
    }

    pub fn zero(group: CyclicPGroup) -> Self {
        GModule {
            group,
            action: IntMatrix::zeros(0, 0),
            finite: Vec::new(),
        }
    }

    /// Trivial action on `Z^d`.
    pub fn trivial(group: CyclicPGroup, d: usize) -> Self {
        GModule {
            group,
            action: IntMatrix::identity(d),
            finite: Vec::new(),
        }
    }

    pub fn group(&self) -> CyclicPGroup {
        self.group
    }

    /// Matrix of `g` on the free part.
    pub fn action(&self) -> &IntMatrix {
        &self.action
    }

    pub fn finite_blocks(&self) -> &[FiniteBlock] {
        &self.finite
    }

    /// `Z_p`-rank (finite blocks contribute nothing).
    pub fn rank(&self) -> usize {
        self.action.rows()
    }

    pub fn has_finite_blocks(&self) -> bool {
        !self.finite.is_empty()
    }

    pub fn free_part(&self) -> GModule {
        GModule {
            group: self.group,
            action: self.action.clone(),
            finite: Vec::new(),
        }
    }

    pub fn finite_part(&self) -> GModule {
        GModule {
            group: self.group,
            action: IntMatrix::zeros(0, 0),
            finite: self.finite.clone(),
        }
    }
}

fn check_finite_block(group: CyclicPGroup, block: FiniteBlock) -> Result<FiniteBlock> {
    if block.k == 0 {
        return Err(Error::InvalidSpec("finite block exponent k must be positive".into()));
    }
    if !block.action.is_square() {
        return Err(Error::Dimension("finite block action must be square".into()));
    }
    let modulus = block.modulus(group.p);
    let action = block.action.reduce_mod(&modulus);
    let mut power = action.clone();
    for _ in 0..group.n {
        power = pow_mod(&power, &BigUint::from(group.p), &modulus);
    }
    if !power.is_identity() {
        return Err(Error::ActionOrder(format!(
            "finite block action does not satisfy g^({}^{}) = 1 mod {}^{}",
            group.p, group.n, group.p, block.k
        )));
    }
    Ok(FiniteBlock { k: block.k, action })
}

fn mul_mod(a: &IntMatrix, b: &IntMatrix, modulus: &BigInt) -> IntMatrix {
    (a * b).reduce_mod(modulus)
}

fn pow_mod(m: &IntMatrix, e: &BigUint, modulus: &BigInt) -> IntMatrix {
    let mut acc = IntMatrix::identity(m.rows()).reduce_mod(modulus);
    let mut base = m.reduce_mod(modulus);
    let bits = e.bits();
    for b in 0..bits {
        if e.bit(b) {
            acc = mul_mod(&acc, &base, modulus);
        }
        if b + 1 < bits {
            base = mul_mod(&base, &base, modulus);
        }
    }
    acc
}

/// Companion matrix of the `p^t`-th cyclotomic polynomial: `g` acting on
/// `Z_p[zeta_(p^t)]` by multiplication. `t = 0` gives the `1 x 1` identity.
pub fn cyclotomic_block(p: u64, t: u32) -> IntMatrix {
    let coeffs = cyclotomic_coefficients(p, t);
    let deg = coeffs.len() - 1;
    let mut c = IntMatrix::zeros(deg, deg);
    for i in 0..deg {
        if i + 1 < deg {
            c.set(i + 1, i, BigInt::one());
        }
        c.set(i, deg - 1, -BigInt::from(coeffs[i]));
    }
    c
}

/// Coefficients (constant term first) of `Phi_(p^t)`.
pub fn cyclotomic_coefficients(p: u64, t: u32) -> Vec<i64> {
    if t == 0 {
        return vec![-1, 1];
    }
    let stride = p.pow(t - 1) as usize;
    let deg = phi_prime_power(p, t) as usize;
    let mut c = vec![0i64; deg + 1];
    for j in 0..p as usize {
        c[j * stride] = 1;
    }
    c
}

/// `Phi_(p^t)(a)` for a square matrix `a`.
pub fn cyclotomic_eval(a: &IntMatrix, p: u64, t: u32) -> IntMatrix {
    if t == 0 {
        return a.minus_identity();
    }
    // Phi_(p^t)(x) = 1 + y + ... + y^(p-1) with y = x^(p^(t-1))
    let y = a.pow_prime_power(p, t - 1);
    let mut acc = IntMatrix::identity(a.rows());
    let mut term = IntMatrix::identity(a.rows());
    for _ in 1..p {
        term = &term * &y;
        acc = &acc + &term;
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteSpec {
    #[serde(with = "crate::serde_util::dec")]
    pub k: u32,
    #[serde(with = "crate::serde_util::dec")]
    pub e: usize,
    #[serde(with = "crate::serde_util::dec")]
    pub seed: u64,
}

/// Recipe for a synthetic module: `r_t` copies of `Z_p[zeta_(p^t)]` for
/// `t = 0..=n`, conjugated by a seeded unimodular matrix, plus finite blocks.
///
/// `conjugator_bound = 0` selects the identity conjugator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpec {
    #[serde(with = "crate::serde_util::dec")]
    pub p: u64,
    #[serde(with = "crate::serde_util::dec")]
    pub n: u32,
    #[serde(with = "crate::serde_util::dec_vec")]
    pub multiplicities: Vec<u64>,
    #[serde(default)]
    pub finite_specs: Vec<FiniteSpec>,
    #[serde(with = "crate::serde_util::dec")]
    pub conjugator_seed: u64,
    #[serde(with = "crate::serde_util::dec")]
    pub conjugator_bound: u64,
}

impl BlockSpec {
    pub fn validate(&self) -> Result<CyclicPGroup> {
        let group = CyclicPGroup::new(self.p, self.n)?;
        if self.multiplicities.len() != self.n as usize + 1 {
            return Err(Error::InvalidSpec(format!(
                "multiplicities must list r_0..r_n ({} values), got {}",
                self.n + 1,
                self.multiplicities.len()
            )));
        }
        if let Some(f) = self.finite_specs.iter().find(|f| f.k == 0) {
            return Err(Error::InvalidSpec(format!(
                "finite block with seed {} has exponent k = 0",
                f.seed
            )));
        }
        Ok(group)
    }

    /// `sum_t r_t * phi(p^t)`.
    pub fn rank(&self) -> u64 {
        self.multiplicities
            .iter()
            .enumerate()
            .map(|(t, r)| r * phi_prime_power(self.p, t as u32))
            .sum()
    }
}

/// Block-diagonal sum of cyclotomic blocks, before conjugation.
pub fn block_diagonal_action(p: u64, multiplicities: &[u64]) -> IntMatrix {
    let blocks: Vec<IntMatrix> = multiplicities
        .iter()
        .enumerate()
        .flat_map(|(t, &r)| (0..r).map(move |_| cyclotomic_block(p, t as u32)))
        .collect();
    let refs: Vec<&IntMatrix> = blocks.iter().collect();
    IntMatrix::block_diag(&refs)
}

pub fn build_module(spec: &BlockSpec) -> Result<GModule> {
    let group = spec.validate()?;
    let diag = block_diagonal_action(spec.p, &spec.multiplicities);
    let (c, c_inv) = linalg::unimodular_random_with_inverse(
        diag.rows(),
        spec.conjugator_seed,
        spec.conjugator_bound,
        linalg::default_op_count(diag.rows()),
    );
    let action = &(&c * &diag) * &c_inv;
    let finite = spec
        .finite_specs
        .iter()
        .map(|f| finite_block(group, f.k, f.e, f.seed))
        .collect();
    GModule::new(group, action, finite)
        .map_err(|e| Error::ActionOrder(format!("construction produced an invalid module: {e}")))
}

/// Replaces the free action `A` by `C A C^-1` for a seeded unimodular `C`.
pub fn conjugate(m: &GModule, seed: u64, bound: u64) -> GModule {
    let d = m.rank();
    let (c, c_inv) =
        linalg::unimodular_random_with_inverse(d, seed, bound, linalg::default_op_count(d));
    GModule {
        group: m.group,
        action: &(&c * &m.action) * &c_inv,
        finite: m.finite.clone(),
    }
}

/// Seeded finite block `(Z/p^k)^e` whose action has order dividing `p^n`.
///
/// Draws `X` invertible mod `p`, kills its prime-to-`p` part by raising to
/// `prod_(j=1..e) (p^j - 1)`, then takes `p`-th powers until the order
/// divides `p^n`. Falls back to the identity if no invertible draw occurs.
pub fn finite_block(group: CyclicPGroup, k: u32, e: usize, seed: u64) -> FiniteBlock {
    let p = group.p;
    let modulus = num_traits::pow(BigInt::from(p), k as usize);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut action = IntMatrix::identity(e);
    for _ in 0..FINITE_BLOCK_ATTEMPTS {
        let x = IntMatrix::from_fn(e, e, |_, _| {
            BigInt::from(rng.gen_range(0..p.saturating_pow(k)))
        })
        .reduce_mod(&modulus);
        let det = x.determinant().expect("square");
        if (det % BigInt::from(p)).is_zero() {
            continue;
        }
        let mut h = BigUint::one();
        for j in 1..=e as u32 {
            h *= BigUint::from(p).pow(j) - BigUint::one();
        }
        let mut y = pow_mod(&x, &h, &modulus);
        let order_bound = |m: &IntMatrix| {
            let mut z = m.clone();
            for _ in 0..group.n {
                z = pow_mod(&z, &BigUint::from(p), &modulus);
            }
            z.is_identity()
        };
        while !order_bound(&y) {
            y = pow_mod(&y, &BigUint::from(p), &modulus);
        }
        action = y;
        break;
    }
    FiniteBlock {
        k,
        action: action.reduce_mod(&modulus),
    }
}

/// `M^(N_i)` with its induced `G/N_i`-action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedSubmodule {
    /// Saturated basis (column Hermite form) of `ker(A^(p^i) - I)`.
    pub basis: IntMatrix,
    /// The fixed lattice as a module over `G/N_i`, cyclic of order `p^i`,
    /// in coordinates of `basis`.
    pub induced: GModule,
    /// `ord_p |B^(N_i)|` for each finite block `B`.
    pub finite_fixed_orders: Vec<u64>,
}

impl FixedSubmodule {
    pub fn rank(&self) -> usize {
        self.basis.cols()
    }
}

/// Action of `h` on the sublattice spanned by the Hermite basis `basis`,
/// which must be `h`-stable.
pub(crate) fn induced_action(h: &IntMatrix, basis: &IntMatrix) -> Result<IntMatrix> {
    let image = h * basis;
    linalg::coordinates(basis, &image)?
        .ok_or_else(|| Error::ActionOrder("sublattice is not stable under the action".into()))
}

pub fn fixed_submodule(m: &GModule, i: u32) -> Result<FixedSubmodule> {
    let group = m.group;
    group.check_index(i)?;
    let gen_n = m.action.pow_prime_power(group.p, i);
    let basis = linalg::kernel_basis(&gen_n.minus_identity());
    let induced_action = induced_action(&m.action, &basis)?;
    let induced = GModule::free(CyclicPGroup { p: group.p, n: i }, induced_action)?;
    let finite_fixed_orders = m
        .finite
        .iter()
        .map(|b| {
            let modulus = b.modulus(group.p);
            let gen = pow_mod(&b.action, &BigUint::from(group.p).pow(i), &modulus);
            linalg::local_kernel_order(&gen.minus_identity(), group.p, b.k)
        })
        .collect();
    Ok(FixedSubmodule {
        basis,
        induced,
        finite_fixed_orders,
    })
}

/// `M` viewed as a module over `N_i`, generated by `g^(p^i)`.
pub fn restrict_action(m: &GModule, i: u32) -> Result<GModule> {
    let group = m.group;
    group.check_index(i)?;
    let sub = CyclicPGroup {
        p: group.p,
        n: group.n - i,
    };
    let finite = m
        .finite
        .iter()
        .map(|b| {
            let modulus = b.modulus(group.p);
            FiniteBlock {
                k: b.k,
                action: pow_mod(&b.action, &BigUint::from(group.p).pow(i), &modulus),
            }
        })
        .collect();
    Ok(GModule {
        group: sub,
        action: m.action.pow_prime_power(group.p, i),
        finite,
    })
}

pub fn direct_sum(a: &GModule, b: &GModule) -> Result<GModule> {
    if a.group != b.group {
        return Err(Error::GroupMismatch(format!(
            "Z/{}^{} vs Z/{}^{}",
            a.group.p, a.group.n, b.group.p, b.group.n
        )));
    }
    let mut finite = a.finite.clone();
    finite.extend(b.finite.iter().cloned());
    Ok(GModule {
        group: a.group,
        action: IntMatrix::block_diag(&[&a.action, &b.action]),
        finite,
    })
}
