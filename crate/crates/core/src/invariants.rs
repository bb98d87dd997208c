//! Structural invariants of a free module: the rank sequence `r_0..r_n`
//! (multiplicity of `Z_p[zeta_(p^t)]` up to finite error), computed three
//! independent ways.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, IntMatrix};
use crate::modules::{
    cyclotomic_eval, fixed_submodule, induced_action, phi_prime_power, CyclicPGroup, GModule,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankSequence {
    #[serde(with = "crate::serde_util::dec_vec")]
    pub r: Vec<u64>,
}

impl RankSequence {
    /// `sum_t r_t * phi(p^t)`.
    pub fn total_rank(&self, p: u64) -> u64 {
        self.r
            .iter()
            .enumerate()
            .map(|(t, r)| r * phi_prime_power(p, t as u32))
            .sum()
    }
}

/// Divides a rank by `phi(p^t)`, insisting on exactness.
fn exact_multiplicity(rank: i64, p: u64, t: u32, what: &str) -> Result<u64> {
    let phi = phi_prime_power(p, t) as i64;
    if rank < 0 || rank % phi != 0 {
        return Err(Error::RankSequence(format!(
            "{what} at t = {t} is {rank}, not a nonnegative multiple of phi({p}^{t}) = {phi}"
        )));
    }
    Ok((rank / phi) as u64)
}

/// Triangular solve from the fixed-submodule ranks
/// `rank M^(N_i) = sum_(t <= i) r_t phi(p^t)`. Finite blocks are ignored.
pub fn rank_sequence(m: &GModule) -> Result<RankSequence> {
    let group = m.group();
    let mut r = Vec::with_capacity(group.n() as usize + 1);
    let mut previous = 0i64;
    for i in 0..=group.n() {
        let rank = fixed_submodule(m, i)?.rank() as i64;
        r.push(exact_multiplicity(rank - previous, group.p(), i, "fixed-rank increment")?);
        previous = rank;
    }
    Ok(RankSequence { r })
}

/// `0 -> M' -> M -> Z_p[zeta_(p^n)]^r -> 0` with `M' = ker(g^(p^(n-1)) - 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeFiltrationStep {
    /// Saturated basis of `M'` in column Hermite form.
    pub sub_basis: IntMatrix,
    /// `rank M - rank M' = r * phi(p^n)`.
    pub quotient_rank: u64,
    /// `M'` as a module over the same group, in `sub_basis` coordinates;
    /// its action has order dividing `p^(n-1)`.
    pub sub_module: GModule,
}

impl PrimeFiltrationStep {
    /// Number of `Z_p[zeta_(p^n)]` summands in the quotient.
    pub fn quotient_multiplicity(&self) -> u64 {
        let g = self.sub_module.group();
        self.quotient_rank / phi_prime_power(g.p(), g.n())
    }

    /// `M'` as a module over `G / N_(n-1)`, cyclic of order `p^(n-1)`.
    pub fn sub_module_over_quotient(&self) -> Result<GModule> {
        let g = self.sub_module.group();
        GModule::free(
            CyclicPGroup::new(g.p(), g.n() - 1)?,
            self.sub_module.action().clone(),
        )
    }
}

pub fn prime_filtration(m: &GModule) -> Result<PrimeFiltrationStep> {
    let group = m.group();
    if group.n() == 0 {
        return Err(Error::Filtration(
            "the filtration needs a nontrivial group (n >= 1)".into(),
        ));
    }
    let (p, n) = (group.p(), group.n());
    let sub_basis = linalg::kernel_basis(&m.action().pow_prime_power(p, n - 1).minus_identity());
    let quotient_rank = (m.rank() - sub_basis.cols()) as u64;
    let phi = phi_prime_power(p, n);
    if quotient_rank % phi != 0 {
        return Err(Error::Filtration(format!(
            "quotient rank {quotient_rank} is not a multiple of phi({p}^{n}) = {phi}"
        )));
    }
    let sub_action = induced_action(m.action(), &sub_basis)?;
    if !sub_action.pow_prime_power(p, n - 1).is_identity() {
        return Err(Error::Filtration(format!(
            "action on the submodule does not have order dividing {p}^{}",
            n - 1
        )));
    }
    Ok(PrimeFiltrationStep {
        sub_basis,
        quotient_rank,
        sub_module: GModule::free(group, sub_action)?,
    })
}

/// Rank sequence recovered by peeling off `Z_p[zeta_(p^t)]` layers with
/// [`prime_filtration`] from the top level down.
pub fn filtration_multiplicities(m: &GModule) -> Result<RankSequence> {
    let n = m.group().n();
    let mut r = vec![0u64; n as usize + 1];
    let mut current = m.free_part();
    for t in (1..=n).rev() {
        let step = prime_filtration(&current)?;
        r[t as usize] = step.quotient_multiplicity();
        current = step.sub_module_over_quotient()?;
    }
    r[0] = current.rank() as u64;
    Ok(RankSequence { r })
}

/// Multiplicity of each irreducible `Q_p`-representation of degree
/// `phi(p^t)`: `rank ker Phi_(p^t)(A) / phi(p^t)`.
pub fn rep_multiplicities(m: &GModule) -> Result<RankSequence> {
    let group = m.group();
    let d = m.rank() as i64;
    let r = (0..=group.n())
        .map(|t| {
            let kernel_rank = d - cyclotomic_eval(m.action(), group.p(), t).rank() as i64;
            exact_multiplicity(kernel_rank, group.p(), t, "cyclotomic kernel rank")
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RankSequence { r })
}
