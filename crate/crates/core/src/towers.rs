//! Synthetic towers `K_0 ⊆ K_1 ⊆ ... ⊆ K_n` and the lambda-invariant
//! identities they satisfy.
//!
//! A free module `M` over `G = Z/p^n` stands in for the dual of the
//! top-level class group. Level `i` sees the fixed lattice `M^(N_i)`:
//! `lambda_i` is its rank, and class-group-side Euler characteristics are
//! the negatives of the lattice-side ones (duality flips the sign).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cohomology::tate_orders;
use crate::error::{Error, Result};
use crate::invariants::RankSequence;
use crate::linalg::Rational;
use crate::modules::{fixed_submodule, phi_prime_power, GModule};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerInvariants {
    #[serde(with = "crate::serde_util::dec")]
    pub p: u64,
    #[serde(with = "crate::serde_util::dec")]
    pub n: u32,
    /// `lambda_0..lambda_n`
    #[serde(with = "crate::serde_util::dec_vec")]
    pub lambda: Vec<u64>,
    /// `chi(G_i, A_(K_i))` for `i = 1..n`
    #[serde(with = "crate::serde_util::dec_vec")]
    pub chi_quotient: Vec<i64>,
    /// `chi(N_i, A_(K_n))` for `i = 0..n-1`
    #[serde(with = "crate::serde_util::dec_vec")]
    pub chi_subgroup: Vec<i64>,
    /// `chi(N_(i-1)/N_i, A_(K_i))` for `i = 1..n`
    #[serde(with = "crate::serde_util::dec_vec")]
    pub chi_layer: Vec<i64>,
}

impl TowerInvariants {
    /// `chi(G_i, A_(K_i))`, with the trivial group `G_0` giving 0.
    pub fn chi_g(&self, i: u32) -> i64 {
        if i == 0 {
            0
        } else {
            self.chi_quotient[i as usize - 1]
        }
    }

    /// `chi(N_i, A_(K_n))`, with `N_n` trivial.
    pub fn chi_n(&self, i: u32) -> i64 {
        self.chi_subgroup.get(i as usize).copied().unwrap_or(0)
    }

    /// `chi(N_(i-1)/N_i, A_(K_i))` for `1 <= i <= n`.
    pub fn chi_layer(&self, i: u32) -> i64 {
        self.chi_layer[i as usize - 1]
    }

    pub fn lambda(&self, i: u32) -> u64 {
        self.lambda[i as usize]
    }
}

/// Reads off every tower quantity from the free module `m`.
pub fn analyze_tower(m: &GModule) -> Result<TowerInvariants> {
    if m.has_finite_blocks() {
        return Err(Error::FiniteBlocksInTower);
    }
    let group = m.group();
    let (p, n) = (group.p(), group.n());
    let mut lambda = Vec::with_capacity(n as usize + 1);
    let mut chi_quotient = Vec::with_capacity(n as usize);
    let mut chi_layer = Vec::with_capacity(n as usize);
    for i in 0..=n {
        let fixed = fixed_submodule(m, i)?;
        lambda.push(fixed.rank() as u64);
        if i >= 1 {
            // induced module lives over G_i = G/N_i; its subgroup of index
            // i-1 is the order-p layer N_(i-1)/N_i
            chi_quotient.push(-tate_orders(&fixed.induced, 0)?.chi);
            chi_layer.push(-tate_orders(&fixed.induced, i - 1)?.chi);
        }
    }
    let chi_subgroup = (0..n)
        .map(|i| tate_orders(m, i).map(|o| -o.chi))
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
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Relation {
    Equal,
    CongruentMod {
        #[serde(with = "crate::serde_util::dec")]
        modulus: BigInt,
    },
    LessEq,
    /// `lhs = 0` exactly when `rhs = 0`.
    ZeroIff,
}

impl Relation {
    fn holds(&self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Equal => lhs == rhs,
            Relation::LessEq => lhs <= rhs,
            Relation::ZeroIff => lhs.is_zero() == rhs.is_zero(),
            Relation::CongruentMod { modulus } => {
                let diff = lhs - rhs;
                diff.is_integer() && diff.to_integer().mod_floor(modulus).is_zero()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    #[serde(with = "rational_str")]
    pub lhs: Rational,
    #[serde(with = "rational_str")]
    pub rhs: Rational,
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    pub fn new(label: impl Into<String>, lhs: Rational, rhs: Rational, relation: Relation) -> Self {
        let pass = relation.holds(&lhs, &rhs);
        Check {
            label: label.into(),
            lhs,
            rhs,
            relation,
            pass,
        }
    }

    pub fn equal(label: impl Into<String>, lhs: Rational, rhs: Rational) -> Self {
        Self::new(label, lhs, rhs, Relation::Equal)
    }
}

/// Outcome of one identity on one tower. Failures are data, not errors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    /// `false` when the identity's hypotheses do not hold for this tower.
    pub applicable: bool,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl IdentityReport {
    pub fn from_checks(name: impl Into<String>, checks: Vec<Check>) -> Self {
        IdentityReport {
            name: name.into(),
            applicable: true,
            pass: checks.iter().all(|c| c.pass),
            checks,
        }
    }

    pub fn not_applicable(name: impl Into<String>) -> Self {
        IdentityReport {
            name: name.into(),
            applicable: false,
            pass: true,
            checks: Vec::new(),
        }
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match (self.applicable, self.pass) {
            (false, _) => "n/a",
            (true, true) => "ok",
            (true, false) => "FAIL",
        };
        write!(f, "{:<28} {status}", self.name)?;
        for c in &self.checks {
            write!(f, "\n    {:<24} {} vs {} ({})", c.label, c.lhs, c.rhs, if c.pass { "ok" } else { "FAIL" })?;
        }
        Ok(())
    }
}

fn q(x: impl Into<BigInt>) -> Rational {
    Rational::from_integer(x.into())
}

fn phi(p: u64, t: u32) -> Rational {
    q(phi_prime_power(p, t))
}

fn pow(p: u64, e: u32) -> Rational {
    q(num_traits::pow(BigInt::from(p), e as usize))
}

/// `lambda_i = p lambda_(i-1) + (p-1) chi(N_(i-1)/N_i, A_(K_i))`.
pub fn verify_iwasawa_step(t: &TowerInvariants, i: u32) -> IdentityReport {
    let name = format!("iwasawa_step[{i}]");
    if i == 0 || i > t.n {
        return IdentityReport::not_applicable(name);
    }
    let p = t.p;
    let lhs = q(t.lambda(i));
    let rhs = q(p) * q(t.lambda(i - 1)) + q(p - 1) * q(t.chi_layer(i));
    IdentityReport::from_checks(name, vec![Check::equal("lambda_i", lhs, rhs)])
}

/// `sum_(i<n) phi(p^i) lambda_(n-i) = p^(n-1) (np-n+1) lambda_0 + phi(p^n) chi(G_n)`.
pub fn verify_weighted_lambda_sum(t: &TowerInvariants) -> IdentityReport {
    const NAME: &str = "weighted_lambda_sum";
    if t.n == 0 {
        return IdentityReport::not_applicable(NAME);
    }
    let (p, n) = (t.p, t.n);
    let lhs: Rational = (0..n).map(|i| phi(p, i) * q(t.lambda(n - i))).sum();
    let rhs = pow(p, n - 1) * q(u64::from(n) * p - u64::from(n) + 1) * q(t.lambda(0))
        + phi(p, n) * q(t.chi_g(n));
    IdentityReport::from_checks(NAME, vec![Check::equal("weighted_sum", lhs, rhs)])
}

/// `lambda_n = p^n lambda_0 + phi(p^n) chi(G_n) - (p-1) sum_(0<i<n) phi(p^i) chi(G_i)`.
pub fn verify_top_lambda_formula(t: &TowerInvariants) -> IdentityReport {
    let (p, n) = (t.p, t.n);
    let lhs = q(t.lambda(n));
    let correction: Rational = (1..n).map(|i| phi(p, i) * q(t.chi_g(i))).sum();
    let rhs = pow(p, n) * q(t.lambda(0)) + phi(p, n) * q(t.chi_g(n)) - q(p - 1) * correction;
    IdentityReport::from_checks("top_lambda_formula", vec![Check::equal("lambda_n", lhs, rhs)])
}

/// `p^(n-1) chi(G_n) = sum_(0<i<n) phi(p^i) chi(G_i) + sum_(i=1..n) p^(n-i) chi(N_(i-1)/N_i, A_(K_i))`.
pub fn verify_chi_layer_decomposition(t: &TowerInvariants) -> IdentityReport {
    const NAME: &str = "chi_layer_decomposition";
    if t.n == 0 {
        return IdentityReport::not_applicable(NAME);
    }
    let (p, n) = (t.p, t.n);
    let lhs = pow(p, n - 1) * q(t.chi_g(n));
    let quotients: Rational = (1..n).map(|i| phi(p, i) * q(t.chi_g(i))).sum();
    let layers: Rational = (1..=n).map(|i| pow(p, n - i) * q(t.chi_layer(i))).sum();
    IdentityReport::from_checks(NAME, vec![Check::equal("chi_g_n", lhs, quotients + layers)])
}

/// `lambda_n ≡ lambda_i (mod phi(p^(i+1)))` for every `i`, and
/// `-n lambda_0 <= chi(G_n)`.
pub fn verify_lambda_congruences(t: &TowerInvariants) -> IdentityReport {
    let (p, n) = (t.p, t.n);
    let mut checks: Vec<Check> = (0..=n)
        .map(|i| {
            Check::new(
                format!("lambda_n vs lambda_{i}"),
                q(t.lambda(n)),
                q(t.lambda(i)),
                Relation::CongruentMod {
                    modulus: BigInt::from(phi_prime_power(p, i + 1)),
                },
            )
        })
        .collect();
    checks.push(Check::new(
        "chi_g_n lower bound",
        -q(n) * q(t.lambda(0)),
        q(t.chi_g(n)),
        Relation::LessEq,
    ));
    IdentityReport::from_checks("lambda_congruences", checks)
}

/// `(lambda_n - p^n lambda_0)/(p-1) = p^n chi(N_0)/(np-n+1)
///   + sum_(0<i<n) p^i (p-1) chi(N_(n-i)) / ((ip-i+p)(ip-i+1))`, in exact rationals.
pub fn verify_subgroup_chi_formula(t: &TowerInvariants) -> IdentityReport {
    const NAME: &str = "subgroup_chi_formula";
    if t.n == 0 {
        return IdentityReport::not_applicable(NAME);
    }
    let (p, n) = (t.p, t.n);
    let lin = |i: u32| q(u64::from(i) * p - u64::from(i) + 1); // ip - i + 1
    let lhs = (q(t.lambda(n)) - pow(p, n) * q(t.lambda(0))) / q(p - 1);
    let mut rhs = pow(p, n) * q(t.chi_n(0)) / lin(n);
    for i in 1..n {
        let denom = (lin(i) + q(p - 1)) * lin(i); // (ip-i+p)(ip-i+1)
        rhs += pow(p, i) * q(p - 1) * q(t.chi_n(n - i)) / denom;
    }
    IdentityReport::from_checks(NAME, vec![Check::equal("normalized_lambda_gap", lhs, rhs)])
}

/// Multiplicities of the rational representation: the trivial one is
/// `lambda_0`, the faithful one of degree `phi(p^i)` is
/// `lambda_0 + chi(G_i) - chi(G_(i-1))`.
pub fn verify_rep_decomposition(t: &TowerInvariants, r: &RankSequence) -> IdentityReport {
    const NAME: &str = "rep_decomposition";
    if r.r.len() != t.n as usize + 1 {
        return IdentityReport::from_checks(
            NAME,
            vec![Check::equal("length", q(r.r.len() as u64), q(t.n + 1))],
        );
    }
    let mut checks = vec![Check::equal("r_0", q(r.r[0]), q(t.lambda(0)))];
    for i in 1..=t.n {
        let predicted = q(t.lambda(0)) + q(t.chi_g(i)) - q(t.chi_g(i - 1));
        checks.push(Check::equal(format!("r_{i}"), q(r.r[i as usize]), predicted));
    }
    IdentityReport::from_checks(NAME, checks)
}

/// With `lambda_0 = 0`: `lambda_n = 0` iff `chi(G_n) = 0`, and every
/// `chi(G_i) >= 0`. Not applicable otherwise.
pub fn verify_vanishing_criterion(t: &TowerInvariants) -> IdentityReport {
    const NAME: &str = "vanishing_criterion";
    if t.lambda(0) != 0 {
        return IdentityReport::not_applicable(NAME);
    }
    let mut checks = vec![Check::new(
        "lambda_n = 0 iff chi_g_n = 0",
        q(t.lambda(t.n)),
        q(t.chi_g(t.n)),
        Relation::ZeroIff,
    )];
    for i in 1..=t.n {
        checks.push(Check::new(
            format!("chi_g_{i} nonnegative"),
            q(0),
            q(t.chi_g(i)),
            Relation::LessEq,
        ));
    }
    IdentityReport::from_checks(NAME, checks)
}

/// Every identity, in a fixed order: one Iwasawa step per layer, then the
/// tower-wide formulas.
pub fn verify_all(t: &TowerInvariants, r: &RankSequence) -> Vec<IdentityReport> {
    let mut out: Vec<IdentityReport> = (1..=t.n).map(|i| verify_iwasawa_step(t, i)).collect();
    out.push(verify_weighted_lambda_sum(t));
    out.push(verify_top_lambda_formula(t));
    out.push(verify_chi_layer_decomposition(t));
    out.push(verify_lambda_congruences(t));
    out.push(verify_subgroup_chi_formula(t));
    out.push(verify_rep_decomposition(t, r));
    out.push(verify_vanishing_criterion(t));
    out
}

/// Rationals as `"a"` or `"a/b"`.
pub mod rational_str {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        let parsed = match s.split_once('/') {
            None => s.trim().parse::<BigInt>().map(Rational::from_integer).ok(),
            Some((a, b)) => match (a.trim().parse::<BigInt>(), b.trim().parse::<BigInt>()) {
                (Ok(a), Ok(b)) if b.is_positive() => Some(Rational::new(a, b)),
                _ => None,
            },
        };
        parsed.ok_or_else(|| D::Error::custom(format!("{s:?} is not a rational number")))
    }
}
