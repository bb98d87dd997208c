use std::time::Instant;

use serde::{Deserialize, Serialize};
use zpg_core::cohomology::{dual_euler_char, tate_orders};
use zpg_core::invariants::{filtration_multiplicities, rank_sequence, rep_multiplicities, RankSequence};
use zpg_core::modules::build_module;
use zpg_core::towers::{analyze_tower, verify_all, Check, IdentityReport, TowerInvariants};
use zpg_core::{BlockSpec, GModule, Rational};

/// Free rank up to which each record also checks the dual sign.
pub const DUALITY_MAX_RANK: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    #[serde(with = "zpg_core::serde_util::dec")]
    pub trial_index: u64,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_dec")]
    pub trial_seed: Option<u64>,
    pub spec: BlockSpec,
    pub tower: Option<TowerInvariants>,
    pub rank_sequence: Option<RankSequence>,
    pub identities: Vec<IdentityReport>,
    pub error: Option<String>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_dec")]
    pub wall_time_us: Option<u64>,
}

mod opt_dec {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<u64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.collect_str(x),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<u64>, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "zpg_core::serde_util::dec")] u64);
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AnalyzeOptions {
    pub k_cap: u32,
    pub timings: bool,
}

fn q(x: impl Into<num_bigint::BigInt>) -> Rational {
    Rational::from_integer(x.into())
}

/// The three rank-sequence routes against the generating multiplicities.
fn structural_report(m: &GModule, spec: &BlockSpec) -> zpg_core::Result<IdentityReport> {
    let mut routes = vec![("fixed_ranks", rank_sequence(m)?), ("rep_multiplicities", rep_multiplicities(m)?)];
    if spec.n >= 1 {
        routes.push(("filtration", filtration_multiplicities(m)?));
    }
    let mut checks = Vec::new();
    for (name, r) in routes {
        if r.r.len() != spec.multiplicities.len() {
            checks.push(Check::equal(format!("{name} length"), q(r.r.len() as u64), q(spec.multiplicities.len() as u64)));
            continue;
        }
        for (t, (got, want)) in r.r.iter().zip(&spec.multiplicities).enumerate() {
            checks.push(Check::equal(format!("{name} r_{t}"), q(*got), q(*want)));
        }
    }
    Ok(IdentityReport::from_checks("rank_sequence_agreement", checks))
}

fn duality_report(m: &GModule, k_cap: u32) -> zpg_core::Result<IdentityReport> {
    let n = m.group().n();
    let mut checks = Vec::new();
    for i in 0..=n {
        let dual = dual_euler_char(m, i, k_cap)?;
        let chi = tate_orders(m, i)?.chi;
        checks.push(Check::equal(format!("chi(N_{i}, M*)"), q(dual), q(-chi)));
    }
    Ok(IdentityReport::from_checks("duality_sign", checks))
}

/// `chi` of the finite part vanishes and `chi` is additive across the
/// free/finite splitting.
fn finite_reports(m: &GModule) -> zpg_core::Result<Vec<IdentityReport>> {
    let n = m.group().n();
    let (free, finite) = (m.free_part(), m.finite_part());
    let mut vanish = Vec::new();
    let mut additive = Vec::new();
    for i in 0..=n {
        let f = tate_orders(&finite, i)?.chi;
        vanish.push(Check::equal(format!("chi(N_{i}, finite)"), q(f), q(0)));
        let whole = tate_orders(m, i)?.chi;
        let free_chi = tate_orders(&free, i)?.chi;
        additive.push(Check::equal(format!("chi(N_{i}, M)"), q(whole), q(free_chi + f)));
    }
    Ok(vec![
        IdentityReport::from_checks("finite_chi_vanishes", vanish),
        IdentityReport::from_checks("chi_additive_with_finite", additive),
    ])
}

struct Analysis {
    tower: TowerInvariants,
    ranks: RankSequence,
    identities: Vec<IdentityReport>,
}

fn analyze_module(spec: &BlockSpec, opts: &AnalyzeOptions) -> zpg_core::Result<Analysis> {
    let m = build_module(spec)?;
    let free = m.free_part();
    let tower = analyze_tower(&free)?;
    let ranks = rank_sequence(&free)?;
    let mut identities = verify_all(&tower, &ranks);
    identities.push(structural_report(&free, spec)?);
    if free.rank() <= DUALITY_MAX_RANK {
        identities.push(duality_report(&free, opts.k_cap)?);
    }
    if m.has_finite_blocks() {
        identities.extend(finite_reports(&m)?);
    }
    Ok(Analysis {
        tower,
        ranks,
        identities,
    })
}

/// Full analysis of one spec. Core errors land in `error`, never panics.
pub fn analyze_spec(spec: &BlockSpec, trial_index: u64, trial_seed: Option<u64>, opts: &AnalyzeOptions) -> TrialRecord {
    let start = Instant::now();
    let outcome = analyze_module(spec, opts);
    let wall_time_us = opts.timings.then(|| start.elapsed().as_micros() as u64);
    match outcome {
        Ok(a) => TrialRecord {
            trial_index,
            trial_seed,
            spec: spec.clone(),
            pass: a.identities.iter().all(|r| r.pass),
            tower: Some(a.tower),
            rank_sequence: Some(a.ranks),
            identities: a.identities,
            error: None,
            wall_time_us,
        },
        Err(e) => TrialRecord {
            trial_index,
            trial_seed,
            spec: spec.clone(),
            tower: None,
            rank_sequence: None,
            identities: Vec::new(),
            error: Some(e.to_string()),
            pass: false,
            wall_time_us,
        },
    }
}
