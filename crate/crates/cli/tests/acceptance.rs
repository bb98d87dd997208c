//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run alone with `cargo test -p zpg-cli --test acceptance`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zpg_cli::campaign::{campaign_records, write_jsonl};
use zpg_cli::config::CampaignConfig;
use zpg_cli::oracle::{run_oracle, DEFAULT_RANK_CAP};
use zpg_cli::record::TrialRecord;
use zpg_cli::sampling::{sample_spec, SpecOptions};
use zpg_core::cohomology::{cyclotomic_chi_closed_form, dual_euler_char, tate_orders};
use zpg_core::invariants::prime_filtration;
use zpg_core::modules::{build_module, conjugate, cyclotomic_block, direct_sum, finite_block};
use zpg_core::towers::verify_subgroup_chi_formula;
use zpg_core::{BlockSpec, CyclicPGroup, GModule, IntMatrix, Rational};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn phi(p: u64, j: u32) -> u64 {
    if j == 0 {
        1
    } else {
        p.pow(j) - p.pow(j - 1)
    }
}

fn closed_form() -> Outcome {
    let mut cases = 0;
    for p in [2u64, 3, 5, 7] {
        for n in 0..=3u32 {
            let g = CyclicPGroup::new(p, n).unwrap();
            for j in 0..=n {
                let m = GModule::free(g, cyclotomic_block(p, j)).unwrap();
                for i in 0..=n {
                    let o = tate_orders(&m, i).map_err(|e| e.to_string())?;
                    // (v1, v2) read off the table: fixed and multiplied by p^(n-i), or
                    // fixed-point free with H^1 = O/(1 - zeta^(p^i))
                    let want = if j <= i {
                        (0, u64::from(n - i) * phi(p, j))
                    } else {
                        (p.pow(i), 0)
                    };
                    ensure((o.v1, o.v2) == want, || format!("p={p} n={n} i={i} j={j}: got {o:?}, want {want:?}"))?;
                    let chi = want.1 as i64 - want.0 as i64;
                    ensure(o.chi == chi && cyclotomic_chi_closed_form(p, n, i, j) == chi, || {
                        format!("p={p} n={n} i={i} j={j}: chi {} vs {chi}", o.chi)
                    })?;
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} (p, n, i, j) cases"))
}

const REQUIRED: [&str; 7] = [
    "weighted_lambda_sum",
    "top_lambda_formula",
    "chi_layer_decomposition",
    "lambda_congruences",
    "subgroup_chi_formula",
    "rep_decomposition",
    "vanishing_criterion",
];

fn campaign_identities(records: &[TrialRecord]) -> Outcome {
    let mut evaluated = 0usize;
    for r in records {
        ensure(r.error.is_none(), || format!("trial {} errored: {:?}", r.trial_index, r.error))?;
        let n = r.spec.n;
        for name in REQUIRED.iter().map(|s| s.to_string()).chain((1..=n).map(|i| format!("iwasawa_step[{i}]"))) {
            let rep = r.identities.iter().find(|x| x.name == name);
            let rep = rep.ok_or_else(|| format!("trial {} (p={}, n={n}) lacks {name}", r.trial_index, r.spec.p))?;
            ensure(rep.pass, || format!("trial {} (p={}, n={n}): {rep}", r.trial_index, r.spec.p))?;
            evaluated += 1;
        }
    }
    Ok(format!("{} trials, {evaluated} identity reports", records.len()))
}

fn structural(records: &[TrialRecord]) -> Outcome {
    for r in records {
        let ranks = r.rank_sequence.as_ref().ok_or("missing rank sequence")?;
        ensure(ranks.r == r.spec.multiplicities, || format!("trial {}: {:?} vs {:?}", r.trial_index, ranks.r, r.spec.multiplicities))?;
        let rep = r.identities.iter().find(|x| x.name == "rank_sequence_agreement").ok_or("missing agreement report")?;
        ensure(rep.pass && rep.checks.len() == 3 * r.spec.multiplicities.len(), || format!("trial {}: {rep}", r.trial_index))?;
    }
    Ok(format!("{} trials, three routes each", records.len()))
}

fn random_free_spec(rng: &mut ChaCha8Rng, max_rank: u64, min_n: u32) -> BlockSpec {
    let p = [2u64, 3, 5][rng.gen_range(0..3)];
    let n = rng.gen_range(min_n..=3);
    let opts = SpecOptions {
        max_rank,
        max_multiplicity: 4,
        conjugator_bound: 2,
        finite_blocks: false,
    };
    sample_spec(p, n, rng.gen(), &opts)
}

fn chi_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC41);
    for k in 0..200 {
        let a = random_free_spec(&mut rng, 12, 0);
        let b = BlockSpec {
            multiplicities: sample_spec(a.p, a.n, rng.gen(), &SpecOptions {
                max_rank: 12,
                max_multiplicity: 3,
                conjugator_bound: 2,
                finite_blocks: false,
            })
            .multiplicities,
            conjugator_seed: rng.gen(),
            ..a.clone()
        };
        let (ma, mb) = (build_module(&a).unwrap(), build_module(&b).unwrap());
        let sum = conjugate(&direct_sum(&ma, &mb).unwrap(), rng.gen(), 2);
        for i in 0..=a.n {
            let (x, y, s) = (tate_orders(&ma, i), tate_orders(&mb, i), tate_orders(&sum, i));
            let (x, y, s) = (x.unwrap().chi, y.unwrap().chi, s.unwrap().chi);
            ensure(s == x + y, || format!("pair {k}, i={i}: {s} != {x} + {y}"))?;
        }
    }
    for k in 0..200 {
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let n = rng.gen_range(0..=3);
        let g = CyclicPGroup::new(p, n).unwrap();
        let blocks = (0..rng.gen_range(1..=3))
            .map(|_| finite_block(g, rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen()))
            .collect();
        let m = GModule::new(g, IntMatrix::identity(0), blocks).unwrap();
        for i in 0..=n {
            let chi = tate_orders(&m, i).unwrap().chi;
            ensure(chi == 0, || format!("finite module {k}, i={i}: chi = {chi}"))?;
        }
    }
    for k in 0..200 {
        let spec = random_free_spec(&mut rng, 16, 1);
        let m = build_module(&spec).unwrap();
        let step = prime_filtration(&m).map_err(|e| e.to_string())?;
        let r_n = step.quotient_multiplicity() as i64;
        for i in 0..=spec.n {
            let whole = tate_orders(&m, i).unwrap().chi;
            let sub = tate_orders(&step.sub_module, i).unwrap().chi;
            let quotient = if spec.n <= i { 0 } else { -(spec.p.pow(i) as i64) };
            ensure(whole == sub + r_n * quotient, || format!("module {k}, i={i}: {whole} != {sub} + {r_n}*{quotient}"))?;
        }
    }
    Ok("200 sums, 200 finite modules, 200 filtrations".into())
}

fn duality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD0A1);
    let mut values = 0;
    for k in 0..100 {
        let spec = random_free_spec(&mut rng, 12, 1);
        let m = build_module(&spec).unwrap();
        for i in 0..=spec.n {
            let dual = dual_euler_char(&m, i, 64).map_err(|e| format!("module {k}: {e}"))?;
            let chi = tate_orders(&m, i).unwrap().chi;
            ensure(dual == -chi, || format!("module {k} ({spec:?}), i={i}: dual {dual}, chi {chi}"))?;
            values += 1;
        }
    }
    Ok(format!("100 modules, {values} subgroup values"))
}

fn worked_example() -> Outcome {
    let spec = BlockSpec {
        p: 2,
        n: 2,
        multiplicities: vec![1, 0, 1],
        finite_specs: vec![],
        conjugator_seed: 2024,
        conjugator_bound: 2,
    };
    let rep = run_oracle(&spec, DEFAULT_RANK_CAP).map_err(|e| e.to_string())?;
    ensure(rep.agree, || format!("oracle disagrees: {rep:?}"))?;
    let t = &rep.tower_oracle;
    ensure(t.lambda == [1, 1, 3], || format!("lambda {:?}", t.lambda))?;
    ensure(t.chi_quotient == [-1, -1], || format!("chi(G_i) {:?}", t.chi_quotient))?;
    ensure(t.chi_subgroup == [-1, 1], || format!("chi(N_i) {:?}", t.chi_subgroup))?;
    ensure(t.chi_layer == [-1, 1], || format!("layers {:?}", t.chi_layer))?;
    let sub = verify_subgroup_chi_formula(&rep.tower_main);
    let minus_one = Rational::from_integer((-1).into());
    ensure(sub.pass && sub.checks[0].lhs == minus_one && sub.checks[0].rhs == minus_one, || format!("{sub}"))?;
    Ok("oracle and pipeline agree on lambda, chi(G_i), chi(N_i), layers, subgroup formula".into())
}

type Row = (u32, &'static str, Outcome, f64);

fn timed(results: &mut Vec<Row>, id: u32, name: &'static str, f: impl FnOnce() -> Outcome) {
    let start = Instant::now();
    let out = f();
    results.push((id, name, out, start.elapsed().as_secs_f64()));
}

fn jsonl(records: &[TrialRecord]) -> Vec<u8> {
    let mut out = Vec::new();
    write_jsonl(records, &mut out).unwrap();
    out
}

fn main() {
    let config = CampaignConfig {
        seed: 20240611,
        primes: vec![2, 3, 5],
        exponents: vec![1, 2, 3],
        trials: 500,
        max_rank: 20,
        ..CampaignConfig::default()
    };
    let mut results: Vec<Row> = Vec::new();

    timed(&mut results, 1, "closed-form cohomology of cyclotomic blocks", closed_form);

    let start = Instant::now();
    let records = campaign_records(&CampaignConfig { threads: 1, ..config.clone() });
    let campaign_secs = start.elapsed().as_secs_f64();
    let records = records.map_err(|e| e.to_string());
    results.push((
        2,
        "campaign identities, 500 trials per (p, n)",
        records.as_ref().map_err(Clone::clone).and_then(|r| campaign_identities(r)),
        campaign_secs,
    ));
    timed(&mut results, 3, "rank sequence routes agree with the spec", || {
        records.as_ref().map_err(Clone::clone).and_then(|r| structural(r))
    });
    timed(&mut results, 4, "chi additivity, finite vanishing, filtration additivity", chi_properties);
    timed(&mut results, 5, "dual chi is minus chi", duality);
    timed(&mut results, 6, "worked example (p=2, n=2, r=(1,0,1)) via oracle", worked_example);
    timed(&mut results, 7, "byte-identical campaign output across thread counts", || {
        let first = jsonl(records.as_ref().map_err(Clone::clone)?);
        let again = campaign_records(&CampaignConfig { threads: 4, ..config.clone() }).map_err(|e| e.to_string())?;
        let second = jsonl(&again);
        ensure(first == second, || "JSONL differs between 1 and 4 threads".into())?;
        Ok(format!("{} bytes, threads 1 vs 4", first.len()))
    });

    let mut failed = 0;
    for (id, name, out, secs) in &results {
        match out {
            Ok(detail) => println!("criterion {id} PASS  {name}: {detail} [{secs:.1}s]"),
            Err(why) => {
                failed += 1;
                println!("criterion {id} FAIL  {name}: {why} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all {} acceptance criteria passed", results.len());
}
