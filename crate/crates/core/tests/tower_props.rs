mod common;

use common::block_spec;
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use zpg_core::invariants::rank_sequence;
use zpg_core::modules::{build_module, direct_sum, phi_prime_power};
use zpg_core::towers::{analyze_tower, verify_all, verify_chi_layer_decomposition, verify_iwasawa_step};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn every_identity_holds(spec in block_spec(20)) {
        let m = build_module(&spec).unwrap();
        let t = analyze_tower(&m).unwrap();
        let r = rank_sequence(&m).unwrap();
        for rep in verify_all(&t, &r) {
            prop_assert!(rep.pass, "{}", rep);
        }
    }

    #[test]
    fn doubling_doubles_everything(spec in block_spec(10)) {
        let m = build_module(&spec).unwrap();
        let t = analyze_tower(&m).unwrap();
        let mm = direct_sum(&m, &m).unwrap();
        let tt = analyze_tower(&mm).unwrap();
        let twice = |v: &[i64]| v.iter().map(|x| 2 * x).collect::<Vec<_>>();
        prop_assert_eq!(tt.lambda, t.lambda.iter().map(|x| 2 * x).collect::<Vec<_>>());
        prop_assert_eq!(tt.chi_quotient, twice(&t.chi_quotient));
        prop_assert_eq!(tt.chi_subgroup, twice(&t.chi_subgroup));
        prop_assert_eq!(&tt.chi_layer, &twice(&t.chi_layer));
        let tt = analyze_tower(&mm).unwrap();
        for rep in verify_all(&tt, &rank_sequence(&mm).unwrap()) {
            prop_assert!(rep.pass, "{}", rep);
        }
    }

    /// Summing `p^(n-i) (lambda_i - p lambda_(i-1))` over the layers and
    /// applying the top-level formula reproduces the layer decomposition.
    #[test]
    fn layers_telescope(spec in block_spec(16).prop_filter("n >= 1", |s| s.n >= 1)) {
        let t = analyze_tower(&build_module(&spec).unwrap()).unwrap();
        let (p, n) = (t.p as i64, t.n);
        let mut weighted_layers = 0i64;
        for i in 1..=n {
            prop_assert!(verify_iwasawa_step(&t, i).pass);
            let step = t.lambda(i) as i64 - p * t.lambda(i - 1) as i64;
            prop_assert_eq!(step % (p - 1), 0);
            weighted_layers += p.pow(n - i) * (step / (p - 1));
        }
        let direct: i64 = (1..=n).map(|i| p.pow(n - i) * t.chi_layer(i)).sum();
        prop_assert_eq!(weighted_layers, direct);
        let rep = verify_chi_layer_decomposition(&t);
        prop_assert!(rep.pass);
        let quotients: i64 = (1..n).map(|i| phi_prime_power(t.p, i) as i64 * t.chi_g(i)).sum();
        let gap = &rep.checks[0].lhs - zpg_core::Rational::from_integer(BigInt::from(quotients + weighted_layers));
        prop_assert!(gap.is_zero());
    }
}
