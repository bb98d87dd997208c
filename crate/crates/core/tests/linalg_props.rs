mod common;

use common::{int_matrix, square_matrix};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use zpg_core::linalg::{
    elementary_divisors, kernel_basis, saturate, snf, sublattice_index, sublattice_index_valuation,
    unimodular_random,
};
use zpg_core::IntMatrix;

fn nonsingular(d: usize, entry: i64) -> impl Strategy<Value = IntMatrix> {
    square_matrix(d, entry).prop_filter("singular", |m| !m.determinant().unwrap().is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn smith_reconstructs(m in int_matrix(6, 6, 9)) {
        let dec = snf(&m);
        prop_assert_eq!(&(&(&dec.u * &m) * &dec.v), &dec.s);
        prop_assert!(dec.u.determinant().unwrap().abs().is_one());
        prop_assert!(dec.v.determinant().unwrap().abs().is_one());
        for i in 0..dec.s.rows() {
            for j in 0..dec.s.cols() {
                let expect = if i == j && i < dec.rank() { dec.divisors[i].clone() } else { BigInt::zero() };
                prop_assert_eq!(dec.s.get(i, j), &expect);
            }
        }
        for w in dec.divisors.windows(2) {
            prop_assert!(w[0].is_positive());
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
        prop_assert_eq!(dec.rank(), m.rank());
    }

    #[test]
    fn kernel_is_annihilated_and_saturated(m in int_matrix(5, 7, 4)) {
        let k = kernel_basis(&m);
        prop_assert_eq!(k.cols(), m.cols() - m.rank());
        prop_assert!((&m * &k).is_zero());
        prop_assert_eq!(saturate(&k, m.cols()).unwrap(), k);
    }

    #[test]
    fn index_is_multiplicative_along_chains(
        (c, m1, m2) in (1usize..=5).prop_flat_map(|d| (nonsingular(d, 5), nonsingular(d, 3), nonsingular(d, 3))),
        p in prop::sample::select(vec![2u64, 3, 5, 7]),
    ) {
        let b = &c * &m1;
        let a = &b * &m2;
        let ac = sublattice_index(&a, &c).unwrap();
        let ab = sublattice_index(&a, &b).unwrap();
        let bc = sublattice_index(&b, &c).unwrap();
        prop_assert_eq!(&ac, &(&ab * &bc));
        prop_assert_eq!(bc, m1.determinant().unwrap().abs());
        prop_assert_eq!(
            sublattice_index_valuation(&a, &c, p).unwrap(),
            sublattice_index_valuation(&a, &b, p).unwrap() + sublattice_index_valuation(&b, &c, p).unwrap()
        );
    }

    #[test]
    fn divisors_survive_unimodular_conjugation(m in square_matrix(5, 6), seed in any::<u64>(), bound in 1u64..4) {
        let u = unimodular_random(5, seed, bound);
        let base = elementary_divisors(&m);
        prop_assert_eq!(&elementary_divisors(&(&m * &u)), &base);
        prop_assert_eq!(&elementary_divisors(&(&u * &m)), &base);
    }

    #[test]
    fn unimodular_is_unimodular(d in 0usize..10, seed in any::<u64>(), bound in 0u64..5) {
        let u = unimodular_random(d, seed, bound);
        if d > 0 {
            prop_assert!(u.determinant().unwrap().abs().is_one());
        }
        prop_assert_eq!(u, unimodular_random(d, seed, bound));
    }
}
