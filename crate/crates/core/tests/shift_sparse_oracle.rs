use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rfgrowth_core::perm::{cycle_alpha, three_cycle_beta, Perm};
use rfgrowth_core::shift_sparse::ShiftSparsePerm;

/// Random words of length <= 30 in the shift and the 3-cycle, evaluated in
/// both representations.
fn sparse_vs_dense(d: usize, q: i64, rng: &mut ChaCha8Rng) -> bool {
    let modulus = BigUint::from(d);
    let s = ShiftSparsePerm::from_shift(&modulus, &BigInt::from(q)).unwrap();
    let t = ShiftSparsePerm::beta(&modulus).unwrap();
    let ds = cycle_alpha(d).unwrap().pow(q);
    let dt = three_cycle_beta(d).unwrap();
    let sparse_letters = [s.clone(), s.inverse(), t.clone(), t.inverse()];
    let dense_letters = [ds.clone(), ds.inverse(), dt.clone(), dt.inverse()];
    let len = rng.gen_range(0..=30);
    let mut sparse = ShiftSparsePerm::identity(&modulus).unwrap();
    let mut dense = Perm::identity(d);
    for _ in 0..len {
        let i = rng.gen_range(0..4);
        sparse = sparse.compose(&sparse_letters[i]).unwrap();
        dense = dense.compose(&dense_letters[i]).unwrap();
    }
    sparse.to_dense().unwrap() == dense
}

#[test]
fn thousand_words_agree_with_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut mismatches = 0;
    let mut cases = 0;
    for (d, q) in [(33usize, 31i64), (101, 7), (997, 500)] {
        for _ in 0..400 {
            cases += 1;
            if !sparse_vs_dense(d, q, &mut rng) {
                mismatches += 1;
            }
        }
    }
    assert!(cases >= 1000);
    assert_eq!(mismatches, 0);
}

fn arb_sparse(modulus: BigUint) -> impl Strategy<Value = ShiftSparsePerm> {
    let m = modulus.clone();
    (any::<u64>(), prop::collection::vec(any::<u64>(), 0..6)).prop_map(move |(shift, pts)| {
        let shift_part = ShiftSparsePerm::from_shift(&m, &BigInt::from(shift)).unwrap();
        let mut cycle: Vec<BigUint> = Vec::new();
        for p in pts {
            let x = BigUint::from(p) % &m + 1u32;
            if !cycle.contains(&x) {
                cycle.push(x);
            }
        }
        let cycles = if cycle.len() >= 2 {
            vec![cycle]
        } else {
            vec![]
        };
        let sparse = ShiftSparsePerm::from_sparse(&m, &cycles).unwrap();
        shift_part.compose(&sparse).unwrap()
    })
}

fn huge_modulus() -> BigUint {
    // an odd modulus far beyond any dense representation
    (BigUint::from(1u32) << 200u32) + 7u32
}

proptest! {
    #[test]
    fn compose_is_pointwise(
        a in arb_sparse(huge_modulus()),
        b in arb_sparse(huge_modulus()),
        x in any::<u128>(),
    ) {
        let x = BigUint::from(x) % huge_modulus() + 1u32;
        let c = a.compose(&b).unwrap();
        prop_assert_eq!(c.apply(&x).unwrap(), a.apply(&b.apply(&x).unwrap()).unwrap());
    }

    #[test]
    fn compose_is_associative(
        a in arb_sparse(huge_modulus()),
        b in arb_sparse(huge_modulus()),
        c in arb_sparse(huge_modulus()),
    ) {
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverse_laws(a in arb_sparse(huge_modulus())) {
        prop_assert!(a.compose(&a.inverse()).unwrap().is_identity());
        prop_assert!(a.inverse().compose(&a).unwrap().is_identity());
        prop_assert_eq!(a.inverse().inverse(), a);
    }

    #[test]
    fn text_round_trip(a in arb_sparse(huge_modulus())) {
        prop_assert_eq!(a.to_string().parse::<ShiftSparsePerm>().unwrap(), a);
    }

    #[test]
    fn dense_agreement_small_modulus(a in arb_sparse(BigUint::from(33u32)), b in arb_sparse(BigUint::from(33u32))) {
        let c = a.compose(&b).unwrap().to_dense().unwrap();
        prop_assert_eq!(c, a.to_dense().unwrap().compose(&b.to_dense().unwrap()).unwrap());
    }
}
