use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rfgrowth_core::perm::{
    commutator, cycle_alpha, factor_in_alt, three_cycle_beta, Gen, GenWord, Parity, Perm, PermError,
};

fn arb_perm(degree: usize) -> impl Strategy<Value = Perm> {
    Just((0..degree as u32).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Perm::from_images(v).unwrap())
}

fn arb_pair() -> impl Strategy<Value = (Perm, Perm)> {
    (1usize..40).prop_flat_map(|n| (arb_perm(n), arb_perm(n)))
}

fn random_even(n: usize, rng: &mut ChaCha8Rng) -> Perm {
    let mut v: Vec<u32> = (0..n as u32).collect();
    v.shuffle(rng);
    let p = Perm::from_images(v.clone()).unwrap();
    if p.is_even() {
        return p;
    }
    v.swap(0, 1);
    Perm::from_images(v).unwrap()
}

/// Evaluates one letter at a time with dense compositions.
fn evaluate_letterwise(w: &GenWord, n: usize, q: u64) -> Perm {
    let a = cycle_alpha(n).unwrap().pow(q as i64);
    let b = three_cycle_beta(n).unwrap();
    let (ai, bi) = (a.inverse(), b.inverse());
    let mut acc = Perm::identity(n);
    for run in w.runs() {
        let letter = match (run.gen, run.exp > 0) {
            (Gen::A, true) => &a,
            (Gen::A, false) => &ai,
            (Gen::B, true) => &b,
            (Gen::B, false) => &bi,
        };
        for _ in 0..run.exp.unsigned_abs() {
            acc = acc.compose(letter).unwrap();
        }
    }
    acc
}

proptest! {
    #[test]
    fn compose_is_pointwise((p1, p2) in arb_pair()) {
        let c = p1.compose(&p2).unwrap();
        for x in 1..=p1.degree() {
            prop_assert_eq!(c.apply(x).unwrap(), p1.apply(p2.apply(x).unwrap()).unwrap());
        }
    }

    #[test]
    fn inverse_laws((p, _) in arb_pair()) {
        prop_assert!(p.compose(&p.inverse()).unwrap().is_identity());
        prop_assert_eq!(p.inverse().inverse(), p);
    }

    #[test]
    fn parity_is_a_homomorphism((p1, p2) in arb_pair()) {
        let c = p1.compose(&p2).unwrap();
        prop_assert_eq!(c.parity(), p1.parity().combine(p2.parity()));
    }

    #[test]
    fn cycle_text_round_trip((p, _) in arb_pair()) {
        let text = p.to_string();
        prop_assert_eq!(Perm::parse_cycles(&text, p.degree()).unwrap(), p);
    }

    #[test]
    fn pow_matches_repeated_compose((p, _) in arb_pair(), e in -6i64..6) {
        let mut expect = Perm::identity(p.degree());
        let step = if e >= 0 { p.clone() } else { p.inverse() };
        for _ in 0..e.unsigned_abs() {
            expect = expect.compose(&step).unwrap();
        }
        prop_assert_eq!(p.pow(e), expect);
    }

    #[test]
    fn gen_word_fast_evaluation_matches_letterwise(
        n in (2usize..20).prop_map(|h| 2 * h + 1),
        q in 1u64..200,
        letters in prop::collection::vec((any::<bool>(), -4i64..=4), 0..40),
    ) {
        let mut w = GenWord::new();
        for (is_a, e) in letters {
            w.push(if is_a { Gen::A } else { Gen::B }, e);
        }
        prop_assert_eq!(w.evaluate(n, q).unwrap(), evaluate_letterwise(&w, n, q));
    }

    #[test]
    fn factor_round_trip(seed in any::<u64>(), half in 2usize..30) {
        let n = 2 * half + 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = loop {
            let q = rng.gen_range(1..n as u64);
            if num_integer::gcd(q, n as u64) == 1 {
                break q;
            }
        };
        let target = random_even(n, &mut rng);
        let w = factor_in_alt(&target, q).unwrap();
        prop_assert_eq!(evaluate_letterwise(&w, n, q), target);
        prop_assert!(w.len() <= 12 * (n * n) as u64);
    }
}

#[test]
fn conjugated_beta_is_shifted_window() {
    for n in [5usize, 7, 33] {
        let a = cycle_alpha(n).unwrap();
        let b = three_cycle_beta(n).unwrap();
        for m in 0..n {
            let c = a
                .pow(m as i64)
                .compose(&b)
                .unwrap()
                .compose(&a.pow(-(m as i64)))
                .unwrap();
            let pts: Vec<usize> = (1..=3).map(|i| (m + i - 1) % n + 1).collect();
            assert_eq!(c, Perm::from_cycles(n, &[pts]).unwrap(), "n={n} m={m}");
        }
    }
}

#[test]
fn commutator_vanishing_criterion_exhaustive() {
    for n in (5..=101).step_by(2) {
        let a = cycle_alpha(n).unwrap();
        let b = three_cycle_beta(n).unwrap();
        for m in 0..n {
            let conj = a
                .pow(m as i64)
                .compose(&b)
                .unwrap()
                .compose(&a.pow(-(m as i64)))
                .unwrap();
            let trivial = commutator(&conj, &b).unwrap().is_identity();
            let expected = ![1, 2, n - 1, n - 2].contains(&m);
            assert_eq!(trivial, expected, "n={n} m={m}");
        }
    }
}

#[test]
fn factor_examples() {
    let beta = three_cycle_beta(5).unwrap();
    assert_eq!(factor_in_alt(&beta, 1).unwrap().to_string(), "B");
    let t = Perm::from_cycles(5, &[vec![2, 3, 4]]).unwrap();
    let w = factor_in_alt(&t, 1).unwrap();
    assert_eq!(evaluate_letterwise(&w, 5, 1), t);
}

#[test]
fn factor_hundred_random_degree_33() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..100 {
        let r = random_even(33, &mut rng);
        let w = factor_in_alt(&r, 31).unwrap();
        assert_eq!(evaluate_letterwise(&w, 33, 31), r);
        assert!(w.len() <= 12 * 33 * 33);
    }
}

#[test]
fn factor_errors() {
    let odd = Perm::from_cycles(5, &[vec![1, 2]]).unwrap();
    assert_eq!(factor_in_alt(&odd, 1), Err(PermError::OddPermutation));
    let even = three_cycle_beta(15).unwrap();
    assert!(matches!(
        factor_in_alt(&even, 5),
        Err(PermError::NotCoprime { .. })
    ));
    assert!(factor_in_alt(&three_cycle_beta(6).unwrap(), 1).is_err());
    assert!(matches!(
        factor_in_alt(&Perm::identity(10_001), 1),
        Err(PermError::DegreeTooLarge { .. })
    ));
}

#[test]
fn orders_and_parity() {
    let p = Perm::parse_cycles("(1,2,3)(4,5)", 6).unwrap();
    assert_eq!(p.order(), 6u32.into());
    assert_eq!(p.parity(), Parity::Odd);
    assert_eq!(Perm::identity(4).to_string(), "()");
}
