use num_bigint::BigUint;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rfgrowth_core::growth::GrowthFunction;
use rfgrowth_core::neumann::{
    conjugation_witness, detection_matrix, growth_certificate, is_diagonal_pattern, project,
    sweep_small_words, validate_certificate, witness_word, StGen, StWord,
};
use rfgrowth_core::perm::{cycle_alpha, three_cycle_beta, Perm};
use rfgrowth_core::sequences::{build, SequenceTable};

fn identity_table(levels: usize) -> SequenceTable {
    build(&GrowthFunction::identity(), levels).unwrap()
}

/// Dense evaluation of an `s, t` word in factor `k`, one letter at a time.
fn dense_project(w: &StWord, k: usize, table: &SequenceTable) -> Perm {
    let d = table.d(k).to_usize().unwrap();
    let q = table.q(k).to_i64().unwrap();
    let s = cycle_alpha(d).unwrap().pow(q);
    let t = three_cycle_beta(d).unwrap();
    let (si, ti) = (s.inverse(), t.inverse());
    let mut acc = Perm::identity(d);
    for run in w.runs() {
        let positive = run.exp > 0.into();
        let letter = match (run.gen, positive) {
            (StGen::S, true) => &s,
            (StGen::S, false) => &si,
            (StGen::T, true) => &t,
            (StGen::T, false) => &ti,
        };
        for _ in 0..run.exp.magnitude().to_u64().unwrap() {
            acc = acc.compose(letter).unwrap();
        }
    }
    acc
}

fn arb_word() -> impl Strategy<Value = StWord> {
    prop::collection::vec((any::<bool>(), -5i64..=5), 0..12).prop_map(|runs| {
        let mut w = StWord::new();
        for (is_s, e) in runs {
            w.push_small(if is_s { StGen::S } else { StGen::T }, e);
        }
        w
    })
}

proptest! {
    #[test]
    fn projection_matches_dense(w in arb_word(), k in 1usize..=2) {
        let t = identity_table(2);
        prop_assert_eq!(project(&w, k, &t).unwrap().to_dense().unwrap(), dense_project(&w, k, &t));
    }

    #[test]
    fn projection_is_a_homomorphism(u in arb_word(), v in arb_word(), k in 1usize..=3) {
        let t = identity_table(3);
        let uv = project(&u.concat(&v), k, &t).unwrap();
        let split = project(&u, k, &t).unwrap().compose(&project(&v, k, &t).unwrap()).unwrap();
        prop_assert_eq!(&uv, &split);
        let inv = project(&u.inverse(), k, &t).unwrap();
        prop_assert_eq!(inv, project(&u, k, &t).unwrap().inverse());
    }

    #[test]
    fn word_text_round_trip(w in arb_word()) {
        prop_assert_eq!(w.to_string().parse::<StWord>().unwrap(), w);
    }
}

#[test]
fn diagonal_detection_for_three_growth_functions() {
    for (f, levels) in [
        (GrowthFunction::identity(), 3),
        (GrowthFunction::polynomial(2), 3),
        (GrowthFunction::exponential(2), 2),
    ] {
        let t = build(&f, levels).unwrap();
        let m = detection_matrix(&t).unwrap();
        assert!(is_diagonal_pattern(&m), "{f}: {m:?}");
    }
}

#[test]
fn witness_is_nontrivial_only_at_its_level_dense() {
    let t = identity_table(2);
    for j in 1..=2 {
        let w = witness_word(j, &t).unwrap();
        for k in 1..=2 {
            assert_eq!(
                dense_project(&w, k, &t).is_identity(),
                j != k,
                "j={j} k={k}"
            );
        }
    }
}

#[test]
fn conjugation_witness_round_trips() {
    let t = identity_table(1);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let mut v: Vec<u32> = (0..33).collect();
        v.shuffle(&mut rng);
        let mut g = Perm::from_images(v.clone()).unwrap();
        if !g.is_even() {
            v.swap(0, 1);
            g = Perm::from_images(v).unwrap();
        }
        let w = conjugation_witness(&g, 1, &t).unwrap();
        assert!(w.len() <= BigUint::from(12u32 * 33 * 33));
        assert_eq!(project(&w, 1, &t).unwrap().to_dense().unwrap(), g);
    }
    let odd = Perm::from_cycles(33, &[vec![1, 2]]).unwrap();
    assert!(conjugation_witness(&odd, 1, &t).is_err());
}

#[test]
fn certificate_levels() {
    let f = GrowthFunction::identity();
    let t = identity_table(3);
    for (n, k) in [(8u64, 1usize), (15, 1), (16, 2), (279, 2), (280, 3)] {
        let c = growth_certificate(n, &f, &t).unwrap();
        assert_eq!(c.k, k, "n={n}");
        assert!(c.clause_iv.pass);
        assert!(c.witness_length <= n);
        assert_eq!(validate_certificate(&c, &f, &t), Ok(()));
    }
}

#[test]
fn tampered_certificates_fail() {
    let f = GrowthFunction::identity();
    let t = identity_table(3);
    let good = growth_certificate(280, &f, &t).unwrap();
    let edits: Vec<Box<dyn Fn(&mut rfgrowth_core::neumann::GrowthCertificate)>> = vec![
        Box::new(|c| c.k = 2),
        Box::new(|c| c.witness = "s^68 t s^-68 t s^68 T s^-68 T".into()),
        Box::new(|c| c.witness_length += 1),
        Box::new(|c| c.detection_row[0] = false),
        Box::new(|c| c.clause_iv.bound = c.clause_iv.d_k.clone()),
        Box::new(|c| c.clause_iv.d_k = "5".into()),
        Box::new(|c| c.clause_iv.pass = false),
        Box::new(|c| c.n = 16),
    ];
    for (i, edit) in edits.iter().enumerate() {
        let mut c = good.clone();
        edit(&mut c);
        assert!(
            validate_certificate(&c, &f, &t).is_err(),
            "edit {i} slipped through"
        );
    }
}

#[test]
fn certificate_json_round_trip() {
    let f = GrowthFunction::identity();
    let t = identity_table(3);
    let c = growth_certificate(100, &f, &t).unwrap();
    let text = serde_json::to_string(&c).unwrap();
    let back: rfgrowth_core::neumann::GrowthCertificate = serde_json::from_str(&text).unwrap();
    assert_eq!(back, c);
}

#[test]
fn small_sweep_has_no_hidden_detections() {
    let t = identity_table(3);
    let r = sweep_small_words(&t, 2, 6).unwrap();
    assert_eq!(r.words_checked, 2 * (3u64.pow(6) - 1));
    assert!(r.counterexamples.is_empty());
    // every word missed by levels 1 and 2 is trivial there by dense evaluation
    for text in &r.trivial_in_truncation {
        let w: StWord = text.parse().unwrap();
        for k in 1..=2 {
            assert!(dense_project(&w, k, &t).is_identity(), "{text} at {k}");
        }
    }
}
