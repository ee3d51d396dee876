mod common;

use common::*;
use proptest::prelude::*;
use qkdforge::codes::{named, CosetQuotient, DecodeStatus, LinearCode, SyndromeTable};
use qkdforge::gf2::{BitMatrix, BitVector};
use qkdforge::Error;
use rand::SeedableRng;

fn arb_code(max_n: usize) -> impl Strategy<Value = LinearCode> {
    (2..=max_n, any::<u64>()).prop_map(|(n, seed)| {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let k = 1 + (seed as usize % (n - 1));
        LinearCode::from_generator(random_generator(&mut rng, n, k)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn check_matrix_annihilates_generator(code in arb_code(12)) {
        prop_assert!(code.check().mul(&code.generator().transpose()).unwrap().is_zero());
        prop_assert_eq!(code.k() + code.check().n_rows(), code.n());
    }

    #[test]
    fn singleton_bound_and_min_weight(code in arb_code(10)) {
        let caps = code.capacities().unwrap();
        prop_assert!(caps.d <= code.n() - code.k() + 1);
        prop_assert_eq!(caps.d, min_weight(&span(&rows_of(code.generator()))));
        prop_assert_eq!(caps.u, caps.d - 1);
        prop_assert_eq!(caps.t, (caps.d - 1) / 2);
    }

    #[test]
    fn dual_matches_brute_force(code in arb_code(10)) {
        let dual = code.dual();
        let mut got: Vec<Word> = dual.codewords().unwrap().iter().map(from_bv).collect();
        got.sort();
        prop_assert_eq!(got, dual_of(&span(&rows_of(code.generator()))));
        prop_assert_eq!(dual.dual(), code);
    }

    #[test]
    fn decode_inverts_correctable_errors(code in arb_code(10)) {
        let t = code.capacities().unwrap().t;
        let table = SyndromeTable::build(&code, t).unwrap();
        for w in code.codewords().unwrap() {
            for (e, _) in table.entries() {
                let d = table.decode(&code, &w.add(e).unwrap()).unwrap();
                prop_assert_eq!(d.status, DecodeStatus::Ok);
                prop_assert_eq!(&d.codeword, &w);
            }
        }
    }

    #[test]
    fn table_sizes(code in arb_code(10)) {
        let t = code.capacities().unwrap().t;
        let table = SyndromeTable::build(&code, t).unwrap();
        let want: usize = (0..=t).map(|w| binomial(code.n(), w)).sum();
        prop_assert_eq!(table.len(), want);
    }

    #[test]
    fn coset_keys_are_a_bijection(n in 4usize..9, seed in any::<u64>()) {
        // C2 random inside a random C1
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let k1 = 2 + (seed as usize % (n - 2));
        let c1 = LinearCode::from_generator(random_generator(&mut rng, n, k1)).unwrap();
        let k2 = 1 + (seed as usize / 7) % (k1 - 1);
        let g2 = BitMatrix::from_rows(c1.generator().rows()[..k2].to_vec()).unwrap();
        let c2 = LinearCode::from_generator(g2).unwrap();
        let q = CosetQuotient::new(&c1, &c2).unwrap();
        prop_assert_eq!(q.key_len(), k1 - k2);
        let mut seen = std::collections::HashMap::new();
        for w in c1.codewords().unwrap() {
            let key = q.key_from_coset(&w).unwrap();
            let coset = c2.coset(&w).unwrap();
            let prev = seen.entry(key.clone()).or_insert_with(|| coset.clone());
            prop_assert_eq!(&*prev, &coset);
        }
        prop_assert_eq!(seen.len(), 1 << (k1 - k2));
        for (key, rep) in q.representatives().unwrap() {
            prop_assert_eq!(q.key_from_coset(&rep).unwrap(), key);
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn parity_single_error_table_collides() {
    let err = SyndromeTable::build(&named::parity4(), 1).unwrap_err();
    assert!(matches!(err, Error::SyndromeCollision { .. }));
}

#[test]
fn repetition_table() {
    let t = SyndromeTable::build(&named::rep3(), 1).unwrap();
    let got: Vec<(String, String)> = t
        .entries()
        .iter()
        .map(|(e, s)| (e.to_string(), s.to_string()))
        .collect();
    let want = [("000", "00"), ("100", "10"), ("010", "11"), ("001", "01")];
    assert_eq!(got, want.map(|(a, b)| (a.to_string(), b.to_string())));
}

#[test]
fn char_sum_examples() {
    let p = named::parity4();
    assert_eq!(p.char_sum(&bv("1111")).unwrap(), 8);
    assert_eq!(p.char_sum(&bv("0000")).unwrap(), 8);
    assert_eq!(p.char_sum(&bv("0001")).unwrap(), 0);
}

#[test]
fn enumeration_guard() {
    let g = BitMatrix::identity(25).transpose();
    let g = BitMatrix::from_rows(
        g.rows().iter().map(|r| r.concat(&bv("1"))).collect(),
    )
    .unwrap();
    let code = LinearCode::from_generator(g).unwrap();
    assert!(matches!(code.codewords(), Err(Error::EnumerationTooLarge { k: 25, .. })));
}

#[test]
fn named_lookup() {
    for name in named::NAMES {
        assert!(named::by_name(name).is_ok());
    }
    assert!(matches!(named::by_name("golay"), Err(Error::UnknownCode(_))));
}

#[test]
fn hamming_quotient_splits_on_dual() {
    let h = named::hamming74();
    let q = CosetQuotient::new(&h, &h.dual()).unwrap();
    assert_eq!(q.key_len(), 1);
    for w in h.codewords().unwrap() {
        let in_dual = h.dual().contains(&w).unwrap();
        assert_eq!(q.key_from_coset(&w).unwrap(), BitVector::from_bools(&[!in_dual]));
    }
}
