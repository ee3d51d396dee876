mod common;

use common::*;
use qkdforge::codes::named;
use qkdforge::css::CssCode;
use qkdforge::distill::{epr_pairs, run_distillation, run_distillation_with, EprSession, ShiftOffsets};
use qkdforge::gf2::BitVector;
use qkdforge::parallel::{self, derive_seed};
use qkdforge::qsim::{rng_from_seed, Gate, StateVector};
use qkdforge::Error;
use rand::Rng;

fn hamming_css() -> CssCode {
    let h = named::hamming74();
    CssCode::new(h.clone(), h.dual(), 1).unwrap()
}

fn parity_css() -> CssCode {
    let p = named::parity4();
    CssCode::new(p.clone(), p.dual(), 0).unwrap()
}

#[test]
fn two_pairs_in_block_layout() {
    let s = epr_pairs(2).unwrap();
    for (i, a) in s.amplitudes().iter().enumerate() {
        let ket = BitVector::from_index(i, 4).to_string();
        let want = if ["0000", "0101", "1010", "1111"].contains(&ket.as_str()) { 0.5 } else { 0.0 };
        assert!((a.re - want).abs() < 1e-12 && a.im.abs() < 1e-12, "{ket}");
    }
}

#[test]
fn single_pair_outcomes_agree() {
    for seed in 0..50 {
        let bits = epr_pairs(1).unwrap().measure_all_z(&mut rng_from_seed(seed));
        assert_eq!(bits.get(0), bits.get(1));
    }
}

#[test]
fn injected_errors_give_other_bell_states() {
    let r = num_complex::Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let bell = |a: &str, b: &str, sign: f64| {
        StateVector::superposition(&[(bv(a), r), (bv(b), r * sign)]).unwrap()
    };
    let mut flipped = epr_pairs(1).unwrap();
    flipped.apply_gate(Gate::X, 2).unwrap();
    assert!(flipped.same_ray(&bell("01", "10", 1.0)).unwrap());

    let mut both = epr_pairs(1).unwrap();
    both.apply_gate(Gate::Z, 2).unwrap();
    both.apply_gate(Gate::X, 2).unwrap();
    assert!(both.same_ray(&bell("01", "10", -1.0)).unwrap());
}

#[test]
fn session_injection_checks_lengths() {
    let mut s = EprSession::new(parity_css()).unwrap();
    let before = s.joint().clone();
    s.inject_bob_errors(&BitVector::zeros(4), &BitVector::zeros(4)).unwrap();
    assert_eq!(s.joint(), &before);
    assert!(matches!(
        s.inject_bob_errors(&BitVector::zeros(3), &BitVector::zeros(4)),
        Err(Error::LengthMismatch { .. })
    ));
}

#[test]
fn parity_code_strings_share_a_coset() {
    let code = parity_css();
    for seed in 0..40 {
        let mut s = EprSession::new(code.clone()).unwrap();
        let r = run_distillation(&mut s, &mut rng_from_seed(seed)).unwrap();
        assert!(r.keys_match);
        assert_eq!(r.alice_key.len(), 2);
        assert!(r.e1_hat.is_zero() && r.e2_hat.is_zero());
        let diff = r.alice_string.add(&r.bob_string).unwrap();
        assert!(code.c2().contains(&diff).unwrap(), "strings differ by {diff}");
    }
}

#[test]
fn alice_syndromes_are_uniform() {
    let code = hamming_css();
    let runs = 1200;
    let seeds: Vec<u64> = (0..runs).map(|i| derive_seed(77, i)).collect();
    let outcomes = parallel::map(&seeds, |&seed| {
        let mut s = EprSession::new(code.clone()).unwrap();
        s.alice_measure(&ShiftOffsets::default(), &mut rng_from_seed(seed))
            .unwrap()
            .sx
            .to_index()
    });
    let mut counts = [0usize; 8];
    for o in outcomes {
        counts[o] += 1;
    }
    for (s, &c) in counts.iter().enumerate() {
        assert!(within_sigmas(c as f64 / runs as f64, 1.0 / 8.0, runs as usize, 3.0), "sx={s}: {c}");
    }
}

#[test]
fn any_valid_shift_choice_agrees() {
    let code = hamming_css();
    let c1 = code.c1().codewords().unwrap();
    let c2d = code.c2_dual().codewords().unwrap();
    let mut rng = rng_from_seed(5);
    for trial in 0..24 {
        let offsets = ShiftOffsets {
            x: Some(c1[rng.gen_range(0..c1.len())].clone()),
            z: Some(c2d[rng.gen_range(0..c2d.len())].clone()),
        };
        let mut s = EprSession::new(code.clone()).unwrap();
        let e1 = BitVector::unit(7, trial % 7);
        let e2 = BitVector::unit(7, (trial * 3) % 7);
        s.inject_bob_errors(&e1, &e2).unwrap();
        let r = run_distillation_with(&mut s, &offsets, &mut rng).unwrap();
        assert!(r.keys_match, "offsets {offsets:?}");
    }
}

#[test]
fn offsets_must_stay_in_their_cosets() {
    let mut s = EprSession::new(hamming_css()).unwrap();
    let bad = ShiftOffsets {
        x: Some(bv("1000000")),
        z: None,
    };
    assert!(matches!(
        s.alice_measure(&bad, &mut rng_from_seed(0)),
        Err(Error::NotInCode(_))
    ));
}
