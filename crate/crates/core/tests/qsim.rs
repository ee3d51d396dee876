mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use qkdforge::qsim::{rng_from_seed, BasisProjector, Gate, PauliString, StateVector};
use qkdforge::Error;
use rand::Rng;

const TOL: f64 = 1e-9;

fn random_state(n: usize, seed: u64) -> StateVector {
    let mut rng = rng_from_seed(seed);
    let amps: Vec<Complex64> = (0..1 << n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(n, amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

fn arb_pauli(n: usize) -> impl Strategy<Value = PauliString> {
    proptest::collection::vec(prop_oneof![Just('I'), Just('X'), Just('Y'), Just('Z')], n)
        .prop_map(|cs| cs.into_iter().collect::<String>().parse().unwrap())
}

proptest! {
    #[test]
    fn gates_preserve_norm(seed in any::<u64>(), ops in proptest::collection::vec((0u8..5, 1usize..=4, 1usize..=4), 1..30)) {
        let mut s = random_state(4, seed);
        for (g, a, b) in ops {
            match g {
                0 => s.apply_gate(Gate::X, a).unwrap(),
                1 => s.apply_gate(Gate::Y, a).unwrap(),
                2 => s.apply_gate(Gate::Z, a).unwrap(),
                3 => s.apply_gate(Gate::H, a).unwrap(),
                _ if a != b => s.apply_cnot(a, b).unwrap(),
                _ => {}
            }
        }
        prop_assert!((s.norm_sqr() - 1.0).abs() < TOL);
    }

    #[test]
    fn paulis_square_to_identity(seed in any::<u64>(), p in arb_pauli(5)) {
        let s = random_state(5, seed);
        let mut t = s.clone();
        t.apply_pauli(&p).unwrap();
        t.apply_pauli(&p).unwrap();
        for (a, b) in s.amplitudes().iter().zip(t.amplitudes()) {
            prop_assert!((a - b).norm() < TOL);
        }
    }

    #[test]
    fn pauli_string_matches_single_gates(seed in any::<u64>(), p in arb_pauli(4)) {
        let s = random_state(4, seed);
        let mut a = s.clone();
        a.apply_pauli(&p).unwrap();
        let mut b = s;
        for (i, f) in p.to_string().chars().enumerate() {
            let g = match f { 'X' => Gate::X, 'Y' => Gate::Y, 'Z' => Gate::Z, _ => continue };
            b.apply_gate(g, i + 1).unwrap();
        }
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            prop_assert!((x - y).norm() < TOL);
        }
    }

    #[test]
    fn pauli_measurement_leaves_an_eigenstate(seed in any::<u64>(), p in arb_pauli(4)) {
        let mut s = random_state(4, seed);
        let mut rng = rng_from_seed(seed ^ 1);
        let out = s.measure_pauli(&p, &mut rng).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < TOL);
        prop_assert!((s.expectation(&p).unwrap() - out.eigenvalue as f64).abs() < 1e-8);
        // a second measurement repeats the outcome
        prop_assert_eq!(s.measure_pauli(&p, &mut rng).unwrap().eigenvalue, out.eigenvalue);
    }

    #[test]
    fn inner_product_is_hermitian(a in any::<u64>(), b in any::<u64>()) {
        let (x, y) = (random_state(3, a), random_state(3, b));
        let xy = x.inner(&y).unwrap();
        let yx = y.inner(&x).unwrap();
        prop_assert!((xy - yx.conj()).norm() < TOL);
        prop_assert!(x.fidelity(&y).unwrap() <= 1.0 + TOL);
    }
}

#[test]
fn cnot_truth_table() {
    for (input, output) in [("00", "00"), ("01", "01"), ("10", "11"), ("11", "10")] {
        let mut s = StateVector::basis(&bv(input)).unwrap();
        s.apply_cnot(1, 2).unwrap();
        assert_eq!(s.amplitude(&bv(output)), Complex64::new(1.0, 0.0));
    }
}

#[test]
fn one_draw_per_measurement() {
    let mut s = random_state(3, 1);
    let mut rng = rng_from_seed(42);
    s.measure_pauli(&"ZZI".parse().unwrap(), &mut rng).unwrap();
    s.measure_all_z(&mut rng);
    let projectors = [
        BasisProjector::computational(&["000", "001", "010", "011"]).unwrap(),
        BasisProjector::computational(&["100", "101", "110", "111"]).unwrap(),
    ];
    s.measure_projective(&projectors, &mut rng).unwrap();
    let mut reference = rng_from_seed(42);
    for _ in 0..3 {
        reference.gen::<f64>();
    }
    assert_eq!(rng.gen::<u64>(), reference.gen::<u64>());
}

#[test]
fn born_rule_frequencies() {
    let trials = 20_000;
    let mut ones = 0;
    let mut rng = rng_from_seed(3);
    // amplitude √0.3 on |1⟩
    let amps = vec![Complex64::new(0.7f64.sqrt(), 0.0), Complex64::new(0.0, 0.3f64.sqrt())];
    let s = StateVector::from_amplitudes(1, amps).unwrap();
    for _ in 0..trials {
        ones += s.clone().measure_all_z(&mut rng).get(0) as usize;
    }
    assert!(within_sigmas(ones as f64 / trials as f64, 0.3, trials, 3.0));
}

#[test]
fn projective_measurement_collapses_into_span() {
    let s0 = random_state(3, 9);
    let projectors = qkdforge::qec3::bitflip_projectors();
    for seed in 0..20 {
        let mut s = s0.clone();
        let m = s.measure_projective(&projectors, &mut rng_from_seed(seed)).unwrap();
        let allowed: Vec<usize> = projectors[m.outcome].kets.iter().map(|k| k.to_index()).collect();
        for (i, a) in s.amplitudes().iter().enumerate() {
            if !allowed.contains(&i) {
                assert!(a.norm() < TOL);
            }
        }
        assert!((s.norm_sqr() - 1.0).abs() < TOL);
    }
}

#[test]
fn hadamard_basis_projectors() {
    // |+−⟩ is found with certainty by a Hadamard-basis projector on "01"
    let mut s = StateVector::basis(&bv("01")).unwrap();
    s.hadamard_all();
    let projectors = [
        BasisProjector::hadamard(&["01"]).unwrap(),
        BasisProjector::hadamard(&["00", "10", "11"]).unwrap(),
    ];
    for seed in 0..10 {
        let m = s.clone().measure_projective(&projectors, &mut rng_from_seed(seed)).unwrap();
        assert_eq!(m.outcome, 0);
        assert!((m.probability - 1.0).abs() < TOL);
    }
}

#[test]
fn mixed_or_overlapping_projectors_rejected() {
    let mut s = StateVector::zero(1).unwrap();
    let mut rng = rng_from_seed(0);
    let mixed = [
        BasisProjector::computational(&["0"]).unwrap(),
        BasisProjector::hadamard(&["1"]).unwrap(),
    ];
    assert!(matches!(s.measure_projective(&mixed, &mut rng), Err(Error::InvalidProjectors(_))));
    let overlap = [
        BasisProjector::computational(&["0", "1"]).unwrap(),
        BasisProjector::computational(&["1"]).unwrap(),
    ];
    assert!(matches!(s.measure_projective(&overlap, &mut rng), Err(Error::InvalidProjectors(_))));
}

#[test]
fn bell_state_parity_is_definite() {
    let mut s = StateVector::zero(2).unwrap();
    s.apply_gate(Gate::H, 1).unwrap();
    s.apply_cnot(1, 2).unwrap();
    for seed in 0..10 {
        let mut t = s.clone();
        let out = t.measure_pauli(&"ZZ".parse().unwrap(), &mut rng_from_seed(seed)).unwrap();
        assert_eq!(out.eigenvalue, 1);
        assert!(t.same_ray(&s).unwrap());
        let bits = t.measure_all_z(&mut rng_from_seed(seed));
        assert_eq!(bits.get(0), bits.get(1));
    }
}

#[test]
fn debug_json_shape() {
    let mut s = StateVector::zero(2).unwrap();
    s.apply_gate(Gate::H, 2).unwrap();
    let v = s.debug_json();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 2);
    assert_eq!(arr[0][0], "00");
    assert!((arr[1][1].as_f64().unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
}

#[cfg(feature = "parallel")]
#[test]
fn large_registers_use_the_same_arithmetic() {
    // 15 qubits crosses the threaded threshold; compare with a qubit-by-qubit path
    let mut a = StateVector::zero(15).unwrap();
    a.apply_gate(Gate::X, 3).unwrap();
    let mut b = a.clone();
    a.hadamard_all();
    for q in 1..=15 {
        b.apply_gate(Gate::H, q).unwrap();
    }
    assert!(a.same_ray(&b).unwrap());
    let p: PauliString = "XYZIXYZIXYZIXYZ".parse().unwrap();
    a.apply_pauli(&p).unwrap();
    a.apply_pauli(&p).unwrap();
    assert!(a.same_ray(&b).unwrap());
}

#[test]
fn hadamard_examples() {
    let mut s = StateVector::zero(3).unwrap();
    s.hadamard_all();
    let r = 1.0 / 8f64.sqrt();
    assert!(s.amplitudes().iter().all(|a| (a.re - r).abs() < 1e-12 && a.im.abs() < 1e-12));

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut s = StateVector::superposition(&[
        (bv("0000"), Complex64::new(h, 0.0)),
        (bv("1111"), Complex64::new(-h, 0.0)),
    ])
    .unwrap();
    let before = s.clone();
    s.hadamard_all();
    for (i, a) in s.amplitudes().iter().enumerate() {
        let odd = (i as u32).count_ones() % 2 == 1;
        let want = if odd { 1.0 / (2.0 * 2f64.sqrt()) } else { 0.0 };
        assert!((a.re - want).abs() < 1e-12 && a.im.abs() < 1e-12, "ket {i:04b}");
    }
    s.hadamard_all();
    assert!((s.fidelity(&before).unwrap() - 1.0).abs() < 1e-9);
}
