//! Replays the worked examples end to end and reports one line per check.
//!
//! The checks run against a [`CodeBook`], so a deliberately broken code can
//! be swapped in to confirm the affected checks fail by name.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bb84::{bennett_bound, bob_decode};
use crate::codes::{named, CosetQuotient, DecodeStatus, LinearCode, SyndromeTable};
use crate::css::{inject, CodewordParams, CssCode};
use crate::distill::{epr_pairs, run_distillation, EprSession};
use crate::error::Result;
use crate::gf2::{BitMatrix, BitVector};
use crate::qec3;
use crate::qsim::{rng_from_seed, Gate, Pauli, PauliString, StateVector, TOL};

/// The codes the checks are run against.
#[derive(Debug, Clone)]
pub struct CodeBook {
    pub parity4: LinearCode,
    pub hamming74: LinearCode,
    pub rep3: LinearCode,
}

impl CodeBook {
    pub fn standard() -> Self {
        Self {
            parity4: named::parity4(),
            hamming74: named::hamming74(),
            rep3: named::rep3(),
        }
    }
}

impl Default for CodeBook {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReproReport {
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<CheckResult>,
}

impl ReproReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

type Outcome = Result<std::result::Result<(), String>>;

fn bv(s: &str) -> BitVector {
    s.parse().expect("static bits")
}

fn set(words: &[&str]) -> Vec<BitVector> {
    let mut v: Vec<BitVector> = words.iter().map(|w| bv(w)).collect();
    v.sort();
    v
}

fn sorted(mut v: Vec<BitVector>) -> Vec<BitVector> {
    v.sort();
    v
}

fn expect_eq<T: PartialEq + std::fmt::Debug>(got: T, want: T) -> std::result::Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("expected {want:?}, got {got:?}"))
    }
}

fn matrix(rows: &[&str]) -> BitMatrix {
    BitMatrix::from_rows(rows.iter().map(|r| bv(r)).collect()).expect("static matrix")
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Runs every check against the standard codes.
pub fn reproduce_all(seed: u64) -> ReproReport {
    reproduce_with(&CodeBook::standard(), seed)
}

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

pub fn reproduce_with(book: &CodeBook, seed: u64) -> ReproReport {
    let checks: Vec<(&str, Check<'_>)> = vec![
        ("parity4.codewords", Box::new(|| {
            Ok(expect_eq(
                sorted(book.parity4.codewords()?),
                set(&["0000", "0011", "0101", "0110", "1001", "1010", "1100", "1111"]),
            ))
        })),
        ("parity4.check_matrix", Box::new(|| {
            Ok(expect_eq(book.parity4.check().clone(), matrix(&["1111"])))
        })),
        ("parity4.dual", Box::new(|| {
            Ok(expect_eq(sorted(book.parity4.dual().codewords()?), set(&["0000", "1111"])))
        })),
        ("parity4.cosets", Box::new(|| check_parity_cosets(book))),
        ("parity4.coset_of_0111", Box::new(|| {
            Ok(expect_eq(
                book.parity4.coset(&bv("0111"))?,
                set(&["0111", "0100", "0010", "0001", "1110", "1101", "1011", "1000"]),
            ))
        })),
        ("hamming74.codewords", Box::new(|| {
            Ok(expect_eq(
                sorted(book.hamming74.codewords()?),
                set(&[
                    "0000000", "0001011", "0010101", "0011110", "0100111", "0101100",
                    "0110010", "0111001", "1000110", "1001101", "1010011", "1011000",
                    "1100001", "1101010", "1110100", "1111111",
                ]),
            ))
        })),
        ("hamming74.check_matrix", Box::new(|| {
            Ok(expect_eq(
                book.hamming74.check().clone(),
                matrix(&["1110100", "1101010", "0111001"]),
            ))
        })),
        ("hamming74.capacities", Box::new(|| {
            let c = book.hamming74.capacities()?;
            Ok(expect_eq((c.d, c.u, c.t), (3, 2, 1)))
        })),
        ("hamming74.syndrome_table", Box::new(|| check_hamming_table(&book.hamming74))),
        ("hamming74.decode_single_error", Box::new(|| {
            let t = SyndromeTable::build(&book.hamming74, 1)?;
            let d = t.decode(&book.hamming74, &bv("1011110"))?;
            Ok(expect_eq((d.codeword, d.status), (bv("0011110"), DecodeStatus::Ok)))
        })),
        ("hamming74.decode_miscorrection", Box::new(|| {
            let t = SyndromeTable::build(&book.hamming74, 1)?;
            let d = t.decode(&book.hamming74, &bv("1011111"))?;
            Ok(expect_eq((d.syndrome, d.codeword), (bv("111"), bv("1111111"))))
        })),
        ("hamming74.undetected_triple", Box::new(|| {
            let r = bv("0011110").add(&bv("1100001"))?;
            Ok(expect_eq((r.clone(), book.hamming74.syndrome(&r)?.is_zero()), (bv("1111111"), true)))
        })),
        ("hamming74.dual", Box::new(|| {
            Ok(expect_eq(
                sorted(book.hamming74.dual().codewords()?),
                set(&[
                    "0000000", "1110100", "1101010", "0111001", "0011110", "1010011",
                    "1001101", "0100111",
                ]),
            ))
        })),
        ("rep3.syndrome_table", Box::new(|| {
            let t = SyndromeTable::build(&book.rep3, 1)?;
            let got: Vec<(BitVector, BitVector)> = t.entries().to_vec();
            Ok(expect_eq(
                got,
                vec![
                    (bv("000"), bv("00")),
                    (bv("100"), bv("10")),
                    (bv("010"), bv("11")),
                    (bv("001"), bv("01")),
                ],
            ))
        })),
        ("character_sums", Box::new(|| check_char_sums(book))),
        ("bitflip.syndrome_table", Box::new(|| check_three_qubit(false, seed))),
        ("phaseflip.syndrome_table", Box::new(|| check_three_qubit(true, seed))),
        ("shor.single_pauli_errors", Box::new(|| check_shor(seed))),
        ("css.parity4.codewords", Box::new(|| check_parity_css(book))),
        ("css.hamming74.codewords", Box::new(|| check_hamming_css_words(book))),
        ("css.hamming74.bit_syndromes", Box::new(|| check_css_syndromes(book, Pauli::X, seed))),
        ("css.hamming74.phase_syndromes", Box::new(|| check_css_syndromes(book, Pauli::Z, seed))),
        ("css.parity4.basis_identities", Box::new(|| {
            let code = CssCode::new(book.parity4.clone(), book.parity4.dual(), 0)?;
            let xs = [bv("0000"), bv("0001")];
            let zs = [bv("0000"), bv("0001")];
            Ok(match code.verify_basis_identities(&xs, &zs) {
                Ok(r) => expect_eq(r.n_states, 16),
                Err(e) => Err(e.to_string()),
            })
        })),
        ("epr.pairs", Box::new(check_epr)),
        ("distill.hamming74.single_errors", Box::new(|| check_distill(book, seed))),
        ("bb84.bennett_bound", Box::new(|| {
            let b = bennett_bound(5);
            Ok(if (b - 0.0451).abs() < 1e-4 {
                Ok(())
            } else {
                Err(format!("bound(5) = {b}"))
            })
        })),
        ("bb84.shor_preskill.single_errors", Box::new(|| check_shor_preskill(book))),
    ];

    let checks: Vec<CheckResult> = checks
        .into_iter()
        .map(|(name, f)| {
            let (passed, detail) = match f() {
                Ok(Ok(())) => (true, String::new()),
                Ok(Err(why)) => (false, why),
                Err(e) => (false, format!("error: {e}")),
            };
            CheckResult {
                name: name.to_string(),
                passed,
                detail,
            }
        })
        .collect();
    let passed = checks.iter().filter(|c| c.passed).count();
    ReproReport {
        seed,
        passed,
        failed: checks.len() - passed,
        checks,
    }
}

fn check_parity_cosets(book: &CodeBook) -> Outcome {
    let c = &book.parity4;
    let q = CosetQuotient::new(c, &c.dual())?;
    let mut cosets = Vec::new();
    for (_, rep) in q.representatives()? {
        cosets.push(c.dual().coset(&rep)?);
    }
    cosets.sort();
    let mut want = vec![
        set(&["0000", "1111"]),
        set(&["0011", "1100"]),
        set(&["0101", "1010"]),
        set(&["0110", "1001"]),
    ];
    want.sort();
    Ok(expect_eq(cosets, want))
}

fn check_hamming_table(code: &LinearCode) -> Outcome {
    let t = SyndromeTable::build(code, 1)?;
    let want = ["110", "111", "101", "011", "100", "010", "001"];
    if t.len() != 8 {
        return Ok(Err(format!("{} entries", t.len())));
    }
    for (i, s) in want.iter().enumerate() {
        let e = BitVector::unit(7, i);
        if t.lookup(&bv(s)) != Some(&e) {
            return Ok(Err(format!("syndrome {s} should map to {e}")));
        }
    }
    Ok(Ok(()))
}

fn check_char_sums(book: &CodeBook) -> Outcome {
    for code in [&book.parity4, &book.hamming74] {
        let size = 1i64 << code.k();
        let dual = code.dual();
        for u in BitVector::all(code.n()) {
            let want = if dual.contains(&u)? { size } else { 0 };
            let got = code.char_sum(&u)?;
            if got != want {
                return Ok(Err(format!("sum over C at u={u} is {got}, expected {want}")));
            }
        }
    }
    Ok(Ok(()))
}

fn check_three_qubit(phase: bool, seed: u64) -> Outcome {
    let (a, b) = (c(0.6), c(0.8));
    let clean = if phase {
        qec3::phaseflip_encode(a, b)?
    } else {
        qec3::bitflip_encode(a, b)?
    };
    let want = [[1, 1], [-1, 1], [-1, -1], [1, -1]];
    let mut rng = rng_from_seed(seed);
    for (q, want) in want.iter().enumerate() {
        let mut s = clean.clone();
        if q > 0 {
            s.apply_gate(if phase { Gate::Z } else { Gate::X }, q)?;
        }
        let (report, fixed) = if phase {
            qec3::phaseflip_correct(&s, &mut rng)?
        } else {
            qec3::bitflip_correct(&s, &mut rng)?
        };
        if report.eigenvalues != *want || report.flagged != q {
            return Ok(Err(format!("error on qubit {q}: got {report:?}")));
        }
        if !fixed.same_ray(&clean)? {
            return Ok(Err(format!("error on qubit {q} not undone")));
        }
    }
    Ok(Ok(()))
}

fn check_shor(seed: u64) -> Outcome {
    let clean = qec3::shor_encode(c(0.6), c(0.8))?;
    let mut rng = rng_from_seed(seed);
    for q in 1..=9 {
        for g in [Gate::X, Gate::Y, Gate::Z] {
            let mut s = clean.clone();
            s.apply_gate(g, q)?;
            let (_, fixed) = qec3::shor_correct(&s, &mut rng)?;
            if !fixed.same_ray(&clean)? {
                return Ok(Err(format!("{g:?} on qubit {q} not corrected")));
            }
        }
    }
    Ok(Ok(()))
}

fn amplitudes_match(state: &StateVector, kets: &[&str], amp: f64) -> std::result::Result<(), String> {
    let mut want = vec![c(0.0); state.amplitudes().len()];
    for k in kets {
        want[bv(k).to_index()] = c(amp);
    }
    for (i, (g, w)) in state.amplitudes().iter().zip(&want).enumerate() {
        if (g - w).norm() > TOL {
            return Err(format!(
                "amplitude of {} is {g}, expected {w}",
                BitVector::from_index(i, state.n_qubits())
            ));
        }
    }
    Ok(())
}

fn check_parity_css(book: &CodeBook) -> Outcome {
    let code = CssCode::new(book.parity4.clone(), book.parity4.dual(), 0)?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let p = CodewordParams::zero(4);
    let pairs = [["0000", "1111"], ["0011", "1100"], ["0101", "1010"], ["0110", "1001"]];
    let mut states = Vec::new();
    for kets in pairs {
        let s = code.codeword(&bv(kets[0]), &p)?;
        if let Err(e) = amplitudes_match(&s, &kets, r) {
            return Ok(Err(e));
        }
        states.push(s);
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            if states[i].inner(&states[j])?.norm() > TOL {
                return Ok(Err(format!("codewords {i} and {j} overlap")));
            }
        }
    }
    Ok(Ok(()))
}

fn check_hamming_css_words(book: &CodeBook) -> Outcome {
    let h = &book.hamming74;
    let code = CssCode::new(h.clone(), h.dual(), 1)?;
    let amp = 1.0 / 8f64.sqrt();
    let p = CodewordParams::zero(7);
    let q1 = [
        "0000000", "1110100", "1101010", "0111001", "0011110", "1010011", "1001101", "0100111",
    ];
    let q2 = [
        "0001011", "1111111", "1100001", "0110010", "0010101", "1011000", "1000110", "0101100",
    ];
    let s1 = code.codeword(&bv("0000000"), &p)?;
    let s2 = code.codeword(&bv("0001011"), &p)?;
    if let Err(e) = amplitudes_match(&s1, &q1, amp) {
        return Ok(Err(e));
    }
    if let Err(e) = amplitudes_match(&s2, &q2, amp) {
        return Ok(Err(e));
    }
    Ok(expect_eq(s1.inner(&s2)?.norm() <= TOL, true))
}

// Single X (or Z) errors on each qubit produce the columns of the
// corresponding check matrix as syndromes, and are undone.
fn check_css_syndromes(book: &CodeBook, kind: Pauli, seed: u64) -> Outcome {
    let h = &book.hamming74;
    let code = CssCode::new(h.clone(), h.dual(), 1)?;
    let p = CodewordParams::zero(7);
    let clean = code.codeword(&bv("0001011"), &p)?;
    let want = ["110", "111", "101", "011", "100", "010", "001"];
    let mut rng = rng_from_seed(seed);
    for (i, w) in want.iter().enumerate() {
        let e = BitVector::unit(7, i);
        let zero = BitVector::zeros(7);
        let dirty = match kind {
            Pauli::X => inject(&clean, &e, &zero)?,
            _ => inject(&clean, &zero, &e)?,
        };
        let fix = code.correct(&dirty, &p, &mut rng)?;
        let got = match kind {
            Pauli::X => &fix.bit_syndrome,
            _ => &fix.phase_syndrome,
        };
        if got != &bv(w) {
            return Ok(Err(format!("qubit {}: syndrome {got}, expected {w}", i + 1)));
        }
        if !fix.state.same_ray(&clean)? {
            return Ok(Err(format!("qubit {} not restored", i + 1)));
        }
    }
    Ok(Ok(()))
}

fn check_epr() -> Outcome {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let s = epr_pairs(1)?;
    if let Err(e) = amplitudes_match(&s, &["00", "11"], r) {
        return Ok(Err(e));
    }
    let mut flipped = s.clone();
    flipped.apply_gate(Gate::X, 2)?;
    if let Err(e) = amplitudes_match(&flipped, &["01", "10"], r) {
        return Ok(Err(format!("β01: {e}")));
    }
    let mut both = s.clone();
    both.apply_pauli(&"IY".parse::<PauliString>()?)?;
    let beta11 = StateVector::superposition(&[(bv("01"), c(1.0)), (bv("10"), c(-1.0))])?;
    Ok(expect_eq(both.same_ray(&beta11)?, true))
}

fn check_distill(book: &CodeBook, seed: u64) -> Outcome {
    let h = &book.hamming74;
    let code = CssCode::new(h.clone(), h.dual(), 1)?;
    let mut rng = rng_from_seed(seed);
    let errors: Vec<BitVector> = std::iter::once(BitVector::zeros(7))
        .chain((0..7).map(|i| BitVector::unit(7, i)))
        .collect();
    for e1 in &errors {
        for e2 in &errors {
            let mut s = EprSession::new(code.clone())?;
            s.inject_bob_errors(e1, e2)?;
            let r = run_distillation(&mut s, &mut rng)?;
            if !r.keys_match {
                return Ok(Err(format!("keys differ for e1={e1}, e2={e2}")));
            }
        }
    }
    Ok(Ok(()))
}

fn check_shor_preskill(book: &CodeBook) -> Outcome {
    let h = &book.hamming74;
    let code = CssCode::new(h.clone(), h.dual(), 1)?;
    if code.k() != 1 {
        return Ok(Err(format!("key length {}", code.k())));
    }
    let errors: Vec<BitVector> = std::iter::once(BitVector::zeros(7))
        .chain((0..7).map(|i| BitVector::unit(7, i)))
        .collect();
    for u in h.codewords()? {
        for x in [bv("0000000"), bv("1011001")] {
            for e1 in &errors {
                let x_minus_u = x.add(&u)?;
                let (u_hat, status) = bob_decode(&code, &x.add(e1)?, &x_minus_u)?;
                let alice = code.quotient().key_from_coset(&u)?;
                let bob = code.quotient().key_from_coset(&u_hat)?;
                if status != DecodeStatus::Ok || alice != bob {
                    return Ok(Err(format!("u={u}, e1={e1}: keys {alice} / {bob}")));
                }
            }
        }
    }
    Ok(Ok(()))
}
