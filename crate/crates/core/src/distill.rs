//! Entanglement distillation with a CSS code.
//!
//! A session holds `n` EPR pairs `|β00⟩` on 2n qubits: Alice owns qubits
//! 1…n and Bob owns n+1…2n, pair `i` being qubits `i` and `n+i`. Errors are
//! injected on Bob's half directly; Alice announces her syndromes, Bob corrects
//! relative to them, and both read a key off the coset of their measured
//! strings.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::css::{pauli_row, CodewordParams, CssCode};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::qsim::{Gate, Pauli, StateVector};

/// Joint register limit, `2n ≤ 16`.
pub const MAX_JOINT_QUBITS: usize = 16;

/// `|β00⟩^{⊗n}` in the Alice-block/Bob-block layout.
pub fn epr_pairs(n: usize) -> Result<StateVector> {
    if n == 0 || 2 * n > MAX_JOINT_QUBITS {
        return Err(Error::QubitLimit {
            n: 2 * n,
            max: MAX_JOINT_QUBITS,
        });
    }
    let amp = Complex64::new((-(n as f64) / 2.0).exp2(), 0.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << (2 * n)];
    for j in 0..1usize << n {
        amps[(j << n) | j] = amp;
    }
    StateVector::from_amplitudes(2 * n, amps)
}

/// `2^{-k/2} Σ_v |ψ_{v,x,z}⟩_A |ψ_{v,x,z}⟩_B`, the joint state once Alice
/// has measured syndromes consistent with `x` and `z`.
pub fn post_alice_state(code: &CssCode, p: &CodewordParams) -> Result<StateVector> {
    let n = code.n();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << (2 * n)];
    for (_, v) in code.quotient().representatives()? {
        let s = code.codeword(&v, p)?;
        let a = s.amplitudes();
        for (i, ai) in a.iter().enumerate() {
            if ai.norm() == 0.0 {
                continue;
            }
            for (j, aj) in a.iter().enumerate() {
                amps[(i << n) | j] += ai * aj;
            }
        }
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    StateVector::from_amplitudes(2 * n, amps)
}

/// What Alice broadcasts: her raw syndromes and the shifts derived from them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliceAnnouncement {
    pub sx: BitVector,
    pub sz: BitVector,
    pub x: BitVector,
    pub z: BitVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistillationReport {
    pub alice: AliceAnnouncement,
    pub bob_sx: BitVector,
    pub bob_sz: BitVector,
    pub e1_hat: BitVector,
    pub e2_hat: BitVector,
    pub alice_string: BitVector,
    pub bob_string: BitVector,
    pub alice_key: BitVector,
    pub bob_key: BitVector,
    pub keys_match: bool,
}

/// Offsets added to Alice's particular solutions; `x` must stay in its C1
/// coset and `z` in its C2⊥ coset, so any `C1` / `C2⊥` element is allowed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ShiftOffsets {
    pub x: Option<BitVector>,
    pub z: Option<BitVector>,
}

#[derive(Debug, Clone)]
pub struct EprSession {
    code: CssCode,
    joint: StateVector,
}

impl EprSession {
    pub fn new(code: CssCode) -> Result<Self> {
        let joint = epr_pairs(code.n())?;
        Ok(Self { code, joint })
    }

    pub fn code(&self) -> &CssCode {
        &self.code
    }

    pub fn joint(&self) -> &StateVector {
        &self.joint
    }

    fn n(&self) -> usize {
        self.code.n()
    }

    /// `X^{e1} Z^{e2}` on Bob's qubits.
    pub fn inject_bob_errors(&mut self, e1: &BitVector, e2: &BitVector) -> Result<()> {
        let n = self.n();
        for e in [e1, e2] {
            if e.len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: e.len(),
                });
            }
        }
        for i in e2.ones() {
            self.joint.apply_gate(Gate::Z, n + i + 1)?;
        }
        for i in e1.ones() {
            self.joint.apply_gate(Gate::X, n + i + 1)?;
        }
        Ok(())
    }

    fn measure_half<R: Rng + ?Sized>(
        &mut self,
        rows: &BitMatrix,
        kind: Pauli,
        bob: bool,
        rng: &mut R,
    ) -> Result<BitVector> {
        let n = self.n();
        let bits = rows
            .rows()
            .iter()
            .map(|r| {
                let p = pauli_row(r, kind);
                let p = if bob { p.pad_left(n) } else { p.pad_right(n) };
                Ok(self.joint.measure_pauli(&p, rng)?.bit())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BitVector::from_bools(&bits))
    }

    /// Alice measures the `H1` Z-strings then the `H2` X-strings on her half
    /// and solves for `x` and `z` (free variables zero, then offset).
    pub fn alice_measure<R: Rng + ?Sized>(
        &mut self,
        offsets: &ShiftOffsets,
        rng: &mut R,
    ) -> Result<AliceAnnouncement> {
        let h1 = self.code.h1().clone();
        let h2 = self.code.h2().clone();
        let sx = self.measure_half(&h1, Pauli::Z, false, rng)?;
        let sz = self.measure_half(&h2, Pauli::X, false, rng)?;
        let mut x = h1.solve_particular(&sx)?;
        let mut z = h2.solve_particular(&sz)?;
        if let Some(dx) = &offsets.x {
            if !self.code.c1().contains(dx)? {
                return Err(Error::NotInCode(dx.to_string()));
            }
            x = x.add(dx)?;
        }
        if let Some(dz) = &offsets.z {
            if !self.code.c2_dual().contains(dz)? {
                return Err(Error::NotInCode(dz.to_string()));
            }
            z = z.add(dz)?;
        }
        Ok(AliceAnnouncement { sx, sz, x, z })
    }

    /// Bob measures the same observables on his half and undoes the errors
    /// their shifted syndromes point to. Returns `(sx, sz, ê1, ê2)`.
    pub fn bob_correct<R: Rng + ?Sized>(
        &mut self,
        alice: &AliceAnnouncement,
        rng: &mut R,
    ) -> Result<(BitVector, BitVector, BitVector, BitVector)> {
        let n = self.n();
        let h1 = self.code.h1().clone();
        let h2 = self.code.h2().clone();
        let sx = self.measure_half(&h1, Pauli::Z, true, rng)?;
        let sz = self.measure_half(&h2, Pauli::X, true, rng)?;
        let shifted_x = sx.add(&h1.mul_vec(&alice.x)?)?;
        let shifted_z = sz.add(&h2.mul_vec(&alice.z)?)?;
        let e1 = self
            .code
            .bit_table()
            .lookup(&shifted_x)
            .cloned()
            .ok_or_else(|| Error::Uncorrectable(shifted_x.to_string()))?;
        let e2 = self
            .code
            .phase_table()
            .lookup(&shifted_z)
            .cloned()
            .ok_or_else(|| Error::Uncorrectable(shifted_z.to_string()))?;
        for i in e1.ones() {
            self.joint.apply_gate(Gate::X, n + i + 1)?;
        }
        for i in e2.ones() {
            self.joint.apply_gate(Gate::Z, n + i + 1)?;
        }
        Ok((sx, sz, e1, e2))
    }
}

/// The full exchange with Alice's default shift choice.
pub fn run_distillation<R: Rng + ?Sized>(
    session: &mut EprSession,
    rng: &mut R,
) -> Result<DistillationReport> {
    run_distillation_with(session, &ShiftOffsets::default(), rng)
}

pub fn run_distillation_with<R: Rng + ?Sized>(
    session: &mut EprSession,
    offsets: &ShiftOffsets,
    rng: &mut R,
) -> Result<DistillationReport> {
    let n = session.n();
    let alice = session.alice_measure(offsets, rng)?;
    let (bob_sx, bob_sz, e1_hat, e2_hat) = session.bob_correct(&alice, rng)?;
    let all = session.joint.measure_all_z(rng);
    let alice_string = all.slice(0, n);
    let bob_string = all.slice(n, 2 * n);
    let q = session.code.quotient();
    let alice_key = q.key_from_coset(&alice_string.add(&alice.x)?)?;
    let bob_key = q.key_from_coset(&bob_string.add(&alice.x)?)?;
    let keys_match = alice_key == bob_key;
    Ok(DistillationReport {
        alice,
        bob_sx,
        bob_sz,
        e1_hat,
        e2_hat,
        alice_string,
        bob_string,
        alice_key,
        bob_key,
        keys_match,
    })
}

/// One sacrificed pair: Alice's and Bob's Z outcomes after Bob's half was
/// optionally Hadamard-rotated around the channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckPair {
    pub rotated: bool,
    pub alice: bool,
    pub bob: bool,
}

impl CheckPair {
    pub fn mismatch(&self) -> bool {
        self.alice != self.bob
    }
}

/// Runs check pairs as independent two-qubit sessions. For pair `i` Alice
/// applies H to Bob's half when `rotate[i]` is set, the channel applies
/// `X^{ex} Z^{ez}`, Bob undoes the H, and both measure Z.
pub fn run_check_pairs<R: Rng + ?Sized>(
    errors: &[(bool, bool)],
    rotate: &BitVector,
    rng: &mut R,
) -> Result<Vec<CheckPair>> {
    if errors.len() != rotate.len() {
        return Err(Error::LengthMismatch {
            left: errors.len(),
            right: rotate.len(),
        });
    }
    errors
        .iter()
        .zip(rotate.iter())
        .map(|(&(ex, ez), rotated)| {
            let mut s = epr_pairs(1)?;
            if rotated {
                s.apply_gate(Gate::H, 2)?;
            }
            if ez {
                s.apply_gate(Gate::Z, 2)?;
            }
            if ex {
                s.apply_gate(Gate::X, 2)?;
            }
            if rotated {
                s.apply_gate(Gate::H, 2)?;
            }
            let bits = s.measure_all_z(rng);
            Ok(CheckPair {
                rotated,
                alice: bits.get(0),
                bob: bits.get(1),
            })
        })
        .collect()
}

/// Check-then-distill: `n` check pairs with random rotations, abort above
/// `t_abort` mismatches, otherwise distill the code pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckedRun {
    pub checks: Vec<CheckPair>,
    pub mismatches: usize,
    pub aborted: bool,
    pub distillation: Option<DistillationReport>,
}

pub fn run_checked<R: Rng + ?Sized>(
    code: &CssCode,
    check_errors: &[(bool, bool)],
    e1: &BitVector,
    e2: &BitVector,
    t_abort: usize,
    rng: &mut R,
) -> Result<CheckedRun> {
    let rotate = BitVector::from_bools(
        &(0..check_errors.len()).map(|_| rng.gen::<bool>()).collect::<Vec<_>>(),
    );
    let checks = run_check_pairs(check_errors, &rotate, rng)?;
    let mismatches = checks.iter().filter(|c| c.mismatch()).count();
    if mismatches > t_abort {
        return Ok(CheckedRun {
            checks,
            mismatches,
            aborted: true,
            distillation: None,
        });
    }
    let mut session = EprSession::new(code.clone())?;
    session.inject_bob_errors(e1, e2)?;
    let report = run_distillation(&mut session, rng)?;
    Ok(CheckedRun {
        checks,
        mismatches,
        aborted: false,
        distillation: Some(report),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::named::hamming74;
    use crate::qsim::rng_from_seed;

    #[test]
    fn register_limit() {
        assert!(epr_pairs(8).is_ok());
        assert!(matches!(epr_pairs(9), Err(Error::QubitLimit { .. })));
    }

    #[test]
    fn single_pair_is_bell_state() {
        let s = epr_pairs(1).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0].re - r).abs() < 1e-12);
        assert!((s.amplitudes()[3].re - r).abs() < 1e-12);
    }

    #[test]
    fn rotated_checks_see_phase_errors_only() {
        let mut rng = rng_from_seed(1);
        let errs = [(true, false), (false, true), (true, false), (false, true)];
        let rot: BitVector = "0011".parse().unwrap();
        let out = run_check_pairs(&errs, &rot, &mut rng).unwrap();
        let m: Vec<bool> = out.iter().map(CheckPair::mismatch).collect();
        assert_eq!(m, vec![true, false, false, true]);
    }

    #[test]
    fn checked_run_aborts() {
        let h = hamming74();
        let code = CssCode::new(h.clone(), h.dual(), 1).unwrap();
        let errs = vec![(true, true); 7];
        let z = BitVector::zeros(7);
        let run = run_checked(&code, &errs, &z, &z, 1, &mut rng_from_seed(2)).unwrap();
        // X·Z on every pair flips the outcome in either basis
        assert_eq!(run.mismatches, 7);
        assert!(run.aborted && run.distillation.is_none());
    }
}
