//! The three-qubit bit-flip and phase-flip codes and Shor's nine-qubit code.
//!
//! Syndromes are read from stabiliser measurements. For the bit-flip code the
//! pair (Z₁Z₂, Z₂Z₃) maps as (+,+) → no error, (−,+) → qubit 1,
//! (−,−) → qubit 2, (+,−) → qubit 3; the phase-flip code does the same with
//! X₁X₂, X₂X₃.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{BasisProjector, Gate, Matrix2, Pauli, PauliString, StateVector, TOL};

/// A single-qubit error `U = tI + uX + vY + wZ`, required to be unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArbitraryError {
    pub t: Complex64,
    pub u: Complex64,
    pub v: Complex64,
    pub w: Complex64,
}

impl ArbitraryError {
    pub fn new(t: Complex64, u: Complex64, v: Complex64, w: Complex64) -> Result<Self> {
        let e = Self { t, u, v, w };
        let m = e.matrix();
        for (r, row) in [[1.0, 0.0], [0.0, 1.0]].iter().enumerate() {
            for (c, want) in row.iter().enumerate() {
                let got = m[0][r].conj() * m[0][c] + m[1][r].conj() * m[1][c];
                if (got - Complex64::new(*want, 0.0)).norm() > TOL {
                    return Err(Error::InvalidParameterSet(
                        "error operator is not unitary".into(),
                    ));
                }
            }
        }
        Ok(e)
    }

    pub fn pauli(p: Pauli) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        match p {
            Pauli::I => Self { t: one, u: z, v: z, w: z },
            Pauli::X => Self { t: z, u: one, v: z, w: z },
            Pauli::Y => Self { t: z, u: z, v: one, w: z },
            Pauli::Z => Self { t: z, u: z, v: z, w: one },
        }
    }

    /// A Haar-random element of U(2): `e^{iγ}(aI + i(bX + cY + dZ))` with
    /// `(a, b, c, d)` uniform on the 3-sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let q = loop {
            let q: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
            let n2: f64 = q.iter().map(|x| x * x).sum();
            if n2 > 1e-6 && n2 <= 1.0 {
                let n = n2.sqrt();
                break q.map(|x| x / n);
            }
        };
        let g = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        let i = Complex64::new(0.0, 1.0);
        Self {
            t: g * q[0],
            u: g * i * q[1],
            v: g * i * q[2],
            w: g * i * q[3],
        }
    }

    pub fn matrix(&self) -> Matrix2 {
        let i = Complex64::new(0.0, 1.0);
        [
            [self.t + self.w, self.u - i * self.v],
            [self.u + i * self.v, self.t - self.w],
        ]
    }

    pub fn apply(&self, state: &mut StateVector, qubit: usize) -> Result<()> {
        state.apply_matrix(qubit, &self.matrix())
    }
}

fn check_logical(a: Complex64, b: Complex64) -> Result<()> {
    let norm = a.norm_sqr() + b.norm_sqr();
    if (norm - 1.0).abs() > TOL {
        return Err(Error::NotNormalized(norm));
    }
    Ok(())
}

fn logical_qubit(a: Complex64, b: Complex64, n: usize) -> Result<StateVector> {
    check_logical(a, b)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    amps[0] = a;
    amps[1 << (n - 1)] = b;
    StateVector::from_amplitudes(n, amps)
}

fn pauli(s: &str) -> PauliString {
    s.parse().expect("static Pauli string")
}

/// Which single qubit a stabiliser pair points at (0 = none).
pub fn flagged_qubit(eigenvalues: [i8; 2]) -> usize {
    match eigenvalues {
        [1, 1] => 0,
        [-1, 1] => 1,
        [-1, -1] => 2,
        _ => 3,
    }
}

/// Result of one round of three-qubit syndrome extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeReport {
    pub eigenvalues: [i8; 2],
    /// 0 for no error, otherwise the qubit that was corrected.
    pub flagged: usize,
}

/// `a|000⟩ + b|111⟩`, prepared by CNOT₁₂ then CNOT₂₃ from `(a|0⟩ + b|1⟩)|00⟩`.
pub fn bitflip_encode(a: Complex64, b: Complex64) -> Result<StateVector> {
    let mut s = logical_qubit(a, b, 3)?;
    s.apply_cnot(1, 2)?;
    s.apply_cnot(2, 3)?;
    Ok(s)
}

pub fn bitflip_observables() -> [PauliString; 2] {
    [pauli("ZZI"), pauli("IZZ")]
}

/// The four syndrome projectors P₀…P₃ onto the code space and its
/// single-flip images.
pub fn bitflip_projectors() -> Vec<BasisProjector> {
    projector_set(crate::qsim::Basis::Computational)
}

/// R₀…R₃: the bit-flip projectors conjugated by `H^{⊗3}`.
pub fn phaseflip_projectors() -> Vec<BasisProjector> {
    projector_set(crate::qsim::Basis::Hadamard)
}

fn projector_set(basis: crate::qsim::Basis) -> Vec<BasisProjector> {
    [["000", "111"], ["100", "011"], ["010", "101"], ["001", "110"]]
        .iter()
        .map(|kets| BasisProjector {
            basis,
            kets: kets.iter().map(|k| k.parse().expect("static ket")).collect(),
        })
        .collect()
}

fn measure_pair<R: Rng + ?Sized>(
    state: &mut StateVector,
    obs: &[PauliString; 2],
    rng: &mut R,
) -> Result<[i8; 2]> {
    Ok([
        state.measure_pauli(&obs[0], rng)?.eigenvalue,
        state.measure_pauli(&obs[1], rng)?.eigenvalue,
    ])
}

/// Measures Z₁Z₂ then Z₂Z₃ and undoes the indicated flip with X.
pub fn bitflip_correct<R: Rng + ?Sized>(
    state: &StateVector,
    rng: &mut R,
) -> Result<(SyndromeReport, StateVector)> {
    correct_with(state, &bitflip_observables(), Gate::X, rng)
}

/// `a|+++⟩ + b|−−−⟩`: the bit-flip encoding followed by `H^{⊗3}`.
pub fn phaseflip_encode(a: Complex64, b: Complex64) -> Result<StateVector> {
    let mut s = bitflip_encode(a, b)?;
    s.hadamard_all();
    Ok(s)
}

pub fn phaseflip_observables() -> [PauliString; 2] {
    [pauli("XXI"), pauli("IXX")]
}

/// Measures X₁X₂ then X₂X₃ and undoes the indicated flip with Z.
pub fn phaseflip_correct<R: Rng + ?Sized>(
    state: &StateVector,
    rng: &mut R,
) -> Result<(SyndromeReport, StateVector)> {
    correct_with(state, &phaseflip_observables(), Gate::Z, rng)
}

fn correct_with<R: Rng + ?Sized>(
    state: &StateVector,
    obs: &[PauliString; 2],
    fix: Gate,
    rng: &mut R,
) -> Result<(SyndromeReport, StateVector)> {
    if state.n_qubits() != 3 {
        return Err(Error::Dimension("three-qubit code needs 3 qubits".into()));
    }
    let mut s = state.clone();
    let eigenvalues = measure_pair(&mut s, obs, rng)?;
    let flagged = flagged_qubit(eigenvalues);
    if flagged > 0 {
        s.apply_gate(fix, flagged)?;
    }
    Ok((SyndromeReport { eigenvalues, flagged }, s))
}

/// Syndrome extraction with the projector sets instead of stabilisers; the
/// outcome index is the flagged qubit.
pub fn correct_projective<R: Rng + ?Sized>(
    state: &StateVector,
    phase: bool,
    rng: &mut R,
) -> Result<(usize, StateVector)> {
    let mut s = state.clone();
    let (projectors, fix) = if phase {
        (phaseflip_projectors(), Gate::Z)
    } else {
        (bitflip_projectors(), Gate::X)
    };
    let m = s.measure_projective(&projectors, rng)?;
    if m.outcome > 0 {
        s.apply_gate(fix, m.outcome)?;
    }
    Ok((m.outcome, s))
}

/// Encodes with the phase-flip code, then each of qubits 1, 4, 7 with the
/// bit-flip code: `|0⟩ ↦ ((|000⟩+|111⟩)/√2)^{⊗3}`, `|1⟩ ↦ ((|000⟩−|111⟩)/√2)^{⊗3}`.
pub fn shor_encode(a: Complex64, b: Complex64) -> Result<StateVector> {
    let mut s = logical_qubit(a, b, 9)?;
    s.apply_cnot(1, 4)?;
    s.apply_cnot(1, 7)?;
    for q in [1, 4, 7] {
        s.apply_gate(Gate::H, q)?;
    }
    for q in [1, 4, 7] {
        s.apply_cnot(q, q + 1)?;
        s.apply_cnot(q, q + 2)?;
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShorReport {
    /// Qubit (1…9) flipped back in each block, 0 where none.
    pub bit_flips: [usize; 3],
    pub sign_eigenvalues: [i8; 2],
    /// Block (1…3) whose sign was restored, 0 where none.
    pub phase_block: usize,
}

/// Corrects any single-qubit error: Z-pair stabilisers within each block,
/// then the two six-qubit X strings comparing block signs.
pub fn shor_correct<R: Rng + ?Sized>(
    state: &StateVector,
    rng: &mut R,
) -> Result<(ShorReport, StateVector)> {
    if state.n_qubits() != 9 {
        return Err(Error::Dimension("Shor code needs 9 qubits".into()));
    }
    let mut s = state.clone();
    let mut bit_flips = [0; 3];
    for (block, flag) in bit_flips.iter_mut().enumerate() {
        let obs = bitflip_observables().map(|p| p.pad_left(3 * block).pad_right(6 - 3 * block));
        let q = flagged_qubit(measure_pair(&mut s, &obs, rng)?);
        if q > 0 {
            *flag = 3 * block + q;
            s.apply_gate(Gate::X, *flag)?;
        }
    }
    let signs = [pauli("XXXXXXIII"), pauli("IIIXXXXXX")];
    let sign_eigenvalues = measure_pair(&mut s, &signs, rng)?;
    let phase_block = flagged_qubit(sign_eigenvalues);
    if phase_block > 0 {
        s.apply_gate(Gate::Z, 3 * phase_block - 2)?;
    }
    Ok((
        ShorReport {
            bit_flips,
            sign_eigenvalues,
            phase_block,
        },
        s,
    ))
}
