//! A dense state-vector simulator.
//!
//! Qubits are numbered from 1, leftmost first: basis ket `|j₁…jₙ⟩` sits at
//! index `Σ jᵢ·2^{n−i}`, so qubit 1 is the most significant bit. Every
//! measurement consumes exactly one `f64` from the RNG, in call order.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::parallel;

pub const MAX_QUBITS: usize = 20;

/// Tolerance for normalisation, projector and fidelity checks.
pub const TOL: f64 = 1e-9;

/// Amplitudes at or below this magnitude are left out of debug dumps.
pub const DUMP_CUTOFF: f64 = 1e-12;

/// Outcomes less likely than this are treated as impossible when sampling.
const PROB_FLOOR: f64 = 1e-15;

pub type SimRng = ChaCha20Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha20Rng::seed_from_u64(seed)
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// 2×2 complex matrix, row major.
pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    X,
    Y,
    Z,
    H,
}

impl Gate {
    pub fn matrix(self) -> Matrix2 {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Gate::X => [[ZERO, ONE], [ONE, ZERO]],
            Gate::Y => [[ZERO, -I], [I, ZERO]],
            Gate::Z => [[ONE, ZERO], [ZERO, -ONE]],
            Gate::H => [
                [Complex64::new(r, 0.0), Complex64::new(r, 0.0)],
                [Complex64::new(r, 0.0), Complex64::new(-r, 0.0)],
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// A tensor product of single-qubit Paulis, written like `"ZZI"`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(factors: Vec<Pauli>) -> Self {
        Self(factors)
    }

    pub fn identity(n: usize) -> Self {
        Self(vec![Pauli::I; n])
    }

    /// `kind` on every qubit whose bit is set in `support` (bit 0 ↦ qubit 1).
    pub fn from_support(support: &BitVector, kind: Pauli) -> Self {
        Self(support.iter().map(|b| if b { kind } else { Pauli::I }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[Pauli] {
        &self.0
    }

    /// `self` on the first qubits, identity on `extra` more.
    pub fn pad_right(&self, extra: usize) -> Self {
        let mut f = self.0.clone();
        f.extend(std::iter::repeat_n(Pauli::I, extra));
        Self(f)
    }

    /// Identity on `extra` leading qubits, then `self`.
    pub fn pad_left(&self, extra: usize) -> Self {
        let mut f = vec![Pauli::I; extra];
        f.extend_from_slice(&self.0);
        Self(f)
    }

    // (x mask, z mask, number of Y factors) as index bit masks.
    fn masks(&self) -> (usize, usize, usize) {
        let n = self.0.len();
        let mut x = 0;
        let mut z = 0;
        let mut ny = 0;
        for (i, p) in self.0.iter().enumerate() {
            let bit = 1usize << (n - 1 - i);
            match p {
                Pauli::I => {}
                Pauli::X => x |= bit,
                Pauli::Z => z |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit;
                    ny += 1;
                }
            }
        }
        (x, z, ny)
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Parse(format!("bad Pauli factor {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            let c = match p {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    /// `|0⟩, |1⟩`.
    Computational,
    /// `|+⟩, |−⟩`; a ket string `"01"` then means `|+−⟩`.
    Hadamard,
}

/// A projector onto a span of basis kets: `Σ |k⟩⟨k|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisProjector {
    pub basis: Basis,
    pub kets: Vec<BitVector>,
}

impl BasisProjector {
    pub fn computational(kets: &[&str]) -> Result<Self> {
        Self::parse(Basis::Computational, kets)
    }

    pub fn hadamard(kets: &[&str]) -> Result<Self> {
        Self::parse(Basis::Hadamard, kets)
    }

    fn parse(basis: Basis, kets: &[&str]) -> Result<Self> {
        Ok(Self {
            basis,
            kets: kets.iter().map(|k| k.parse()).collect::<Result<_>>()?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    /// Index of the projector that fired.
    pub outcome: usize,
    pub probability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliOutcome {
    /// +1 or −1.
    pub eigenvalue: i8,
    pub probability: f64,
}

impl PauliOutcome {
    /// Syndrome convention: +1 ↦ 0, −1 ↦ 1.
    pub fn bit(&self) -> bool {
        self.eigenvalue < 0
    }
}

#[derive(Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    fn check_size(n: usize) -> Result<()> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::QubitLimit { n, max: MAX_QUBITS });
        }
        Ok(())
    }

    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Result<Self> {
        Self::check_size(n)?;
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(Self { n, amps })
    }

    pub fn basis(bits: &BitVector) -> Result<Self> {
        let n = bits.len();
        Self::check_size(n)?;
        let mut amps = vec![ZERO; 1 << n];
        amps[bits.to_index()] = ONE;
        Ok(Self { n, amps })
    }

    /// Fails unless `Σ|aᵢ|² = 1` within [`TOL`].
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        Self::check_size(n)?;
        if amps.len() != 1 << n {
            return Err(Error::LengthMismatch {
                left: 1 << n,
                right: amps.len(),
            });
        }
        let s = Self { n, amps };
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(s)
    }

    /// Normalises `Σ cᵢ|kᵢ⟩` built from (ket, coefficient) pairs.
    pub fn superposition(terms: &[(BitVector, Complex64)]) -> Result<Self> {
        let n = terms
            .first()
            .map(|(k, _)| k.len())
            .ok_or_else(|| Error::Dimension("empty superposition".into()))?;
        Self::check_size(n)?;
        let mut amps = vec![ZERO; 1 << n];
        for (k, c) in terms {
            if k.len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: k.len(),
                });
            }
            amps[k.to_index()] += c;
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < TOL {
            return Err(Error::NotNormalized(0.0));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { n, amps })
    }

    /// `|self⟩ ⊗ |other⟩`.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let n = self.n + other.n;
        Self::check_size(n)?;
        let mut amps = vec![ZERO; 1 << n];
        for (i, a) in self.amps.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            for (j, b) in other.amps.iter().enumerate() {
                amps[(i << other.n) | j] = a * b;
            }
        }
        Ok(Self { n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, ket: &BitVector) -> Complex64 {
        self.amps[ket.to_index()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn shift(&self, qubit: usize) -> Result<usize> {
        if qubit == 0 || qubit > self.n {
            return Err(Error::QubitIndex {
                index: qubit,
                n: self.n,
            });
        }
        Ok(self.n - qubit)
    }

    /// Applies an arbitrary 2×2 matrix to one qubit.
    pub fn apply_matrix(&mut self, qubit: usize, m: &Matrix2) -> Result<()> {
        let bit = 1usize << self.shift(qubit)?;
        let m = *m;
        parallel::for_each_chunk(&mut self.amps, bit << 1, |chunk| {
            let (lo, hi) = chunk.split_at_mut(bit);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a0, *a1);
                *a0 = m[0][0] * x + m[0][1] * y;
                *a1 = m[1][0] * x + m[1][1] * y;
            }
        });
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: Gate, qubit: usize) -> Result<()> {
        self.apply_matrix(qubit, &gate.matrix())
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        let c = 1usize << self.shift(control)?;
        let t = 1usize << self.shift(target)?;
        if c == t {
            return Err(Error::Dimension("CNOT control equals target".into()));
        }
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
        Ok(())
    }

    /// `P|ψ⟩` without modifying `self`.
    pub fn pauli_image(&self, p: &PauliString) -> Result<StateVector> {
        if p.len() != self.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: p.len(),
            });
        }
        // P = i^{#Y} · X^x · Z^z, so (Pψ)[k] = i^{#Y} (−1)^{|j∧z|} ψ[j] with j = k ⊕ x.
        let (x, z, ny) = p.masks();
        let phase = [ONE, I, -ONE, -I][ny % 4];
        let src = &self.amps;
        let mut out = vec![ZERO; src.len()];
        parallel::fill(&mut out, |k| {
            let j = k ^ x;
            let sign = if (j & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            phase * src[j] * sign
        });
        Ok(Self {
            n: self.n,
            amps: out,
        })
    }

    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        *self = self.pauli_image(p)?;
        Ok(())
    }

    /// `H^{⊗n}` as an in-place Walsh–Hadamard transform.
    pub fn hadamard_all(&mut self) {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let len = self.amps.len();
        let mut h = 1;
        while h < len {
            parallel::for_each_chunk(&mut self.amps, h << 1, |chunk| {
                let (lo, hi) = chunk.split_at_mut(h);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = (x + y) * r;
                    *b = (x - y) * r;
                }
            });
            h <<= 1;
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    /// Equal up to a global phase, within [`TOL`].
    pub fn same_ray(&self, other: &StateVector) -> Result<bool> {
        Ok((self.fidelity(other)? - 1.0).abs() <= TOL)
    }

    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        Ok(self.inner(&self.pauli_image(p)?)?.re)
    }

    fn validate_projectors(&self, projectors: &[BasisProjector]) -> Result<Basis> {
        let basis = projectors
            .first()
            .map(|p| p.basis)
            .ok_or_else(|| Error::InvalidProjectors("no projectors".into()))?;
        if projectors.iter().any(|p| p.basis != basis) {
            return Err(Error::InvalidProjectors(
                "projectors must share one basis".into(),
            ));
        }
        let mut seen = vec![false; self.amps.len()];
        for p in projectors {
            for k in &p.kets {
                if k.len() != self.n {
                    return Err(Error::InvalidProjectors(format!(
                        "ket {k} has {} qubits, state has {}",
                        k.len(),
                        self.n
                    )));
                }
                let i = k.to_index();
                if seen[i] {
                    return Err(Error::InvalidProjectors(format!(
                        "ket {k} appears twice; projectors are not orthogonal"
                    )));
                }
                seen[i] = true;
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::InvalidProjectors(
                "projectors do not sum to the identity".into(),
            ));
        }
        Ok(basis)
    }

    /// Measures with a complete set of orthogonal basis projectors and
    /// collapses onto the outcome.
    pub fn measure_projective<R: Rng + ?Sized>(
        &mut self,
        projectors: &[BasisProjector],
        rng: &mut R,
    ) -> Result<Measurement> {
        let basis = self.validate_projectors(projectors)?;
        let mut work = self.clone();
        if basis == Basis::Hadamard {
            work.hadamard_all();
        }
        let probs: Vec<f64> = projectors
            .iter()
            .map(|p| p.kets.iter().map(|k| work.amps[k.to_index()].norm_sqr()).sum())
            .collect();
        let outcome = sample(&probs, rng.gen::<f64>());
        let p = probs[outcome];
        let mut collapsed = vec![ZERO; work.amps.len()];
        let scale = 1.0 / p.sqrt();
        for k in &projectors[outcome].kets {
            let i = k.to_index();
            collapsed[i] = work.amps[i] * scale;
        }
        work.amps = collapsed;
        if basis == Basis::Hadamard {
            work.hadamard_all();
        }
        *self = work;
        Ok(Measurement {
            outcome,
            probability: p,
        })
    }

    /// Measures the observable `P` with projectors `(I ± P)/2`.
    pub fn measure_pauli<R: Rng + ?Sized>(
        &mut self,
        p: &PauliString,
        rng: &mut R,
    ) -> Result<PauliOutcome> {
        let image = self.pauli_image(p)?;
        let plus: Vec<Complex64> = self
            .amps
            .iter()
            .zip(&image.amps)
            .map(|(a, b)| (a + b) * 0.5)
            .collect();
        let p_plus = plus.iter().map(|a| a.norm_sqr()).sum::<f64>().clamp(0.0, 1.0);
        let r = rng.gen::<f64>();
        let (eigenvalue, probability) = if sample(&[p_plus, 1.0 - p_plus], r) == 0 {
            (1, p_plus)
        } else {
            (-1, 1.0 - p_plus)
        };
        let scale = 1.0 / probability.sqrt();
        for (k, a) in self.amps.iter_mut().enumerate() {
            let part = if eigenvalue > 0 { plus[k] } else { *a - plus[k] };
            *a = part * scale;
        }
        Ok(PauliOutcome {
            eigenvalue,
            probability,
        })
    }

    /// Measures every qubit in the Z basis; the state collapses onto the
    /// observed ket (its phase is kept).
    pub fn measure_all_z<R: Rng + ?Sized>(&mut self, rng: &mut R) -> BitVector {
        let probs: Vec<f64> = self.amps.iter().map(|a| a.norm_sqr()).collect();
        let k = sample(&probs, rng.gen::<f64>());
        let kept = self.amps[k] / self.amps[k].norm();
        self.amps.iter_mut().for_each(|a| *a = ZERO);
        self.amps[k] = kept;
        BitVector::from_index(k, self.n)
    }

    /// Nonzero amplitudes as `[basis, re, im]` triples.
    pub fn debug_dump(&self) -> Vec<(String, f64, f64)> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > DUMP_CUTOFF)
            .map(|(i, a)| (BitVector::from_index(i, self.n).to_string(), a.re, a.im))
            .collect()
    }

    pub fn debug_json(&self) -> serde_json::Value {
        serde_json::to_value(self.debug_dump()).expect("plain data serialises")
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StateVector")
            .field("n", &self.n)
            .field("amplitudes", &self.debug_dump())
            .finish()
    }
}

// Picks the first index whose cumulative probability exceeds r, skipping
// outcomes with zero weight so rounding never selects an impossible branch.
fn sample(probs: &[f64], r: f64) -> usize {
    let total: f64 = probs.iter().sum();
    let target = r * total;
    let mut acc = 0.0;
    let mut last_possible = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p <= PROB_FLOOR {
            continue;
        }
        last_possible = i;
        acc += p;
        if target < acc {
            return i;
        }
    }
    last_possible
}
