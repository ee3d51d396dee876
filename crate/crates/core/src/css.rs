//! CSS codes built from nested classical codes `C2 ⊂ C1`.
//!
//! Codewords are `|ψ_{v,x,z}⟩ = |C2|^{-1/2} Σ_{w∈C2} (−1)^{w·z} |v+w+x⟩`.
//! Bit-flip syndromes come from Z-strings on the rows of `H1` (the check
//! matrix of C1); phase-flip syndromes from X-strings on the rows of `H2`, the
//! check matrix of C2⊥, which is the generator of C2. An eigenvalue of +1
//! reads as syndrome bit 0 and −1 as 1.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codes::{CosetQuotient, DecodeStatus, LinearCode, SyndromeTable};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::parallel;
use crate::qsim::{Gate, Pauli, PauliString, StateVector, TOL};

/// Fidelity a state must reach to be identified as a given codeword.
pub const IDENTIFY_FIDELITY: f64 = 1.0 - 1e-6;

/// Largest block length for which the basis identities are checked.
pub const MAX_VERIFY_N: usize = 10;

/// The shifts `x` (bit-flip) and `z` (phase-flip) selecting one of the
/// equivalent codes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodewordParams {
    pub x: BitVector,
    pub z: BitVector,
}

impl CodewordParams {
    pub fn zero(n: usize) -> Self {
        Self {
            x: BitVector::zeros(n),
            z: BitVector::zeros(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CssCode {
    c1: LinearCode,
    c2: LinearCode,
    c2_dual: LinearCode,
    quotient: CosetQuotient,
    t: usize,
    bit_table: SyndromeTable,
    phase_table: SyndromeTable,
}

impl CssCode {
    /// Requires `C2 ⊊ C1` and `t` within the correction capacity of both C1
    /// and C2⊥.
    pub fn new(c1: LinearCode, c2: LinearCode, t: usize) -> Result<Self> {
        let quotient = CosetQuotient::new(&c1, &c2)?;
        let c2_dual = c2.dual();
        let t1 = c1.capacities()?.t;
        let t2 = c2_dual.capacities()?.t;
        if t > t1.min(t2) {
            return Err(Error::InsufficientCapacity {
                t,
                c1: t1,
                c2_dual: t2,
            });
        }
        let bit_table = SyndromeTable::build(&c1, t)?;
        let phase_table = SyndromeTable::build(&c2_dual, t)?;
        Ok(Self {
            c1,
            c2,
            c2_dual,
            quotient,
            t,
            bit_table,
            phase_table,
        })
    }

    /// Like [`CssCode::new`] with the largest `t` both codes support.
    pub fn with_full_capacity(c1: LinearCode, c2: LinearCode) -> Result<Self> {
        let t = c1.capacities()?.t.min(c2.dual().capacities()?.t);
        Self::new(c1, c2, t)
    }

    pub fn n(&self) -> usize {
        self.c1.n()
    }

    /// Encoded qubits, `k1 − k2`.
    pub fn k(&self) -> usize {
        self.quotient.key_len()
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn c1(&self) -> &LinearCode {
        &self.c1
    }

    pub fn c2(&self) -> &LinearCode {
        &self.c2
    }

    pub fn c2_dual(&self) -> &LinearCode {
        &self.c2_dual
    }

    pub fn quotient(&self) -> &CosetQuotient {
        &self.quotient
    }

    pub fn h1(&self) -> &BitMatrix {
        self.c1.check()
    }

    pub fn h2(&self) -> &BitMatrix {
        self.c2_dual.check()
    }

    pub fn bit_table(&self) -> &SyndromeTable {
        &self.bit_table
    }

    pub fn phase_table(&self) -> &SyndromeTable {
        &self.phase_table
    }

    fn check_params(&self, p: &CodewordParams) -> Result<()> {
        for v in [&p.x, &p.z] {
            if v.len() != self.n() {
                return Err(Error::LengthMismatch {
                    left: self.n(),
                    right: v.len(),
                });
            }
        }
        Ok(())
    }

    /// `|ψ_{v,x,z}⟩` for `v ∈ C1`.
    pub fn codeword(&self, v: &BitVector, p: &CodewordParams) -> Result<StateVector> {
        self.check_params(p)?;
        if !self.c1.contains(v)? {
            return Err(Error::NotInCode(v.to_string()));
        }
        let shift = v.add(&p.x)?;
        let terms = self
            .c2
            .codewords()?
            .into_iter()
            .map(|w| {
                let sign = if w.dot(&p.z)? { -1.0 } else { 1.0 };
                Ok((w.add(&shift)?, Complex64::new(sign, 0.0)))
            })
            .collect::<Result<Vec<_>>>()?;
        StateVector::superposition(&terms)
    }

    /// The codeword for coset label `key` (see [`CosetQuotient`]).
    pub fn codeword_for_key(&self, key: &BitVector, p: &CodewordParams) -> Result<StateVector> {
        self.codeword(&self.quotient.representative(key)?, p)
    }

    /// Measures the Z-string of every `H1` row, in row order.
    pub fn bit_syndrome<R: Rng + ?Sized>(
        &self,
        state: &mut StateVector,
        rng: &mut R,
    ) -> Result<BitVector> {
        measure_rows(state, self.h1(), Pauli::Z, rng)
    }

    /// Measures the X-string of every `H2` row, in row order.
    pub fn phase_syndrome<R: Rng + ?Sized>(
        &self,
        state: &mut StateVector,
        rng: &mut R,
    ) -> Result<BitVector> {
        measure_rows(state, self.h2(), Pauli::X, rng)
    }

    /// Bit flips first, then phase flips, with phase syndromes read from
    /// X-strings.
    pub fn correct<R: Rng + ?Sized>(
        &self,
        state: &StateVector,
        p: &CodewordParams,
        rng: &mut R,
    ) -> Result<CssCorrection> {
        self.correct_via(state, p, PhaseRoute::PauliX, rng)
    }

    pub fn correct_via<R: Rng + ?Sized>(
        &self,
        state: &StateVector,
        p: &CodewordParams,
        route: PhaseRoute,
        rng: &mut R,
    ) -> Result<CssCorrection> {
        self.check_params(p)?;
        if state.n_qubits() != self.n() {
            return Err(Error::LengthMismatch {
                left: self.n(),
                right: state.n_qubits(),
            });
        }
        let mut s = state.clone();

        let bit_syndrome = self.bit_syndrome(&mut s, rng)?;
        let shifted = bit_syndrome.add(&self.h1().mul_vec(&p.x)?)?;
        let e1 = self.bit_table.lookup(&shifted).cloned();
        if let Some(e) = &e1 {
            apply_on_support(&mut s, e, Gate::X)?;
        }

        let phase_syndrome = match route {
            PhaseRoute::PauliX => self.phase_syndrome(&mut s, rng)?,
            PhaseRoute::Hadamard => {
                s.hadamard_all();
                measure_rows(&mut s, self.h2(), Pauli::Z, rng)?
            }
        };
        let shifted = phase_syndrome.add(&self.h2().mul_vec(&p.z)?)?;
        let e2 = self.phase_table.lookup(&shifted).cloned();
        match route {
            PhaseRoute::PauliX => {
                if let Some(e) = &e2 {
                    apply_on_support(&mut s, e, Gate::Z)?;
                }
            }
            PhaseRoute::Hadamard => {
                if let Some(e) = &e2 {
                    apply_on_support(&mut s, e, Gate::X)?;
                }
                s.hadamard_all();
            }
        }

        let status = if e1.is_some() && e2.is_some() {
            DecodeStatus::Ok
        } else {
            DecodeStatus::DetectedUncorrectable
        };
        Ok(CssCorrection {
            state: s,
            bit_syndrome,
            phase_syndrome,
            e1,
            e2,
            status,
        })
    }

    /// The coset label of a (corrected) codeword, by overlap with every
    /// `|ψ_{v,x,z}⟩`.
    pub fn identify(&self, state: &StateVector, p: &CodewordParams) -> Result<BitVector> {
        for (key, rep) in self.quotient.representatives()? {
            if self.codeword(&rep, p)?.fidelity(state)? >= IDENTIFY_FIDELITY {
                return Ok(key);
            }
        }
        Err(Error::NotACodeword)
    }

    /// One `x` per coset of C1 in F₂ⁿ: the minimal solution for each syndrome.
    pub fn default_x_set(&self) -> Result<Vec<BitVector>> {
        let h1 = self.h1();
        BitVector::all(h1.n_rows())
            .map(|s| h1.solve_particular(&s))
            .collect()
    }

    /// One `z` per coset of C2⊥ in F₂ⁿ.
    pub fn default_z_set(&self) -> Result<Vec<BitVector>> {
        let h2 = self.h2();
        BitVector::all(h2.n_rows())
            .map(|s| h2.solve_particular(&s))
            .collect()
    }

    /// Checks that the `|ψ_{v,x,z}⟩` over all cosets `v` and the given
    /// `x`/`z` sets form an orthonormal basis of the n-qubit space, that
    /// `⟨ψ_{v,x,z}|ψ_{v,x,0}⟩` is 1 exactly when `z ∈ C2⊥`, that
    /// `Σ|ψ⟩⟨ψ| = I`, and that `Σ|ψ⟩|ψ⟩ = Σ_j |j⟩|j⟩`.
    pub fn verify_basis_identities(
        &self,
        xs: &[BitVector],
        zs: &[BitVector],
    ) -> Result<BasisReport> {
        let n = self.n();
        if n > MAX_VERIFY_N {
            return Err(Error::InvalidParameterSet(format!(
                "basis check limited to n ≤ {MAX_VERIFY_N}"
            )));
        }
        check_coset_set("x", xs, self.h1(), 1 << (n - self.c1.k()))?;
        check_coset_set("z", zs, self.h2(), 1 << self.c2.k())?;

        let reps = self.quotient.representatives()?;
        let mut states = Vec::new();
        for (_, v) in &reps {
            for x in xs {
                for z in zs {
                    let p = CodewordParams {
                        x: x.clone(),
                        z: z.clone(),
                    };
                    states.push(self.codeword(v, &p)?);
                }
            }
        }
        let dim = 1usize << n;
        if states.len() != dim {
            return Err(Error::IdentityViolated(format!(
                "{} states for a {dim}-dimensional space",
                states.len()
            )));
        }

        let gram_max_dev = parallel::map(&(0..dim).collect::<Vec<_>>(), |&i| {
            (0..dim)
                .map(|j| {
                    let want = if i == j { 1.0 } else { 0.0 };
                    (states[i].inner(&states[j]).expect("same size") - want).norm()
                })
                .fold(0.0, f64::max)
        })
        .into_iter()
        .fold(0.0, f64::max);

        let all_z: Vec<BitVector> = BitVector::all(n).collect();
        let mut branch_max_dev: f64 = 0.0;
        for (_, v) in &reps {
            for x in xs {
                let base = self.codeword(
                    v,
                    &CodewordParams {
                        x: x.clone(),
                        z: BitVector::zeros(n),
                    },
                )?;
                let devs = parallel::map(&all_z, |z| -> Result<f64> {
                    let s = self.codeword(
                        v,
                        &CodewordParams {
                            x: x.clone(),
                            z: z.clone(),
                        },
                    )?;
                    let want = if self.c2_dual.contains(z)? { 1.0 } else { 0.0 };
                    Ok((s.inner(&base)? - want).norm())
                });
                for d in devs {
                    branch_max_dev = branch_max_dev.max(d?);
                }
            }
        }

        let mut completeness_max_dev: f64 = 0.0;
        let mut bell_max_dev: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let mut outer = Complex64::new(0.0, 0.0);
                let mut pair = Complex64::new(0.0, 0.0);
                for s in &states {
                    let a = s.amplitudes();
                    outer += a[i] * a[j].conj();
                    pair += a[i] * a[j];
                }
                let want = if i == j { 1.0 } else { 0.0 };
                completeness_max_dev = completeness_max_dev.max((outer - want).norm());
                bell_max_dev = bell_max_dev.max((pair - want).norm());
            }
        }

        let report = BasisReport {
            n_states: states.len(),
            gram_max_dev,
            branch_max_dev,
            completeness_max_dev,
            bell_max_dev,
        };
        for (name, dev) in [
            ("orthonormality", gram_max_dev),
            ("z-branch overlap", branch_max_dev),
            ("resolution of identity", completeness_max_dev),
            ("maximally entangled expansion", bell_max_dev),
        ] {
            if dev > TOL {
                return Err(Error::IdentityViolated(format!("{name}: deviation {dev:e}")));
            }
        }
        Ok(report)
    }
}

fn check_coset_set(name: &str, set: &[BitVector], check: &BitMatrix, want: usize) -> Result<()> {
    if set.len() != want {
        return Err(Error::InvalidParameterSet(format!(
            "{name} set has {} entries, need {want}",
            set.len()
        )));
    }
    let mut seen = std::collections::HashSet::new();
    for v in set {
        if !seen.insert(check.mul_vec(v)?) {
            return Err(Error::InvalidParameterSet(format!(
                "{name} set contains two members of the same coset"
            )));
        }
    }
    Ok(())
}

/// How phase-flip syndromes are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseRoute {
    /// Measure X-strings directly.
    PauliX,
    /// Conjugate by `H^{⊗n}` and measure Z-strings; a cross-check.
    Hadamard,
}

#[derive(Debug, Clone)]
pub struct CssCorrection {
    pub state: StateVector,
    pub bit_syndrome: BitVector,
    pub phase_syndrome: BitVector,
    /// Bit-flip pattern that was undone, if its syndrome was in the table.
    pub e1: Option<BitVector>,
    pub e2: Option<BitVector>,
    pub status: DecodeStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisReport {
    pub n_states: usize,
    pub gram_max_dev: f64,
    pub branch_max_dev: f64,
    pub completeness_max_dev: f64,
    pub bell_max_dev: f64,
}

/// The Pauli string with `kind` wherever `row` has a one.
pub fn pauli_row(row: &BitVector, kind: Pauli) -> PauliString {
    PauliString::from_support(row, kind)
}

fn measure_rows<R: Rng + ?Sized>(
    state: &mut StateVector,
    rows: &BitMatrix,
    kind: Pauli,
    rng: &mut R,
) -> Result<BitVector> {
    let bits = rows
        .rows()
        .iter()
        .map(|r| Ok(state.measure_pauli(&pauli_row(r, kind), rng)?.bit()))
        .collect::<Result<Vec<_>>>()?;
    Ok(BitVector::from_bools(&bits))
}

/// `gate` on every qubit where `support` has a one (bit 0 ↦ qubit 1).
pub fn apply_on_support(state: &mut StateVector, support: &BitVector, gate: Gate) -> Result<()> {
    for i in support.ones() {
        state.apply_gate(gate, i + 1)?;
    }
    Ok(())
}

/// Applies `X^{e1} Z^{e2}`: phase flips first, then bit flips.
pub fn inject(state: &StateVector, e1: &BitVector, e2: &BitVector) -> Result<StateVector> {
    let mut s = state.clone();
    apply_on_support(&mut s, e2, Gate::Z)?;
    apply_on_support(&mut s, e1, Gate::X)?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::named::{hamming74, parity4};
    use crate::qsim::rng_from_seed;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn h2_is_generator_of_c2() {
        let h = hamming74();
        let code = CssCode::new(h.clone(), h.dual(), 1).unwrap();
        assert_eq!(code.h2(), h.dual().generator());
        assert_eq!(code.h1(), h.check());
    }

    #[test]
    fn capacity_enforced() {
        let p = parity4();
        assert!(matches!(
            CssCode::new(p.clone(), p.dual(), 1),
            Err(Error::InsufficientCapacity { .. })
        ));
        assert!(CssCode::new(p.clone(), p.dual(), 0).is_ok());
    }

    #[test]
    fn codeword_requires_c1_member() {
        let h = hamming74();
        let code = CssCode::new(h.clone(), h.dual(), 1).unwrap();
        assert!(matches!(
            code.codeword(&bv("1000000"), &CodewordParams::zero(7)),
            Err(Error::NotInCode(_))
        ));
    }

    #[test]
    fn routes_agree() {
        let h = hamming74();
        let code = CssCode::new(h.clone(), h.dual(), 1).unwrap();
        let p = CodewordParams {
            x: bv("0010000"),
            z: bv("0000100"),
        };
        let clean = code.codeword(&bv("0001011"), &p).unwrap();
        let dirty = inject(&clean, &bv("0100000"), &bv("0000001")).unwrap();
        let a = code
            .correct_via(&dirty, &p, PhaseRoute::PauliX, &mut rng_from_seed(5))
            .unwrap();
        let b = code
            .correct_via(&dirty, &p, PhaseRoute::Hadamard, &mut rng_from_seed(5))
            .unwrap();
        assert_eq!(a.e1, b.e1);
        assert_eq!(a.e2, b.e2);
        assert!(a.state.same_ray(&b.state).unwrap());
        assert!(a.state.same_ray(&clean).unwrap());
    }

    #[test]
    fn bad_parameter_sets_rejected() {
        let p = parity4();
        let code = CssCode::new(p.clone(), p.dual(), 0).unwrap();
        let dup = [bv("0000"), bv("0011")];
        let zs = [bv("0000"), bv("0001")];
        assert!(matches!(
            code.verify_basis_identities(&dup, &zs),
            Err(Error::InvalidParameterSet(_))
        ));
    }
}
