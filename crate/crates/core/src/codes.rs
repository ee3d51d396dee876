//! Classical binary linear codes: generator/check pairs, syndrome decoding,
//! cosets and the quotient `C1/C2` used to read off key bits.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

/// Largest code dimension for which codewords are enumerated.
pub const MAX_ENUMERATION_K: usize = 24;

/// An `[n, k]` binary linear code, kept as a generator `G` (k × n) and a check
/// matrix `H` ((n−k) × n) with `H·Gᵀ = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CodeMatrices", into = "CodeMatrices")]
pub struct LinearCode {
    g: BitMatrix,
    h: BitMatrix,
}

/// Serialised form of a [`LinearCode`]; validated on the way back in.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeMatrices {
    pub generator: BitMatrix,
    pub check: BitMatrix,
}

impl From<LinearCode> for CodeMatrices {
    fn from(c: LinearCode) -> Self {
        Self {
            generator: c.g,
            check: c.h,
        }
    }
}

impl TryFrom<CodeMatrices> for LinearCode {
    type Error = Error;

    fn try_from(m: CodeMatrices) -> Result<Self> {
        Self::from_generator_and_check(m.generator, m.check)
    }
}

/// Minimum distance and what it buys: detect `u = d−1`, correct `t = ⌊(d−1)/2⌋`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Capacities {
    pub d: usize,
    pub u: usize,
    pub t: usize,
}

impl LinearCode {
    /// Derives `H` from the null space of `G`.
    pub fn from_generator(g: BitMatrix) -> Result<Self> {
        Self::check_generator(&g)?;
        let h = BitMatrix::from_rows(g.nullspace_basis())?;
        Self::from_generator_and_check(g, h)
    }

    /// Derives `G` from the null space of `H`.
    pub fn from_check(h: BitMatrix) -> Result<Self> {
        if h.rank() != h.n_rows() {
            return Err(Error::DependentRows);
        }
        let basis = h.nullspace_basis();
        if basis.is_empty() {
            return Err(Error::InvalidDimension {
                n: h.n_cols(),
                k: 0,
            });
        }
        let g = BitMatrix::from_rows(basis)?;
        Self::from_generator_and_check(g, h)
    }

    /// Uses the supplied check matrix as-is, after validating it.
    pub fn from_generator_and_check(g: BitMatrix, h: BitMatrix) -> Result<Self> {
        Self::check_generator(&g)?;
        if h.n_cols() != g.n_cols() {
            return Err(Error::LengthMismatch {
                left: g.n_cols(),
                right: h.n_cols(),
            });
        }
        if h.rank() != h.n_rows() {
            return Err(Error::DependentRows);
        }
        if g.n_rows() + h.n_rows() != g.n_cols() {
            return Err(Error::Dimension(format!(
                "{} generator rows and {} check rows do not add up to n={}",
                g.n_rows(),
                h.n_rows(),
                g.n_cols()
            )));
        }
        if !h.mul(&g.transpose())?.is_zero() {
            return Err(Error::InvalidCheckMatrix);
        }
        Ok(Self { g, h })
    }

    fn check_generator(g: &BitMatrix) -> Result<()> {
        if g.rank() != g.n_rows() {
            return Err(Error::DependentRows);
        }
        if g.n_rows() >= g.n_cols() {
            return Err(Error::InvalidDimension {
                n: g.n_cols(),
                k: g.n_rows(),
            });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.g.n_cols()
    }

    pub fn k(&self) -> usize {
        self.g.n_rows()
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.g
    }

    pub fn check(&self) -> &BitMatrix {
        &self.h
    }

    /// The dual code: generator and check matrix swap roles, so
    /// `c.dual().dual() == c` exactly.
    pub fn dual(&self) -> Self {
        Self {
            g: self.h.clone(),
            h: self.g.clone(),
        }
    }

    /// `m·G` for a k-bit message.
    pub fn encode(&self, m: &BitVector) -> Result<BitVector> {
        self.g.vec_mul(m)
    }

    pub fn syndrome(&self, r: &BitVector) -> Result<BitVector> {
        self.h.mul_vec(r)
    }

    pub fn contains(&self, w: &BitVector) -> Result<bool> {
        Ok(self.syndrome(w)?.is_zero())
    }

    /// Whether every codeword of `self` is a codeword of `other`.
    pub fn is_subcode_of(&self, other: &LinearCode) -> Result<bool> {
        if self.n() != other.n() {
            return Ok(false);
        }
        for row in self.g.rows() {
            if !other.contains(row)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn guard_enumeration(&self) -> Result<()> {
        if self.k() > MAX_ENUMERATION_K {
            return Err(Error::EnumerationTooLarge {
                k: self.k(),
                limit: MAX_ENUMERATION_K,
            });
        }
        Ok(())
    }

    /// All `2^k` codewords, in message counting order.
    pub fn codewords(&self) -> Result<Vec<BitVector>> {
        self.guard_enumeration()?;
        BitVector::all(self.k()).map(|m| self.encode(&m)).collect()
    }

    pub fn capacities(&self) -> Result<Capacities> {
        let d = self
            .codewords()?
            .iter()
            .filter(|w| !w.is_zero())
            .map(BitVector::weight)
            .min()
            .expect("k ≥ 1 guarantees a nonzero codeword");
        Ok(Capacities {
            d,
            u: d - 1,
            t: (d - 1) / 2,
        })
    }

    /// `x + C`, sorted.
    pub fn coset(&self, x: &BitVector) -> Result<Vec<BitVector>> {
        let set = self
            .codewords()?
            .iter()
            .map(|w| w.add(x))
            .collect::<Result<BTreeSet<_>>>()?;
        Ok(set.into_iter().collect())
    }

    /// `Σ_{w∈C} (−1)^{w·u}`: `|C|` when `u ∈ C⊥`, zero otherwise.
    pub fn char_sum(&self, u: &BitVector) -> Result<i64> {
        self.codewords()?.iter().try_fold(0i64, |acc, w| {
            Ok(acc + if w.dot(u)? { -1 } else { 1 })
        })
    }
}

/// Every error pattern of weight `0..=t_max` mapped to its syndrome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyndromeTable {
    t_max: usize,
    entries: Vec<(BitVector, BitVector)>,
    lookup: HashMap<BitVector, usize>,
}

/// Outcome of a table decode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeStatus {
    Ok,
    DetectedUncorrectable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decoded {
    /// Corrected word, or the input unchanged when the syndrome is unknown.
    pub codeword: BitVector,
    pub syndrome: BitVector,
    pub error: Option<BitVector>,
    pub status: DecodeStatus,
}

impl SyndromeTable {
    /// Fails if two errors of weight ≤ `t_max` share a syndrome.
    pub fn build(code: &LinearCode, t_max: usize) -> Result<Self> {
        let n = code.n();
        let mut entries: Vec<(BitVector, BitVector)> = Vec::new();
        let mut lookup: HashMap<BitVector, usize> = HashMap::new();
        for w in 0..=t_max.min(n) {
            for positions in combinations(n, w) {
                let mut e = BitVector::zeros(n);
                for p in positions {
                    e.set(p, true);
                }
                let s = code.syndrome(&e)?;
                if let Some(&i) = lookup.get(&s) {
                    let first = &entries[i].0;
                    return Err(Error::SyndromeCollision {
                        syndrome: s.to_string(),
                        first: first.to_string(),
                        second: e.to_string(),
                    });
                }
                lookup.insert(s.clone(), entries.len());
                entries.push((e, s));
            }
        }
        Ok(Self {
            t_max,
            entries,
            lookup,
        })
    }

    pub fn t_max(&self) -> usize {
        self.t_max
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(error, syndrome)` pairs by increasing weight, then position.
    pub fn entries(&self) -> &[(BitVector, BitVector)] {
        &self.entries
    }

    pub fn lookup(&self, syndrome: &BitVector) -> Option<&BitVector> {
        self.lookup.get(syndrome).map(|&i| &self.entries[i].0)
    }

    pub fn decode(&self, code: &LinearCode, r: &BitVector) -> Result<Decoded> {
        let syndrome = code.syndrome(r)?;
        Ok(match self.lookup(&syndrome) {
            Some(e) => Decoded {
                codeword: r.add(e)?,
                syndrome,
                error: Some(e.clone()),
                status: DecodeStatus::Ok,
            },
            None => Decoded {
                codeword: r.clone(),
                syndrome,
                error: None,
                status: DecodeStatus::DetectedUncorrectable,
            },
        })
    }
}

/// Index sets of size `w` from `0..n`, lexicographic.
fn combinations(n: usize, w: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, w: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == w {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, w, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, w, &mut Vec::new(), &mut out);
    out
}

/// `C1/C2` with a fixed basis: the rows of `G2` followed by extension rows
/// picked greedily from `G1`. Coordinates on the extension rows label cosets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetQuotient {
    outer: LinearCode,
    inner_dim: usize,
    basis: BitMatrix,
    extension: BitMatrix,
}

impl CosetQuotient {
    pub fn new(c1: &LinearCode, c2: &LinearCode) -> Result<Self> {
        if c1.n() != c2.n() || !c2.is_subcode_of(c1)? {
            return Err(Error::NotSubcode);
        }
        if c1.k() <= c2.k() {
            return Err(Error::ImproperNesting {
                k1: c1.k(),
                k2: c2.k(),
            });
        }
        let mut basis = c2.generator().clone();
        let mut extension = Vec::new();
        for row in c1.generator().rows() {
            if basis.n_rows() == c1.k() {
                break;
            }
            let candidate = basis.stack(&BitMatrix::from_rows(vec![row.clone()])?)?;
            if candidate.rank() == candidate.n_rows() {
                basis = candidate;
                extension.push(row.clone());
            }
        }
        Ok(Self {
            outer: c1.clone(),
            inner_dim: c2.k(),
            basis,
            extension: BitMatrix::from_rows(extension)?,
        })
    }

    /// Number of key bits, `k1 − k2`.
    pub fn key_len(&self) -> usize {
        self.extension.n_rows()
    }

    pub fn extension_rows(&self) -> &BitMatrix {
        &self.extension
    }

    /// The coset label of `u ∈ C1`.
    pub fn key_from_coset(&self, u: &BitVector) -> Result<BitVector> {
        if !self.outer.contains(u)? {
            return Err(Error::NotInCode(u.to_string()));
        }
        let coeffs = self.basis.transpose().solve_particular(u)?;
        Ok(coeffs.slice(self.inner_dim, coeffs.len()))
    }

    /// The canonical representative `Σ keyᵢ·extᵢ` of a coset.
    pub fn representative(&self, key: &BitVector) -> Result<BitVector> {
        self.extension.vec_mul(key)
    }

    /// Every `(label, representative)` pair, labels in counting order.
    pub fn representatives(&self) -> Result<Vec<(BitVector, BitVector)>> {
        if self.key_len() > MAX_ENUMERATION_K {
            return Err(Error::EnumerationTooLarge {
                k: self.key_len(),
                limit: MAX_ENUMERATION_K,
            });
        }
        BitVector::all(self.key_len())
            .map(|key| {
                let rep = self.representative(&key)?;
                Ok((key, rep))
            })
            .collect()
    }
}

/// The small codes used throughout the examples.
pub mod named {
    use super::*;

    fn matrix(rows: &[&str]) -> BitMatrix {
        BitMatrix::from_rows(rows.iter().map(|r| r.parse().expect("static bits")).collect())
            .expect("static matrix")
    }

    /// The [4,3] even-weight code.
    pub fn parity4() -> LinearCode {
        LinearCode::from_generator(matrix(&["1001", "0101", "0011"])).expect("parity code")
    }

    /// The [7,4] Hamming code, systematic generator.
    pub fn hamming74() -> LinearCode {
        LinearCode::from_generator(matrix(&["1000110", "0100111", "0010101", "0001011"]))
            .expect("hamming code")
    }

    /// The [3,1] repetition code. Its check rows are the neighbouring pairs
    /// `110, 011`, i.e. the Z₁Z₂ / Z₂Z₃ observables, rather than the
    /// free-column null space basis.
    pub fn rep3() -> LinearCode {
        LinearCode::from_generator_and_check(matrix(&["111"]), matrix(&["110", "011"]))
            .expect("repetition code")
    }

    pub const NAMES: [&str; 3] = ["parity4", "hamming74", "rep3"];

    pub fn by_name(name: &str) -> Result<LinearCode> {
        match name.to_ascii_lowercase().as_str() {
            "parity4" | "parity" => Ok(parity4()),
            "hamming74" | "hamming" => Ok(hamming74()),
            "rep3" | "repetition" => Ok(rep3()),
            _ => Err(Error::UnknownCode(name.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn serde_roundtrip_validates() {
        let json = serde_json::to_string(&hamming74()).unwrap();
        assert_eq!(serde_json::from_str::<LinearCode>(&json).unwrap(), hamming74());
        let bad = r#"{"generator":["111"],"check":["100","011"]}"#;
        assert!(serde_json::from_str::<LinearCode>(bad).is_err());
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(7, 2).len(), 21);
        assert_eq!(combinations(4, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn dependent_generator_rejected() {
        let g = BitMatrix::parse("110\n011\n101").unwrap();
        assert_eq!(LinearCode::from_generator(g), Err(Error::DependentRows));
    }

    #[test]
    fn bad_check_matrix_rejected() {
        let g = BitMatrix::parse("111").unwrap();
        let h = BitMatrix::parse("100\n011").unwrap();
        assert_eq!(
            LinearCode::from_generator_and_check(g, h),
            Err(Error::InvalidCheckMatrix)
        );
    }

    #[test]
    fn from_check_recovers_code() {
        let c = LinearCode::from_check(hamming74().check().clone()).unwrap();
        let mut a = c.codewords().unwrap();
        let mut b = hamming74().codewords().unwrap();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn decode_reports_unknown_syndrome() {
        let c = rep3();
        let table = SyndromeTable::build(&c, 0).unwrap();
        let d = table.decode(&c, &bv("100")).unwrap();
        assert_eq!(d.status, DecodeStatus::DetectedUncorrectable);
        assert_eq!(d.codeword, bv("100"));
    }

    #[test]
    fn quotient_rejects_bad_nesting() {
        let h = hamming74();
        assert_eq!(
            CosetQuotient::new(&h, &h).unwrap_err(),
            Error::ImproperNesting { k1: 4, k2: 4 }
        );
        assert_eq!(
            CosetQuotient::new(&h.dual(), &h).unwrap_err(),
            Error::NotSubcode
        );
    }

    #[test]
    fn key_rejects_non_codeword() {
        let q = CosetQuotient::new(&hamming74(), &hamming74().dual()).unwrap();
        assert!(matches!(q.key_from_coset(&bv("1000000")), Err(Error::NotInCode(_))));
    }
}
