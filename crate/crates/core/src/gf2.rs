//! Vectors and matrices over GF(2).
//!
//! Bit position 0 is the leftmost character of the printed form, so
//! `"1000110"` has bit 0 set. When a vector is read as a basis-state index,
//! position 0 is the most significant bit.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{BitXor, BitXorAssign};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A packed bit string of fixed length.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// The vector with a single one at `pos`.
    pub fn unit(len: usize, pos: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(pos, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Reads `idx` as a `len`-bit number, most significant bit at position 0.
    pub fn from_index(idx: usize, len: usize) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            if (idx >> (len - 1 - i)) & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }

    /// Inverse of [`BitVector::from_index`]. Panics above 63 bits.
    pub fn to_index(&self) -> usize {
        assert!(self.len < usize::BITS as usize, "vector too long to index");
        self.iter().fold(0usize, |acc, b| (acc << 1) | b as usize)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, pos: usize) -> bool {
        assert!(pos < self.len, "bit {pos} out of range for length {}", self.len);
        (self.words[pos / WORD] >> (pos % WORD)) & 1 == 1
    }

    pub fn set(&mut self, pos: usize, value: bool) {
        assert!(pos < self.len, "bit {pos} out of range for length {}", self.len);
        let mask = 1u64 << (pos % WORD);
        if value {
            self.words[pos / WORD] |= mask;
        } else {
            self.words[pos / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, pos: usize) {
        assert!(pos < self.len, "bit {pos} out of range for length {}", self.len);
        self.words[pos / WORD] ^= 1u64 << (pos % WORD);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Positions holding a one, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        Ok(())
    }

    /// Componentwise sum (XOR).
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(Self {
            len: self.len,
            words,
        })
    }

    /// Inner product Σ aᵢbᵢ mod 2.
    pub fn dot(&self, other: &Self) -> Result<bool> {
        self.check_len(other)?;
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        Ok(ones % 2 == 1)
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.len + other.len);
        for i in self.ones() {
            out.set(i, true);
        }
        for i in other.ones() {
            out.set(self.len + i, true);
        }
        out
    }

    pub fn slice(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.len, "bad slice {start}..{end}");
        let mut out = Self::zeros(end - start);
        for i in start..end {
            if self.get(i) {
                out.set(i - start, true);
            }
        }
        out
    }

    /// Every vector of the given length, in counting order. Intended for
    /// small lengths only.
    pub fn all(len: usize) -> impl Iterator<Item = Self> {
        assert!(len < 32, "refusing to enumerate 2^{len} vectors");
        (0..1usize << len).map(move |i| Self::from_index(i, len))
    }
}

impl BitXor for &BitVector {
    type Output = BitVector;

    /// Panics on length mismatch; use [`BitVector::add`] for a checked sum.
    fn bitxor(self, rhs: &BitVector) -> BitVector {
        self.add(rhs).expect("xor of vectors with different lengths")
    }
}

impl BitXorAssign<&BitVector> for BitVector {
    fn bitxor_assign(&mut self, rhs: &BitVector) {
        assert_eq!(self.len, rhs.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
    }
}

// Ordered like the printed strings: shorter first, then lexicographically.
impl Ord for BitVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| {
            for i in 0..self.len {
                match (self.get(i), other.get(i)) {
                    (false, true) => return Ordering::Less,
                    (true, false) => return Ordering::Greater,
                    _ => {}
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for BitVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bools(&bits))
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        f.pad(&s)
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl Serialize for BitVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: BitMatrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// A dense matrix over GF(2), stored as rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: Vec<BitVector>,
    cols: usize,
}

impl BitMatrix {
    /// Builds a matrix from at least one row; all rows must share a length.
    pub fn from_rows(rows: Vec<BitVector>) -> Result<Self> {
        let cols = rows
            .first()
            .map(BitVector::len)
            .ok_or_else(|| Error::Dimension("matrix needs at least one row".into()))?;
        if cols == 0 {
            return Err(Error::Dimension("matrix needs at least one column".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                left: cols,
                right: bad.len(),
            });
        }
        Ok(Self { rows, cols })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows: vec![BitVector::zeros(cols); rows],
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: (0..n).map(|i| BitVector::unit(n, i)).collect(),
            cols: n,
        }
    }

    /// Parses rows of `0`/`1` characters, one per line. Reading stops at the
    /// first blank line after at least one row; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.starts_with('#') {
                continue;
            }
            if line.is_empty() {
                if rows.is_empty() {
                    continue;
                }
                break;
            }
            rows.push(line.parse::<BitVector>()?);
        }
        Self::from_rows(rows)
    }

    /// Inverse of [`BitMatrix::parse`]: one row per line, trailing newline.
    pub fn to_text(&self) -> String {
        self.rows.iter().map(|r| format!("{r}\n")).collect()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn column(&self, c: usize) -> BitVector {
        BitVector::from_bools(&self.rows.iter().map(|r| r.get(c)).collect::<Vec<_>>())
    }

    pub fn transpose(&self) -> Self {
        Self {
            rows: (0..self.cols).map(|c| self.column(c)).collect(),
            cols: self.rows.len(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVector::is_zero)
    }

    /// `M·vᵀ`, one bit per row.
    pub fn mul_vec(&self, v: &BitVector) -> Result<BitVector> {
        let bits = self
            .rows
            .iter()
            .map(|r| r.dot(v))
            .collect::<Result<Vec<_>>>()?;
        Ok(BitVector::from_bools(&bits))
    }

    /// `m·M`: the combination of rows selected by `m`.
    pub fn vec_mul(&self, m: &BitVector) -> Result<BitVector> {
        if m.len() != self.rows.len() {
            return Err(Error::LengthMismatch {
                left: self.rows.len(),
                right: m.len(),
            });
        }
        let mut acc = BitVector::zeros(self.cols);
        for i in m.ones() {
            acc ^= &self.rows[i];
        }
        Ok(acc)
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        let rows = self
            .rows
            .iter()
            .map(|r| other.vec_mul(r))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            rows,
            cols: other.cols,
        })
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::LengthMismatch {
                left: self.cols,
                right: other.cols,
            });
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(Self {
            rows,
            cols: self.cols,
        })
    }

    pub fn rref(&self) -> Rref {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == rows.len() {
                break;
            }
            let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(r, p);
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.get(c) {
                    *row ^= &pivot_row;
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref {
            matrix: Self {
                rows,
                cols: self.cols,
            },
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank()
    }

    /// A basis of `{x : M·xᵀ = 0}`, one vector per free column in ascending
    /// order. For a systematic `[I | P]` this yields `[Pᵀ | I]`.
    pub fn nullspace_basis(&self) -> Vec<BitVector> {
        let Rref { matrix, pivots } = self.rref();
        (0..self.cols)
            .filter(|c| !pivots.contains(c))
            .map(|f| {
                let mut v = BitVector::unit(self.cols, f);
                for (i, &p) in pivots.iter().enumerate() {
                    if matrix.get(i, f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    /// One solution of `M·xᵀ = sᵀ`, with every free variable set to zero.
    pub fn solve_particular(&self, s: &BitVector) -> Result<BitVector> {
        if s.len() != self.rows.len() {
            return Err(Error::LengthMismatch {
                left: self.rows.len(),
                right: s.len(),
            });
        }
        let augmented = Self {
            rows: self
                .rows
                .iter()
                .enumerate()
                .map(|(i, r)| r.concat(&BitVector::from_bools(&[s.get(i)])))
                .collect(),
            cols: self.cols + 1,
        };
        let Rref { matrix, pivots } = augmented.rref();
        if pivots.last() == Some(&self.cols) {
            return Err(Error::NoSolution);
        }
        let mut x = BitVector::zeros(self.cols);
        for (i, &p) in pivots.iter().enumerate() {
            if matrix.get(i, self.cols) {
                x.set(p, true);
            }
        }
        Ok(x)
    }

    /// Whether `v` lies in the row space.
    pub fn spans(&self, v: &BitVector) -> Result<bool> {
        match self.transpose().solve_particular(v) {
            Ok(_) => Ok(true),
            Err(Error::NoSolution) => Ok(false),
            Err(e) => Err(e),
        }
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows.iter().map(|r| r.to_string())).finish()
    }
}

impl Serialize for BitMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.rows.iter())
    }
}

impl<'de> Deserialize<'de> for BitMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<BitVector>::deserialize(d)?;
        Self::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn mat(rows: &[&str]) -> BitMatrix {
        BitMatrix::from_rows(rows.iter().map(|r| bv(r)).collect()).unwrap()
    }

    #[test]
    fn display_roundtrip_and_positions() {
        let v = bv("1000110");
        assert!(v.get(0) && !v.get(1) && v.get(4) && v.get(5));
        assert_eq!(v.to_string(), "1000110");
        assert_eq!(v.weight(), 3);
    }

    #[test]
    fn index_is_msb_first() {
        assert_eq!(bv("100").to_index(), 4);
        assert_eq!(BitVector::from_index(1, 3), bv("001"));
    }

    #[test]
    fn add_and_dot() {
        assert_eq!(bv("0011110").add(&bv("1100001")).unwrap(), bv("1111111"));
        assert!(!bv("1101").dot(&bv("0111")).unwrap());
        assert!(bv("1").add(&bv("11")).is_err());
    }

    #[test]
    fn long_vectors_span_words() {
        let mut v = BitVector::zeros(130);
        v.set(129, true);
        v.set(64, true);
        assert_eq!(v.weight(), 2);
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![64, 129]);
    }

    #[test]
    fn hamming_nullspace_is_the_standard_check_matrix() {
        let g = mat(&["1000110", "0100111", "0010101", "0001011"]);
        let h = BitMatrix::from_rows(g.nullspace_basis()).unwrap();
        assert_eq!(h, mat(&["1110100", "1101010", "0111001"]));
    }

    #[test]
    fn solve_sets_free_variables_to_zero() {
        let h = mat(&["1110100", "1101010", "0111001"]);
        let x = h.solve_particular(&bv("101")).unwrap();
        assert_eq!(h.mul_vec(&x).unwrap(), bv("101"));
        // free columns are 3..6 (0-based), all zero
        assert!((3..7).all(|i| !x.get(i)));
    }

    #[test]
    fn inconsistent_system() {
        let m = mat(&["11", "11"]);
        assert_eq!(m.solve_particular(&bv("10")), Err(Error::NoSolution));
    }

    #[test]
    fn text_format_roundtrip() {
        let m = BitMatrix::parse("# parity\n1001\n0101\n0011\n\nignored").unwrap();
        assert_eq!(m.n_rows(), 3);
        assert_eq!(BitMatrix::parse(&m.to_text()).unwrap(), m);
        assert!(BitMatrix::parse("10\n1").is_err());
        assert!(BitMatrix::parse("1a").is_err());
    }

    #[test]
    fn ordering_matches_strings() {
        let mut v = vec![bv("110"), bv("001"), bv("100")];
        v.sort();
        assert_eq!(v, vec![bv("001"), bv("100"), bv("110")]);
    }
}
