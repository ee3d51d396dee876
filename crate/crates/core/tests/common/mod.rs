//! Brute-force oracles that avoid the library's linear algebra: words are
//! plain `Vec<u8>` and everything is found by exhaustive search.

#![allow(dead_code)]

use qkdforge::gf2::{BitMatrix, BitVector};
use rand::Rng;

pub type Word = Vec<u8>;

pub fn word(s: &str) -> Word {
    s.bytes().map(|b| b - b'0').collect()
}

pub fn to_bv(w: &Word) -> BitVector {
    BitVector::from_bools(&w.iter().map(|&b| b == 1).collect::<Vec<_>>())
}

pub fn from_bv(v: &BitVector) -> Word {
    v.iter().map(|b| b as u8).collect()
}

pub fn bv(s: &str) -> BitVector {
    s.parse().unwrap()
}

pub fn xor(a: &Word, b: &Word) -> Word {
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

pub fn dot(a: &Word, b: &Word) -> u8 {
    a.iter().zip(b).map(|(x, y)| x & y).fold(0, |acc, v| acc ^ v)
}

pub fn all_words(n: usize) -> Vec<Word> {
    (0..1usize << n)
        .map(|i| (0..n).map(|j| ((i >> (n - 1 - j)) & 1) as u8).collect())
        .collect()
}

/// Every XOR combination of `rows`, deduplicated and sorted.
pub fn span(rows: &[Word]) -> Vec<Word> {
    let n = rows[0].len();
    let mut out: Vec<Word> = (0..1usize << rows.len())
        .map(|mask| {
            rows.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold(vec![0; n], |acc, (_, r)| xor(&acc, r))
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Words orthogonal to every member of `code`, by testing all of F₂ⁿ.
pub fn dual_of(code: &[Word]) -> Vec<Word> {
    let n = code[0].len();
    all_words(n)
        .into_iter()
        .filter(|u| code.iter().all(|c| dot(c, u) == 0))
        .collect()
}

pub fn weight(w: &Word) -> usize {
    w.iter().filter(|&&b| b == 1).count()
}

pub fn min_weight(code: &[Word]) -> usize {
    code.iter().map(weight).filter(|&w| w > 0).min().unwrap()
}

pub fn rows_of(m: &BitMatrix) -> Vec<Word> {
    m.rows().iter().map(from_bv).collect()
}

pub fn matrix(rows: &[&str]) -> BitMatrix {
    BitMatrix::from_rows(rows.iter().map(|r| bv(r)).collect()).unwrap()
}

/// A random full-rank k × n generator, rejection-sampled until the span has
/// 2^k distinct words.
pub fn random_generator<R: Rng>(rng: &mut R, n: usize, k: usize) -> BitMatrix {
    loop {
        let rows: Vec<Word> = (0..k)
            .map(|_| (0..n).map(|_| rng.gen_range(0..2u8)).collect())
            .collect();
        if span(&rows).len() == 1 << k {
            return BitMatrix::from_rows(rows.iter().map(to_bv).collect()).unwrap();
        }
    }
}

/// Mean ± `sigmas` standard errors of a Bernoulli(p) estimate from `trials`.
pub fn within_sigmas(observed: f64, p: f64, trials: usize, sigmas: f64) -> bool {
    let sd = (p * (1.0 - p) / trials as f64).sqrt();
    (observed - p).abs() <= sigmas * sd + 1e-12
}
