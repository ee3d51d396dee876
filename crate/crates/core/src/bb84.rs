//! BB84, both the textbook flow and the Shor–Preskill variant that
//! reconciles with C1 and amplifies privacy by taking the C2 coset.
//!
//! Every session is driven by one ChaCha20 stream seeded from the config.
//! Draws happen in this order, so transcripts are bit-for-bit reproducible:
//!
//! 1. Alice's raw bits `d`, one draw each.
//! 2. Alice's bases `b`, one draw each (none for a fixed basis policy).
//! 3. Per qubit, in order: Eve's basis (uniform policy only) and her
//!    measurement; the channel's X draw and Z draw (always both); Bob's basis
//!    and his measurement.
//! 4. Shor–Preskill only: the k1 message bits of Alice's `u ∈ C1`.
//! 5. The 2n-subset of sifted positions, then the n check positions within it,
//!    each by a partial Fisher–Yates shuffle (one `gen_range` per pick).
//!
//! The n positions left after the checks form the key block, in sifted order.

use std::f64::consts::LN_2;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codes::{DecodeStatus, LinearCode};
use crate::css::CssCode;
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::parallel;
use crate::qsim::{rng_from_seed, Gate, SimRng, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Standard,
    ShorPreskill,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QBasis {
    Z,
    X,
}

impl QBasis {
    /// `false ↦ Z`, `true ↦ X`, matching the bit strings in transcripts.
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            QBasis::X
        } else {
            QBasis::Z
        }
    }

    pub fn bit(self) -> bool {
        self == QBasis::X
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisPolicy {
    UniformRandom,
    #[serde(rename = "always_Z")]
    AlwaysZ,
    #[serde(rename = "always_X")]
    AlwaysX,
}

impl BasisPolicy {
    fn choose<R: Rng + ?Sized>(self, rng: &mut R) -> QBasis {
        match self {
            BasisPolicy::UniformRandom => QBasis::from_bit(rng.gen::<bool>()),
            BasisPolicy::AlwaysZ => QBasis::Z,
            BasisPolicy::AlwaysX => QBasis::X,
        }
    }
}

/// Independent X and Z errors on every qubit in flight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub px: f64,
    pub pz: f64,
}

impl ChannelModel {
    pub const NOISELESS: Self = Self { px: 0.0, pz: 0.0 };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EveKind {
    None,
    InterceptResend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EveStrategy {
    pub kind: EveKind,
    pub basis_policy: BasisPolicy,
}

impl EveStrategy {
    pub const ABSENT: Self = Self {
        kind: EveKind::None,
        basis_policy: BasisPolicy::UniformRandom,
    };

    pub const INTERCEPT: Self = Self {
        kind: EveKind::InterceptResend,
        basis_policy: BasisPolicy::UniformRandom,
    };
}

/// C2 ⊂ C1 for the Shor–Preskill mode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodePair {
    pub c1: LinearCode,
    pub c2: LinearCode,
}

/// Inputs to the privacy-amplification report of the standard mode: `r`
/// bits assumed known to Eve and `s` extra bits sacrificed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PrivacyParams {
    pub r: usize,
    pub s: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub n: usize,
    pub delta: f64,
    /// Shor–Preskill: abort when check mismatches exceed this count.
    pub t_abort: usize,
    /// Standard: abort when check mismatches exceed `max_qber · n`.
    pub max_qber: f64,
    pub seed: u64,
    pub mode: Mode,
    pub channel: ChannelModel,
    pub eve: EveStrategy,
    pub alice_basis: BasisPolicy,
    pub codes: Option<CodePair>,
    pub privacy: PrivacyParams,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            n: 7,
            delta: 0.25,
            t_abort: 1,
            max_qber: 0.11,
            seed: 0,
            mode: Mode::Standard,
            channel: ChannelModel::NOISELESS,
            eve: EveStrategy::ABSENT,
            alice_basis: BasisPolicy::UniformRandom,
            codes: None,
            privacy: PrivacyParams::default(),
        }
    }
}

impl SessionConfig {
    /// `⌈(4+δ)n⌉`.
    pub fn raw_len(&self) -> usize {
        ((4.0 + self.delta) * self.n as f64).ceil() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.n == 0 {
            return bad("n must be positive");
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return bad("delta must be a finite non-negative number");
        }
        if self.t_abort > self.n {
            return bad("t_abort must not exceed n");
        }
        for (name, p) in [
            ("px", self.channel.px),
            ("pz", self.channel.pz),
            ("max_qber", self.max_qber),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidConfig(format!("{name} must lie in [0, 1]")));
            }
        }
        if self.mode == Mode::ShorPreskill {
            let Some(codes) = &self.codes else {
                return bad("shor_preskill mode needs a code pair");
            };
            if codes.c1.n() != self.n {
                return Err(Error::InvalidConfig(format!(
                    "block size n={} differs from code length {}",
                    self.n,
                    codes.c1.n()
                )));
            }
        }
        Ok(())
    }
}

/// One qubit's journey from Alice to Bob.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transmission {
    pub bob_basis: QBasis,
    pub bob_bit: bool,
    pub eve_basis: Option<QBasis>,
    pub eve_learned: bool,
}

fn prepare(bit: bool, basis: QBasis) -> StateVector {
    let mut s = StateVector::zero(1).expect("one qubit");
    if bit {
        s.apply_gate(Gate::X, 1).expect("qubit 1");
    }
    if basis == QBasis::X {
        s.apply_gate(Gate::H, 1).expect("qubit 1");
    }
    s
}

fn measure_in<R: Rng + ?Sized>(s: &mut StateVector, basis: QBasis, rng: &mut R) -> bool {
    if basis == QBasis::X {
        s.apply_gate(Gate::H, 1).expect("qubit 1");
    }
    s.measure_all_z(rng).get(0)
}

/// Prepares `|bit⟩` in `basis`, lets Eve measure and resend her outcome,
/// applies channel noise, and has Bob measure in a uniformly random basis.
pub fn transmit_qubit<R: Rng + ?Sized>(
    bit: bool,
    basis: QBasis,
    channel: &ChannelModel,
    eve: &EveStrategy,
    rng: &mut R,
) -> Transmission {
    let mut s = prepare(bit, basis);
    let mut eve_basis = None;
    if eve.kind == EveKind::InterceptResend {
        let eb = eve.basis_policy.choose(rng);
        let seen = measure_in(&mut s, eb, rng);
        s = prepare(seen, eb);
        eve_basis = Some(eb);
    }
    let flip = rng.gen::<f64>() < channel.px;
    let phase = rng.gen::<f64>() < channel.pz;
    if flip {
        s.apply_gate(Gate::X, 1).expect("qubit 1");
    }
    if phase {
        s.apply_gate(Gate::Z, 1).expect("qubit 1");
    }
    let bob_basis = QBasis::from_bit(rng.gen::<bool>());
    let bob_bit = measure_in(&mut s, bob_basis, rng);
    Transmission {
        bob_basis,
        bob_bit,
        eve_basis,
        eve_learned: eve_basis == Some(basis),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbortReason {
    InsufficientSifted,
    TooManyCheckErrors,
    DecodeFailure,
}

/// Key-length bookkeeping for privacy amplification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PrivacyReport {
    pub target_len: usize,
    pub r: usize,
    pub s: usize,
    pub bennett_bound: f64,
}

/// Everything a session did. Bit strings are printed `"0101…"`; indices
/// refer to raw positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionTranscript {
    pub mode: Mode,
    pub n: usize,
    pub d: BitVector,
    pub b: BitVector,
    pub bob_bases: BitVector,
    pub bob_results: BitVector,
    pub eve_learned: BitVector,
    pub sifted: BitVector,
    pub sifted_len: usize,
    pub selected_idx: Vec<usize>,
    pub check_idx: Vec<usize>,
    pub key_idx: Vec<usize>,
    pub mismatches: Option<usize>,
    pub aborted: bool,
    pub abort_reason: Option<AbortReason>,
    /// Alice's key block `x`.
    pub alice_block: Option<BitVector>,
    /// Bob's key block `x + e1`.
    pub bob_block: Option<BitVector>,
    pub u: Option<BitVector>,
    pub x_minus_u: Option<BitVector>,
    pub u_hat: Option<BitVector>,
    pub key: Option<BitVector>,
    pub bob_key: Option<BitVector>,
    pub keys_match: Option<bool>,
    /// Standard mode: disagreements left after reconciliation.
    pub residual_errors: Option<usize>,
    pub privacy: Option<PrivacyReport>,
}

impl SessionTranscript {
    /// Error rate over every sifted position (a simulator-side quantity).
    pub fn sifted_qber(&self) -> f64 {
        let (mut errs, mut total) = (0usize, 0usize);
        for i in self.sifted.ones() {
            total += 1;
            errs += (self.d.get(i) != self.bob_results.get(i)) as usize;
        }
        if total == 0 {
            0.0
        } else {
            errs as f64 / total as f64
        }
    }

    /// Mismatch rate on the revealed check bits.
    pub fn check_qber(&self) -> Option<f64> {
        self.mismatches
            .filter(|_| !self.check_idx.is_empty())
            .map(|m| m as f64 / self.check_idx.len() as f64)
    }
}

/// Corrects Bob's block towards Alice's; reports bits leaked doing so.
pub trait Reconciler {
    fn reconcile(&self, alice: &BitVector, bob: &BitVector) -> (BitVector, usize);
}

/// Leaves Bob's block untouched.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoReconciliation;

impl Reconciler for NoReconciliation {
    fn reconcile(&self, _alice: &BitVector, bob: &BitVector) -> (BitVector, usize) {
        (bob.clone(), 0)
    }
}

/// `2^{−s} / ln 2`, the bound on Eve's expected information about the key
/// after sacrificing `s` extra bits.
pub fn bennett_bound(s: u32) -> f64 {
    (-(s as f64)).exp2() / LN_2
}

/// Fraction of sifted positions at which Eve measured in Alice's basis.
pub fn eve_info_estimate(t: &SessionTranscript) -> f64 {
    if t.sifted_len == 0 {
        return 0.0;
    }
    let learned = t.sifted.ones().filter(|&i| t.eve_learned.get(i)).count();
    learned as f64 / t.sifted_len as f64
}

// First `k` entries after a partial Fisher–Yates shuffle.
fn pick<R: Rng + ?Sized>(items: &mut [usize], k: usize, rng: &mut R) -> Vec<usize> {
    for i in 0..k {
        let j = rng.gen_range(i..items.len());
        items.swap(i, j);
    }
    items[..k].to_vec()
}

struct Quantum {
    d: BitVector,
    b: BitVector,
    bob_bases: BitVector,
    bob_results: BitVector,
    eve_learned: BitVector,
}

fn quantum_phase(cfg: &SessionConfig, rng: &mut SimRng) -> Quantum {
    let m = cfg.raw_len();
    let d: Vec<bool> = (0..m).map(|_| rng.gen::<bool>()).collect();
    let b: Vec<bool> = (0..m).map(|_| cfg.alice_basis.choose(rng).bit()).collect();
    let mut bob_bases = Vec::with_capacity(m);
    let mut bob_results = Vec::with_capacity(m);
    let mut eve_learned = Vec::with_capacity(m);
    for i in 0..m {
        let t = transmit_qubit(d[i], QBasis::from_bit(b[i]), &cfg.channel, &cfg.eve, rng);
        bob_bases.push(t.bob_basis.bit());
        bob_results.push(t.bob_bit);
        eve_learned.push(t.eve_learned);
    }
    Quantum {
        d: BitVector::from_bools(&d),
        b: BitVector::from_bools(&b),
        bob_bases: BitVector::from_bools(&bob_bases),
        bob_results: BitVector::from_bools(&bob_results),
        eve_learned: BitVector::from_bools(&eve_learned),
    }
}

fn bits_at(v: &BitVector, idx: &[usize]) -> BitVector {
    BitVector::from_bools(&idx.iter().map(|&i| v.get(i)).collect::<Vec<_>>())
}

/// Shared steps up to the check-bit test. Returns the transcript so far and,
/// when not aborted, the key-block indices.
fn common_steps(cfg: &SessionConfig, rng: &mut SimRng, css: Option<&CssCode>) -> Result<(SessionTranscript, Option<BitVector>)> {
    let q = quantum_phase(cfg, rng);
    let u = match css {
        Some(code) => {
            let msg: Vec<bool> = (0..code.c1().k()).map(|_| rng.gen::<bool>()).collect();
            Some(code.c1().encode(&BitVector::from_bools(&msg))?)
        }
        None => None,
    };

    let m = q.d.len();
    let sift_bits: Vec<bool> = (0..m).map(|i| q.b.get(i) == q.bob_bases.get(i)).collect();
    let sifted = BitVector::from_bools(&sift_bits);
    let mut sifted_positions: Vec<usize> = sifted.ones().collect();
    let n = cfg.n;

    let mut t = SessionTranscript {
        mode: cfg.mode,
        n,
        d: q.d,
        b: q.b,
        bob_bases: q.bob_bases,
        bob_results: q.bob_results,
        eve_learned: q.eve_learned,
        sifted_len: sifted_positions.len(),
        sifted,
        selected_idx: Vec::new(),
        check_idx: Vec::new(),
        key_idx: Vec::new(),
        mismatches: None,
        aborted: false,
        abort_reason: None,
        alice_block: None,
        bob_block: None,
        u: None,
        x_minus_u: None,
        u_hat: None,
        key: None,
        bob_key: None,
        keys_match: None,
        residual_errors: None,
        privacy: None,
    };

    if sifted_positions.len() < 2 * n {
        t.aborted = true;
        t.abort_reason = Some(AbortReason::InsufficientSifted);
        return Ok((t, u));
    }

    let mut selected = pick(&mut sifted_positions, 2 * n, rng);
    selected.sort_unstable();
    let mut slots: Vec<usize> = (0..2 * n).collect();
    let mut check_slots = pick(&mut slots, n, rng);
    check_slots.sort_unstable();
    let check_idx: Vec<usize> = check_slots.iter().map(|&s| selected[s]).collect();
    let key_idx: Vec<usize> = selected
        .iter()
        .copied()
        .filter(|i| check_idx.binary_search(i).is_err())
        .take(n)
        .collect();

    let mismatches = check_idx
        .iter()
        .filter(|&&i| t.d.get(i) != t.bob_results.get(i))
        .count();
    t.selected_idx = selected;
    t.check_idx = check_idx;
    t.mismatches = Some(mismatches);

    let limit_exceeded = match cfg.mode {
        Mode::Standard => mismatches as f64 > cfg.max_qber * n as f64,
        Mode::ShorPreskill => mismatches > cfg.t_abort,
    };
    if limit_exceeded {
        t.aborted = true;
        t.abort_reason = Some(AbortReason::TooManyCheckErrors);
        return Ok((t, u));
    }
    t.alice_block = Some(bits_at(&t.d, &key_idx));
    t.bob_block = Some(bits_at(&t.bob_results, &key_idx));
    t.key_idx = key_idx;
    Ok((t, u))
}

/// Standard BB84 with the null reconciliation hook.
pub fn run_standard(cfg: &SessionConfig) -> Result<SessionTranscript> {
    run_standard_with(cfg, &NoReconciliation)
}

pub fn run_standard_with(cfg: &SessionConfig, reconciler: &dyn Reconciler) -> Result<SessionTranscript> {
    if cfg.mode != Mode::Standard {
        return Err(Error::InvalidConfig("run_standard needs mode = standard".into()));
    }
    cfg.validate()?;
    let mut rng = rng_from_seed(cfg.seed);
    let (mut t, _) = common_steps(cfg, &mut rng, None)?;
    if t.aborted {
        return Ok(t);
    }
    let alice = t.alice_block.clone().expect("set when not aborted");
    let bob = t.bob_block.clone().expect("set when not aborted");
    let (bob_fixed, leaked) = reconciler.reconcile(&alice, &bob);
    let residual = alice.add(&bob_fixed)?.weight();
    let r = cfg.privacy.r + leaked;
    let s = cfg.privacy.s;
    t.privacy = Some(PrivacyReport {
        target_len: cfg.n.saturating_sub(r + s),
        r,
        s,
        bennett_bound: bennett_bound(s as u32),
    });
    t.residual_errors = Some(residual);
    t.keys_match = Some(residual == 0);
    t.key = Some(alice);
    t.bob_key = Some(bob_fixed);
    Ok(t)
}

/// The CSS code implied by a config's code pair, at full correction capacity.
pub fn session_code(cfg: &SessionConfig) -> Result<CssCode> {
    let codes = cfg
        .codes
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("no code pair configured".into()))?;
    CssCode::with_full_capacity(codes.c1.clone(), codes.c2.clone())
}

/// Shor–Preskill BB84: Alice announces `x − u` for a random `u ∈ C1`, Bob
/// decodes `u + e1` with C1's table, and both keep the C2-coset label.
pub fn run_shor_preskill(cfg: &SessionConfig) -> Result<SessionTranscript> {
    if cfg.mode != Mode::ShorPreskill {
        return Err(Error::InvalidConfig("run_shor_preskill needs mode = shor_preskill".into()));
    }
    cfg.validate()?;
    let code = session_code(cfg)?;
    let mut rng = rng_from_seed(cfg.seed);
    let (mut t, u) = common_steps(cfg, &mut rng, Some(&code))?;
    let u = u.expect("drawn in shor_preskill mode");
    t.u = Some(u.clone());
    if t.aborted {
        return Ok(t);
    }
    let x = t.alice_block.clone().expect("set when not aborted");
    let x_minus_u = x.add(&u)?;
    t.x_minus_u = Some(x_minus_u.clone());
    let (u_hat, status) = bob_decode(&code, t.bob_block.as_ref().expect("set"), &x_minus_u)?;
    t.u_hat = Some(u_hat.clone());
    if status != DecodeStatus::Ok {
        t.aborted = true;
        t.abort_reason = Some(AbortReason::DecodeFailure);
        return Ok(t);
    }
    let key = code.quotient().key_from_coset(&u)?;
    let bob_key = code.quotient().key_from_coset(&u_hat)?;
    t.keys_match = Some(key == bob_key);
    t.key = Some(key);
    t.bob_key = Some(bob_key);
    t.privacy = Some(PrivacyReport {
        target_len: code.k(),
        r: code.c1().n() - code.c1().k(),
        s: code.c2().k(),
        bennett_bound: bennett_bound(code.c2().k() as u32),
    });
    Ok(t)
}

/// Bob's reconciliation step: `(x + e1) + (x − u) = u + e1`, decoded in C1.
pub fn bob_decode(code: &CssCode, bob_block: &BitVector, x_minus_u: &BitVector) -> Result<(BitVector, DecodeStatus)> {
    let received = bob_block.add(x_minus_u)?;
    let d = code.bit_table().decode(code.c1(), &received)?;
    Ok((d.codeword, d.status))
}

pub fn run(cfg: &SessionConfig) -> Result<SessionTranscript> {
    match cfg.mode {
        Mode::Standard => run_standard(cfg),
        Mode::ShorPreskill => run_shor_preskill(cfg),
    }
}

/// What Bob can work out from his own records and Alice's announcements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BobView {
    pub sifted: BitVector,
    pub bob_block: Option<BitVector>,
    pub u_hat: Option<BitVector>,
    pub bob_key: Option<BitVector>,
}

/// Recomputes Bob's side of a transcript using only his bases and results
/// plus the announced `b`, check/key positions and `x − u`.
pub fn replay_bob(cfg: &SessionConfig, t: &SessionTranscript) -> Result<BobView> {
    let m = t.b.len();
    let sifted = BitVector::from_bools(
        &(0..m).map(|i| t.b.get(i) == t.bob_bases.get(i)).collect::<Vec<_>>(),
    );
    if t.key_idx.is_empty() {
        return Ok(BobView {
            sifted,
            bob_block: None,
            u_hat: None,
            bob_key: None,
        });
    }
    let bob_block = bits_at(&t.bob_results, &t.key_idx);
    let (u_hat, bob_key) = match (&t.x_minus_u, cfg.mode) {
        (Some(xu), Mode::ShorPreskill) => {
            let code = session_code(cfg)?;
            let (u_hat, status) = bob_decode(&code, &bob_block, xu)?;
            let key = match status {
                DecodeStatus::Ok => Some(code.quotient().key_from_coset(&u_hat)?),
                DecodeStatus::DetectedUncorrectable => None,
            };
            (Some(u_hat), key)
        }
        _ => (None, Some(bob_block.clone())),
    };
    Ok(BobView {
        sifted,
        bob_block: Some(bob_block),
        u_hat,
        bob_key,
    })
}

/// One line of a Monte Carlo sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub seed: u64,
    /// Check-bit error rate; absent if the session aborted before checking.
    pub qber: Option<f64>,
    pub sifted_len: usize,
    pub aborted: bool,
    pub key: Option<BitVector>,
    pub keys_match: Option<bool>,
}

impl SweepRow {
    pub fn from_transcript(seed: u64, t: &SessionTranscript) -> Self {
        Self {
            seed,
            qber: t.check_qber(),
            sifted_len: t.sifted_len,
            aborted: t.aborted,
            key: t.key.clone(),
            keys_match: t.keys_match,
        }
    }
}

/// Runs `template` once per seed, in parallel when enabled; rows come back
/// in seed order.
pub fn sweep(template: &SessionConfig, seeds: &[u64]) -> Result<Vec<(SweepRow, SessionTranscript)>> {
    parallel::map(seeds, |&seed| {
        let cfg = SessionConfig {
            seed,
            ..template.clone()
        };
        let t = run(&cfg)?;
        Ok((SweepRow::from_transcript(seed, &t), t))
    })
    .into_iter()
    .collect()
}

pub const SWEEP_CSV_HEADER: &str = "seed,qber,sifted_len,aborted,key,keys_match";

/// Sweep rows as CSV with [`SWEEP_CSV_HEADER`]; absent values are empty.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.seed,
            r.qber.map(|q| format!("{q:.6}")).unwrap_or_default(),
            r.sifted_len,
            r.aborted,
            r.key.as_ref().map(ToString::to_string).unwrap_or_default(),
            r.keys_match.map(|k| k.to_string()).unwrap_or_default(),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::named::hamming74;

    fn sp_config(seed: u64) -> SessionConfig {
        let h = hamming74();
        SessionConfig {
            mode: Mode::ShorPreskill,
            seed,
            codes: Some(CodePair {
                c2: h.dual(),
                c1: h,
            }),
            ..SessionConfig::default()
        }
    }

    #[test]
    fn raw_length_rounds_up() {
        let c = SessionConfig::default();
        assert_eq!(c.raw_len(), 30);
        let c = SessionConfig { delta: 0.0, ..c };
        assert_eq!(c.raw_len(), 28);
    }

    #[test]
    fn config_validation() {
        let c = SessionConfig {
            t_abort: 8,
            ..SessionConfig::default()
        };
        assert!(c.validate().is_err());
        let c = SessionConfig {
            channel: ChannelModel { px: 1.5, pz: 0.0 },
            ..SessionConfig::default()
        };
        assert!(c.validate().is_err());
        let c = SessionConfig {
            mode: Mode::ShorPreskill,
            ..SessionConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn mode_mismatch_rejected() {
        assert!(run_standard(&sp_config(0)).is_err());
        assert!(run_shor_preskill(&SessionConfig::default()).is_err());
    }

    #[test]
    fn pick_is_a_subset() {
        let mut rng = rng_from_seed(4);
        let mut items: Vec<usize> = (10..30).collect();
        let mut p = pick(&mut items, 5, &mut rng);
        p.sort_unstable();
        p.dedup();
        assert_eq!(p.len(), 5);
        assert!(p.iter().all(|x| (10..30).contains(x)));
    }

    #[test]
    fn key_block_is_disjoint_from_checks() {
        let t = run(&sp_config(11)).unwrap();
        if !t.aborted {
            assert_eq!(t.key_idx.len(), 7);
            assert!(t.key_idx.iter().all(|i| !t.check_idx.contains(i)));
            assert!(t.key_idx.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn csv_shape() {
        let rows = vec![SweepRow {
            seed: 3,
            qber: Some(0.0),
            sifted_len: 14,
            aborted: false,
            key: Some("1".parse().unwrap()),
            keys_match: Some(true),
        }];
        let csv = sweep_csv(&rows);
        assert_eq!(csv.lines().next().unwrap(), SWEEP_CSV_HEADER);
        assert_eq!(csv.lines().nth(1).unwrap(), "3,0.000000,14,false,1,true");
    }
}
