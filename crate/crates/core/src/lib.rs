//! Simulation toolkit for quantum key distribution built on classical
//! linear codes.
//!
//! The layers build on each other: [`gf2`] linear algebra, classical
//! [`codes`], a state-vector simulator in [`qsim`], the three-qubit and Shor
//! codes in [`qec3`], CSS codes in [`css`], entanglement distillation in
//! [`distill`], and the BB84 protocol in [`bb84`]. [`reproduce`] replays the
//! worked examples end to end.

pub mod bb84;
pub mod codes;
pub mod css;
pub mod distill;
pub mod error;
pub mod gf2;
pub mod parallel;
pub mod qec3;
pub mod qsim;
pub mod reproduce;

pub use error::{Error, Result};
