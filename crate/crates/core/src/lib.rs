//! Fibonacci and Gopala-Hemachandra (GH) residue sequences modulo `m`, their
//! periods, and the binary sequences built from those periods.
//!
//! The pipeline runs bottom-up:
//!
//! * [`arith`]: primality, odd-prime enumeration, fast-doubling `F(n) mod m`,
//!   GH terms and the modular Binet form.
//! * [`periods`]: Pisano periods (brute force and divisor search), the
//!   `p-1` / `2p+2` prime classes, GH periods and the `6m` bound.
//! * [`bitmap`]: the prime-indexed sequence `B(n)` and the general-moduli
//!   multiple-of-8 sequence, both over `{+1, -1}`.
//! * [`stats`]: autocorrelation `C(k)` and the randomness measure `R`.
//! * [`keystream`]: bit packing, hex encoding and regenerable key material.
//! * [`cli`]: the `fibkey` command-line front end.
//!
//! Recovering `n` from `F(n) mod m` is believed hard for large `m`, but this
//! crate makes no security claim and implements no attack or proof.

pub mod arith;
pub mod bitmap;
pub mod cli;
mod error;
pub mod keystream;
pub mod periods;
pub mod stats;

pub use arith::{FibPair, GhParams, Modulus};
pub use bitmap::{BinarySequence, SequenceKind};
pub use error::{Error, Result};
pub use keystream::{KeyMaterial, KeyOrigin};
pub use periods::{PeriodRecord, PrimeClass};
pub use stats::{AutocorrProfile, Convention};
