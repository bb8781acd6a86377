//! Key material from the binary sequences and GH residue streams.
//!
//! Bits map `+1 -> 1` and `-1 -> 0`. Packing is MSB-first with the final
//! partial byte zero-padded on the right. Keys are never stored; a
//! [`KeyOrigin`] is enough to regenerate the same bits.
//!
//! This is a minimal deterministic construction. It carries no security
//! proof and no key-distribution protocol.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{gh_term, GhParams, Modulus};
use crate::bitmap::{b_sequence, general_sequence, BinarySequence};
use crate::{Error, Result};

/// Where a key's bits came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KeyOrigin {
    /// `B(n)` from the prime with 1-based index `start` (index 1 is 3).
    Primes { start: u64, count: usize },
    /// Multiple-of-8 sequence over the moduli `start, start + 1, ...`.
    General { start: u64, count: usize },
}

impl KeyOrigin {
    pub fn count(&self) -> usize {
        match *self {
            KeyOrigin::Primes { count, .. } | KeyOrigin::General { count, .. } => count,
        }
    }

    pub fn regenerate(&self) -> Result<KeyMaterial> {
        let seq = match *self {
            KeyOrigin::Primes { start, count } => b_sequence(count, start)?,
            KeyOrigin::General { start, count } => general_sequence(count, start)?,
        };
        Ok(KeyMaterial {
            bits: sequence_bits(&seq),
            origin: *self,
        })
    }
}

impl fmt::Display for KeyOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, start, count) = match *self {
            KeyOrigin::Primes { start, count } => ("primes", start, count),
            KeyOrigin::General { start, count } => ("general", start, count),
        };
        write!(f, "kind={kind} start={start} count={count}")
    }
}

impl FromStr for KeyOrigin {
    type Err = Error;

    /// Parses the `Display` form, e.g. `kind=primes start=1 count=256`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadOrigin(s.to_string());
        let (mut kind, mut start, mut count) = (None, None, None);
        for field in s.split_whitespace() {
            let (key, value) = field.split_once('=').ok_or_else(bad)?;
            match key {
                "kind" => kind = Some(value),
                "start" => start = Some(value.parse::<u64>().map_err(|_| bad())?),
                "count" => count = Some(value.parse::<usize>().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        let (start, count) = (start.ok_or_else(bad)?, count.ok_or_else(bad)?);
        match kind {
            Some("primes") => Ok(KeyOrigin::Primes { start, count }),
            Some("general") => Ok(KeyOrigin::General { start, count }),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyMaterial {
    pub bits: Vec<bool>,
    pub origin: KeyOrigin,
}

impl KeyMaterial {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn to_bit_string(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        pack_bits(&self.bits)
    }

    /// Lowercase hex over the packed bytes.
    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }
}

fn sequence_bits(seq: &BinarySequence) -> Vec<bool> {
    seq.values().iter().map(|&v| v > 0).collect()
}

/// Key bits from `B(n)`, `count_bits` primes starting at `start_prime_index`.
pub fn keygen_from_b(count_bits: usize, start_prime_index: u64) -> Result<KeyMaterial> {
    KeyOrigin::Primes {
        start: start_prime_index,
        count: count_bits,
    }
    .regenerate()
}

/// Key bits from the general-moduli sequence.
pub fn keygen_from_general(count_bits: usize, start_modulus: u64) -> Result<KeyMaterial> {
    KeyOrigin::General {
        start: start_modulus,
        count: count_bits,
    }
    .regenerate()
}

/// MSB-first packing; `ceil(n / 8)` bytes.
pub fn pack_bits(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i)))
        })
        .collect()
}

/// Inverse of [`pack_bits`], keeping the first `n_bits` bits.
pub fn unpack_bits(bytes: &[u8], n_bits: usize) -> Vec<bool> {
    bytes
        .iter()
        .flat_map(|&byte| (0..8).rev().map(move |i| (byte >> i) & 1 == 1))
        .take(n_bits)
        .collect()
}

/// Parses a `0`/`1` string.
pub fn parse_bit_string(s: &str) -> Result<Vec<bool>> {
    s.trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::Parse(format!("{c:?} is not a bit"))),
        })
        .collect()
}

/// `GH(start_n), ..., GH(start_n + count - 1)` modulo `m`.
pub fn gh_residue_stream(
    params: GhParams,
    m: Modulus,
    count: usize,
    start_n: u64,
) -> Result<Vec<u64>> {
    if params.is_degenerate(m) {
        return Err(Error::DegenerateSeed {
            a: params.a,
            b: params.b,
            m: m.get(),
        });
    }
    if count == 0 {
        return Err(Error::EmptyCount);
    }
    let modulus = m.get();
    let mut out = Vec::with_capacity(count);
    let (mut x, mut y) = (gh_term(params, start_n, m), gh_term(params, start_n + 1, m));
    for _ in 0..count {
        out.push(x);
        let next = x + y;
        (x, y) = (
            y,
            if next >= modulus {
                next - modulus
            } else {
                next
            },
        );
    }
    Ok(out)
}
