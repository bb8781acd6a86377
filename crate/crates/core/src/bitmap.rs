//! Binary `{+1, -1}` sequences built from period classifications.
//!
//! * Prime-indexed `B(n)`: `+1` when the Pisano period of the n-th prime
//!   (counting from 3) falls in the `p - 1` class, with 5 included there;
//!   `-1` for the `2p + 2` class.
//! * General moduli: `+1` when the Pisano period of `m` is a multiple of 8.
//!   Negating every value leaves all autocorrelations unchanged, so the sign
//!   choice does not affect any measurement.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::odd_primes_from;
use crate::periods::{pisano_period_bruteforce, pisano_period_prime};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SequenceKind {
    PrimeIndexed,
    GeneralModuli,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinarySequence {
    values: Vec<i8>,
    kind: SequenceKind,
    /// First prime for `PrimeIndexed`, first modulus for `GeneralModuli`.
    start: u64,
}

impl BinarySequence {
    pub fn new(values: Vec<i8>, kind: SequenceKind, start: u64) -> Result<Self> {
        check_signs(&values)?;
        Ok(Self {
            values,
            kind,
            start,
        })
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `"+1"` / `"-1"`, one value per line.
    pub fn to_lines(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 3);
        for &v in &self.values {
            out.push_str(if v > 0 { "+1\n" } else { "-1\n" });
        }
        out
    }

    /// `'1'` for `+1`, `'0'` for `-1`.
    pub fn to_compact(&self) -> String {
        self.values
            .iter()
            .map(|&v| if v > 0 { '1' } else { '0' })
            .collect()
    }

    /// Comma-separated `"-1,1,-1,1"`.
    pub fn to_csv_row(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 3);
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        out
    }
}

impl AsRef<[i8]> for BinarySequence {
    fn as_ref(&self) -> &[i8] {
        &self.values
    }
}

pub(crate) fn check_signs(values: &[i8]) -> Result<()> {
    match values.iter().position(|&v| v != 1 && v != -1) {
        Some(index) => Err(Error::NotSign {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}

/// Parses either serialization: signed lines (`+1`/`-1`, also `1`) or a
/// compact `0`/`1` string.
pub fn parse_values(text: &str) -> Result<Vec<i8>> {
    let trimmed = text.trim();
    let bad = |s: &str| Error::Parse(format!("unrecognised sequence value {s:?}"));
    if !trimmed.contains(['\n', '+', '-', ',']) {
        return trimmed
            .chars()
            .map(|c| match c {
                '1' => Ok(1),
                '0' => Ok(-1),
                _ => Err(bad(&c.to_string())),
            })
            .collect();
    }
    trimmed
        .split(['\n', ','])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| match i8::from_str(s.trim_start_matches('+')) {
            Ok(v @ (1 | -1)) => Ok(v),
            _ => Err(bad(s)),
        })
        .collect()
}

/// `B(n)` over `count` consecutive primes starting at 1-based index
/// `start_prime_index` (index 1 is the prime 3).
pub fn b_sequence(count: usize, start_prime_index: u64) -> Result<BinarySequence> {
    if count == 0 {
        return Err(Error::EmptyCount);
    }
    let primes = odd_primes_from(start_prime_index, count)?;
    let values = primes
        .par_iter()
        .map(|&p| pisano_period_prime(p).map(|r| r.sign().expect("prime record")))
        .collect::<Result<Vec<i8>>>()?;
    Ok(BinarySequence {
        values,
        kind: SequenceKind::PrimeIndexed,
        start: primes[0],
    })
}

/// Sign of the multiple-of-8 test for the moduli `start_modulus ..
/// start_modulus + count`.
pub fn general_sequence(count: usize, start_modulus: u64) -> Result<BinarySequence> {
    if count == 0 {
        return Err(Error::EmptyCount);
    }
    let values = (start_modulus..start_modulus + count as u64)
        .into_par_iter()
        .map(|m| pisano_period_bruteforce(m).map(|n| if n % 8 == 0 { 1 } else { -1 }))
        .collect::<Result<Vec<i8>>>()?;
    Ok(BinarySequence {
        values,
        kind: SequenceKind::GeneralModuli,
        start: start_modulus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE_BITS: [i8; 25] = [
        -1, 1, -1, 1, -1, -1, 1, -1, 1, 1, -1, 1, -1, -1, -1, 1, 1, -1, 1, -1, 1, -1, 1, -1, 1,
    ];

    #[test]
    fn b_sequence_examples() {
        assert_eq!(b_sequence(4, 1).unwrap().values(), &[-1, 1, -1, 1]);
        let full = b_sequence(25, 1).unwrap();
        assert_eq!(full.values(), &TABLE_BITS);
        assert_eq!(
            (full.kind(), full.start(), full.len()),
            (SequenceKind::PrimeIndexed, 3, 25)
        );
        let last = b_sequence(1, 25).unwrap();
        assert_eq!((last.values(), last.start()), (&[1i8][..], 101));
        assert_eq!(b_sequence(0, 1), Err(Error::EmptyCount));
        assert_eq!(b_sequence(3, 0), Err(Error::ZeroIndex));
    }

    #[test]
    fn general_examples() {
        assert_eq!(general_sequence(2, 2).unwrap().values(), &[-1, 1]);
        assert_eq!(general_sequence(1, 7).unwrap().values(), &[1]);
        assert_eq!(general_sequence(1, 10).unwrap().values(), &[-1]);
        assert_eq!(general_sequence(0, 2), Err(Error::EmptyCount));
        assert_eq!(general_sequence(3, 1), Err(Error::InvalidModulus(1)));
    }

    #[test]
    fn restart_consistency() {
        for (a, b) in [(1usize, 1usize), (7, 30), (100, 57)] {
            let whole = b_sequence(a + b, 1).unwrap();
            let head = b_sequence(a, 1).unwrap();
            let tail = b_sequence(b, a as u64 + 1).unwrap();
            assert_eq!(whole.values(), [head.values(), tail.values()].concat());

            let whole = general_sequence(a + b, 2).unwrap();
            let head = general_sequence(a, 2).unwrap();
            let tail = general_sequence(b, 2 + a as u64).unwrap();
            assert_eq!(whole.values(), [head.values(), tail.values()].concat());
        }
    }

    #[test]
    fn serializations() {
        let s = b_sequence(4, 1).unwrap();
        assert_eq!(s.to_lines(), "-1\n+1\n-1\n+1\n");
        assert_eq!(s.to_compact(), "0101");
        assert_eq!(s.to_csv_row(), "-1,1,-1,1");
        for text in [s.to_lines(), s.to_compact(), s.to_csv_row()] {
            assert_eq!(parse_values(&text).unwrap(), s.values());
        }
        assert!(parse_values("+2\n").is_err());
        assert!(parse_values("0120").is_err());
    }

    #[test]
    fn rejects_non_sign_values() {
        assert_eq!(
            BinarySequence::new(vec![1, 0, -1], SequenceKind::GeneralModuli, 2),
            Err(Error::NotSign { index: 1, value: 0 })
        );
    }
}
