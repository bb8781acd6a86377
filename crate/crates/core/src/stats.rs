//! Normalized autocorrelation `C(k)` of a `+1/-1` sequence and the
//! randomness measure `R = 1 - sum_{k=1}^{n-1} |C(k)| / (n - 1)`.
//!
//! The lag sums are accumulated as exact integers and divided once.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitmap::check_signs;
use crate::{Error, Result};

/// How `B(j + k)` is treated once `j + k` runs past the end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// Wrap around: `C(k) = (1/n) sum_j B(j) B((j + k) mod n)`.
    #[default]
    Circular,
    /// Overlap only, normalised by the overlap: `C(k) = (1/(n-k)) sum_{j<n-k} B(j) B(j+k)`.
    LinearUnbiased,
    /// Overlap only (missing terms are zero), normalised by `n`:
    /// `C(k) = (1/n) sum_{j<n-k} B(j) B(j+k)`.
    LinearBiased,
}

impl Convention {
    pub const ALL: [Convention; 3] = [
        Convention::Circular,
        Convention::LinearUnbiased,
        Convention::LinearBiased,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Convention::Circular => "circular",
            Convention::LinearUnbiased => "linear-unbiased",
            Convention::LinearBiased => "linear-biased",
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Convention::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown convention {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutocorrProfile {
    /// `C(0) ..= C(n-1)`.
    pub values: Vec<f64>,
    /// Integer lag sums behind each value.
    pub sums: Vec<i64>,
    pub convention: Convention,
    pub n: usize,
}

impl AutocorrProfile {
    /// `k,C(k)` rows with a header line; values at 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 24);
        out.push_str("k,C(k)\n");
        for (k, &c) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{k},{}", format_g17(c));
        }
        out
    }
}

fn lag_sum(values: &[i8], k: usize, convention: Convention) -> i64 {
    let n = values.len();
    let overlap: i64 = values[..n - k]
        .iter()
        .zip(&values[k..])
        .map(|(&a, &b)| (a * b) as i64)
        .sum();
    match convention {
        Convention::Circular => {
            overlap
                + values[n - k..]
                    .iter()
                    .zip(&values[..k])
                    .map(|(&a, &b)| (a * b) as i64)
                    .sum::<i64>()
        }
        Convention::LinearUnbiased | Convention::LinearBiased => overlap,
    }
}

/// `C(k)` for `k = 0 .. n-1`.
pub fn autocorrelation(seq: impl AsRef<[i8]>, convention: Convention) -> Result<AutocorrProfile> {
    let values = seq.as_ref();
    let n = values.len();
    if n < 2 {
        return Err(Error::SequenceTooShort(n));
    }
    check_signs(values)?;
    let sums: Vec<i64> = (0..n)
        .into_par_iter()
        .map(|k| lag_sum(values, k, convention))
        .collect();
    let values = sums
        .iter()
        .enumerate()
        .map(|(k, &s)| match convention {
            Convention::LinearUnbiased => s as f64 / (n - k) as f64,
            _ => s as f64 / n as f64,
        })
        .collect();
    Ok(AutocorrProfile {
        values,
        sums,
        convention,
        n,
    })
}

/// Randomness measure over the off-peak lags `1 ..= n-1`.
pub fn randomness_measure(profile: &AutocorrProfile) -> f64 {
    let n = profile.n;
    let measure = match profile.convention {
        // common denominator n(n-1): one exact integer sum, one division
        Convention::Circular | Convention::LinearBiased => {
            let total: i64 = profile.sums[1..].iter().map(|s| s.abs()).sum();
            1.0 - total as f64 / (n as f64 * (n - 1) as f64)
        }
        Convention::LinearUnbiased => {
            let total: f64 = profile.values[1..].iter().map(|c| c.abs()).sum();
            1.0 - total / (n - 1) as f64
        }
    };
    measure.clamp(0.0, 1.0)
}

/// Autocorrelation followed by the randomness measure.
pub fn randomness(seq: impl AsRef<[i8]>, convention: Convention) -> Result<f64> {
    Ok(randomness_measure(&autocorrelation(seq, convention)?))
}

/// C's `%.17g`.
pub fn format_g17(x: f64) -> String {
    const DIGITS: i32 = 17;
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..DIGITS).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp) as usize;
        trim_fraction(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
