//! Periods of Fibonacci and GH residue sequences.
//!
//! A period is the recurrence length of the state pair `(x_n, x_{n+1})`, not
//! of a single residue. For a prime `p != 5` the Pisano period divides
//! `p - 1` when `p` ends in 1 or 9 and divides `2p + 2` when it ends in 3 or 7;
//! `pisano_period_prime` searches only those divisors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{fib_mod, is_prime, FibPair, GhParams, Modulus};
use crate::{Error, Result};

/// Largest modulus accepted by the iterating routines.
pub const MAX_SCAN_MODULUS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PrimeClass {
    DivisorOfPMinus1,
    DivisorOf2PPlus2,
    /// Only `p = 5`, period 20.
    SpecialFive,
}

impl PrimeClass {
    /// Sign assigned in `B(n)`; 5 is counted with the `p - 1` class.
    pub fn sign(self) -> i8 {
        match self {
            PrimeClass::DivisorOfPMinus1 | PrimeClass::SpecialFive => 1,
            PrimeClass::DivisorOf2PPlus2 => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodRecord {
    pub modulus: u64,
    pub period: u64,
    /// `None` for composite moduli.
    pub class: Option<PrimeClass>,
    /// The period written in terms of `p`, e.g. `"(p-1)/2"`; empty for composites.
    pub ratio_label: String,
}

impl PeriodRecord {
    /// `+1` / `-1` for prime records.
    pub fn sign(&self) -> Option<i8> {
        self.class.map(PrimeClass::sign)
    }
}

fn check_scan_range(m: u64) -> Result<Modulus> {
    if m > MAX_SCAN_MODULUS {
        return Err(Error::ModulusTooLarge {
            value: m,
            limit: MAX_SCAN_MODULUS,
        });
    }
    Modulus::new(m)
}

/// Smallest `N >= 1` taking a seed state back to itself under `(x, y) -> (y, x + y)`.
fn orbit_length(seed: (u64, u64), m: u64) -> u64 {
    let (mut x, mut y) = seed;
    let mut steps = 0u64;
    loop {
        let next = x + y;
        (x, y) = (y, if next >= m { next - m } else { next });
        steps += 1;
        if (x, y) == seed {
            return steps;
        }
    }
}

/// Pisano period by iterating the recurrence until `(0, 1)` recurs.
pub fn pisano_period_bruteforce(m: u64) -> Result<u64> {
    let m = check_scan_range(m)?;
    Ok(orbit_length((0, 1), m.get()))
}

/// Prime factorization by trial division, ascending, with multiplicity.
fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (q, e) in factorize(n) {
        let len = out.len();
        let mut pow = 1;
        for _ in 0..e {
            pow *= q;
            for i in 0..len {
                out.push(out[i] * pow);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Distinct prime factors of `n`.
pub fn prime_factors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(q, _)| q).collect()
}

fn ratio_label(class: PrimeClass, period: u64, p: u64) -> String {
    let (bound, base) = match class {
        PrimeClass::SpecialFive => return "5(p-1)".to_string(),
        PrimeClass::DivisorOfPMinus1 => (p - 1, "p-1"),
        PrimeClass::DivisorOf2PPlus2 => (2 * p + 2, "2p+2"),
    };
    match bound / period {
        1 => base.to_string(),
        k => format!("({base})/{k}"),
    }
}

/// Pisano period of an odd prime from the divisors of its class bound.
pub fn pisano_period_prime(p: u64) -> Result<PeriodRecord> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let m = Modulus::new(p)?;
    if p == 5 {
        return Ok(PeriodRecord {
            modulus: 5,
            period: 20,
            class: Some(PrimeClass::SpecialFive),
            ratio_label: ratio_label(PrimeClass::SpecialFive, 20, 5),
        });
    }
    let (class, bound) = match p % 10 {
        1 | 9 => (PrimeClass::DivisorOfPMinus1, p - 1),
        _ => (PrimeClass::DivisorOf2PPlus2, 2 * p + 2),
    };
    let period = divisors(bound)
        .into_iter()
        .find(|&d| fib_mod(d, m) == FibPair::ORIGIN)
        .expect("the class bound is itself a period");
    Ok(PeriodRecord {
        modulus: p,
        period,
        class: Some(class),
        ratio_label: ratio_label(class, period, p),
    })
}

/// Period record for any modulus: divisor search for odd primes, brute
/// force otherwise (class `None` for composites and 2).
pub fn period_record(m: u64) -> Result<PeriodRecord> {
    if m != 2 && is_prime(m) {
        return pisano_period_prime(m);
    }
    Ok(PeriodRecord {
        modulus: m,
        period: pisano_period_bruteforce(m)?,
        class: None,
        ratio_label: String::new(),
    })
}

/// Period of the GH sequence with the given seed, by iterating the state pair.
pub fn gh_period(params: GhParams, m: Modulus) -> Result<u64> {
    let m = check_scan_range(m.get())?;
    if params.is_degenerate(m) {
        return Err(Error::DegenerateSeed {
            a: params.a,
            b: params.b,
            m: m.get(),
        });
    }
    Ok(orbit_length(params.reduced(m), m.get()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub modulus: u64,
    pub period: u64,
    /// `period <= 6m`
    pub bound_met: bool,
    /// `period == 6m`
    pub equality: bool,
}

/// `true` iff `m = 2 * 5^k` for some `k >= 1`.
pub fn is_twice_power_of_five(m: u64) -> bool {
    if m < 10 || !m.is_multiple_of(2) {
        return false;
    }
    let mut r = m / 2;
    while r.is_multiple_of(5) {
        r /= 5;
    }
    r == 1
}

/// Checks `N(m) <= 6m` for every `2 <= m <= m_max`, ordered by modulus.
pub fn verify_period_bound(m_max: u64) -> Result<Vec<BoundCheck>> {
    if m_max > MAX_SCAN_MODULUS {
        return Err(Error::ModulusTooLarge {
            value: m_max,
            limit: MAX_SCAN_MODULUS,
        });
    }
    if m_max < 2 {
        return Ok(Vec::new());
    }
    (2..=m_max)
        .into_par_iter()
        .map(|m| {
            let period = pisano_period_bruteforce(m)?;
            Ok(BoundCheck {
                modulus: m,
                period,
                bound_met: period <= 6 * m,
                equality: period == 6 * m,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::OddPrimes;
    use proptest::prelude::*;

    fn md(v: u64) -> Modulus {
        Modulus::new(v).unwrap()
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(pisano_period_bruteforce(3), Ok(8));
        assert_eq!(pisano_period_bruteforce(2), Ok(3));
        assert_eq!(pisano_period_bruteforce(10), Ok(60));
        assert_eq!(pisano_period_bruteforce(1), Err(Error::InvalidModulus(1)));
        assert!(matches!(
            pisano_period_bruteforce(MAX_SCAN_MODULUS + 1),
            Err(Error::ModulusTooLarge { .. })
        ));
    }

    #[test]
    fn prime_examples() {
        let r = pisano_period_prime(29).unwrap();
        assert_eq!(
            (r.period, r.class, r.ratio_label.as_str()),
            (14, Some(PrimeClass::DivisorOfPMinus1), "(p-1)/2")
        );
        let r = pisano_period_prime(47).unwrap();
        assert_eq!(
            (r.period, r.class, r.ratio_label.as_str()),
            (32, Some(PrimeClass::DivisorOf2PPlus2), "(2p+2)/3")
        );
        let r = pisano_period_prime(5).unwrap();
        assert_eq!(
            (r.period, r.class, r.ratio_label.as_str()),
            (20, Some(PrimeClass::SpecialFive), "5(p-1)")
        );
        let r = pisano_period_prime(11).unwrap();
        assert_eq!((r.period, r.ratio_label.as_str()), (10, "p-1"));
        let r = pisano_period_prime(3).unwrap();
        assert_eq!((r.period, r.ratio_label.as_str()), (8, "2p+2"));
    }

    #[test]
    fn prime_rejects_non_primes() {
        assert_eq!(pisano_period_prime(2), Err(Error::NotOddPrime(2)));
        assert_eq!(pisano_period_prime(9), Err(Error::NotOddPrime(9)));
        assert_eq!(pisano_period_prime(1), Err(Error::NotOddPrime(1)));
    }

    #[test]
    fn prime_matches_bruteforce() {
        for p in OddPrimes::below(3_000) {
            let fast = pisano_period_prime(p).unwrap();
            assert_eq!(fast.period, pisano_period_bruteforce(p).unwrap(), "p = {p}");
            assert!(fast.period < p * p);
        }
    }

    #[test]
    fn largest_prime_is_classified() {
        let r = pisano_period_prime(2_147_483_647).unwrap();
        assert_eq!(r.class, Some(PrimeClass::DivisorOf2PPlus2));
        assert_eq!(fib_mod(r.period, md(2_147_483_647)), FibPair::ORIGIN);
    }

    #[test]
    fn returned_period_is_minimal() {
        for p in OddPrimes::below(20_000) {
            let r = pisano_period_prime(p).unwrap();
            for q in prime_factors(r.period) {
                assert_ne!(fib_mod(r.period / q, md(p)), FibPair::ORIGIN, "p = {p}");
            }
        }
    }

    #[test]
    fn divisors_small() {
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(97), vec![1, 97]);
        assert_eq!(
            divisors(96),
            (1..=96).filter(|d| 96 % d == 0).collect::<Vec<_>>()
        );
    }

    #[test]
    fn gh_period_examples() {
        assert_eq!(gh_period(GhParams::FIBONACCI, md(3)), Ok(8));
        assert_eq!(gh_period(GhParams::new(2, 1), md(5)), Ok(4));
        assert_eq!(gh_period(GhParams::new(2, 1), md(3)), Ok(8));
        assert_eq!(
            gh_period(GhParams::new(6, -12), md(6)),
            Err(Error::DegenerateSeed { a: 6, b: -12, m: 6 })
        );
    }

    #[test]
    fn bound_examples() {
        let eq = |m_max| -> Vec<u64> {
            verify_period_bound(m_max)
                .unwrap()
                .into_iter()
                .inspect(|c| assert!(c.bound_met))
                .filter(|c| c.equality)
                .map(|c| c.modulus)
                .collect()
        };
        assert_eq!(eq(10), vec![10]);
        assert!(eq(9).is_empty());
        assert_eq!(eq(250), vec![10, 50, 250]);
        assert!(verify_period_bound(1).unwrap().is_empty());
    }

    #[test]
    fn twice_power_of_five() {
        let hits: Vec<u64> = (0..10_000).filter(|&m| is_twice_power_of_five(m)).collect();
        assert_eq!(hits, vec![10, 50, 250, 1250, 6250]);
    }

    proptest! {
        #[test]
        fn gh_period_divides_pisano(a in -500i64..500, b in -500i64..500, m in 2u64..=200) {
            let params = GhParams::new(a, b);
            prop_assume!(!params.is_degenerate(md(m)));
            let n = gh_period(params, md(m)).unwrap();
            prop_assert_eq!(pisano_period_bruteforce(m).unwrap() % n, 0);
        }
    }
}
