//! The attachment parameter α, kept as an exact rational with a float shadow
//! for the samplers.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlphaParam {
    num: u64,
    den: u64,
}

impl AlphaParam {
    /// Builds `num/den` in lowest terms. Both parts must be positive.
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::invalid(format!(
                "alpha must be a positive rational, got {num}/{den}"
            )));
        }
        let g = num.gcd(&den);
        Ok(AlphaParam {
            num: num / g,
            den: den / g,
        })
    }

    pub fn integer(value: u64) -> Result<Self> {
        Self::new(value, 1)
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }

    /// Float shadow used inside samplers only.
    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Total attachment weight `(1+α)n − 2` of a tree with `n` vertices.
    pub fn total_weight(&self, n: u64) -> BigRational {
        (BigRational::from_integer(BigInt::from(1)) + self.to_rational())
            * BigRational::from_integer(BigInt::from(n))
            - BigRational::from_integer(BigInt::from(2))
    }
}

impl fmt::Display for AlphaParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for AlphaParam {
    type Err = Error;

    /// Accepts `p/q`, a bare positive integer `p`, or a terminating decimal.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((int, frac)) = s.split_once('.') {
            let digits = format!("{int}{frac}");
            let bad = || Error::parse(format!("bad alpha decimal {s:?}"));
            if frac.is_empty() || frac.len() > 18 || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let p: u64 = digits.parse().map_err(|_| bad())?;
            return AlphaParam::new(p, 10u64.pow(frac.len() as u32));
        }
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let p: u64 = p
            .parse()
            .map_err(|_| Error::parse(format!("bad alpha numerator in {s:?}")))?;
        let q: u64 = q
            .parse()
            .map_err(|_| Error::parse(format!("bad alpha denominator in {s:?}")))?;
        AlphaParam::new(p, q)
    }
}
