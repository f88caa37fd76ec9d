//! Exact non-negative rationals used for stretch bounds and observed stretch.
//!
//! A denominator of zero encodes `+∞` (a positive weight over a zero
//! distance, or an unreachable pair). All comparisons cross-multiply in
//! 128-bit arithmetic, so no floating point ever decides an audit.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Ratio {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Ratio {
    pub const ONE: Ratio = Ratio { num: 1, den: 1 };
    pub const INFINITY: Ratio = Ratio { num: 1, den: 0 };

    pub fn new(num: u64, den: u64) -> Self {
        if den == 0 {
            return Self::INFINITY;
        }
        let g = gcd(num, den).max(1);
        Ratio {
            num: num / g,
            den: den / g,
        }
    }

    pub fn integer(v: u64) -> Self {
        Ratio { num: v, den: 1 }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_infinite(&self) -> bool {
        self.den == 0
    }

    /// Observed stretch `weight / dist`; `0/0` counts as exact.
    pub fn observed(weight: u64, dist: u64) -> Self {
        match (weight, dist) {
            (0, 0) => Self::ONE,
            (_, 0) => Self::INFINITY,
            _ => Self::new(weight, dist),
        }
    }

    /// `weight <= self * dist`, decided by cross-multiplication.
    pub fn admits(&self, weight: u64, dist: u64) -> bool {
        if self.den == 0 {
            return true;
        }
        (weight as u128) * (self.den as u128) <= (self.num as u128) * (dist as u128)
    }

    pub fn checked_mul(&self, other: &Ratio) -> Option<Ratio> {
        if self.is_infinite() || other.is_infinite() {
            return Some(Self::INFINITY);
        }
        let num = (self.num as u128) * (other.num as u128);
        let den = (self.den as u128) * (other.den as u128);
        let g = {
            let (mut a, mut b) = (num, den);
            while b != 0 {
                (a, b) = (b, a % b);
            }
            a.max(1)
        };
        let (num, den) = (num / g, den / g);
        Some(Ratio {
            num: u64::try_from(num).ok()?,
            den: u64::try_from(den).ok()?,
        })
    }

    /// `2 * self + 1`, the source-wise stretch of a subset stretch `self`.
    pub fn double_plus_one(&self) -> Ratio {
        if self.is_infinite() {
            return Self::INFINITY;
        }
        Ratio::new(2 * self.num + self.den, self.den)
    }

    pub fn ceil(&self) -> u64 {
        if self.den == 0 {
            u64::MAX
        } else {
            self.num.div_ceil(self.den)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.den == 0 {
            f64::INFINITY
        } else {
            self.num as f64 / self.den as f64
        }
    }
}

impl PartialEq for Ratio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ratio {}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            _ => {
                let lhs = (self.num as u128) * (other.den as u128);
                let rhs = (other.num as u128) * (self.den as u128);
                lhs.cmp(&rhs)
            }
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 0 {
            write!(f, "inf")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "inf" {
            return Ok(Self::INFINITY);
        }
        let bad = || Error::param("ratio", format!("cannot parse `{s}` as num/den"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: u64 = n.trim().parse().map_err(|_| bad())?;
                let d: u64 = d.trim().parse().map_err(|_| bad())?;
                if d == 0 {
                    return Err(bad());
                }
                Ok(Ratio::new(n, d))
            }
            None => Ok(Ratio::integer(s.parse().map_err(|_| bad())?)),
        }
    }
}

impl From<Ratio> for String {
    fn from(r: Ratio) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for Ratio {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reduces_and_orders() {
        assert_eq!(Ratio::new(6, 4), Ratio::new(3, 2));
        assert_eq!(Ratio::new(6, 4).num(), 3);
        assert!(Ratio::new(19, 1) > Ratio::new(37, 2));
        assert!(Ratio::INFINITY > Ratio::integer(u64::MAX));
        assert_eq!(Ratio::observed(0, 0), Ratio::ONE);
        assert!(Ratio::observed(3, 0).is_infinite());
    }

    #[test]
    fn admits_is_cross_multiplied() {
        let nineteen = Ratio::integer(19);
        assert!(nineteen.admits(19 * 7, 7));
        assert!(!nineteen.admits(19 * 7 + 1, 7));
        let three_halves = Ratio::new(3, 2);
        assert!(three_halves.admits(3, 2));
        assert!(!three_halves.admits(4, 2));
    }

    #[test]
    fn parse_round_trip() {
        for s in ["19/1", "3/2", "inf", "0/1"] {
            let r: Ratio = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert_eq!("7".parse::<Ratio>().unwrap(), Ratio::integer(7));
        assert!("1/0".parse::<Ratio>().is_err());
        assert!("x".parse::<Ratio>().is_err());
    }

    proptest! {
        #[test]
        fn order_matches_real_order(a in 0u64..10_000, b in 1u64..10_000, c in 0u64..10_000, d in 1u64..10_000) {
            let lhs = Ratio::new(a, b);
            let rhs = Ratio::new(c, d);
            prop_assert_eq!(lhs.cmp(&rhs), (a * d).cmp(&(c * b)));
        }
    }
}
