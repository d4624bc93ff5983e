//! Exact time arithmetic.
//!
//! Durations are rationals measured in units of a reference time (normally the
//! π/2 evolution time of the weakest coupling). Values that come from floating
//! point inputs land on a dyadic grid of 2^-60 units, so sums and differences
//! of many durations stay inside `i128` without loss.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Finest resolution for durations converted from `f64`, as a power of two.
pub const GRID_BITS: u32 = 60;

/// An exact duration (or sign-weighted time integral) in reference units.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Time(pub Ratio<i128>);

impl Time {
    pub const ZERO: Time = Time(Ratio::new_raw(0, 1));
    pub const ONE: Time = Time(Ratio::new_raw(1, 1));

    pub fn new(numer: i128, denom: i128) -> Self {
        Time(Ratio::new(numer, denom))
    }

    pub fn from_integer(n: i128) -> Self {
        Time(Ratio::from_integer(n))
    }

    /// Converts a float to the nearest point of the 2^-60 grid. Values already
    /// on the grid (every float with at most 60 fractional bits) convert exactly.
    pub fn from_f64(value: f64) -> Result<Self> {
        if !value.is_finite() || value.abs() > 1e15 {
            return Err(Error::UnrepresentableTime(value));
        }
        let scaled = (value * (1u64 << GRID_BITS) as f64).round();
        Ok(Time(Ratio::new(scaled as i128, 1i128 << GRID_BITS)))
    }

    pub fn to_f64(self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(self) -> bool {
        *self.0.numer() > 0
    }

    pub fn numer(self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(self) -> i128 {
        *self.0.denom()
    }

    pub fn halve(self) -> Self {
        Time(self.0 / 2)
    }

    pub fn div_int(self, n: i128) -> Self {
        Time(self.0 / n)
    }

    pub fn mul_int(self, n: i128) -> Self {
        Time(self.0 * n)
    }

    pub fn abs(self) -> Self {
        if self.0 < Ratio::zero() {
            Time(-self.0)
        } else {
            self
        }
    }
}

impl std::ops::Add for Time {
    type Output = Time;
    fn add(self, rhs: Time) -> Time {
        Time(self.0 + rhs.0)
    }
}

impl std::ops::AddAssign for Time {
    fn add_assign(&mut self, rhs: Time) {
        self.0 += rhs.0;
    }
}

impl std::ops::Sub for Time {
    type Output = Time;
    fn sub(self, rhs: Time) -> Time {
        Time(self.0 - rhs.0)
    }
}

impl std::ops::SubAssign for Time {
    fn sub_assign(&mut self, rhs: Time) {
        self.0 -= rhs.0;
    }
}

impl std::ops::Mul for Time {
    type Output = Time;
    fn mul(self, rhs: Time) -> Time {
        Time(self.0 * rhs.0)
    }
}

impl std::ops::Neg for Time {
    type Output = Time;
    fn neg(self) -> Time {
        Time(-self.0)
    }
}

impl std::iter::Sum for Time {
    fn sum<I: Iterator<Item = Time>>(iter: I) -> Time {
        iter.fold(Time::ZERO, |a, b| a + b)
    }
}

impl fmt::Debug for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Time {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: i128 = n.parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let d: i128 = d.parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        if d == 0 {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(Time::new(n, d))
    }
}

impl Serialize for Time {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Time {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
