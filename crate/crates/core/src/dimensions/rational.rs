//! Exact rational scalars used for dimension exponents.
//!
//! Dimension-matrix algebra (rank, nullspaces, non-dimensionalizing
//! vectors) must be deterministic and tolerance-free, so exponents are
//! carried as exact rationals rather than floats. Floats only appear once
//! a vector crosses into the statistics layer.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

use super::DimError;

/// An exact rational number, always in lowest terms with a positive
/// denominator.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(Ratio<i64>);

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));

    /// Build `numerator / denominator`, normalizing sign and reducing.
    pub fn new(numerator: i64, denominator: i64) -> Result<Self, DimError> {
        if denominator == 0 {
            return Err(DimError::ZeroDenominator);
        }
        Ok(Rational(Ratio::new(numerator, denominator)))
    }

    pub fn from_int(value: i64) -> Self {
        Rational(Ratio::from_integer(value))
    }

    pub fn numerator(&self) -> i64 {
        *self.0.numer()
    }

    /// Always positive.
    pub fn denominator(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Exact division; `None` when `rhs` is zero.
    pub fn checked_div(&self, rhs: &Rational) -> Option<Rational> {
        if rhs.is_zero() {
            None
        } else {
            Some(Rational(self.0 / rhs.0))
        }
    }

    pub fn recip(&self) -> Result<Rational, DimError> {
        Rational::ONE
            .checked_div(self)
            .ok_or(DimError::DivisionByZero)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().expect("finite rational")
    }
}

impl From<i64> for Rational {
    fn from(value: i64) -> Self {
        Rational::from_int(value)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}

/// Panics on a zero divisor; use [`Rational::checked_div`] where the
/// divisor is not already known to be nonzero.
impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        self.checked_div(&rhs).expect("division by zero")
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        self.0 -= rhs.0;
    }
}

impl MulAssign for Rational {
    fn mul_assign(&mut self, rhs: Rational) {
        self.0 *= rhs.0;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |acc, x| acc + x)
    }
}

/// Integers print bare (`3`), everything else as `num/den` (`-5/7`).
impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator() == 1 {
            write!(f, "{}", self.numerator())
        } else {
            write!(f, "{}/{}", self.numerator(), self.denominator())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts `3`, `-2`, and `num/den` forms such as `5/7` or `-5/7`.
impl FromStr for Rational {
    type Err = DimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DimError::ParseRational(s.to_string());
        match s.split_once('/') {
            None => {
                let n: i64 = s.trim().parse().map_err(|_| bad())?;
                Ok(Rational::from_int(n))
            }
            Some((num, den)) => {
                let n: i64 = num.trim().parse().map_err(|_| bad())?;
                let d: i64 = den.trim().parse().map_err(|_| bad())?;
                if d == 0 {
                    return Err(DimError::ZeroDenominator);
                }
                Ok(Rational(Ratio::new(n, d)))
            }
        }
    }
}

/// Shorthand for building rationals in tests and model tables.
pub fn rat(numerator: i64, denominator: i64) -> Rational {
    Rational::new(numerator, denominator).expect("nonzero denominator")
}
