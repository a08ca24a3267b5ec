//! Numeric types used for token values and durations.
//!
//! Everything downstream of the reader is generic over [`Scalar`]. Two
//! implementations ship: `i64` for integral models and [`Milli`], an exact
//! fixed-point type with three fractional digits.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Rem, Sub};

use num_traits::{FromPrimitive, Num, One, ToPrimitive, Zero};

use crate::sexpr::{Decimal, SExpr};

/// A totally ordered, hashable number with exact addition.
pub trait Scalar: Num + FromPrimitive + Copy + Ord + Hash + fmt::Debug + fmt::Display + Send + Sync + 'static {
    /// Converts a numeric literal, or `None` when the value is not exactly
    /// representable.
    fn from_sexpr(e: &SExpr) -> Option<Self>;

    fn to_sexpr(self) -> SExpr;

    /// The value as an integer if it has no fractional part.
    fn as_integer(self) -> Option<i64>;
}

impl Scalar for i64 {
    fn from_sexpr(e: &SExpr) -> Option<Self> {
        match e {
            SExpr::Int(v) => Some(*v),
            SExpr::Real(d) => d.as_integer(),
            _ => None,
        }
    }

    fn to_sexpr(self) -> SExpr {
        SExpr::Int(self)
    }

    fn as_integer(self) -> Option<i64> {
        Some(self)
    }
}

/// Exact decimal with three fractional digits, stored as thousandths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Milli(i64);

impl Milli {
    pub const SCALE: i64 = 1000;

    pub fn from_thousandths(raw: i64) -> Self {
        Milli(raw)
    }

    pub fn thousandths(self) -> i64 {
        self.0
    }

    /// Exact conversion from a decimal literal; finer than 1/1000 is rejected.
    pub fn from_decimal(d: Decimal) -> Option<Self> {
        let (m, s) = d.normalized();
        if s > 3 {
            return None;
        }
        m.checked_mul(10i64.pow(3 - s as u32)).map(Milli)
    }
}

impl fmt::Display for Milli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % Self::SCALE == 0 {
            return write!(f, "{}", self.0 / Self::SCALE);
        }
        let d = Decimal::new(self.0, 3);
        let (m, s) = d.normalized();
        write!(f, "{}", Decimal::new(m, s))
    }
}

impl Add for Milli {
    type Output = Milli;
    fn add(self, rhs: Milli) -> Milli {
        Milli(self.0 + rhs.0)
    }
}

impl Sub for Milli {
    type Output = Milli;
    fn sub(self, rhs: Milli) -> Milli {
        Milli(self.0 - rhs.0)
    }
}

impl Mul for Milli {
    type Output = Milli;
    /// Truncates below 1/1000.
    fn mul(self, rhs: Milli) -> Milli {
        Milli((self.0 as i128 * rhs.0 as i128 / Self::SCALE as i128) as i64)
    }
}

impl Div for Milli {
    type Output = Milli;
    /// Truncates below 1/1000.
    fn div(self, rhs: Milli) -> Milli {
        Milli((self.0 as i128 * Self::SCALE as i128 / rhs.0 as i128) as i64)
    }
}

impl Rem for Milli {
    type Output = Milli;
    fn rem(self, rhs: Milli) -> Milli {
        Milli(self.0 % rhs.0)
    }
}

impl Zero for Milli {
    fn zero() -> Self {
        Milli(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl One for Milli {
    fn one() -> Self {
        Milli(Self::SCALE)
    }
}

impl Num for Milli {
    type FromStrRadixErr = String;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, String> {
        if radix != 10 {
            return Err(format!("unsupported radix {radix}"));
        }
        match crate::sexpr::read_sexprs(s).ok().as_deref() {
            Some([e]) => Milli::from_sexpr(e).ok_or_else(|| format!("not a 3-digit decimal: {s}")),
            _ => Err(format!("not a number: {s}")),
        }
    }
}

impl FromPrimitive for Milli {
    fn from_i64(n: i64) -> Option<Self> {
        n.checked_mul(Self::SCALE).map(Milli)
    }

    fn from_u64(n: u64) -> Option<Self> {
        i64::try_from(n).ok().and_then(Self::from_i64)
    }
}

impl ToPrimitive for Milli {
    fn to_i64(&self) -> Option<i64> {
        Some(self.0 / Self::SCALE)
    }

    fn to_u64(&self) -> Option<u64> {
        u64::try_from(self.0 / Self::SCALE).ok()
    }

    fn to_f64(&self) -> Option<f64> {
        Some(self.0 as f64 / Self::SCALE as f64)
    }
}

impl Scalar for Milli {
    fn from_sexpr(e: &SExpr) -> Option<Self> {
        match e {
            SExpr::Int(v) => Milli::from_i64(*v),
            SExpr::Real(d) => Milli::from_decimal(*d),
            _ => None,
        }
    }

    fn to_sexpr(self) -> SExpr {
        match self.as_integer() {
            Some(v) => SExpr::Int(v),
            None => {
                let (m, s) = Decimal::new(self.0, 3).normalized();
                SExpr::Real(Decimal::new(m, s))
            }
        }
    }

    fn as_integer(self) -> Option<i64> {
        (self.0 % Self::SCALE == 0).then_some(self.0 / Self::SCALE)
    }
}

/// Converts a small count (capacities, arities) into a scalar.
pub fn from_count<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("count fits in scalar")
}
