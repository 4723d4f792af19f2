//! Scalar abstraction for the recurrence kernels.
//!
//! Everything downstream of coefficient evaluation (orthogonal-polynomial
//! recurrences, jets, stitched products) is written against [`Real`] so the
//! same code runs in `f64` for ordinary work and in [`DoubleDouble`] when a
//! run is deep enough that double precision frays. `f32` is supported for
//! completeness.

use crate::dd::DoubleDouble;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

pub trait Real:
    Copy
    + Debug
    + Display
    + PartialOrd
    + Zero
    + One
    + FromPrimitive
    + ToPrimitive
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    /// Label used in output metadata (`"double"`, `"extended"`, ...).
    const NAME: &'static str;

    /// Conversion from `f64`; exact whenever the target is at least as wide.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 conversion")
    }

    /// Exact conversion from an index-sized integer.
    fn of_u64(n: u64) -> Self {
        Self::from_u64(n).expect("u64 conversion")
    }

    /// Conversion from extended precision, rounding when narrower.
    fn of_dd(x: DoubleDouble) -> Self;

    /// Nearest `f64`.
    fn f64(self) -> f64 {
        self.to_f64().expect("f64 narrowing")
    }

    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn ln(self) -> Self;
    fn exp(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn powf(self, p: Self) -> Self;
    fn max(self, other: Self) -> Self;
    fn min(self, other: Self) -> Self;
    fn is_finite(self) -> bool;
}

impl Real for f64 {
    const NAME: &'static str = "double";

    fn of_dd(x: DoubleDouble) -> Self {
        x.to_f64()
    }

    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn powf(self, p: Self) -> Self {
        f64::powf(self, p)
    }
    fn max(self, other: Self) -> Self {
        f64::max(self, other)
    }
    fn min(self, other: Self) -> Self {
        f64::min(self, other)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Real for f32 {
    const NAME: &'static str = "single";

    fn of_dd(x: DoubleDouble) -> Self {
        x.to_f64() as f32
    }

    fn abs(self) -> Self {
        f32::abs(self)
    }
    fn sqrt(self) -> Self {
        f32::sqrt(self)
    }
    fn ln(self) -> Self {
        f32::ln(self)
    }
    fn exp(self) -> Self {
        f32::exp(self)
    }
    fn powi(self, n: i32) -> Self {
        f32::powi(self, n)
    }
    fn powf(self, p: Self) -> Self {
        f32::powf(self, p)
    }
    fn max(self, other: Self) -> Self {
        f32::max(self, other)
    }
    fn min(self, other: Self) -> Self {
        f32::min(self, other)
    }
    fn is_finite(self) -> bool {
        f32::is_finite(self)
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self::ONE
    }
}

impl FromPrimitive for DoubleDouble {
    fn from_i64(n: i64) -> Option<Self> {
        Some(DoubleDouble::from_i64(n))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(DoubleDouble::from_u64(n))
    }
    fn from_f64(x: f64) -> Option<Self> {
        Some(DoubleDouble::from_f64(x))
    }
}

impl ToPrimitive for DoubleDouble {
    fn to_i64(&self) -> Option<i64> {
        let t = self.trunc().to_f64();
        if t >= i64::MIN as f64 && t <= i64::MAX as f64 {
            Some(t as i64)
        } else {
            None
        }
    }
    fn to_u64(&self) -> Option<u64> {
        let t = self.trunc().to_f64();
        if (0.0..=u64::MAX as f64).contains(&t) {
            Some(t as u64)
        } else {
            None
        }
    }
    fn to_f64(&self) -> Option<f64> {
        Some(DoubleDouble::to_f64(*self))
    }
}

impl Real for DoubleDouble {
    const NAME: &'static str = "extended";

    fn of_dd(x: DoubleDouble) -> Self {
        x
    }

    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }
    fn sqrt(self) -> Self {
        DoubleDouble::sqrt(self)
    }
    fn ln(self) -> Self {
        DoubleDouble::ln(self)
    }
    fn exp(self) -> Self {
        DoubleDouble::exp(self)
    }
    fn powi(self, n: i32) -> Self {
        DoubleDouble::powi(self, n)
    }
    fn powf(self, p: Self) -> Self {
        DoubleDouble::powf(self, p)
    }
    fn max(self, other: Self) -> Self {
        DoubleDouble::max(self, other)
    }
    fn min(self, other: Self) -> Self {
        DoubleDouble::min(self, other)
    }
    fn is_finite(self) -> bool {
        DoubleDouble::is_finite(self)
    }
}
