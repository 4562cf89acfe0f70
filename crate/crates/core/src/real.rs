//! IEEE-754 working precisions.
//!
//! Everything in this crate is generic over [`Real`], which is implemented
//! for `f32` and `f64` only. Arithmetic on these types is plain IEEE
//! round-to-nearest-even: rustc never reassociates floating-point
//! expressions or contracts `a * b + c` into a fused multiply-add, so the
//! operation sequences written in [`crate::eft`] and [`crate::kernels`] are
//! executed exactly as written.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use crate::kernels::dispatch::Dispatch;

/// Binary floating-point format of the data being summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Precision {
    /// IEEE-754 binary32.
    F32,
    /// IEEE-754 binary64.
    F64,
}

impl Precision {
    pub const ALL: [Precision; 2] = [Precision::F32, Precision::F64];

    pub fn name(self) -> &'static str {
        match self {
            Precision::F32 => "f32",
            Precision::F64 => "f64",
        }
    }

    /// Unit round-off, half an ulp of 1.
    pub fn epsilon(self) -> f64 {
        match self {
            Precision::F32 => <f32 as Real>::EPSILON.to_f64(),
            Precision::F64 => <f64 as Real>::EPSILON,
        }
    }

    pub fn size_of(self) -> usize {
        match self {
            Precision::F32 => 4,
            Precision::F64 => 8,
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "f32" | "float" | "binary32" => Ok(Precision::F32),
            "f64" | "double" | "binary64" => Ok(Precision::F64),
            other => Err(format!("unknown precision `{other}` (valid: f32, f64)")),
        }
    }
}

/// A working precision: `f32` or `f64`.
///
/// Sealed; the kernel dispatch it carries picks SIMD backends per type.
pub trait Real:
    Dispatch
    + Copy
    + Default
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const PRECISION: Precision;
    const ZERO: Self;
    const ONE: Self;
    const TWO: Self;
    /// Unit round-off `2^-p` (half an ulp of 1).
    const EPSILON: Self;
    /// Significand width including the implicit bit.
    const MANTISSA_DIGITS: u32;

    /// Exact widening to binary64.
    fn to_f64(self) -> f64;
    /// Round a binary64 value to this precision (nearest, ties to even).
    fn from_f64(x: f64) -> Self;
    fn abs(self) -> Self;
    fn is_finite(self) -> bool;
    fn next_up(self) -> Self;
    fn next_down(self) -> Self;
    /// Raw bits widened to `u64`, for bitwise comparisons.
    fn bits(self) -> u64;
    /// True when the last significand bit is zero (the "even" neighbour).
    fn is_even(self) -> bool;

    /// `raw / 2^width`, rounded toward zero to this precision.
    ///
    /// Truncating keeps every result strictly below one, so uniform
    /// generators built on it stay in `[0, 1)` for all raw values.
    fn from_raw_fraction(raw: u64, width: u32) -> Self {
        debug_assert!(width <= 64 && (width == 64 || raw >> width == 0));
        let bit_len = 64 - raw.leading_zeros();
        let keep = if bit_len > Self::MANTISSA_DIGITS {
            raw & (u64::MAX << (bit_len - Self::MANTISSA_DIGITS))
        } else {
            raw
        };
        // `keep` fits in the significand, so both conversions are exact.
        Self::from_f64(keep as f64 * (-(width as f64)).exp2())
    }
}

impl Real for f32 {
    const PRECISION: Precision = Precision::F32;
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;
    const TWO: Self = 2.0;
    const EPSILON: Self = f32::EPSILON / 2.0;
    const MANTISSA_DIGITS: u32 = f32::MANTISSA_DIGITS;

    #[inline(always)]
    fn to_f64(self) -> f64 {
        self as f64
    }
    #[inline(always)]
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    #[inline(always)]
    fn abs(self) -> Self {
        f32::abs(self)
    }
    #[inline(always)]
    fn is_finite(self) -> bool {
        f32::is_finite(self)
    }
    fn next_up(self) -> Self {
        f32::next_up(self)
    }
    fn next_down(self) -> Self {
        f32::next_down(self)
    }
    fn bits(self) -> u64 {
        self.to_bits() as u64
    }
    fn is_even(self) -> bool {
        self.to_bits() & 1 == 0
    }
}

impl Real for f64 {
    const PRECISION: Precision = Precision::F64;
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;
    const TWO: Self = 2.0;
    const EPSILON: Self = f64::EPSILON / 2.0;
    const MANTISSA_DIGITS: u32 = f64::MANTISSA_DIGITS;

    #[inline(always)]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline(always)]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline(always)]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline(always)]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn next_up(self) -> Self {
        f64::next_up(self)
    }
    fn next_down(self) -> Self {
        f64::next_down(self)
    }
    fn bits(self) -> u64 {
        self.to_bits()
    }
    fn is_even(self) -> bool {
        self.to_bits() & 1 == 0
    }
}
