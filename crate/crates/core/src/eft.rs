//! Error-free transformations for addition and the [`Twofold`] pair.
//!
//! Both transformations return `(x, y)` with `x = fl(a + b)` and
//! `x + y = a + b` exactly, as long as nothing overflows. Non-finite inputs
//! propagate through without trapping; callers treat a non-finite `value` as
//! a range failure.

use std::fmt;

use crate::real::Real;

/// A value + error pair approximating one real number.
///
/// `error` estimates `exact - value`, so `value + error` is the improved
/// result. For the transformations in this module the pair is exact.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Twofold<T> {
    pub value: T,
    pub error: T,
}

impl<T: Real> Twofold<T> {
    pub fn new(value: T, error: T) -> Self {
        Twofold { value, error }
    }

    /// A pair with no error term.
    pub fn exact(value: T) -> Self {
        Twofold { value, error: T::ZERO }
    }

    /// `value + error` evaluated in binary64.
    ///
    /// Exact for binary32 pairs whose components span fewer than 53 bits,
    /// which covers every non-overlapping pair.
    pub fn sum_f64(self) -> f64 {
        self.value.to_f64() + self.error.to_f64()
    }

    pub fn is_finite(self) -> bool {
        self.value.is_finite() && self.error.is_finite()
    }

    /// Exact widening of both components.
    pub fn widen(self) -> Twofold<f64> {
        Twofold {
            value: self.value.to_f64(),
            error: self.error.to_f64(),
        }
    }

    /// Bitwise equality of both components.
    pub fn bit_eq(self, other: Self) -> bool {
        self.value.bits() == other.value.bits() && self.error.bits() == other.error.bits()
    }
}

impl<T: fmt::Display> fmt::Display for Twofold<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}", self.value, self.error)
    }
}

/// Dekker's three-operation transformation. Requires `|a| >= |b|` (or `a == 0`).
///
/// The ordering is only checked in debug builds.
#[inline(always)]
pub fn fast_two_sum<T: Real>(a: T, b: T) -> Twofold<T> {
    debug_assert!(
        !(a.is_finite() && b.is_finite()) || a == T::ZERO || a.abs() >= b.abs(),
        "fast_two_sum requires |a| >= |b| (a = {a:?}, b = {b:?})"
    );
    let x = a + b;
    let b_virtual = x - a;
    let y = b - b_virtual;
    Twofold { value: x, error: y }
}

/// Knuth's six-operation transformation; no ordering requirement.
#[inline(always)]
pub fn two_sum<T: Real>(a: T, b: T) -> Twofold<T> {
    let x = a + b;
    let b_virtual = x - a;
    let a_virtual = x - b_virtual;
    let b_roundoff = b - b_virtual;
    let a_roundoff = a - a_virtual;
    let y = a_roundoff + b_roundoff;
    Twofold { value: x, error: y }
}

/// Failure of the value-safety canary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanaryFailure {
    pub expected: f64,
    pub observed: f64,
}

impl fmt::Display for CanaryFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "floating-point environment is not value-safe: fast_two_sum(1, 2^-53).error = {:e}, expected {:e} \
             (reassociation, FMA contraction or a non-default rounding mode is in effect)",
            self.observed, self.expected
        )
    }
}

impl std::error::Error for CanaryFailure {}

/// Checks that round-off recovery works in this build and rounding mode.
///
/// Reassociation simplifies `b - ((a + b) - a)` to zero, so any value-unsafe
/// optimization of the transformation shows up as a zero error term.
pub fn fast_math_canary() -> Result<(), CanaryFailure> {
    canary_with(fast_two_sum)
}

/// Runs the canary against an arbitrary implementation of the transformation.
pub fn canary_with(transform: impl Fn(f64, f64) -> Twofold<f64>) -> Result<(), CanaryFailure> {
    let a = std::hint::black_box(1.0f64);
    let b = std::hint::black_box(2f64.powi(-53));
    let got = transform(a, b);
    if got.value == 1.0 && got.error == b {
        Ok(())
    } else {
        Err(CanaryFailure {
            expected: b,
            observed: got.error,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const U53: f64 = 1.0 / 9007199254740992.0; // 2^-53

    #[test]
    fn fast_two_sum_examples() {
        assert_eq!(fast_two_sum(1.0f64, 1.0), Twofold::new(2.0, 0.0));
        assert_eq!(fast_two_sum(1.0f64, U53), Twofold::new(1.0, U53));
        let big = 2f64.powi(53);
        assert_eq!(fast_two_sum(big, 1.0), Twofold::new(big, 1.0));
    }

    #[test]
    fn two_sum_examples() {
        for x in [0.0f64, 1.5, -3.25e-300, 7e300, f64::MIN_POSITIVE / 4.0] {
            let r = two_sum(0.0, x);
            assert_eq!(r.value.to_bits(), x.to_bits());
            assert_eq!(r.error, 0.0);
        }
        // Operand order violates Dekker's requirement; Knuth still recovers it.
        assert_eq!(two_sum(U53, 1.0f64), Twofold::new(1.0, U53));
    }

    #[test]
    fn subnormal_operands_are_exact() {
        let tiny = f64::from_bits(3);
        let r = two_sum(f64::MIN_POSITIVE, tiny);
        assert_eq!(r.value, f64::MIN_POSITIVE + tiny);
        assert_eq!(r.error, 0.0);
        let r = two_sum(1.0f32, f32::from_bits(1));
        assert_eq!((r.value, r.error), (1.0, f32::from_bits(1)));
    }

    #[test]
    fn non_finite_propagates() {
        assert!(two_sum(f64::MAX, f64::MAX).value.is_infinite());
        assert!(two_sum(f64::NAN, 1.0).value.is_nan());
        assert!(!fast_two_sum(f32::INFINITY, 1.0).is_finite());
        assert!(!two_sum(f32::NAN, 0.0).is_finite());
    }

    #[test]
    #[cfg(debug_assertions)]
    #[should_panic(expected = "requires |a| >= |b|")]
    fn dekker_precondition_is_asserted_in_debug() {
        fast_two_sum(1.0f64, 2.0);
    }

    #[test]
    fn canary_passes_and_detects_reassociation() {
        assert_eq!(fast_math_canary(), Ok(()));
        // What a reassociating compiler makes of b - ((a + b) - a).
        let reassociated = |a: f64, b: f64| Twofold::new(a + b, b - b);
        let err = canary_with(reassociated).unwrap_err();
        assert_eq!(err.observed, 0.0);
        assert!(err.to_string().contains("not value-safe"));
    }
}
