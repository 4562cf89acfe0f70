//! Exact reference sums built from non-overlapping floating-point
//! expansions.
//!
//! An [`Expansion`] holds binary64 components in increasing magnitude whose
//! exact (real-number) sum is the represented value. Adding a binary64
//! number cascades [`two_sum`] through the components and drops zero
//! round-offs, so the list stays short for realistic data and exact sums of
//! millions of addends run in milliseconds.

use std::cmp::Ordering;

use crate::eft::{two_sum, Twofold};
use crate::error::{Error, Result};
use crate::real::Real;

/// A non-overlapping expansion. The zero expansion has no components.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Expansion {
    components: Vec<f64>,
}

impl Expansion {
    pub fn zero() -> Self {
        Expansion::default()
    }

    pub fn from_value(v: f64) -> Self {
        let mut e = Expansion::zero();
        e.add(v);
        e
    }

    /// Components in increasing magnitude, none zero.
    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// False once an addition overflowed (the expansion is then meaningless).
    pub fn is_finite(&self) -> bool {
        self.components.iter().all(|c| c.is_finite())
    }

    /// Largest-magnitude component, or zero.
    pub fn leading(&self) -> f64 {
        self.components.last().copied().unwrap_or(0.0)
    }

    /// Sign of the represented real, which is the sign of the leading
    /// component.
    pub fn sign(&self) -> Ordering {
        self.leading().partial_cmp(&0.0).unwrap_or(Ordering::Equal)
    }

    /// The represented real, summed smallest first in binary64. Off from
    /// the correctly rounded value by at most about one ulp; use
    /// [`Expansion::round`] when that matters.
    pub fn estimate(&self) -> f64 {
        self.components.iter().fold(0.0, |acc, &c| acc + c)
    }

    /// Adds `v` exactly.
    pub fn add(&mut self, v: f64) {
        let mut q = v;
        let mut write = 0;
        for read in 0..self.components.len() {
            let Twofold { value, error } = two_sum(q, self.components[read]);
            q = value;
            if error != 0.0 {
                self.components[write] = error;
                write += 1;
            }
        }
        self.components.truncate(write);
        if q != 0.0 {
            self.components.push(q);
        }
    }

    /// Adds every component of `other` exactly.
    pub fn add_expansion(&mut self, other: &Expansion) {
        for &c in &other.components {
            self.add(c);
        }
    }

    pub fn negated(&self) -> Expansion {
        Expansion {
            components: self.components.iter().map(|c| -c).collect(),
        }
    }

    /// The represented real rounded to nearest (ties to even) in `T`.
    ///
    /// Starts from the binary64 estimate and walks to the neighbour that is
    /// closest, deciding each step with an exact residual.
    pub fn round<T: Real>(&self) -> T {
        let mut c = T::from_f64(self.estimate());
        if !c.is_finite() {
            return c;
        }
        loop {
            let mut residual = self.clone();
            residual.add(-c.to_f64());
            let (neighbour, outward) = match residual.sign() {
                Ordering::Equal => return c,
                Ordering::Greater => (c.next_up(), Ordering::Greater),
                Ordering::Less => (c.next_down(), Ordering::Less),
            };
            if !neighbour.is_finite() {
                return c;
            }
            // The gap between adjacent floats is a power of two, so the
            // midpoint offset is exact in binary64.
            let half_gap = (neighbour.to_f64() - c.to_f64()) / 2.0;
            residual.add(-half_gap);
            match residual.sign() {
                s if s == outward => c = neighbour,
                Ordering::Equal => return if c.is_even() { c } else { neighbour },
                _ => return c,
            }
        }
    }
}

/// Exact sum of `data` (binary32 values widen exactly).
pub fn exact_sum<T: Real>(data: &[T]) -> Expansion {
    let mut e = Expansion::zero();
    for &x in data {
        e.add(x.to_f64());
    }
    e
}

/// Exact sum of the products `a[i] * b[i]` formed in binary64.
///
/// binary32 products are exact in binary64, so for binary32 input this is
/// the exact dot product. binary64 products are rounded once, which makes
/// the result the exact sum of the same rounded products the binary64
/// kernels accumulate.
///
/// # Panics
/// If `a` and `b` differ in length.
pub fn exact_dot<T: Real>(a: &[T], b: &[T]) -> Expansion {
    assert_eq!(a.len(), b.len(), "dot product operands must have equal length");
    let mut e = Expansion::zero();
    for (&x, &y) in a.iter().zip(b) {
        e.add(x.to_f64() * y.to_f64());
    }
    e
}

/// `(approx - reference) / reference`, with the difference formed exactly.
pub fn relative_error(approx: f64, reference: &Expansion) -> Result<f64> {
    relative_error_of(&Expansion::from_value(approx), reference)
}

/// Relative error of `value + error`, with the pair summed exactly. This is
/// how twofold results are scored.
pub fn relative_error_twofold(approx: Twofold<f64>, reference: &Expansion) -> Result<f64> {
    let mut e = Expansion::from_value(approx.value);
    e.add(approx.error);
    relative_error_of(&e, reference)
}

/// `(approx - reference) / reference` for two expansions.
pub fn relative_error_of(approx: &Expansion, reference: &Expansion) -> Result<f64> {
    if reference.is_zero() {
        return Err(Error::ZeroReference);
    }
    let mut diff = approx.clone();
    diff.add_expansion(&reference.negated());
    Ok(diff.estimate() / reference.estimate())
}

#[cfg(test)]
mod tests {
    use super::*;

    const U53: f64 = 1.0 / 9007199254740992.0;

    fn assert_canonical(e: &Expansion) {
        for &c in e.components() {
            assert!(c != 0.0 && c.is_finite());
        }
        for pair in e.components().windows(2) {
            // Non-overlapping: the smaller component lies below the lowest
            // set bit of the larger one.
            assert!(pair[0].abs() < lowest_set_bit(pair[1]), "{pair:?}");
        }
    }

    fn lowest_set_bit(x: f64) -> f64 {
        let bits = x.abs().to_bits();
        let exp = (bits >> 52) as i32;
        assert!(exp > 0, "normal values only");
        let mant = bits & ((1 << 52) - 1) | 1 << 52;
        (mant & mant.wrapping_neg()) as f64 * 2f64.powi(exp - 1075)
    }

    #[test]
    fn grow_expansion_examples() {
        assert_eq!(Expansion::from_value(1.5).components(), &[1.5]);

        let mut e = Expansion::from_value(1.0);
        e.add(U53);
        assert_eq!(e.components(), &[U53, 1.0]);

        // 1 + 2^-52 is representable, so the two parts merge into one.
        e.add(U53);
        assert_eq!(e.components(), &[1.0 + 2.0 * U53]);
        assert_canonical(&e);
    }

    #[test]
    fn zero_components_are_dropped() {
        let mut e = Expansion::from_value(3.0);
        e.add(-3.0);
        assert!(e.is_zero());
        assert_eq!(e.sign(), Ordering::Equal);
        assert_eq!(exact_sum::<f32>(&[]), Expansion::zero());
    }

    #[test]
    fn exact_sum_small_cases() {
        let e = exact_sum(&[1.0, U53, U53]);
        assert_eq!(e.components(), &[1.0 + 2.0 * U53]);
        let ints: Vec<f64> = (1..=10).map(|i| (i * i) as f64).collect();
        assert_eq!(exact_sum(&ints).components(), &[385.0]);
        let e = exact_sum(&[1e300, 1.0, -1e300]);
        assert_eq!(e.components(), &[1.0]);
    }

    #[test]
    fn hundred_hours_of_tenths() {
        // 0.1f32 = 13421773 * 2^-27, so 3.6e6 copies sum to
        // 48318382800000 * 2^-27 seconds, a 46-bit integer times a power of two.
        let e = exact_sum(&vec![0.1f32; 3_600_000]);
        let seconds = 48_318_382_800_000.0 * 2f64.powi(-27);
        assert_eq!(e.components(), &[seconds]);
        assert!((seconds / 3600.0 - 100.000_001_490_116_12).abs() < 1e-12);
    }

    #[test]
    fn round_is_correct_at_ties_and_neighbours() {
        // Exactly halfway between 1 and 1 + 2^-52: ties to even gives 1.
        assert_eq!(Expansion::from_value(1.0).tap_add(U53).round::<f64>(), 1.0);
        // Just above halfway rounds up.
        let e = Expansion::from_value(1.0).tap_add(U53).tap_add(U53 * U53);
        assert_eq!(e.round::<f64>(), 1.0 + 2.0 * U53);
        // Halfway with an odd lower neighbour rounds up to even.
        let odd = 1.0 + 2.0 * U53;
        assert_eq!(Expansion::from_value(odd).tap_add(U53).round::<f64>(), 1.0 + 4.0 * U53);
        // binary32: 1 + 2^-24 is a tie, 1 + 2^-24 + 2^-60 is not.
        let u24 = 2f64.powi(-24);
        assert_eq!(Expansion::from_value(1.0).tap_add(u24).round::<f32>(), 1.0);
        assert_eq!(
            Expansion::from_value(1.0).tap_add(u24).tap_add(2f64.powi(-60)).round::<f32>(),
            1.0 + 2f32.powi(-23)
        );
        assert_eq!(Expansion::zero().round::<f32>(), 0.0);
        assert_eq!(Expansion::from_value(-2.5).round::<f64>(), -2.5);
    }

    #[test]
    fn relative_error_examples() {
        let reference = exact_sum(&[1.0, U53, U53]);
        assert_eq!(relative_error(reference.round::<f64>(), &reference).unwrap(), 0.0);
        let r = relative_error(1.0, &reference).unwrap();
        assert_eq!(r, -2.0 * U53 / (1.0 + 2.0 * U53));
        assert_eq!(relative_error_twofold(Twofold::new(1.0, 2.0 * U53), &reference).unwrap(), 0.0);
        assert!(matches!(relative_error(1.0, &Expansion::zero()), Err(Error::ZeroReference)));

        let hours = exact_sum(&vec![0.1f32; 3_600_000]);
        let r = relative_error(96.3958 * 3600.0, &hours).unwrap();
        assert!((r + 0.036042).abs() < 1e-5, "{r}");
    }

    #[test]
    fn exact_dot_products() {
        let a = [0.1f32, 3.0, -7.5];
        let b = [0.3f32, 0.25, 2.0];
        let want: f64 = 0.1f32 as f64 * 0.3f32 as f64 + 0.75 - 15.0;
        assert_eq!(exact_dot(&a, &b).round::<f64>(), want);
        assert_eq!(exact_dot::<f64>(&[2.0; 4], &[3.0; 4]).components(), &[24.0]);
    }

    #[test]
    fn overflow_is_visible() {
        let e = exact_sum(&[f64::MAX, f64::MAX]);
        assert!(!e.is_finite());
    }

    trait TapAdd {
        fn tap_add(self, v: f64) -> Self;
    }

    impl TapAdd for Expansion {
        fn tap_add(mut self, v: f64) -> Self {
            self.add(v);
            self
        }
    }
}
