mod common;

use common::{big, Stream};
use proptest::prelude::*;
use twofold::{fast_two_sum, two_sum, Twofold};

/// Exactness of a binary32 pair via binary64 widening, which is exact for
/// every sum of two binary32 values.
fn exact_f32(a: f32, b: f32, t: Twofold<f32>) -> bool {
    t.value == a + b && t.value as f64 + t.error as f64 == a as f64 + b as f64
}

fn exact_f64(a: f64, b: f64, t: Twofold<f64>) -> bool {
    t.value == a + b && big(t.value) + big(t.error) == big(a) + big(b)
}

fn half_ulp_f64(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return 0.0;
    }
    (x.abs().next_up() - x.abs()) / 2.0
}

fn ordered<T: PartialOrd + Copy>(a: T, b: T, abs: fn(T) -> T) -> (T, T) {
    if abs(a) >= abs(b) {
        (a, b)
    } else {
        (b, a)
    }
}

#[test]
fn million_binary32_pairs_are_exact() {
    let mut g = Stream::new(1);
    let mut failures = 0;
    for i in 0..1_000_000 {
        // Alternate full-range patterns with nearby exponents, where
        // round-off actually happens.
        let (a, b) = if i % 2 == 0 {
            (g.any_f32(), g.any_f32())
        } else {
            let e = g.range(-100, 100) as i32;
            (g.f32_in(e, e), g.f32_in(e - 30, e + 5))
        };
        if !(a + b).is_finite() {
            continue;
        }
        failures += usize::from(!exact_f32(a, b, two_sum(a, b)));
        let (p, q) = ordered(a, b, f32::abs);
        failures += usize::from(!exact_f32(p, q, fast_two_sum(p, q)));
    }
    assert_eq!(failures, 0);
}

#[test]
fn binary64_pairs_match_big_integers() {
    let mut g = Stream::new(2);
    let mut failures = 0;
    let mut inexact = 0;
    for i in 0..100_000 {
        let (a, b) = if i % 4 == 0 {
            (g.any_f64(), g.any_f64())
        } else {
            let e = g.range(-1000, 1000) as i32;
            (g.f64_in(e, e), g.f64_in(e - 60, e + 3))
        };
        if !(a + b).is_finite() {
            continue;
        }
        let t = two_sum(a, b);
        inexact += usize::from(t.error != 0.0);
        failures += usize::from(!exact_f64(a, b, t));
        let (p, q) = ordered(a, b, f64::abs);
        failures += usize::from(!exact_f64(p, q, fast_two_sum(p, q)));
    }
    assert_eq!(failures, 0);
    assert!(inexact > 50_000, "data should exercise rounding: {inexact}");
}

#[test]
fn edge_cases() {
    let tiny = f64::from_bits(1);
    let cases = [
        (0.0, 0.0),
        (-0.0, 0.0),
        (1.0, -1.0),
        (1.0, 2f64.powi(-53)),
        (1.0, 2f64.powi(-53) + 2f64.powi(-105)),
        (1.0, -2f64.powi(-54)),
        (f64::MAX, -f64::MAX),
        (f64::MAX / 2.0, 2f64.powi(970)),
        (tiny, tiny),
        (f64::MIN_POSITIVE, -tiny),
        (3.0, 2f64.powi(-60)),
        (-1e300, 1e-300),
    ];
    for (a, b) in cases {
        for (x, y) in [(a, b), (b, a)] {
            assert!(exact_f64(x, y, two_sum(x, y)), "two_sum({x:e}, {y:e})");
        }
        let (p, q) = ordered(a, b, f64::abs);
        assert!(exact_f64(p, q, fast_two_sum(p, q)), "fast_two_sum({p:e}, {q:e})");
    }
    // Ties to even: 1 + 2^-53 rounds to 1 and the round-off is the addend.
    assert_eq!(two_sum(1.0, 2f64.powi(-53)), Twofold::new(1.0, 2f64.powi(-53)));
    assert_eq!(two_sum(1.0f32, 2f32.powi(-24)), Twofold::new(1.0, 2f32.powi(-24)));
    // Subnormal sums are always exact.
    assert_eq!(two_sum(tiny, 3.0 * tiny).error, 0.0);
}

#[test]
fn signed_zero_values_follow_ieee() {
    assert!(two_sum(-0.0f64, -0.0).value.is_sign_negative());
    assert!(two_sum(-0.0f64, 0.0).value.is_sign_positive());
    assert_eq!(two_sum(-0.0f32, -0.0).error, 0.0);
}

fn any_finite_f64() -> impl Strategy<Value = f64> {
    prop_oneof![
        proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO,
        (-60i32..60, -1.0f64..1.0).prop_map(|(e, m)| m * 2f64.powi(e)),
    ]
}

fn any_finite_f32() -> impl Strategy<Value = f32> {
    prop_oneof![
        proptest::num::f32::NORMAL | proptest::num::f32::SUBNORMAL | proptest::num::f32::ZERO,
        (-30i32..30, -1.0f32..1.0).prop_map(|(e, m)| m * 2f32.powi(e)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4096))]

    #[test]
    fn two_sum_is_exact_f64(a in any_finite_f64(), b in any_finite_f64()) {
        prop_assume!((a + b).is_finite());
        prop_assert!(exact_f64(a, b, two_sum(a, b)));
    }

    #[test]
    fn two_sum_is_exact_f32(a in any_finite_f32(), b in any_finite_f32()) {
        prop_assume!((a + b).is_finite());
        prop_assert!(exact_f32(a, b, two_sum(a, b)));
    }

    #[test]
    fn fast_and_knuth_agree_when_ordered(a in any_finite_f64(), b in any_finite_f64()) {
        prop_assume!((a + b).is_finite());
        let (p, q) = ordered(a, b, f64::abs);
        let fast = fast_two_sum(p, q);
        let knuth = two_sum(p, q);
        prop_assert_eq!(fast.value, knuth.value);
        prop_assert_eq!(fast.error, knuth.error);
    }

    #[test]
    fn two_sum_is_symmetric(a in any_finite_f64(), b in any_finite_f64()) {
        prop_assume!((a + b).is_finite());
        let ab = two_sum(a, b);
        let ba = two_sum(b, a);
        prop_assert_eq!(ab.value, ba.value);
        prop_assert_eq!(ab.error, ba.error);
    }

    #[test]
    fn error_is_within_half_an_ulp(a in any_finite_f64(), b in any_finite_f64()) {
        prop_assume!((a + b).is_finite());
        let t = two_sum(a, b);
        prop_assert!(t.error.abs() <= half_ulp_f64(t.value), "{:?}", t);
    }

    #[test]
    fn error_is_within_half_an_ulp_f32(a in any_finite_f32(), b in any_finite_f32()) {
        prop_assume!((a + b).is_finite());
        let t = two_sum(a, b);
        let half = (t.value.abs().next_up() - t.value.abs()) / 2.0;
        prop_assert!(t.error.abs() <= half, "{:?}", t);
    }
}
