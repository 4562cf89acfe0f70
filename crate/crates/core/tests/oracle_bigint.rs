mod common;

use common::{big, big_sum, ratio, round, Stream};
use num_bigint::BigInt;
use proptest::prelude::*;
use twofold::oracle::{exact_dot, exact_sum, relative_error, relative_error_twofold, Expansion};
use twofold::Twofold;

/// The expansion's represented value as a big integer.
fn expansion_value(e: &Expansion) -> BigInt {
    big_sum(e.components().iter().copied())
}

fn instance(g: &mut Stream) -> Vec<f64> {
    let len = g.range(0, 60) as usize;
    let spread = g.range(0, 4);
    (0..len)
        .map(|_| match spread {
            0 => g.f64_in(-5, 5),
            1 => g.f64_in(-200, 200),
            2 => g.f64_in(-1074, 1000),
            // Heavy cancellation: pairs of opposites with small noise.
            _ => {
                let x = g.f64_in(0, 60);
                if g.sign() > 0.0 {
                    x
                } else {
                    -x + g.f64_in(-40, -10)
                }
            }
        })
        .filter(|x| x.is_finite())
        .collect()
}

#[test]
fn rounding_oracle_self_check() {
    assert_eq!(round::<f64>(&big(1.5)), 1.5);
    assert_eq!(round::<f64>(&(big(1.0) + big(2f64.powi(-53)))), 1.0);
    assert_eq!(round::<f32>(&(big(1.0) + big(2f64.powi(-24)) + big(2f64.powi(-70)))), 1.0 + f32::EPSILON);
    assert_eq!(round::<f64>(&BigInt::from(1)), f64::from_bits(1));
    assert_eq!(round::<f32>(&BigInt::from(1)), 0.0);
    assert_eq!(ratio(&big(1.0), &big(3.0)), 1.0 / 3.0);
}

#[test]
fn thousand_instances_match_big_integers() {
    let mut g = Stream::new(3);
    for case in 0..1000 {
        let xs = instance(&mut g);
        let exact = big_sum(xs.iter().copied());
        let e = exact_sum(&xs);
        assert_eq!(expansion_value(&e), exact, "case {case}");
        assert_eq!(e.round::<f64>(), round::<f64>(&exact), "case {case}");
        let as_f32 = round::<f32>(&exact);
        if as_f32.is_finite() {
            assert_eq!(e.round::<f32>(), as_f32, "case {case}");
        }
        // Components are strictly increasing in magnitude and non-zero.
        assert!(e.components().iter().all(|c| *c != 0.0));
        assert!(e.components().windows(2).all(|w| w[0].abs() < w[1].abs()));
    }
}

#[test]
fn binary32_data_and_dot_products() {
    let mut g = Stream::new(4);
    for _ in 0..200 {
        let n = g.range(1, 40) as usize;
        let a: Vec<f32> = (0..n).map(|_| g.f32_in(-30, 30)).collect();
        let b: Vec<f32> = (0..n).map(|_| g.f32_in(-30, 30)).collect();
        let sum = exact_sum(&a);
        assert_eq!(expansion_value(&sum), big_sum(a.iter().map(|&x| x as f64)));
        let dot = exact_dot(&a, &b);
        let want: BigInt = a.iter().zip(&b).map(|(&x, &y)| big(x as f64 * y as f64)).sum();
        assert_eq!(expansion_value(&dot), want);
    }
}

#[test]
fn relative_errors_match_rational_arithmetic() {
    let mut g = Stream::new(5);
    for _ in 0..500 {
        let xs = instance(&mut g);
        let exact = big_sum(xs.iter().copied());
        if exact == BigInt::from(0) {
            continue;
        }
        let e = exact_sum(&xs);
        let approx = xs.iter().sum::<f64>();
        if !approx.is_finite() {
            continue;
        }
        let want = ratio(&(big(approx) - &exact), &exact);
        let got = relative_error(approx, &e).unwrap();
        assert!((got - want).abs() <= 1e-14 * want.abs() + 1e-300, "{got:e} vs {want:e}");

        let pair = Twofold::new(approx, g.f64_in(-60, -50));
        let want = ratio(&(big(pair.value) + big(pair.error) - &exact), &exact);
        let got = relative_error_twofold(pair, &e).unwrap();
        assert!((got - want).abs() <= 1e-14 * want.abs() + 1e-300, "{got:e} vs {want:e}");
    }
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(
        prop_oneof![
            (-1074i32..1000, -1.0f64..1.0).prop_map(|(e, m)| m * 2f64.powi(e.max(-1022)) * if e < -1022 { 2f64.powi(e + 1022) } else { 1.0 }),
            (-20i32..20, -1.0f64..1.0).prop_map(|(e, m)| m * 2f64.powi(e)),
        ],
        0..40,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn permutation_invariant(xs in values(), seed in any::<u64>()) {
        let mut ys = xs.clone();
        let mut g = Stream::new(seed);
        for i in (1..ys.len()).rev() {
            let j = g.range(0, i as i64) as usize;
            ys.swap(i, j);
        }
        let a = exact_sum(&xs);
        let b = exact_sum(&ys);
        prop_assert_eq!(expansion_value(&a), expansion_value(&b));
        prop_assert_eq!(a.round::<f64>(), b.round::<f64>());
    }

    #[test]
    fn expansion_is_exact(xs in values()) {
        let e = exact_sum(&xs);
        prop_assert_eq!(expansion_value(&e), big_sum(xs.iter().copied()));
    }

    #[test]
    fn negation_cancels(xs in values()) {
        let mut e = exact_sum(&xs);
        e.add_expansion(&exact_sum(&xs).negated());
        prop_assert!(e.is_zero());
    }
}
