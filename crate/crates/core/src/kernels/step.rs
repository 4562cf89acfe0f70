//! Per-element accumulator updates and lane combination for each method.

use super::lanes::Lanes;
use crate::eft::{two_sum, Twofold};
use crate::real::Real;

/// Accumulator state: running sum plus a second channel whose meaning
/// depends on the method (round-off for twofold, compensation for Kahan,
/// unused for direct summation).
#[derive(Clone, Copy, Debug)]
pub struct Acc<V> {
    pub s: V,
    pub e: V,
}

impl<V: Lanes> Acc<V> {
    #[inline(always)]
    pub fn zero() -> Self {
        Acc {
            s: V::zero(),
            e: V::zero(),
        }
    }
}

pub trait Step {
    fn step<V: Lanes>(acc: &mut Acc<V>, y: V);

    /// Reduces per-lane states (in lane order) to one result. A single lane
    /// is returned as is, so one-lane kernels reproduce the plain loops.
    fn combine<T: Real>(lanes: &[Acc<T>]) -> Twofold<T>;
}

/// `s <- s + y`.
pub struct Direct;

/// `t = s + y; c = (t - s) - y; e = e - c; s = t`.
pub struct TwofoldFast;

/// `t = s + y; yt = t - s; dy = y - yt; ds = s - (t - yt); e = e + (ds + dy); s = t`.
pub struct TwofoldRigorous;

/// `y = x - c; t = s + y; c = (t - s) - y; s = t`.
pub struct Kahan;

impl Step for Direct {
    #[inline(always)]
    fn step<V: Lanes>(acc: &mut Acc<V>, y: V) {
        acc.s = acc.s.add(y);
    }

    fn combine<T: Real>(lanes: &[Acc<T>]) -> Twofold<T> {
        let Some((first, rest)) = lanes.split_first() else {
            return Twofold::exact(T::ZERO);
        };
        Twofold::exact(rest.iter().fold(first.s, |s, lane| s + lane.s))
    }
}

impl Step for TwofoldFast {
    #[inline(always)]
    fn step<V: Lanes>(acc: &mut Acc<V>, y: V) {
        let t = acc.s.add(y);
        let c = t.sub(acc.s).sub(y);
        acc.e = acc.e.sub(c);
        acc.s = t;
    }

    fn combine<T: Real>(lanes: &[Acc<T>]) -> Twofold<T> {
        combine_twofold(lanes)
    }
}

impl Step for TwofoldRigorous {
    #[inline(always)]
    fn step<V: Lanes>(acc: &mut Acc<V>, y: V) {
        let t = acc.s.add(y);
        let yt = t.sub(acc.s);
        let dy = y.sub(yt);
        let ds = acc.s.sub(t.sub(yt));
        acc.e = acc.e.add(ds.add(dy));
        acc.s = t;
    }

    fn combine<T: Real>(lanes: &[Acc<T>]) -> Twofold<T> {
        combine_twofold(lanes)
    }
}

impl Step for Kahan {
    #[inline(always)]
    fn step<V: Lanes>(acc: &mut Acc<V>, x: V) {
        let y = x.sub(acc.e);
        let t = acc.s.add(y);
        acc.e = t.sub(acc.s).sub(y);
        acc.s = t;
    }

    fn combine<T: Real>(lanes: &[Acc<T>]) -> Twofold<T> {
        match lanes {
            [] => Twofold::exact(T::ZERO),
            [only] => Twofold::exact(only.s),
            _ => {
                // Each lane stands for s - c; feed both parts through one more
                // compensated accumulator.
                let mut acc = Acc::<T>::zero();
                for lane in lanes {
                    Kahan::step(&mut acc, lane.s);
                    Kahan::step(&mut acc, -lane.e);
                }
                Twofold::exact(acc.s)
            }
        }
    }
}

/// Merges lane values with `two_sum`, collecting the merge round-offs, then
/// adds the lane error accumulators.
fn combine_twofold<T: Real>(lanes: &[Acc<T>]) -> Twofold<T> {
    match lanes {
        [] => Twofold::exact(T::ZERO),
        [only] => Twofold::new(only.s, only.e),
        [first, rest @ ..] => {
            let mut value = first.s;
            let mut error = T::ZERO;
            for lane in rest {
                let merged = two_sum(value, lane.s);
                value = merged.value;
                error = error + merged.error;
            }
            for lane in lanes {
                error = error + lane.e;
            }
            Twofold::new(value, error)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run<S: Step>(data: &[f64]) -> Twofold<f64> {
        let mut acc = Acc::<f64>::zero();
        for &y in data {
            S::step(&mut acc, y);
        }
        S::combine(&[acc])
    }

    const U53: f64 = 1.0 / 9007199254740992.0;

    #[test]
    fn hand_traced_loops() {
        let data = [1.0, U53, U53];
        assert_eq!(run::<Direct>(&data), Twofold::exact(1.0));
        assert_eq!(run::<TwofoldFast>(&data), Twofold::new(1.0, 2.0 * U53));
        assert_eq!(run::<TwofoldRigorous>(&data), Twofold::new(1.0, 2.0 * U53));
        assert_eq!(run::<TwofoldRigorous>(&[U53, 1.0]), Twofold::new(1.0, U53));
        assert_eq!(run::<Kahan>(&[1.0, U53, U53, -1.0]), Twofold::exact(2.0 * U53));
    }

    #[test]
    fn twofold_lane_merge_tracks_round_off() {
        let lanes = [
            Acc { s: 1.0f64, e: U53 / 4.0 },
            Acc { s: U53, e: 0.0 },
            Acc { s: U53, e: U53 / 4.0 },
        ];
        let r = combine_twofold(&lanes);
        assert_eq!(r.value, 1.0);
        assert_eq!(r.error, 2.5 * U53);
    }

    #[test]
    fn kahan_lane_merge_applies_compensation() {
        // Lanes represent 1 + 2^-53 and 2^-53 (s - c with c = -2^-53).
        let lanes = [Acc { s: 1.0f64, e: -U53 }, Acc { s: U53, e: 0.0 }];
        assert_eq!(Kahan::combine(&lanes).value, 1.0 + 2.0 * U53);
    }
}
