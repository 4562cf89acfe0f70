//! Independent exact arithmetic for tests: every finite binary32 or binary64
//! value is an integer multiple of 2^-1074, so sums are exact as `BigInt`
//! counts of that unit.

#![allow(dead_code)]

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, ToPrimitive, Zero};
use twofold::rng::LcgState;

/// Exponent of the unit every value is counted in.
pub const UNIT_EXP: i32 = -1074;

/// `x * 2^1074` exactly.
pub fn big(x: f64) -> BigInt {
    assert!(x.is_finite(), "{x}");
    if x == 0.0 {
        return BigInt::zero();
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1 << 52) - 1);
    let (mant, shift) = if exp == 0 { (frac, 0) } else { (frac | 1 << 52, exp - 1) };
    let v = BigInt::from(mant) << shift as usize;
    if bits >> 63 == 1 {
        -v
    } else {
        v
    }
}

pub fn big_sum<I: IntoIterator<Item = f64>>(xs: I) -> BigInt {
    xs.into_iter().map(big).sum()
}

/// Floating-point formats for rounding exact values.
pub trait Format: Copy + PartialEq + std::fmt::Debug {
    /// Significand bits.
    const P: u32;
    /// Exponent of the smallest subnormal.
    const TINY: i32;
    const MAX: f64;
    fn from_exact_f64(x: f64) -> Self;
    fn widen(self) -> f64;
}

impl Format for f32 {
    const P: u32 = 24;
    const TINY: i32 = -149;
    const MAX: f64 = f32::MAX as f64;
    fn from_exact_f64(x: f64) -> Self {
        let y = x as f32;
        assert!(y as f64 == x || y.is_infinite());
        y
    }
    fn widen(self) -> f64 {
        self as f64
    }
}

impl Format for f64 {
    const P: u32 = 53;
    const TINY: i32 = -1074;
    const MAX: f64 = f64::MAX;
    fn from_exact_f64(x: f64) -> Self {
        x
    }
    fn widen(self) -> f64 {
        self
    }
}

/// `q * 2^e` for `q < 2^53` when the result is representable.
fn ldexp(q: u64, e: i32) -> f64 {
    let mut x = q as f64;
    let mut e = e;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e)
}

/// `v * 2^-1074` rounded to nearest, ties to even, in format `F`.
pub fn round<F: Format>(v: &BigInt) -> F {
    if v.is_zero() {
        return F::from_exact_f64(0.0);
    }
    let a = v.abs();
    let lead = a.bits() as i32 - 1 + UNIT_EXP;
    let quantum = (lead - (F::P as i32 - 1)).max(F::TINY);
    let shift = (quantum - UNIT_EXP) as usize;
    let mut q: BigInt = &a >> shift;
    if shift > 0 {
        let rem = &a - (&q << shift);
        let half = BigInt::from(1) << (shift - 1);
        let odd = (&q % 2u32) == BigInt::from(1);
        if rem > half || (rem == half && odd) {
            q += 1;
        }
    }
    let q = q.to_u64().expect("rounded significand fits");
    let mag = ldexp(q, quantum);
    let mag = if mag > F::MAX { f64::INFINITY } else { mag };
    F::from_exact_f64(if v.sign() == Sign::Minus { -mag } else { mag })
}

/// `num / den` in binary64, within an ulp or so, for comparing relative
/// errors.
pub fn ratio(num: &BigInt, den: &BigInt) -> f64 {
    assert!(!den.is_zero());
    if num.is_zero() {
        return 0.0;
    }
    // Scale so the integer quotient has plenty of bits.
    let scale = den.bits() as i64 - num.bits() as i64 + 120;
    let q: BigInt = if scale >= 0 { (num << scale as usize) / den } else { num / (den << (-scale) as usize) };
    let mut x = q.to_f64().expect("quotient has about 120 bits");
    let mut e = -scale;
    while e != 0 {
        let step = e.clamp(-1000, 1000);
        x *= 2f64.powi(step as i32);
        e -= step;
    }
    x
}

/// A small deterministic stream for test data.
pub struct Stream(LcgState);

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream(LcgState::new(twofold::rng::GeneratorKind::Mmix, seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        let (raw, next) = self.0.next_raw();
        self.0 = next;
        // The low bits of a power-of-two LCG are weak; mix them.
        let mut z = raw;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as i64
    }

    pub fn sign(&mut self) -> f64 {
        if self.next_u64() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Random significand in `[1, 2)` with `p` bits, times `2^exp`, random sign.
    pub fn float_with_exp(&mut self, p: u32, exp: i32) -> f64 {
        let m = self.next_u64() >> (64 - (p - 1)) | 1 << (p - 1);
        self.sign() * ldexp(m, exp - (p as i32 - 1))
    }

    /// Random binary32 value with exponent in `[lo, hi]`.
    pub fn f32_in(&mut self, lo: i32, hi: i32) -> f32 {
        let e = self.range(lo as i64, hi as i64) as i32;
        self.float_with_exp(24, e) as f32
    }

    /// Random binary64 value with exponent in `[lo, hi]`.
    pub fn f64_in(&mut self, lo: i32, hi: i32) -> f64 {
        let e = self.range(lo as i64, hi as i64) as i32;
        self.float_with_exp(53, e)
    }

    /// Any finite binary32 bit pattern (including subnormals and zeros).
    pub fn any_f32(&mut self) -> f32 {
        loop {
            let x = f32::from_bits((self.next_u64() >> 32) as u32);
            if x.is_finite() {
                return x;
            }
        }
    }

    /// Any finite binary64 bit pattern.
    pub fn any_f64(&mut self) -> f64 {
        loop {
            let x = f64::from_bits(self.next_u64());
            if x.is_finite() {
                return x;
            }
        }
    }
}

/// Rounded binary operation emulated exactly: `round(a op b)`.
pub fn rn_add<F: Format>(a: F, b: F) -> F {
    round::<F>(&(big(a.widen()) + big(b.widen())))
}

pub fn rn_sub<F: Format>(a: F, b: F) -> F {
    round::<F>(&(big(a.widen()) - big(b.widen())))
}

/// The rigorous twofold recurrence replayed with exact-rational rounding:
/// returns `(value, error)`.
pub fn trace_twofold_rigorous<F: Format>(xs: &[F]) -> (F, F) {
    let zero = F::from_exact_f64(0.0);
    let (mut s, mut e) = (zero, zero);
    for &y in xs {
        let t = rn_add(s, y);
        let yt = rn_sub(t, s);
        let dy = rn_sub(y, yt);
        let ds = rn_sub(s, rn_sub(t, yt));
        e = rn_add(e, rn_add(ds, dy));
        s = t;
    }
    (s, e)
}

/// Direct summation replayed with exact-rational rounding.
pub fn trace_direct<F: Format>(xs: &[F]) -> F {
    xs.iter().fold(F::from_exact_f64(0.0), |s, &y| rn_add(s, y))
}
