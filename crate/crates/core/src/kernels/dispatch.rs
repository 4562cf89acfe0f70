//! Flavor dispatch: sequential, unrolled and vectorized drivers, and the
//! per-precision choice of SIMD backend.
//!
//! Every flavor assigns addend `i` to lane `i mod L` and combines the `L`
//! lane states in lane order, so `Vectorized(w)` with `VECTOR_CHAINS`
//! registers gives bitwise the same result as `Unrolled(w * VECTOR_CHAINS)`
//! on any backend.

use super::lanes::{DotSource, Lanes, Load, Portable, Source, SumSource};
use super::step::{Acc, Direct, Step};
use super::{Input, VECTOR_CHAINS};
use crate::eft::Twofold;
use crate::real::Real;

/// Largest lane count any flavor uses (16-wide vectors times the chains).
pub const MAX_LANES: usize = 16 * VECTOR_CHAINS;

/// Streams `src` through `R` accumulators of `V` lanes each.
///
/// # Safety
/// `V` must be executable on this CPU in the calling context.
#[inline(always)]
pub unsafe fn drive<S, V, A, T, const R: usize>(src: &A) -> Twofold<T>
where
    S: Step,
    A: Source,
    T: Real + Load<A::Elem> + Lanes<Scalar = T>,
    V: Load<A::Elem> + Lanes<Scalar = T>,
{
    let n = src.len();
    let block = V::WIDTH * R;
    let full = n - n % block;

    let mut acc = [Acc::<V>::zero(); R];
    let mut i = 0;
    while i < full {
        for (r, a) in acc.iter_mut().enumerate() {
            S::step(a, src.load::<V>(i + r * V::WIDTH));
        }
        i += block;
    }

    let mut lanes = spill(&acc);
    for (lane, j) in lanes.iter_mut().zip(full..n) {
        S::step(lane, src.load::<T>(j));
    }
    S::combine(&lanes[..block])
}

/// Accumulates one register-resident block `passes` times without touching
/// memory in the loop. `b` selects the dot-product form.
///
/// # Safety
/// As for [`drive`]; `a` (and `b`) must hold at least `V::WIDTH * R` elements.
#[inline(always)]
pub unsafe fn drive_resident<S, V, E, T, const R: usize>(a: &[E], b: Option<&[E]>, passes: u64) -> Twofold<T>
where
    S: Step,
    T: Real + Lanes<Scalar = T>,
    V: Load<E> + Lanes<Scalar = T>,
{
    let block = V::WIDTH * R;
    assert!(a.len() >= block && b.is_none_or(|b| b.len() >= block));
    let mut xs = [V::zero(); R];
    let mut ys = [V::zero(); R];
    for r in 0..R {
        xs[r] = V::load(a.as_ptr().add(r * V::WIDTH));
        if let Some(b) = b {
            ys[r] = V::load(b.as_ptr().add(r * V::WIDTH));
        }
    }
    let mut acc = [Acc::<V>::zero(); R];
    if b.is_some() {
        for _ in 0..passes {
            for r in 0..R {
                S::step(&mut acc[r], xs[r].mul(ys[r]));
            }
        }
    } else {
        for _ in 0..passes {
            for r in 0..R {
                S::step(&mut acc[r], xs[r]);
            }
        }
    }
    let lanes = spill(&acc);
    S::combine(&lanes[..block])
}

#[inline(always)]
fn spill<V, T, const R: usize>(acc: &[Acc<V>; R]) -> [Acc<T>; MAX_LANES]
where
    V: Lanes<Scalar = T>,
    T: Real + Lanes<Scalar = T>,
{
    let mut s = [T::ZERO; MAX_LANES];
    let mut e = [T::ZERO; MAX_LANES];
    for (r, a) in acc.iter().enumerate() {
        a.s.store(&mut s[r * V::WIDTH..]);
        a.e.store(&mut e[r * V::WIDTH..]);
    }
    std::array::from_fn(|l| Acc { s: s[l], e: e[l] })
}

#[cfg(target_arch = "x86_64")]
mod native {
    use super::*;

    /// # Safety
    /// The CPU must support AVX.
    #[target_feature(enable = "avx")]
    pub unsafe fn drive_avx<S, V, A, T, const R: usize>(src: &A) -> Twofold<T>
    where
        S: Step,
        A: Source,
        T: Real + Load<A::Elem> + Lanes<Scalar = T>,
        V: Load<A::Elem> + Lanes<Scalar = T>,
    {
        drive::<S, V, A, T, R>(src)
    }

    /// # Safety
    /// The CPU must support AVX-512F and AVX-512VL.
    #[target_feature(enable = "avx,avx2,avx512f,avx512vl")]
    pub unsafe fn drive_avx512<S, V, A, T, const R: usize>(src: &A) -> Twofold<T>
    where
        S: Step,
        A: Source,
        T: Real + Load<A::Elem> + Lanes<Scalar = T>,
        V: Load<A::Elem> + Lanes<Scalar = T>,
    {
        drive::<S, V, A, T, R>(src)
    }

    /// # Safety
    /// The CPU must support AVX.
    #[target_feature(enable = "avx")]
    pub unsafe fn resident_avx<S, V, E, T, const R: usize>(a: &[E], b: Option<&[E]>, passes: u64) -> Twofold<T>
    where
        S: Step,
        T: Real + Lanes<Scalar = T>,
        V: Load<E> + Lanes<Scalar = T>,
    {
        drive_resident::<S, V, E, T, R>(a, b, passes)
    }

    /// # Safety
    /// The CPU must support AVX-512F and AVX-512VL.
    #[target_feature(enable = "avx,avx2,avx512f,avx512vl")]
    pub unsafe fn resident_avx512<S, V, E, T, const R: usize>(a: &[E], b: Option<&[E]>, passes: u64) -> Twofold<T>
    where
        S: Step,
        T: Real + Lanes<Scalar = T>,
        V: Load<E> + Lanes<Scalar = T>,
    {
        drive_resident::<S, V, E, T, R>(a, b, passes)
    }
}

/// Which lane implementation a vectorized call ran on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Portable,
    #[cfg(target_arch = "x86_64")]
    Native(super::x86::Isa),
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Portable => "portable",
            #[cfg(target_arch = "x86_64")]
            Backend::Native(isa) => isa.name(),
        }
    }
}

#[cfg(target_arch = "x86_64")]
fn isa() -> super::x86::Isa {
    use std::sync::OnceLock;
    static ISA: OnceLock<super::x86::Isa> = OnceLock::new();
    *ISA.get_or_init(super::x86::Isa::detect)
}

/// Runs the drive for native lane type `$v` needing at least `$need`,
/// using the widest enabled context for extra registers.
#[cfg(target_arch = "x86_64")]
macro_rules! native_call {
    ($need:expr, $have:expr, $f:ident, $f_avx:ident, $f_avx512:ident, <$($g:ty),*>, ($($arg:expr),*)) => {{
        use super::x86::Isa;
        let have: Isa = $have;
        if have >= $need {
            Some(unsafe {
                match have {
                    Isa::Avx512 => native::$f_avx512::<$($g),*, VECTOR_CHAINS>($($arg),*),
                    Isa::Avx => native::$f_avx::<$($g),*, VECTOR_CHAINS>($($arg),*),
                    Isa::Sse2 => $f::<$($g),*, VECTOR_CHAINS>($($arg),*),
                }
            })
        } else {
            None
        }
    }};
}

/// Sealed per-precision dispatch behind [`Real`].
pub trait Dispatch: Lanes<Scalar = Self> + Load<Self> + Sized {
    /// Lane width of the widest native vector for this precision.
    fn native_width() -> usize;

    /// Backend `Vectorized(w)` runs on.
    fn backend(w: usize) -> Backend;

    fn vectorized<S: Step>(w: usize, input: Input<'_, Self>) -> Twofold<Self>;

    fn resident<S: Step>(shape: Shape, a: &[Self], b: Option<&[Self]>, passes: u64) -> Twofold<Self>;

    /// Wide-accumulator result for this precision in any flavor.
    fn wide(shape: Shape, input: Input<'_, Self>) -> Twofold<f64>;
}

/// Lane layout: `k` scalar accumulators, or vectors of width `w`.
#[derive(Debug, Clone, Copy)]
pub enum Shape {
    Scalar(usize),
    Vector(usize),
}

/// Unrolled and sequential flavors: `k` scalar accumulators.
pub fn scalar_lanes<S: Step, T: Real>(k: usize, input: Input<'_, T>) -> Twofold<T> {
    match input {
        Input::Sum(data) => scalar_source::<S, T, _>(k, &SumSource(data)),
        Input::Dot(a, b) => scalar_source::<S, T, _>(k, &DotSource::new(a, b)),
    }
}

fn scalar_source<S, T, A>(k: usize, src: &A) -> Twofold<T>
where
    S: Step,
    A: Source,
    T: Real + Load<A::Elem> + Lanes<Scalar = T>,
{
    unsafe {
        match k {
            1 => drive::<S, T, A, T, 1>(src),
            2 => drive::<S, T, A, T, 2>(src),
            4 => drive::<S, T, A, T, 4>(src),
            8 => drive::<S, T, A, T, 8>(src),
            16 => drive::<S, T, A, T, 16>(src),
            _ => unreachable!("lane count {k} is validated by Flavor"),
        }
    }
}

fn scalar_resident<S, T, E>(k: usize, a: &[E], b: Option<&[E]>, passes: u64) -> Twofold<T>
where
    S: Step,
    T: Real + Load<E> + Lanes<Scalar = T>,
{
    unsafe {
        match k {
            1 => drive_resident::<S, T, E, T, 1>(a, b, passes),
            2 => drive_resident::<S, T, E, T, 2>(a, b, passes),
            4 => drive_resident::<S, T, E, T, 4>(a, b, passes),
            8 => drive_resident::<S, T, E, T, 8>(a, b, passes),
            16 => drive_resident::<S, T, E, T, 16>(a, b, passes),
            _ => unreachable!("lane count {k} is validated by Flavor"),
        }
    }
}

macro_rules! portable_source {
    ($S:ty, $T:ty, $A:ty, $w:expr, $src:expr) => {
        unsafe {
            match $w {
                2 => drive::<$S, Portable<$T, 2>, $A, $T, VECTOR_CHAINS>($src),
                4 => drive::<$S, Portable<$T, 4>, $A, $T, VECTOR_CHAINS>($src),
                8 => drive::<$S, Portable<$T, 8>, $A, $T, VECTOR_CHAINS>($src),
                16 => drive::<$S, Portable<$T, 16>, $A, $T, VECTOR_CHAINS>($src),
                w => unreachable!("vector width {w} is validated by Flavor"),
            }
        }
    };
}

macro_rules! portable_resident {
    ($S:ty, $T:ty, $E:ty, $w:expr, $a:expr, $b:expr, $passes:expr) => {
        unsafe {
            match $w {
                2 => drive_resident::<$S, Portable<$T, 2>, $E, $T, VECTOR_CHAINS>($a, $b, $passes),
                4 => drive_resident::<$S, Portable<$T, 4>, $E, $T, VECTOR_CHAINS>($a, $b, $passes),
                8 => drive_resident::<$S, Portable<$T, 8>, $E, $T, VECTOR_CHAINS>($a, $b, $passes),
                16 => drive_resident::<$S, Portable<$T, 16>, $E, $T, VECTOR_CHAINS>($a, $b, $passes),
                w => unreachable!("vector width {w} is validated by Flavor"),
            }
        }
    };
}

/// Forces the portable backend; used by tests to compare against native
/// registers.
pub fn vectorized_portable<S: Step, T: Real>(w: usize, input: Input<'_, T>) -> Twofold<T> {
    fn go<S: Step, T, A: Source>(w: usize, src: &A) -> Twofold<T>
    where
        T: Real + Load<A::Elem>,
    {
        unsafe {
            match w {
                2 => drive::<S, Portable<T, 2>, A, T, VECTOR_CHAINS>(src),
                4 => drive::<S, Portable<T, 4>, A, T, VECTOR_CHAINS>(src),
                8 => drive::<S, Portable<T, 8>, A, T, VECTOR_CHAINS>(src),
                16 => drive::<S, Portable<T, 16>, A, T, VECTOR_CHAINS>(src),
                w => unreachable!("vector width {w} is validated by Flavor"),
            }
        }
    }
    match input {
        Input::Sum(d) => go::<S, T, _>(w, &SumSource(d)),
        Input::Dot(a, b) => go::<S, T, _>(w, &DotSource::new(a, b)),
    }
}

impl Dispatch for f32 {
    fn native_width() -> usize {
        #[cfg(target_arch = "x86_64")]
        {
            use super::x86::Isa;
            match isa() {
                Isa::Avx512 => 16,
                Isa::Avx => 8,
                Isa::Sse2 => 4,
            }
        }
        #[cfg(not(target_arch = "x86_64"))]
        {
            4
        }
    }

    fn backend(w: usize) -> Backend {
        #[cfg(target_arch = "x86_64")]
        {
            use super::x86::Isa;
            let need = match w {
                4 => Isa::Sse2,
                8 => Isa::Avx,
                16 => Isa::Avx512,
                _ => return Backend::Portable,
            };
            if isa() >= need {
                return Backend::Native(isa());
            }
        }
        let _ = w;
        Backend::Portable
    }

    fn vectorized<S: Step>(w: usize, input: Input<'_, f32>) -> Twofold<f32> {
        fn go<S: Step, A: Source<Elem = f32>>(w: usize, src: &A) -> Twofold<f32> {
            #[cfg(target_arch = "x86_64")]
            {
                use super::x86::{F32x16, F32x4, F32x8};
                let found = match w {
                    4 => native_call!(Isa::Sse2, isa(), drive, drive_avx, drive_avx512, <S, F32x4, A, f32>, (src)),
                    8 => native_call!(Isa::Avx, isa(), drive, drive_avx, drive_avx512, <S, F32x8, A, f32>, (src)),
                    16 => native_call!(Isa::Avx512, isa(), drive, drive_avx, drive_avx512, <S, F32x16, A, f32>, (src)),
                    _ => None,
                };
                if let Some(r) = found {
                    return r;
                }
            }
            portable_source!(S, f32, A, w, src)
        }
        match input {
            Input::Sum(d) => go::<S, _>(w, &SumSource(d)),
            Input::Dot(a, b) => go::<S, _>(w, &DotSource::new(a, b)),
        }
    }

    fn resident<S: Step>(shape: Shape, a: &[f32], b: Option<&[f32]>, passes: u64) -> Twofold<f32> {
        let w = match shape {
            Shape::Scalar(k) => return scalar_resident::<S, f32, f32>(k, a, b, passes),
            Shape::Vector(w) => w,
        };
        #[cfg(target_arch = "x86_64")]
        {
            use super::x86::{F32x16, F32x4, F32x8};
            let found = match w {
                4 => native_call!(Isa::Sse2, isa(), drive_resident, resident_avx, resident_avx512, <S, F32x4, f32, f32>, (a, b, passes)),
                8 => native_call!(Isa::Avx, isa(), drive_resident, resident_avx, resident_avx512, <S, F32x8, f32, f32>, (a, b, passes)),
                16 => native_call!(Isa::Avx512, isa(), drive_resident, resident_avx, resident_avx512, <S, F32x16, f32, f32>, (a, b, passes)),
                _ => None,
            };
            if let Some(r) = found {
                return r;
            }
        }
        portable_resident!(S, f32, f32, w, a, b, passes)
    }

    fn wide(shape: Shape, input: Input<'_, f32>) -> Twofold<f64> {
        fn go<A: Source<Elem = f32>>(shape: Shape, src: &A) -> Twofold<f64> {
            let w = match shape {
                Shape::Scalar(k) => return scalar_source::<Direct, f64, A>(k, src),
                Shape::Vector(w) => w,
            };
            #[cfg(target_arch = "x86_64")]
            {
                use super::x86::{F64x2, F64x4, F64x8};
                let found = match w {
                    2 => native_call!(Isa::Sse2, isa(), drive, drive_avx, drive_avx512, <Direct, F64x2, A, f64>, (src)),
                    4 => native_call!(Isa::Avx, isa(), drive, drive_avx, drive_avx512, <Direct, F64x4, A, f64>, (src)),
                    8 => native_call!(Isa::Avx512, isa(), drive, drive_avx, drive_avx512, <Direct, F64x8, A, f64>, (src)),
                    _ => None,
                };
                if let Some(r) = found {
                    return r;
                }
            }
            portable_source!(Direct, f64, A, w, src)
        }
        match input {
            Input::Sum(d) => go(shape, &SumSource(d)),
            Input::Dot(a, b) => go(shape, &DotSource::new(a, b)),
        }
    }
}

impl Dispatch for f64 {
    fn native_width() -> usize {
        #[cfg(target_arch = "x86_64")]
        {
            use super::x86::Isa;
            match isa() {
                Isa::Avx512 => 8,
                Isa::Avx => 4,
                Isa::Sse2 => 2,
            }
        }
        #[cfg(not(target_arch = "x86_64"))]
        {
            2
        }
    }

    fn backend(w: usize) -> Backend {
        #[cfg(target_arch = "x86_64")]
        {
            use super::x86::Isa;
            let need = match w {
                2 => Isa::Sse2,
                4 => Isa::Avx,
                8 => Isa::Avx512,
                _ => return Backend::Portable,
            };
            if isa() >= need {
                return Backend::Native(isa());
            }
        }
        let _ = w;
        Backend::Portable
    }

    fn vectorized<S: Step>(w: usize, input: Input<'_, f64>) -> Twofold<f64> {
        fn go<S: Step, A: Source<Elem = f64>>(w: usize, src: &A) -> Twofold<f64> {
            #[cfg(target_arch = "x86_64")]
            {
                use super::x86::{F64x2, F64x4, F64x8};
                let found = match w {
                    2 => native_call!(Isa::Sse2, isa(), drive, drive_avx, drive_avx512, <S, F64x2, A, f64>, (src)),
                    4 => native_call!(Isa::Avx, isa(), drive, drive_avx, drive_avx512, <S, F64x4, A, f64>, (src)),
                    8 => native_call!(Isa::Avx512, isa(), drive, drive_avx, drive_avx512, <S, F64x8, A, f64>, (src)),
                    _ => None,
                };
                if let Some(r) = found {
                    return r;
                }
            }
            portable_source!(S, f64, A, w, src)
        }
        match input {
            Input::Sum(d) => go::<S, _>(w, &SumSource(d)),
            Input::Dot(a, b) => go::<S, _>(w, &DotSource::new(a, b)),
        }
    }

    fn resident<S: Step>(shape: Shape, a: &[f64], b: Option<&[f64]>, passes: u64) -> Twofold<f64> {
        let w = match shape {
            Shape::Scalar(k) => return scalar_resident::<S, f64, f64>(k, a, b, passes),
            Shape::Vector(w) => w,
        };
        #[cfg(target_arch = "x86_64")]
        {
            use super::x86::{F64x2, F64x4, F64x8};
            let found = match w {
                2 => native_call!(Isa::Sse2, isa(), drive_resident, resident_avx, resident_avx512, <S, F64x2, f64, f64>, (a, b, passes)),
                4 => native_call!(Isa::Avx, isa(), drive_resident, resident_avx, resident_avx512, <S, F64x4, f64, f64>, (a, b, passes)),
                8 => native_call!(Isa::Avx512, isa(), drive_resident, resident_avx, resident_avx512, <S, F64x8, f64, f64>, (a, b, passes)),
                _ => None,
            };
            if let Some(r) = found {
                return r;
            }
        }
        portable_resident!(S, f64, f64, w, a, b, passes)
    }

    /// binary64 has no wider hardware type; the exact oracle plays the
    /// extended-precision accumulator, whatever the flavor.
    fn wide(_shape: Shape, input: Input<'_, f64>) -> Twofold<f64> {
        let exact = match input {
            Input::Sum(d) => crate::oracle::exact_sum(d),
            Input::Dot(a, b) => crate::oracle::exact_dot(a, b),
        };
        Twofold::exact(exact.round::<f64>())
    }
}

/// Register-resident wide accumulation of binary32 data.
pub fn wide_resident_f32(shape: Shape, a: &[f32], b: Option<&[f32]>, passes: u64) -> Twofold<f64> {
    let w = match shape {
        Shape::Scalar(k) => return scalar_resident::<Direct, f64, f32>(k, a, b, passes),
        Shape::Vector(w) => w,
    };
    #[cfg(target_arch = "x86_64")]
    {
        use super::x86::{F64x2, F64x4, F64x8};
        let found = match w {
            2 => native_call!(Isa::Sse2, isa(), drive_resident, resident_avx, resident_avx512, <Direct, F64x2, f32, f64>, (a, b, passes)),
            4 => native_call!(Isa::Avx, isa(), drive_resident, resident_avx, resident_avx512, <Direct, F64x4, f32, f64>, (a, b, passes)),
            8 => native_call!(Isa::Avx512, isa(), drive_resident, resident_avx, resident_avx512, <Direct, F64x8, f32, f64>, (a, b, passes)),
            _ => None,
        };
        if let Some(r) = found {
            return r;
        }
    }
    portable_resident!(Direct, f64, f32, w, a, b, passes)
}
