//! Native x86-64 vector lanes.
//!
//! SSE2 types are always usable on x86-64. AVX and AVX-512 types must only
//! be used inside functions compiled with the matching target features (the
//! `drive_*` wrappers in `dispatch`), selected after runtime detection.

use std::arch::x86_64::*;

use super::lanes::{Lanes, Load};

#[derive(Clone, Copy)]
pub struct F32x4(__m128);
#[derive(Clone, Copy)]
pub struct F64x2(__m128d);
#[derive(Clone, Copy)]
pub struct F32x8(__m256);
#[derive(Clone, Copy)]
pub struct F64x4(__m256d);
#[derive(Clone, Copy)]
pub struct F32x16(__m512);
#[derive(Clone, Copy)]
pub struct F64x8(__m512d);

macro_rules! native_lanes {
    ($name:ident, $scalar:ty, $width:expr, $zero:ident, $add:ident, $sub:ident, $mul:ident, $storeu:ident) => {
        impl Lanes for $name {
            type Scalar = $scalar;
            const WIDTH: usize = $width;

            #[inline(always)]
            fn zero() -> Self {
                unsafe { $name($zero()) }
            }
            #[inline(always)]
            fn add(self, rhs: Self) -> Self {
                unsafe { $name($add(self.0, rhs.0)) }
            }
            #[inline(always)]
            fn sub(self, rhs: Self) -> Self {
                unsafe { $name($sub(self.0, rhs.0)) }
            }
            #[inline(always)]
            fn mul(self, rhs: Self) -> Self {
                unsafe { $name($mul(self.0, rhs.0)) }
            }
            #[inline(always)]
            fn store(self, out: &mut [$scalar]) {
                assert!(out.len() >= $width);
                unsafe { $storeu(out.as_mut_ptr(), self.0) }
            }
        }
    };
}

native_lanes!(F32x4, f32, 4, _mm_setzero_ps, _mm_add_ps, _mm_sub_ps, _mm_mul_ps, _mm_storeu_ps);
native_lanes!(F64x2, f64, 2, _mm_setzero_pd, _mm_add_pd, _mm_sub_pd, _mm_mul_pd, _mm_storeu_pd);
native_lanes!(F32x8, f32, 8, _mm256_setzero_ps, _mm256_add_ps, _mm256_sub_ps, _mm256_mul_ps, _mm256_storeu_ps);
native_lanes!(F64x4, f64, 4, _mm256_setzero_pd, _mm256_add_pd, _mm256_sub_pd, _mm256_mul_pd, _mm256_storeu_pd);
native_lanes!(F32x16, f32, 16, _mm512_setzero_ps, _mm512_add_ps, _mm512_sub_ps, _mm512_mul_ps, _mm512_storeu_ps);
native_lanes!(F64x8, f64, 8, _mm512_setzero_pd, _mm512_add_pd, _mm512_sub_pd, _mm512_mul_pd, _mm512_storeu_pd);

macro_rules! same_precision_load {
    ($name:ident, $scalar:ty, $loadu:ident, $mul:ident) => {
        impl Load<$scalar> for $name {
            #[inline(always)]
            unsafe fn load(ptr: *const $scalar) -> Self {
                $name($loadu(ptr))
            }
            #[inline(always)]
            unsafe fn load_product(a: *const $scalar, b: *const $scalar) -> Self {
                $name($mul($loadu(a), $loadu(b)))
            }
        }
    };
}

same_precision_load!(F32x4, f32, _mm_loadu_ps, _mm_mul_ps);
same_precision_load!(F64x2, f64, _mm_loadu_pd, _mm_mul_pd);
same_precision_load!(F32x8, f32, _mm256_loadu_ps, _mm256_mul_ps);
same_precision_load!(F64x4, f64, _mm256_loadu_pd, _mm256_mul_pd);
same_precision_load!(F32x16, f32, _mm512_loadu_ps, _mm512_mul_ps);
same_precision_load!(F64x8, f64, _mm512_loadu_pd, _mm512_mul_pd);

// binary32 data into binary64 lanes (wide accumulator); products round in
// binary32 before widening.

#[inline(always)]
unsafe fn load2_f32(ptr: *const f32) -> __m128 {
    _mm_castsi128_ps(_mm_loadl_epi64(ptr as *const __m128i))
}

impl Load<f32> for F64x2 {
    #[inline(always)]
    unsafe fn load(ptr: *const f32) -> Self {
        F64x2(_mm_cvtps_pd(load2_f32(ptr)))
    }
    #[inline(always)]
    unsafe fn load_product(a: *const f32, b: *const f32) -> Self {
        F64x2(_mm_cvtps_pd(_mm_mul_ps(load2_f32(a), load2_f32(b))))
    }
}

impl Load<f32> for F64x4 {
    #[inline(always)]
    unsafe fn load(ptr: *const f32) -> Self {
        F64x4(_mm256_cvtps_pd(_mm_loadu_ps(ptr)))
    }
    #[inline(always)]
    unsafe fn load_product(a: *const f32, b: *const f32) -> Self {
        F64x4(_mm256_cvtps_pd(_mm_mul_ps(_mm_loadu_ps(a), _mm_loadu_ps(b))))
    }
}

impl Load<f32> for F64x8 {
    #[inline(always)]
    unsafe fn load(ptr: *const f32) -> Self {
        F64x8(_mm512_cvtps_pd(_mm256_loadu_ps(ptr)))
    }
    #[inline(always)]
    unsafe fn load_product(a: *const f32, b: *const f32) -> Self {
        F64x8(_mm512_cvtps_pd(_mm256_mul_ps(_mm256_loadu_ps(a), _mm256_loadu_ps(b))))
    }
}

/// Instruction sets the vectorized kernels can target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Isa {
    Sse2,
    Avx,
    Avx512,
}

impl Isa {
    pub fn detect() -> Isa {
        if is_x86_feature_detected!("avx512f") && is_x86_feature_detected!("avx512vl") {
            Isa::Avx512
        } else if is_x86_feature_detected!("avx") {
            Isa::Avx
        } else {
            Isa::Sse2
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Isa::Sse2 => "sse2",
            Isa::Avx => "avx",
            Isa::Avx512 => "avx512",
        }
    }
}
