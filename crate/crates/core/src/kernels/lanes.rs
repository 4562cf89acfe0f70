//! Lane-parallel accumulator storage.
//!
//! A [`Lanes`] value holds `WIDTH` independent accumulators updated with
//! lane-wise IEEE operations. Scalars are one-lane vectors, [`Portable`]
//! arrays are the fallback, and `x86` provides SSE/AVX/AVX-512 registers.
//! All backends perform identical per-lane operations, so a kernel gives
//! bitwise identical results whichever one runs it.

/// Lane-wise arithmetic on `WIDTH` accumulators.
pub trait Lanes: Copy {
    type Scalar: Copy;
    const WIDTH: usize;

    fn zero() -> Self;
    fn add(self, rhs: Self) -> Self;
    fn sub(self, rhs: Self) -> Self;
    fn mul(self, rhs: Self) -> Self;
    /// Writes the lanes to `out[..WIDTH]`.
    fn store(self, out: &mut [Self::Scalar]);
}

/// Loading `WIDTH` consecutive elements of type `E`.
pub trait Load<E>: Lanes {
    /// # Safety
    /// `ptr` must be valid for `WIDTH` reads of `E`.
    unsafe fn load(ptr: *const E) -> Self;

    /// Elementwise products rounded in the element precision `E`, then
    /// converted to the lane type.
    ///
    /// # Safety
    /// Both pointers must be valid for `WIDTH` reads of `E`.
    unsafe fn load_product(a: *const E, b: *const E) -> Self;
}

macro_rules! scalar_lanes {
    ($t:ty) => {
        impl Lanes for $t {
            type Scalar = $t;
            const WIDTH: usize = 1;

            #[inline(always)]
            fn zero() -> Self {
                0.0
            }
            #[inline(always)]
            fn add(self, rhs: Self) -> Self {
                self + rhs
            }
            #[inline(always)]
            fn sub(self, rhs: Self) -> Self {
                self - rhs
            }
            #[inline(always)]
            fn mul(self, rhs: Self) -> Self {
                self * rhs
            }
            #[inline(always)]
            fn store(self, out: &mut [$t]) {
                out[0] = self;
            }
        }

        impl Load<$t> for $t {
            #[inline(always)]
            unsafe fn load(ptr: *const $t) -> Self {
                *ptr
            }
            #[inline(always)]
            unsafe fn load_product(a: *const $t, b: *const $t) -> Self {
                *a * *b
            }
        }
    };
}

scalar_lanes!(f32);
scalar_lanes!(f64);

impl Load<f32> for f64 {
    #[inline(always)]
    unsafe fn load(ptr: *const f32) -> Self {
        *ptr as f64
    }
    #[inline(always)]
    unsafe fn load_product(a: *const f32, b: *const f32) -> Self {
        (*a * *b) as f64
    }
}

/// Plain array lanes, used where no native register of the requested width
/// exists.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Portable<T, const W: usize>(pub [T; W]);

impl<T: Lanes<Scalar = T>, const W: usize> Lanes for Portable<T, W> {
    type Scalar = T;
    const WIDTH: usize = W;

    #[inline(always)]
    fn zero() -> Self {
        Portable([T::zero(); W])
    }
    #[inline(always)]
    fn add(self, rhs: Self) -> Self {
        Portable(std::array::from_fn(|l| self.0[l].add(rhs.0[l])))
    }
    #[inline(always)]
    fn sub(self, rhs: Self) -> Self {
        Portable(std::array::from_fn(|l| self.0[l].sub(rhs.0[l])))
    }
    #[inline(always)]
    fn mul(self, rhs: Self) -> Self {
        Portable(std::array::from_fn(|l| self.0[l].mul(rhs.0[l])))
    }
    #[inline(always)]
    fn store(self, out: &mut [T]) {
        out[..W].copy_from_slice(&self.0);
    }
}

impl<E, T: Load<E> + Lanes<Scalar = T>, const W: usize> Load<E> for Portable<T, W> {
    #[inline(always)]
    unsafe fn load(ptr: *const E) -> Self {
        Portable(std::array::from_fn(|l| T::load(ptr.add(l))))
    }
    #[inline(always)]
    unsafe fn load_product(a: *const E, b: *const E) -> Self {
        Portable(std::array::from_fn(|l| T::load_product(a.add(l), b.add(l))))
    }
}

/// Where addends come from: one array, or the products of two.
pub trait Source {
    type Elem;

    fn len(&self) -> usize;

    /// Addends `i .. i + V::WIDTH`.
    ///
    /// # Safety
    /// `i + V::WIDTH <= self.len()`.
    unsafe fn load<V: Load<Self::Elem>>(&self, i: usize) -> V;
}

pub struct SumSource<'a, E>(pub &'a [E]);

impl<E> Source for SumSource<'_, E> {
    type Elem = E;

    #[inline(always)]
    fn len(&self) -> usize {
        self.0.len()
    }

    #[inline(always)]
    unsafe fn load<V: Load<E>>(&self, i: usize) -> V {
        debug_assert!(i + V::WIDTH <= self.0.len());
        V::load(self.0.as_ptr().add(i))
    }
}

pub struct DotSource<'a, E> {
    a: &'a [E],
    b: &'a [E],
}

impl<'a, E> DotSource<'a, E> {
    pub fn new(a: &'a [E], b: &'a [E]) -> Self {
        assert_eq!(a.len(), b.len(), "dot product operands must have equal length");
        DotSource { a, b }
    }
}

impl<E> Source for DotSource<'_, E> {
    type Elem = E;

    #[inline(always)]
    fn len(&self) -> usize {
        self.a.len()
    }

    #[inline(always)]
    unsafe fn load<V: Load<E>>(&self, i: usize) -> V {
        debug_assert!(i + V::WIDTH <= self.a.len());
        V::load_product(self.a.as_ptr().add(i), self.b.as_ptr().add(i))
    }
}
