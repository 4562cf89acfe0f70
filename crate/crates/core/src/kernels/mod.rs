//! Summation and dot-product kernels.
//!
//! Five methods, each available as a sum and as a dot product, in three
//! execution flavors:
//!
//! * `Sequential`: the plain loop, one accumulator.
//! * `Unrolled(k)`: `k` scalar accumulators, addend `i` going to `i mod k`.
//! * `Vectorized(w)`: [`VECTOR_CHAINS`] SIMD registers of `w` lanes, i.e.
//!   `w * VECTOR_CHAINS` lanes laid out exactly like `Unrolled`. Widths
//!   without a native register on this CPU run on portable array lanes
//!   with identical results.
//!
//! Twofold lanes are merged with `two_sum` and the merge round-offs go into
//! the error channel, so `value + error` keeps tracking the exact sum across
//! the reduction.
//!
//! Dot products round each product `a[i] * b[i]` in the working precision
//! and only track the round-off of the summation; multiplication round-off
//! is not captured.
//!
//! Every result reports `adds_performed == N`: one addition per addend,
//! ignoring the extra operations twofold and Kahan summation spend on the
//! error channel.

pub(crate) mod dispatch;
mod lanes;
mod step;
#[cfg(target_arch = "x86_64")]
mod x86;

use std::fmt;
use std::str::FromStr;

use crate::eft::Twofold;
use crate::error::{Error, Result};
use crate::real::{Precision, Real};
use dispatch::{Dispatch, Shape};
use step::Step;

/// Independent vector accumulators per vectorized kernel. Eight registers
/// keep both floating-point add ports busy at a four-cycle latency.
pub const VECTOR_CHAINS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    /// Plain running sum.
    Direct,
    /// binary32 data accumulated in binary64; for binary64 data the exact
    /// oracle stands in for an extended-precision accumulator.
    WideAccumulator,
    /// Running sum plus Dekker-style round-off collection.
    TwofoldFast,
    /// Running sum plus Knuth-style round-off collection, valid for any
    /// operand ordering.
    TwofoldRigorous,
    /// Compensated summation.
    Kahan,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Direct,
        Method::WideAccumulator,
        Method::TwofoldFast,
        Method::TwofoldRigorous,
        Method::Kahan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::WideAccumulator => "wide",
            Method::TwofoldFast => "twofold-fast",
            Method::TwofoldRigorous => "twofold-rigorous",
            Method::Kahan => "kahan",
        }
    }

    /// Suffix in kernel names such as `sumtf` or `dotk`.
    pub fn suffix(self) -> &'static str {
        match self {
            Method::Direct => "",
            Method::WideAccumulator => "d",
            Method::TwofoldFast => "tf",
            Method::TwofoldRigorous => "t",
            Method::Kahan => "k",
        }
    }

    /// Whether results carry a meaningful error channel.
    pub fn is_twofold(self) -> bool {
        matches!(self, Method::TwofoldFast | Method::TwofoldRigorous)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "direct" => Method::Direct,
            "wide" => Method::WideAccumulator,
            "twofold-fast" | "tf" => Method::TwofoldFast,
            "twofold-rigorous" | "tr" => Method::TwofoldRigorous,
            "kahan" => Method::Kahan,
            other => return Err(Error::UnknownMethod(other.to_string())),
        })
    }
}

/// Execution flavor of a kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flavor {
    Sequential,
    /// `k` scalar accumulators.
    Unrolled(usize),
    /// SIMD registers of `w` lanes.
    Vectorized(usize),
}

impl Flavor {
    /// Checks that `k` / `w` is a power of two in `[2, 16]`.
    pub fn validate(self) -> Result<Self> {
        match self {
            Flavor::Sequential => Ok(self),
            Flavor::Unrolled(n) | Flavor::Vectorized(n) if n.is_power_of_two() && (2..=16).contains(&n) => Ok(self),
            _ => Err(Error::InvalidFlavor(self.to_string())),
        }
    }

    /// Number of independent accumulator lanes.
    pub fn lanes(self) -> usize {
        match self {
            Flavor::Sequential => 1,
            Flavor::Unrolled(k) => k,
            Flavor::Vectorized(w) => w * VECTOR_CHAINS,
        }
    }

    /// One 256-bit register's worth of scalars.
    pub fn default_unrolled(precision: Precision) -> Flavor {
        match precision {
            Precision::F32 => Flavor::Unrolled(8),
            Precision::F64 => Flavor::Unrolled(4),
        }
    }

    /// The widest native vector on this CPU.
    pub fn default_vectorized(precision: Precision) -> Flavor {
        match precision {
            Precision::F32 => Flavor::Vectorized(<f32 as Dispatch>::native_width()),
            Precision::F64 => Flavor::Vectorized(<f64 as Dispatch>::native_width()),
        }
    }

    fn shape(self) -> Shape {
        match self {
            Flavor::Sequential => Shape::Scalar(1),
            Flavor::Unrolled(k) => Shape::Scalar(k),
            Flavor::Vectorized(w) => Shape::Vector(w),
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flavor::Sequential => f.write_str("seq"),
            Flavor::Unrolled(k) => write!(f, "unroll:{k}"),
            Flavor::Vectorized(w) => write!(f, "vec:{w}"),
        }
    }
}

impl FromStr for Flavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let invalid = || Error::InvalidFlavor(s.to_string());
        let flavor = match s.split_once(':') {
            None if s == "seq" => Flavor::Sequential,
            Some(("unroll", n)) => Flavor::Unrolled(n.parse().map_err(|_| invalid())?),
            Some(("vec", n)) => Flavor::Vectorized(n.parse().map_err(|_| invalid())?),
            _ => return Err(invalid()),
        };
        flavor.validate().map_err(|_| invalid())
    }
}

/// Sum (`Σ x`) or dot product (`Σ x·y`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    Sum,
    Dot,
}

impl Op {
    pub const ALL: [Op; 2] = [Op::Sum, Op::Dot];

    pub fn name(self) -> &'static str {
        match self {
            Op::Sum => "sum",
            Op::Dot => "dot",
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Op {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "sum" => Ok(Op::Sum),
            "dot" => Ok(Op::Dot),
            other => Err(format!("unknown operation `{other}` (valid: sum, dot)")),
        }
    }
}

/// Addends of one kernel call.
#[derive(Debug, Clone, Copy)]
pub enum Input<'a, T> {
    Sum(&'a [T]),
    Dot(&'a [T], &'a [T]),
}

impl<'a, T> Input<'a, T> {
    /// Checked dot-product input.
    pub fn dot(a: &'a [T], b: &'a [T]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch {
                left: a.len(),
                right: b.len(),
            });
        }
        Ok(Input::Dot(a, b))
    }

    pub fn len(&self) -> usize {
        match self {
            Input::Sum(d) => d.len(),
            Input::Dot(a, _) => a.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn op(&self) -> Op {
        match self {
            Input::Sum(_) => Op::Sum,
            Input::Dot(..) => Op::Dot,
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            Input::Dot(a, b) if a.len() != b.len() => Err(Error::LengthMismatch {
                left: a.len(),
                right: b.len(),
            }),
            _ => Ok(()),
        }
    }
}

/// Result of one kernel call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumResult<T> {
    /// Error is zero for direct, wide and Kahan summation.
    pub twofold: Twofold<T>,
    /// Additions counted one per addend.
    pub adds_performed: u64,
}

impl<T: Real> SumResult<T> {
    fn new(twofold: Twofold<T>, n: usize) -> Self {
        SumResult {
            twofold,
            adds_performed: n as u64,
        }
    }

    pub fn value(&self) -> T {
        self.twofold.value
    }

    pub fn error(&self) -> T {
        self.twofold.error
    }

    pub fn widen(self) -> SumResult<f64> {
        SumResult {
            twofold: self.twofold.widen(),
            adds_performed: self.adds_performed,
        }
    }
}

fn sequential<S: Step, T: Real>(input: Input<'_, T>) -> SumResult<T> {
    SumResult::new(dispatch::scalar_lanes::<S, T>(1, input), input.len())
}

pub fn sum_direct<T: Real>(data: &[T]) -> SumResult<T> {
    sequential::<step::Direct, T>(Input::Sum(data))
}

/// binary32 data, binary64 accumulator.
pub fn sum_wide(data: &[f32]) -> SumResult<f64> {
    SumResult::new(<f32 as Dispatch>::wide(Shape::Scalar(1), Input::Sum(data)), data.len())
}

/// `value` is bitwise the direct sum; `error` collects the round-off of each
/// addition (exact whenever the running sum dominates the addend).
pub fn sum_twofold_fast<T: Real>(data: &[T]) -> SumResult<T> {
    sequential::<step::TwofoldFast, T>(Input::Sum(data))
}

/// `value` is bitwise the direct sum; `error` collects the exact round-off
/// of each addition regardless of magnitudes.
pub fn sum_twofold_rigorous<T: Real>(data: &[T]) -> SumResult<T> {
    sequential::<step::TwofoldRigorous, T>(Input::Sum(data))
}

pub fn sum_kahan<T: Real>(data: &[T]) -> SumResult<T> {
    sequential::<step::Kahan, T>(Input::Sum(data))
}

/// # Panics
/// If `a` and `b` differ in length.
pub fn dot_direct<T: Real>(a: &[T], b: &[T]) -> SumResult<T> {
    sequential::<step::Direct, T>(dot_input(a, b))
}

/// # Panics
/// If `a` and `b` differ in length.
pub fn dot_wide(a: &[f32], b: &[f32]) -> SumResult<f64> {
    SumResult::new(<f32 as Dispatch>::wide(Shape::Scalar(1), dot_input(a, b)), a.len())
}

/// # Panics
/// If `a` and `b` differ in length.
pub fn dot_twofold_fast<T: Real>(a: &[T], b: &[T]) -> SumResult<T> {
    sequential::<step::TwofoldFast, T>(dot_input(a, b))
}

/// # Panics
/// If `a` and `b` differ in length.
pub fn dot_twofold_rigorous<T: Real>(a: &[T], b: &[T]) -> SumResult<T> {
    sequential::<step::TwofoldRigorous, T>(dot_input(a, b))
}

/// # Panics
/// If `a` and `b` differ in length.
pub fn dot_kahan<T: Real>(a: &[T], b: &[T]) -> SumResult<T> {
    sequential::<step::Kahan, T>(dot_input(a, b))
}

fn dot_input<'a, T>(a: &'a [T], b: &'a [T]) -> Input<'a, T> {
    match Input::dot(a, b) {
        Ok(input) => input,
        Err(e) => panic!("{e}"),
    }
}

fn flavored<S: Step, T: Real>(flavor: Flavor, input: Input<'_, T>) -> Twofold<T> {
    match flavor.shape() {
        Shape::Scalar(k) => dispatch::scalar_lanes::<S, T>(k, input),
        Shape::Vector(w) => T::vectorized::<S>(w, input),
    }
}

/// Runs `method` in `flavor` over `input`.
///
/// Results are reported in binary64 (exact widening for binary32 except the
/// wide accumulator, which is binary64 by construction). Non-sequential
/// flavors associate differently and are not bitwise equal to the
/// sequential loop.
pub fn run_flavor<T: Real>(method: Method, flavor: Flavor, input: Input<'_, T>) -> Result<SumResult<f64>> {
    let flavor = flavor.validate()?;
    input.check()?;
    let n = input.len();
    let twofold = match method {
        Method::Direct => flavored::<step::Direct, T>(flavor, input).widen(),
        Method::TwofoldFast => flavored::<step::TwofoldFast, T>(flavor, input).widen(),
        Method::TwofoldRigorous => flavored::<step::TwofoldRigorous, T>(flavor, input).widen(),
        Method::Kahan => flavored::<step::Kahan, T>(flavor, input).widen(),
        Method::WideAccumulator => T::wide(flavor.shape(), input),
    };
    Ok(SumResult {
        twofold,
        adds_performed: n as u64,
    })
}

/// Same as [`run_flavor`] but forcing portable lanes for `Vectorized`.
#[doc(hidden)]
pub fn run_flavor_portable<T: Real>(method: Method, flavor: Flavor, input: Input<'_, T>) -> Result<SumResult<f64>> {
    let Flavor::Vectorized(w) = flavor.validate()? else {
        return run_flavor(method, flavor, input);
    };
    input.check()?;
    let twofold = match method {
        Method::Direct => dispatch::vectorized_portable::<step::Direct, T>(w, input).widen(),
        Method::TwofoldFast => dispatch::vectorized_portable::<step::TwofoldFast, T>(w, input).widen(),
        Method::TwofoldRigorous => dispatch::vectorized_portable::<step::TwofoldRigorous, T>(w, input).widen(),
        Method::Kahan => dispatch::vectorized_portable::<step::Kahan, T>(w, input).widen(),
        Method::WideAccumulator => return run_flavor(method, flavor, input),
    };
    Ok(SumResult {
        twofold,
        adds_performed: input.len() as u64,
    })
}

/// Accumulates a register-resident block `passes` times, never reading the
/// block from memory inside the loop. Measures the pure compute rate of a
/// method; `block` must hold at least `flavor.lanes()` elements and only the
/// first `flavor.lanes()` are used. `other` selects the dot-product form.
pub fn run_register_resident<T: Real>(
    method: Method,
    flavor: Flavor,
    block: &[T],
    other: Option<&[T]>,
    passes: u64,
) -> Result<SumResult<f64>> {
    let flavor = flavor.validate()?;
    let lanes = flavor.lanes();
    if block.len() < lanes || other.is_some_and(|b| b.len() < lanes) {
        return Err(Error::Unsupported(format!(
            "register-resident block needs {lanes} elements for {flavor}"
        )));
    }
    let shape = flavor.shape();
    let twofold = match method {
        Method::Direct => T::resident::<step::Direct>(shape, block, other, passes).widen(),
        Method::TwofoldFast => T::resident::<step::TwofoldFast>(shape, block, other, passes).widen(),
        Method::TwofoldRigorous => T::resident::<step::TwofoldRigorous>(shape, block, other, passes).widen(),
        Method::Kahan => T::resident::<step::Kahan>(shape, block, other, passes).widen(),
        Method::WideAccumulator => match T::PRECISION {
            Precision::F32 => {
                let as_f32 = |s: &[T]| -> Vec<f32> { s.iter().map(|x| x.to_f64() as f32).collect() };
                let a = as_f32(block);
                let b = other.map(as_f32);
                dispatch::wide_resident_f32(shape, &a, b.as_deref(), passes)
            }
            Precision::F64 => {
                return Err(Error::Unsupported(
                    "no register-resident wide accumulator for binary64 data".to_string(),
                ))
            }
        },
    };
    Ok(SumResult {
        twofold,
        adds_performed: (lanes as u64).saturating_mul(passes),
    })
}

/// Name of the lane backend `flavor` runs on for `precision`.
pub fn backend_name(precision: Precision, flavor: Flavor) -> &'static str {
    match flavor {
        Flavor::Vectorized(w) => match precision {
            Precision::F32 => <f32 as Dispatch>::backend(w).name(),
            Precision::F64 => <f64 as Dispatch>::backend(w).name(),
        },
        _ => "scalar",
    }
}
