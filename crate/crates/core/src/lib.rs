//! Twofold floating-point summation.
//!
//! A twofold number is a pair `value + error` of same-precision floats,
//! where `value` is what ordinary summation produces and `error` estimates
//! the rounding error accumulated along the way. Summing with error-free
//! transformations costs a few extra additions per element but tracks the
//! round-off almost exactly, while keeping `value` bitwise identical to the
//! plain sum.
//!
//! * [`eft`]: the two error-free transformations and the [`Twofold`] pair.
//! * [`kernels`]: direct, wide-accumulator, twofold and Kahan sums and dot
//!   products in sequential, unrolled and SIMD flavors.
//! * [`oracle`]: exact reference sums via floating-point expansions.
//! * [`rng`]: reproducible linear congruential data generators.
//! * [`accuracy`] and [`bench`]: the accuracy experiments and the
//!   throughput harness.
//! * [`cli`]: the `twofold` command line.
//!
//! # Value safety
//!
//! The transformations only work if every floating-point operation is
//! executed as written. Rust never reassociates or contracts float
//! arithmetic, so a normal build is safe; [`eft::fast_math_canary`] checks
//! this at runtime and the CLI refuses to run if it fails.

pub mod accuracy;
pub mod bench;
pub mod cli;
pub mod eft;
pub mod error;
pub mod kernels;
pub mod oracle;
pub mod real;
pub mod rng;

pub use eft::{fast_two_sum, two_sum, Twofold};
pub use error::{Error, Result};
pub use kernels::{Flavor, Input, Method, Op, SumResult};
pub use oracle::Expansion;
pub use real::{Precision, Real};
