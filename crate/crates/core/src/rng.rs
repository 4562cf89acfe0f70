//! Linear congruential generators for reproducible test data.
//!
//! Two classic parameter sets: the 32-bit one from Numerical Recipes and
//! Knuth's 64-bit MMIX one. Generator states are plain values; advancing
//! returns the new state.

use std::fmt;
use std::str::FromStr;

use crate::real::Real;

/// Default seed for every experiment.
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GeneratorKind {
    /// `s' = 1664525 s + 1013904223 mod 2^32`.
    NumericalRecipes,
    /// `s' = 6364136223846793005 s + 1442695040888963407 mod 2^64`.
    Mmix,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 2] = [GeneratorKind::NumericalRecipes, GeneratorKind::Mmix];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::NumericalRecipes => "nr",
            GeneratorKind::Mmix => "mmix",
        }
    }

    /// State width in bits.
    pub fn width(self) -> u32 {
        match self {
            GeneratorKind::NumericalRecipes => 32,
            GeneratorKind::Mmix => 64,
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nr" => Ok(GeneratorKind::NumericalRecipes),
            "mmix" => Ok(GeneratorKind::Mmix),
            other => Err(format!("unknown generator `{other}` (valid: nr, mmix)")),
        }
    }
}

/// Target interval of generated data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Interval {
    /// `[0, 1)`.
    Unit,
    /// `[-1, 1)`, as `2u - 1`.
    Sym,
}

impl Interval {
    pub const ALL: [Interval; 2] = [Interval::Unit, Interval::Sym];

    pub fn name(self) -> &'static str {
        match self {
            Interval::Unit => "unit",
            Interval::Sym => "sym",
        }
    }

    /// Bracket notation for reports.
    pub fn label(self) -> &'static str {
        match self {
            Interval::Unit => "[0,1]",
            Interval::Sym => "[-1,1]",
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Interval {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unit" => Ok(Interval::Unit),
            "sym" => Ok(Interval::Sym),
            other => Err(format!("unknown interval `{other}` (valid: unit, sym)")),
        }
    }
}

/// Generator state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LcgState {
    pub kind: GeneratorKind,
    /// Always below `2^width`.
    pub state: u64,
}

impl LcgState {
    /// The 32-bit generator keeps the low 32 bits of `seed`.
    pub fn new(kind: GeneratorKind, seed: u64) -> Self {
        let state = match kind {
            GeneratorKind::NumericalRecipes => seed & u32::MAX as u64,
            GeneratorKind::Mmix => seed,
        };
        LcgState { kind, state }
    }

    /// Advances once and returns the new state as the raw output.
    pub fn next_raw(self) -> (u64, Self) {
        let state = match self.kind {
            GeneratorKind::NumericalRecipes => {
                (self.state as u32).wrapping_mul(1_664_525).wrapping_add(1_013_904_223) as u64
            }
            GeneratorKind::Mmix => self
                .state
                .wrapping_mul(6_364_136_223_846_793_005)
                .wrapping_add(1_442_695_040_888_963_407),
        };
        (state, LcgState { state, ..self })
    }

    pub fn uniform01<T: Real>(self) -> (T, Self) {
        let (raw, next) = self.next_raw();
        (uniform01_from_raw(raw, self.kind.width()), next)
    }

    pub fn uniform_sym<T: Real>(self) -> (T, Self) {
        let (raw, next) = self.next_raw();
        (uniform_sym_from_raw(raw, self.kind.width()), next)
    }

    pub fn sample<T: Real>(self, interval: Interval) -> (T, Self) {
        match interval {
            Interval::Unit => self.uniform01(),
            Interval::Sym => self.uniform_sym(),
        }
    }

    /// `n` draws from `interval`, advancing `self`.
    pub fn fill<T: Real>(&mut self, interval: Interval, n: usize) -> Vec<T> {
        let mut g = *self;
        let out = (0..n)
            .map(|_| {
                let (x, next) = g.sample(interval);
                g = next;
                x
            })
            .collect();
        *self = g;
        out
    }
}

/// `n` draws of `interval` from a fresh generator seeded with `seed`.
pub fn generate<T: Real>(kind: GeneratorKind, seed: u64, interval: Interval, n: usize) -> Vec<T> {
    LcgState::new(kind, seed).fill(interval, n)
}

/// `raw / 2^width` rounded toward zero, so always in `[0, 1)`.
pub fn uniform01_from_raw<T: Real>(raw: u64, width: u32) -> T {
    T::from_raw_fraction(raw, width)
}

/// `2u - 1` in the target precision, in `[-1, 1)`.
pub fn uniform_sym_from_raw<T: Real>(raw: u64, width: u32) -> T {
    T::TWO * uniform01_from_raw::<T>(raw, width) - T::ONE
}
