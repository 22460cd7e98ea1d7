//! Numeric universes: IEEE binary32, IEEE binary64 and the uniform lattice
//! `{j/N : 0 <= j < N}`.
//!
//! Every experiment runs in exactly one of these. Float modes use the native
//! Rust `f32`/`f64` types: each arithmetic operation is rounded to the active
//! precision, nothing is fused and nothing is carried in extended precision.
//! Lattice maps evaluate the smooth map once in binary64 and round the result
//! to the nearest lattice point.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArithError {
    #[error("lattice order must be at least 2, got {0}")]
    LatticeTooSmall(u64),
    #[error("value {0} is not finite")]
    NotFinite(f64),
    #[error("unknown arithmetic mode `{0}` (expected f32, f64 or lattice:N)")]
    UnknownMode(String),
}

/// Floating-point scalar used by the map kernels.
///
/// Implemented for `f32` and `f64` only. The arithmetic operators come from
/// the primitive types, so every intermediate is rounded to the type's
/// precision.
pub trait Real:
    Copy
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const ZERO: Self;
    const ONE: Self;
    const TWO: Self;
    const HALF: Self;
    const PI: Self;
    /// Largest value strictly below one.
    const BELOW_ONE: Self;
    const KIND: FloatKind;

    fn from_f64(v: f64) -> Self;
    fn from_u64(v: u64) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;
    fn floor(self) -> Self;
    fn sqrt(self) -> Self;
    fn acos(self) -> Self;
    fn powf(self, e: Self) -> Self;
    fn is_finite(self) -> bool;
    /// Raw bit pattern widened to 64 bits.
    fn to_bits_u64(self) -> u64;
    fn total_cmp(&self, other: &Self) -> Ordering;
}

/// Which float type a [`Real`] is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FloatKind {
    Binary32,
    Binary64,
}

macro_rules! impl_real {
    ($t:ty, $kind:expr) => {
        impl Real for $t {
            const ZERO: Self = 0.0;
            const ONE: Self = 1.0;
            const TWO: Self = 2.0;
            const HALF: Self = 0.5;
            const PI: Self = std::f64::consts::PI as $t;
            const BELOW_ONE: Self = 1.0 - <$t>::EPSILON / 2.0;
            const KIND: FloatKind = $kind;

            #[inline(always)]
            fn from_f64(v: f64) -> Self {
                v as $t
            }
            #[inline(always)]
            fn from_u64(v: u64) -> Self {
                v as $t
            }
            #[inline(always)]
            fn to_f64(self) -> f64 {
                self as f64
            }
            #[inline(always)]
            fn abs(self) -> Self {
                <$t>::abs(self)
            }
            #[inline(always)]
            fn floor(self) -> Self {
                <$t>::floor(self)
            }
            #[inline(always)]
            fn sqrt(self) -> Self {
                <$t>::sqrt(self)
            }
            #[inline(always)]
            fn acos(self) -> Self {
                <$t>::acos(self)
            }
            #[inline(always)]
            fn powf(self, e: Self) -> Self {
                <$t>::powf(self, e)
            }
            #[inline(always)]
            fn is_finite(self) -> bool {
                <$t>::is_finite(self)
            }
            #[inline(always)]
            fn to_bits_u64(self) -> u64 {
                self.to_bits() as u64
            }
            #[inline(always)]
            fn total_cmp(&self, other: &Self) -> Ordering {
                <$t>::total_cmp(self, other)
            }
        }
    };
}

impl_real!(f32, FloatKind::Binary32);
impl_real!(f64, FloatKind::Binary64);

/// Order of a lattice: the number of representable points `j/N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct LatticeOrder(u64);

impl LatticeOrder {
    pub fn new(n: u64) -> Result<Self, ArithError> {
        if n < 2 {
            return Err(ArithError::LatticeTooSmall(n));
        }
        Ok(LatticeOrder(n))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl TryFrom<u64> for LatticeOrder {
    type Error = ArithError;
    fn try_from(n: u64) -> Result<Self, ArithError> {
        LatticeOrder::new(n)
    }
}

impl From<LatticeOrder> for u64 {
    fn from(n: LatticeOrder) -> u64 {
        n.0
    }
}

/// The numeric universe of one experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ArithMode {
    Binary32,
    Binary64,
    Lattice(LatticeOrder),
}

impl ArithMode {
    pub fn lattice(n: u64) -> Result<Self, ArithError> {
        Ok(ArithMode::Lattice(LatticeOrder::new(n)?))
    }

    pub fn is_float(&self) -> bool {
        !matches!(self, ArithMode::Lattice(_))
    }
}

impl fmt::Display for ArithMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithMode::Binary32 => f.write_str("f32"),
            ArithMode::Binary64 => f.write_str("f64"),
            ArithMode::Lattice(n) => write!(f, "lattice:{}", n.get()),
        }
    }
}

impl FromStr for ArithMode {
    type Err = ArithError;

    /// Accepts `f32`, `f64`, `binary32`, `binary64` and `lattice:N`. The
    /// lattice order is a plain integer; richer notations are handled by the
    /// CLI before it gets here.
    fn from_str(s: &str) -> Result<Self, ArithError> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "f32" | "binary32" | "single" => Ok(ArithMode::Binary32),
            "f64" | "binary64" | "double" => Ok(ArithMode::Binary64),
            _ => {
                let n = t
                    .strip_prefix("lattice:")
                    .and_then(|n| n.parse::<u64>().ok())
                    .ok_or_else(|| ArithError::UnknownMode(s.to_string()))?;
                ArithMode::lattice(n)
            }
        }
    }
}

impl TryFrom<String> for ArithMode {
    type Error = ArithError;
    fn try_from(s: String) -> Result<Self, ArithError> {
        s.parse()
    }
}

impl From<ArithMode> for String {
    fn from(m: ArithMode) -> String {
        m.to_string()
    }
}

/// A point `j/N` of a lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub j: u64,
    pub n: LatticeOrder,
}

impl LatticePoint {
    pub fn new(j: u64, n: LatticeOrder) -> Self {
        debug_assert!(j < n.get());
        LatticePoint { j, n }
    }

    pub fn value(self) -> f64 {
        lattice_value(self.j, self.n.get())
    }
}

/// `j/N` evaluated in binary64.
#[inline]
pub fn lattice_value(j: u64, n: u64) -> f64 {
    j as f64 / n as f64
}

/// Fractional part `v - floor(v)`, with an exact `1.0` folded back to `0.0`.
#[inline(always)]
pub fn frac<T: Real>(v: T) -> T {
    let r = v - v.floor();
    if r >= T::ONE {
        T::ZERO
    } else {
        r
    }
}

/// Index of the lattice point nearest to `v mod 1`; ties go to the even index
/// and `N` wraps to `0`.
#[inline]
pub fn round_index(v: f64, n: u64) -> u64 {
    let scaled = frac(v) * n as f64;
    let j = scaled.round_ties_even() as u64;
    if j >= n {
        0
    } else {
        j
    }
}

pub fn round_to_lattice(v: f64, n: LatticeOrder) -> Result<LatticePoint, ArithError> {
    if !v.is_finite() {
        return Err(ArithError::NotFinite(v));
    }
    Ok(LatticePoint::new(round_index(v, n.get()), n))
}

/// One application of `f` on the lattice: `f(j/N)` in binary64, rounded once.
pub fn lattice_map(f: impl Fn(f64) -> f64, p: LatticePoint) -> LatticePoint {
    LatticePoint::new(round_index(f(p.value()), p.n.get()), p.n)
}

/// Round `v` to the nearest value representable in `mode`.
pub fn cast(v: f64, mode: ArithMode) -> Result<f64, ArithError> {
    if !v.is_finite() {
        return Err(ArithError::NotFinite(v));
    }
    Ok(match mode {
        ArithMode::Binary32 => v as f32 as f64,
        ArithMode::Binary64 => v,
        ArithMode::Lattice(n) => round_to_lattice(v, n)?.value(),
    })
}
