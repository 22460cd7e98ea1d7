//! p weakly coupled copies of an interval map: `X' = A · f(X)`.
//!
//! Row `i` of `A` has `1 - (p-1)·ε_i` on the diagonal and `ε_i` everywhere
//! else, so each row is a convex combination and `[-1, 1]^p` is invariant
//! whenever `f` maps `[-1, 1]` into itself.

use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arithmetic::{ArithMode, Real};
use crate::maps::{IntervalMap, MapError, MapSpec};

/// Initial states used by all published coupled-map runs, one per component.
pub const PAPER_SEEDS: [f64; 7] = [
    0.330, 0.3387564, 0.3313534, 0.3332135, 0.3387325, 0.3438542, 0.3654218,
];

/// Seeds of the double-precision three-map tables, whose third component
/// differs from [`PAPER_SEEDS`].
pub const DOUBLE_PRECISION_SEEDS: [f64; 3] = [0.330, 0.3387564, 0.33153429];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CouplingError {
    #[error("number of coupled maps must be at least 1")]
    NoMaps,
    #[error("coupling constant eps1 = {0} must be finite and >= 0")]
    BadEpsilon(f64),
    #[error("custom ratio rule needs {expected} ratios, got {got}")]
    RatioCount { expected: usize, got: usize },
    #[error("ratio c_{index} = {value} must be finite and > 0")]
    BadRatio { index: usize, value: f64 },
    #[error("infeasible coupling: row {row} has diagonal 1 - (p-1)·eps = {diagonal} < 0")]
    Infeasible { row: usize, diagonal: f64 },
    #[error("state has {got} components, system has {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("lattice arithmetic is not available for coupled systems")]
    LatticeMode,
    #[error(transparent)]
    Map(#[from] MapError),
}

/// How `ε_i` is derived from `ε_1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatioRule {
    /// `ε_i = i · ε_1`.
    Linear,
    /// `ε_i = c_i · ε_1` with one ratio per row.
    Custom(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingConfig {
    pub p: usize,
    pub eps1: f64,
    pub ratio: RatioRule,
}

impl CouplingConfig {
    pub fn linear(p: usize, eps1: f64) -> Self {
        CouplingConfig { p, eps1, ratio: RatioRule::Linear }
    }

    pub fn custom(eps1: f64, ratios: Vec<f64>) -> Self {
        CouplingConfig { p: ratios.len(), eps1, ratio: RatioRule::Custom(ratios) }
    }

    /// Ratio `c_i` for row `i` (zero-based).
    fn ratio(&self, i: usize) -> f64 {
        match &self.ratio {
            RatioRule::Linear => (i + 1) as f64,
            RatioRule::Custom(c) => c[i],
        }
    }

    /// Checks the shape of the config; feasibility is checked when the matrix
    /// is materialized in its target precision.
    pub fn validate(&self) -> Result<(), CouplingError> {
        if self.p == 0 {
            return Err(CouplingError::NoMaps);
        }
        if !(self.eps1.is_finite() && self.eps1 >= 0.0) {
            return Err(CouplingError::BadEpsilon(self.eps1));
        }
        if let RatioRule::Custom(c) = &self.ratio {
            if c.len() != self.p {
                return Err(CouplingError::RatioCount { expected: self.p, got: c.len() });
            }
            for (index, &value) in c.iter().enumerate() {
                if !(value.is_finite() && value > 0.0) {
                    return Err(CouplingError::BadRatio { index, value });
                }
            }
        }
        Ok(())
    }
}

/// Row-major `p × p` coupling matrix in precision `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix<T = f64> {
    p: usize,
    entries: Vec<T>,
}

impl<T: Real> CouplingMatrix<T> {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.p + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.p..(i + 1) * self.p]
    }

    /// Compensated (Neumaier) sum of row `i`, accurate to about one rounding
    /// of the exact sum of the stored entries.
    pub fn row_sum(&self, i: usize) -> T {
        let (mut sum, mut comp) = (T::ZERO, T::ZERO);
        for &v in self.row(i) {
            let t = sum + v;
            comp = if sum.abs() >= v.abs() { comp + ((sum - t) + v) } else { comp + ((v - t) + sum) };
            sum = t;
        }
        sum + comp
    }

    pub fn identity(p: usize) -> Self {
        let mut entries = vec![T::ZERO; p * p];
        for i in 0..p {
            entries[i * p + i] = T::ONE;
        }
        CouplingMatrix { p, entries }
    }
}

/// Materializes `A` in precision `T`. `ε_1` and the ratios are rounded to
/// `T` first; `ε_i = c_i · ε_1` and `1 - (p-1)·ε_i` are then each one rounded
/// operation in `T`.
pub fn build_matrix<T: Real>(config: &CouplingConfig) -> Result<CouplingMatrix<T>, CouplingError> {
    config.validate()?;
    let p = config.p;
    let eps1 = T::from_f64(config.eps1);
    let off = T::from_u64((p - 1) as u64);
    let mut entries = Vec::with_capacity(p * p);
    for i in 0..p {
        let eps = T::from_f64(config.ratio(i)) * eps1;
        let diagonal = T::ONE - off * eps;
        if diagonal < T::ZERO {
            return Err(CouplingError::Infeasible { row: i, diagonal: diagonal.to_f64() });
        }
        for j in 0..p {
            entries.push(if i == j { diagonal } else { eps });
        }
    }
    Ok(CouplingMatrix { p, entries })
}

/// State of a coupled system, one component per map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateVector<T>(pub Vec<T>);

impl<T: Real> StateVector<T> {
    pub fn from_f64(values: &[f64]) -> Self {
        StateVector(values.iter().map(|&v| T::from_f64(v)).collect())
    }

    /// The first `p` published seeds.
    pub fn paper_seeds(p: usize) -> Option<Self> {
        (p <= PAPER_SEEDS.len()).then(|| Self::from_f64(&PAPER_SEEDS[..p]))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|v| v.to_f64()).collect()
    }
}

impl<T> Deref for StateVector<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> DerefMut for StateVector<T> {
    fn deref_mut(&mut self) -> &mut [T] {
        &mut self.0
    }
}

/// One coupled step. `f` is applied to every component first, then
/// `out[i] = Σ_j A[i][j]·f(x_j)` is accumulated with `j` ascending.
#[inline]
pub fn step_into<T: Real>(
    x: &[T],
    a: &CouplingMatrix<T>,
    f: &IntervalMap<T>,
    images: &mut [T],
    out: &mut [T],
) {
    let p = a.p;
    debug_assert!(x.len() == p && images.len() == p && out.len() == p);
    for (img, &xi) in images.iter_mut().zip(x) {
        *img = f.apply(xi);
    }
    for (i, o) in out.iter_mut().enumerate() {
        let row = &a.entries[i * p..(i + 1) * p];
        let mut acc = row[0] * images[0];
        for j in 1..p {
            acc = acc + row[j] * images[j];
        }
        *o = acc;
    }
}

pub fn step<T: Real>(
    x: &StateVector<T>,
    a: &CouplingMatrix<T>,
    f: &IntervalMap<T>,
) -> Result<StateVector<T>, CouplingError> {
    if x.len() != a.p {
        return Err(CouplingError::Dimension { expected: a.p, got: x.len() });
    }
    let mut images = vec![T::ZERO; a.p];
    let mut out = vec![T::ZERO; a.p];
    step_into(x, a, f, &mut images, &mut out);
    Ok(StateVector(out))
}

/// A coupled map system in a fixed precision, with scratch space so that
/// stepping never allocates.
#[derive(Debug, Clone)]
pub struct CoupledSystem<T> {
    matrix: CouplingMatrix<T>,
    map: IntervalMap<T>,
    images: Vec<T>,
    next: Vec<T>,
}

impl<T: Real> CoupledSystem<T> {
    pub fn new(map: &MapSpec, coupling: &CouplingConfig) -> Result<Self, CouplingError> {
        let matrix = build_matrix::<T>(coupling)?;
        let map = map.interval_map::<T>()?;
        Ok(Self::from_parts(matrix, map))
    }

    pub fn from_parts(matrix: CouplingMatrix<T>, map: IntervalMap<T>) -> Self {
        let p = matrix.p;
        CoupledSystem { matrix, map, images: vec![T::ZERO; p], next: vec![T::ZERO; p] }
    }

    pub fn p(&self) -> usize {
        self.matrix.p
    }

    pub fn matrix(&self) -> &CouplingMatrix<T> {
        &self.matrix
    }

    #[inline]
    pub fn advance(&mut self, x: &mut [T]) {
        step_into(x, &self.matrix, &self.map, &mut self.images, &mut self.next);
        x.copy_from_slice(&self.next);
    }

    /// Applies `n` steps in place, handing every post-step state to `sink`.
    pub fn iterate(&mut self, x: &mut [T], n: u64, mut sink: impl FnMut(&[T])) {
        assert_eq!(x.len(), self.p(), "state dimension");
        for _ in 0..n {
            self.advance(x);
            sink(x);
        }
    }
}

/// Runs `n` coupled steps from `x0` in the float precision selected by
/// `mode`. States reach `sink` widened to binary64; the returned state is the
/// final one, also widened.
pub fn iterate(
    x0: &[f64],
    n: u64,
    map: &MapSpec,
    coupling: &CouplingConfig,
    mode: ArithMode,
    mut sink: impl FnMut(&[f64]),
) -> Result<Vec<f64>, CouplingError> {
    if x0.len() != coupling.p {
        return Err(CouplingError::Dimension { expected: coupling.p, got: x0.len() });
    }
    match mode {
        ArithMode::Binary64 => {
            let mut sys = CoupledSystem::<f64>::new(map, coupling)?;
            let mut x = x0.to_vec();
            sys.iterate(&mut x, n, |s| sink(s));
            Ok(x)
        }
        ArithMode::Binary32 => {
            let mut sys = CoupledSystem::<f32>::new(map, coupling)?;
            let mut x: Vec<f32> = x0.iter().map(|&v| v as f32).collect();
            let mut wide = vec![0.0; x.len()];
            sys.iterate(&mut x, n, |s| {
                for (w, &v) in wide.iter_mut().zip(s) {
                    *w = v as f64;
                }
                sink(&wide)
            });
            Ok(x.iter().map(|&v| v as f64).collect())
        }
        ArithMode::Lattice(_) => Err(CouplingError::LatticeMode),
    }
}
