//! Base maps of the interval and the plane.
//!
//! Every kernel is generic over [`Real`] and spells out its evaluation order
//! one rounded operation at a time. Periods of discretized orbits depend on
//! the last bit of each iterate, so these orders are part of the contract and
//! must not be "simplified".

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arithmetic::{frac, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("exponent l = {0} is outside (1, 2]")]
    ExponentOutOfRange(f64),
    #[error("Henon fixed points need a != 0")]
    ZeroQuadratic,
    #[error("no real fixed point: discriminant {0} < 0")]
    NoRealFixedPoint(f64),
    #[error("unknown map `{0}`")]
    UnknownMap(String),
    #[error("map `{0}` is two-dimensional")]
    NotOneDimensional(MapKind),
    #[error("map `{0}` is one-dimensional")]
    NotTwoDimensional(MapKind),
    #[error("parameter {name} = {value} is not finite")]
    NonFinite { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    /// `1 - a|x|` on [-1, 1].
    Tent,
    /// `a x (1 - x)` on [0, 1].
    LogisticUnit,
    /// `1 - 2x^2` on [-1, 1].
    LogisticSym,
    /// `|1 - 2x^2|` on [0, 1].
    FoldedLogistic,
    /// The folded logistic translated to [1, 2].
    FoldedLogisticShifted,
    /// `2x + 0.5 x (1 - x) mod 1` on [0, 1].
    CircleMap,
    /// `2x + 0.5 x (x - 1)(2 - x) mod 1`, working interval [1, 2].
    CircleMapShifted,
    /// `1 - |1 - 2x|^l` on [0, 1].
    DpFamily,
    Henon,
    Lozi,
}

impl MapKind {
    pub const ALL: [MapKind; 10] = [
        MapKind::Tent,
        MapKind::LogisticUnit,
        MapKind::LogisticSym,
        MapKind::FoldedLogistic,
        MapKind::FoldedLogisticShifted,
        MapKind::CircleMap,
        MapKind::CircleMapShifted,
        MapKind::DpFamily,
        MapKind::Henon,
        MapKind::Lozi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MapKind::Tent => "tent",
            MapKind::LogisticUnit => "logistic-unit",
            MapKind::LogisticSym => "logistic-sym",
            MapKind::FoldedLogistic => "folded-logistic",
            MapKind::FoldedLogisticShifted => "folded-logistic-shifted",
            MapKind::CircleMap => "circle",
            MapKind::CircleMapShifted => "circle-shifted",
            MapKind::DpFamily => "dp",
            MapKind::Henon => "henon",
            MapKind::Lozi => "lozi",
        }
    }

    pub fn is_planar(self) -> bool {
        matches!(self, MapKind::Henon | MapKind::Lozi)
    }

    /// Closed working interval of a one-dimensional map.
    pub fn domain(self) -> Option<(f64, f64)> {
        match self {
            MapKind::Tent | MapKind::LogisticSym => Some((-1.0, 1.0)),
            MapKind::LogisticUnit
            | MapKind::FoldedLogistic
            | MapKind::CircleMap
            | MapKind::DpFamily => Some((0.0, 1.0)),
            MapKind::CircleMapShifted | MapKind::FoldedLogisticShifted => Some((1.0, 2.0)),
            MapKind::Henon | MapKind::Lozi => None,
        }
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MapKind {
    type Err = MapError;
    fn from_str(s: &str) -> Result<Self, MapError> {
        let t = s.trim().to_ascii_lowercase().replace('_', "-");
        let kind = match t.as_str() {
            "tent" => MapKind::Tent,
            "logistic" | "logistic-unit" => MapKind::LogisticUnit,
            "logistic-sym" | "ulam" => MapKind::LogisticSym,
            "folded" | "folded-logistic" => MapKind::FoldedLogistic,
            "folded-shifted" | "folded-logistic-shifted" => MapKind::FoldedLogisticShifted,
            "circle" | "circle-map" => MapKind::CircleMap,
            "circle-shifted" | "circle-map-shifted" => MapKind::CircleMapShifted,
            "dp" | "dp-family" => MapKind::DpFamily,
            "henon" => MapKind::Henon,
            "lozi" => MapKind::Lozi,
            _ => return Err(MapError::UnknownMap(s.to_string())),
        };
        Ok(kind)
    }
}

/// A base map together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    pub kind: MapKind,
    pub a: f64,
    pub b: f64,
    pub l: f64,
}

impl MapSpec {
    /// The map with the parameter values used throughout the experiments:
    /// tent a=2, logistic a=4, Henon (1.4, 0.3), Lozi (1.7, 0.5), l=2.
    pub fn standard(kind: MapKind) -> Self {
        let (a, b) = match kind {
            MapKind::Tent => (2.0, 0.0),
            MapKind::LogisticUnit => (4.0, 0.0),
            MapKind::Henon => (1.4, 0.3),
            MapKind::Lozi => (1.7, 0.5),
            _ => (0.0, 0.0),
        };
        MapSpec { kind, a, b, l: 2.0 }
    }

    pub fn tent(a: f64) -> Self {
        MapSpec { a, ..Self::standard(MapKind::Tent) }
    }

    pub fn logistic_unit(a: f64) -> Self {
        MapSpec { a, ..Self::standard(MapKind::LogisticUnit) }
    }

    pub fn dp(l: f64) -> Self {
        MapSpec { l, ..Self::standard(MapKind::DpFamily) }
    }

    pub fn henon(a: f64, b: f64) -> Self {
        MapSpec { kind: MapKind::Henon, a, b, l: 2.0 }
    }

    pub fn lozi(a: f64, b: f64) -> Self {
        MapSpec { kind: MapKind::Lozi, a, b, l: 2.0 }
    }

    pub fn validate(&self) -> Result<(), MapError> {
        for (name, value) in [("a", self.a), ("b", self.b), ("l", self.l)] {
            if !value.is_finite() {
                return Err(MapError::NonFinite { name, value });
            }
        }
        if self.kind == MapKind::DpFamily && !(self.l > 1.0 && self.l <= 2.0) {
            return Err(MapError::ExponentOutOfRange(self.l));
        }
        Ok(())
    }

    /// Validated one-dimensional kernel in precision `T`.
    pub fn interval_map<T: Real>(&self) -> Result<IntervalMap<T>, MapError> {
        self.validate()?;
        if self.kind.is_planar() {
            return Err(MapError::NotOneDimensional(self.kind));
        }
        Ok(IntervalMap {
            kind: self.kind,
            a: T::from_f64(self.a),
            l: T::from_f64(self.l),
        })
    }

    /// Validated planar kernel in precision `T`.
    pub fn plane_map<T: Real>(&self) -> Result<PlaneMap<T>, MapError> {
        self.validate()?;
        if !self.kind.is_planar() {
            return Err(MapError::NotTwoDimensional(self.kind));
        }
        Ok(PlaneMap {
            kind: self.kind,
            a: T::from_f64(self.a),
            b: T::from_f64(self.b),
        })
    }
}

#[inline(always)]
pub fn tent<T: Real>(x: T, a: T) -> T {
    let t = x.abs();
    let t = a * t;
    T::ONE - t
}

#[inline(always)]
pub fn logistic_unit<T: Real>(x: T, a: T) -> T {
    let t = T::ONE - x;
    let t = x * t;
    a * t
}

#[inline(always)]
pub fn logistic_sym<T: Real>(x: T) -> T {
    let t = x * x;
    let t = T::TWO * t;
    T::ONE - t
}

#[inline(always)]
pub fn folded_logistic<T: Real>(x: T) -> T {
    logistic_sym(x).abs()
}

/// Folded logistic conjugated by the translation `x -> x + 1`.
#[inline(always)]
pub fn folded_logistic_shifted<T: Real>(x: T) -> T {
    let u = x - T::ONE;
    T::ONE + folded_logistic(u)
}

#[inline(always)]
pub fn circle_map<T: Real>(x: T) -> T {
    let t = T::ONE - x;
    let t = x * t;
    let t = T::HALF * t;
    let s = T::TWO * x;
    frac(s + t)
}

#[inline(always)]
pub fn circle_map_shifted<T: Real>(x: T) -> T {
    let u = x - T::ONE;
    let w = T::TWO - x;
    let t = x * u;
    let t = t * w;
    let t = T::HALF * t;
    let s = T::TWO * x;
    T::ONE + frac(s + t)
}

#[inline(always)]
fn dp_unchecked<T: Real>(x: T, l: T) -> T {
    let t = T::TWO * x;
    let t = (T::ONE - t).abs();
    T::ONE - t.powf(l)
}

pub fn dp_family<T: Real>(x: T, l: T) -> Result<T, MapError> {
    let lf = l.to_f64();
    if !(lf > 1.0 && lf <= 2.0) {
        return Err(MapError::ExponentOutOfRange(lf));
    }
    Ok(dp_unchecked(x, l))
}

#[inline(always)]
pub fn henon<T: Real>(x: T, y: T, a: T, b: T) -> (T, T) {
    let t = x * x;
    let t = a * t;
    let s = y + T::ONE;
    (s - t, b * x)
}

#[inline(always)]
pub fn lozi<T: Real>(x: T, y: T, a: T, b: T) -> (T, T) {
    let t = x.abs();
    let t = a * t;
    let s = y + T::ONE;
    (s - t, b * x)
}

/// Real roots of `a x^2 + (1 - b) x - 1 = 0`, the abscissae of the Henon
/// fixed points `(x, b x)`, in ascending order.
pub fn henon_fixed_points(a: f64, b: f64) -> Result<[f64; 2], MapError> {
    if a == 0.0 {
        return Err(MapError::ZeroQuadratic);
    }
    let lin = 1.0 - b;
    let disc = lin * lin + 4.0 * a;
    if disc < 0.0 {
        return Err(MapError::NoRealFixedPoint(disc));
    }
    // cancellation-free pair: q = -(B + sign(B) sqrt(D)) / 2, roots q/A and C/q
    let sign = if lin >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (lin + sign * disc.sqrt());
    let (r1, r2) = (q / a, -1.0 / q);
    Ok(if r1 <= r2 { [r1, r2] } else { [r2, r1] })
}

/// One-dimensional kernel with parameters already converted to `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalMap<T> {
    kind: MapKind,
    a: T,
    l: T,
}

impl<T: Real> IntervalMap<T> {
    pub fn kind(&self) -> MapKind {
        self.kind
    }

    #[inline(always)]
    pub fn apply(&self, x: T) -> T {
        match self.kind {
            MapKind::Tent => tent(x, self.a),
            MapKind::LogisticUnit => logistic_unit(x, self.a),
            MapKind::LogisticSym => logistic_sym(x),
            MapKind::FoldedLogistic => folded_logistic(x),
            MapKind::FoldedLogisticShifted => folded_logistic_shifted(x),
            MapKind::CircleMap => circle_map(x),
            MapKind::CircleMapShifted => circle_map_shifted(x),
            MapKind::DpFamily => dp_unchecked(x, self.l),
            MapKind::Henon | MapKind::Lozi => unreachable!("planar maps are rejected at construction"),
        }
    }
}

/// Planar kernel with parameters already converted to `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneMap<T> {
    kind: MapKind,
    a: T,
    b: T,
}

impl<T: Real> PlaneMap<T> {
    pub fn kind(&self) -> MapKind {
        self.kind
    }

    #[inline(always)]
    pub fn apply(&self, (x, y): (T, T)) -> (T, T) {
        match self.kind {
            MapKind::Henon => henon(x, y, self.a, self.b),
            _ => lozi(x, y, self.a, self.b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ulps(a: f64, b: f64) -> u64 {
        (a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs()
    }

    #[test]
    fn tent_examples() {
        assert_eq!(tent(0.0, 2.0), 1.0);
        assert!((tent(1.0 / 3.0, 2.0f64) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(tent(-1.0, 2.0), -1.0);
        assert_eq!(tent(-1.0f32, 2.0), -1.0);
    }

    #[test]
    fn logistic_examples() {
        assert_eq!(logistic_unit(0.75, 4.0), 0.75);
        assert_eq!(logistic_unit(0.5, 4.0), 1.0);
        let s5 = 5f64.sqrt();
        let hi = (5.0 + s5) / 8.0;
        let lo = (5.0 - s5) / 8.0;
        assert!((logistic_unit(hi, 4.0) - lo).abs() < 1e-12);
        assert!((logistic_unit(lo, 4.0) - hi).abs() < 1e-12);
        assert_eq!(logistic_sym(-1.0), -1.0);
        assert_eq!(logistic_sym(0.0), 1.0);
        assert_eq!(logistic_sym(0.5), 0.5);
    }

    #[test]
    fn folded_and_circle_examples() {
        assert_eq!(folded_logistic(1.0), 1.0);
        assert_eq!(folded_logistic(0.0), 1.0);
        assert!(folded_logistic(0.5f64.sqrt()) < 1e-15);
        assert_eq!(folded_logistic_shifted(2.0), 2.0);
        assert_eq!(circle_map(0.0), 0.0);
        assert_eq!(circle_map(0.5), 0.125);
        assert_eq!(circle_map(1.0), 0.0);
        assert_eq!(circle_map_shifted(1.0), 1.0);
        assert_eq!(circle_map_shifted(2.0), 1.0);
        assert_eq!(circle_map_shifted(1.5), 1.1875);
    }

    #[test]
    fn dp_examples() {
        assert_eq!(dp_family(0.5, 2.0).unwrap(), 1.0);
        assert_eq!(dp_family(0.0, 2.0).unwrap(), 0.0);
        assert_eq!(dp_family(0.25, 2.0).unwrap(), 0.75);
        assert!(dp_family(0.25, 1.0).is_err());
        assert!(dp_family(0.25, 2.5).is_err());
        assert!(MapSpec::dp(1.0).validate().is_err());
        assert!(MapSpec::dp(1.5).validate().is_ok());
    }

    #[test]
    fn planar_examples() {
        assert_eq!(henon(0.0, 0.0, 1.4, 0.3), (1.0, 0.0));
        let (x, y) = henon(1.0, 0.0, 1.4, 0.3);
        assert!((x + 0.4).abs() < 1e-15 && y == 0.3);
        assert_eq!(lozi(0.0, 0.0, 1.7, 0.5), (1.0, 0.0));
        let (x, y) = lozi(-1.0, 0.0, 1.7, 0.5);
        assert!((x + 0.7).abs() < 1e-15 && y == -0.5);
        let (x, y) = lozi(1.0, 0.5, 1.7, 0.5);
        assert!((x + 0.2).abs() < 1e-15 && y == 0.5);
    }

    #[test]
    fn henon_fixed_points_examples() {
        let [lo, hi] = henon_fixed_points(1.0, 1.0).unwrap();
        assert_eq!((lo, hi), (-1.0, 1.0));

        // independent route: textbook quadratic formula for 1.4x^2 + 0.7x - 1
        let d = (0.49f64 + 5.6).sqrt();
        let expect = [(-0.7 - d) / 2.8, (-0.7 + d) / 2.8];
        let got = henon_fixed_points(1.4, 0.3).unwrap();
        for (g, e) in got.iter().zip(expect) {
            assert!((g - e).abs() < 1e-14, "{g} vs {e}");
            let (hx, hy) = henon(*g, 0.3 * g, 1.4, 0.3);
            assert!(ulps(hx, *g) <= 4, "x residual {} ulp", ulps(hx, *g));
            assert_eq!(hy, 0.3 * g);
        }

        assert!(matches!(
            henon_fixed_points(-1.0, 0.3),
            Err(MapError::NoRealFixedPoint(_))
        ));
        assert!(matches!(henon_fixed_points(0.0, 0.3), Err(MapError::ZeroQuadratic)));
    }

    #[test]
    fn range_closure_sampled() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1_000_000 {
            let x: f64 = rng.random_range(-1.0..=1.0);
            let u: f64 = rng.random_range(0.0..=1.0);
            let t = tent(x, 2.0);
            assert!((-1.0..=1.0).contains(&t));
            let s = logistic_sym(x);
            assert!((-1.0..=1.0).contains(&s));
            let l = logistic_unit(u, 4.0);
            assert!((0.0..=1.0).contains(&l));

            let xf = x as f32;
            let uf = u as f32;
            assert!((-1.0..=1.0).contains(&tent(xf, 2.0)));
            assert!((-1.0..=1.0).contains(&logistic_sym(xf)));
            assert!((0.0..=1.0).contains(&logistic_unit(uf, 4.0)));
        }
        for e in [-1.0f64, 1.0, 0.0] {
            assert!((-1.0..=1.0).contains(&tent(e, 2.0)));
            assert!((-1.0..=1.0).contains(&logistic_sym(e)));
        }
    }

    #[test]
    fn tent_logistic_conjugacy() {
        let pi = std::f64::consts::PI;
        for k in 0..=10_000 {
            let y = k as f64 / 10_000.0;
            let x = -(pi * y).cos();
            let lhs = logistic_sym(x);
            // unit-interval tent 1 - |2y - 1|, equal to frac(2y) for y < 1/2
            let t = (tent(2.0 * y - 1.0, 2.0) + 1.0) / 2.0;
            let rhs = -(pi * t).cos();
            assert!((lhs - rhs).abs() < 1e-9, "y={y}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn symmetry_and_folding() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100_000 {
            let x: f64 = rng.random_range(-1.0..=1.0);
            assert_eq!(tent(x, 2.0).to_bits(), tent(-x, 2.0).to_bits());
            assert_eq!(logistic_sym(x).to_bits(), logistic_sym(-x).to_bits());
            let u = x.abs();
            assert_eq!(folded_logistic(u).to_bits(), logistic_sym(u).abs().to_bits());
        }
    }

    #[test]
    fn circle_map_expands() {
        let n = 10_000;
        let h = 1e-7;
        for k in 0..n {
            let x = (k as f64 + 0.5) / n as f64;
            // unwrap the mod-1 jump: slope of the lifted map
            let lift = |v: f64| 2.0 * v + 0.5 * v * (1.0 - v);
            let slope = (lift(x + h) - lift(x - h)) / (2.0 * h);
            assert!(slope >= 1.5 - 1e-6, "slope {slope} at {x}");
            let d = circle_map(x + h) - circle_map(x - h);
            let d = d - d.round();
            assert!(d / (2.0 * h) >= 1.5 - 1e-6);
        }
    }

    /// Evaluates a kernel in binary64 but rounds every intermediate through
    /// binary32 by hand; it must agree with the native f32 kernel bit for bit.
    #[test]
    fn binary32_pipeline_rounds_every_step() {
        let r = |v: f64| v as f32 as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200_000 {
            let x: f32 = rng.random_range(-1.0..=1.0);
            let xd = x as f64;
            let tent64 = r(1.0 - r(2.0 * r(xd.abs())));
            assert_eq!(tent(x, 2.0f32) as f64, tent64);
            let sym64 = r(1.0 - r(2.0 * r(xd * xd)));
            assert_eq!(logistic_sym(x) as f64, sym64);
            let u = x.abs();
            let ud = u as f64;
            let lg64 = r(4.0 * r(ud * r(1.0 - ud)));
            assert_eq!(logistic_unit(u, 4.0f32) as f64, lg64);
            let c64 = {
                let t = r(0.5 * r(ud * r(1.0 - ud)));
                let v = r(r(2.0 * ud) + t);
                let f = r(v - v.floor());
                if f >= 1.0 { 0.0 } else { f }
            };
            assert_eq!(circle_map(u) as f64, c64);
        }
    }

    #[test]
    fn kind_round_trip() {
        for k in MapKind::ALL {
            assert_eq!(k.name().parse::<MapKind>().unwrap(), k);
        }
        assert!("baker".parse::<MapKind>().is_err());
        assert!(MapSpec::standard(MapKind::Henon).interval_map::<f64>().is_err());
        assert!(MapSpec::standard(MapKind::Tent).plane_map::<f64>().is_err());
    }
}
