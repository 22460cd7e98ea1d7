//! Least-squares lines and planes, used on log10-transformed error tables.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::write_header;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("input columns have different lengths")]
    LengthMismatch,
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("all abscissae are equal")]
    Degenerate,
    #[error("design points are collinear")]
    RankDeficient,
    #[error("non-finite input value")]
    NonFinite,
}

/// `y = slope · x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r: f64,
    pub n_points: usize,
}

/// `z = alpha · x + beta · y + gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneFit {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub r: f64,
    pub n_points: usize,
}

/// Free plane fit and the single-slope fit `z = alpha · (x - y) + gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneFitResult {
    pub free: PlaneFit,
    pub constrained: LineFit,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn check_finite(cols: &[&[f64]]) -> Result<(), FitError> {
    if cols.iter().all(|c| c.iter().all(|v| v.is_finite())) {
        Ok(())
    } else {
        Err(FitError::NonFinite)
    }
}

/// Pearson correlation; a constant `b` that is reproduced exactly counts as
/// perfect agreement.
fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if sbb == 0.0 {
        return 1.0;
    }
    if saa == 0.0 {
        return 0.0;
    }
    (sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0)
}

/// Ordinary least squares with the Pearson correlation of the two series.
pub fn linfit(xs: &[f64], ys: &[f64]) -> Result<LineFit, FitError> {
    if xs.len() != ys.len() {
        return Err(FitError::LengthMismatch);
    }
    if xs.len() < 2 {
        return Err(FitError::TooFewPoints { need: 2, got: xs.len() });
    }
    check_finite(&[xs, ys])?;
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        return Err(FitError::Degenerate);
    }
    let slope = sxy / sxx;
    Ok(LineFit { slope, intercept: my - slope * mx, r: pearson(xs, ys), n_points: xs.len() })
}

pub fn planefit(xs: &[f64], ys: &[f64], zs: &[f64]) -> Result<PlaneFitResult, FitError> {
    let n = xs.len();
    if ys.len() != n || zs.len() != n {
        return Err(FitError::LengthMismatch);
    }
    if n < 3 {
        return Err(FitError::TooFewPoints { need: 3, got: n });
    }
    check_finite(&[xs, ys, zs])?;
    let (mx, my, mz) = (mean(xs), mean(ys), mean(zs));
    let (mut sxx, mut sxy, mut syy, mut sxz, mut syz) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let (dx, dy, dz) = (xs[i] - mx, ys[i] - my, zs[i] - mz);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
        sxz += dx * dz;
        syz += dy * dz;
    }
    let det = sxx * syy - sxy * sxy;
    if det.is_nan() || det <= 1e-12 * sxx * syy {
        return Err(FitError::RankDeficient);
    }
    let alpha = (sxz * syy - syz * sxy) / det;
    let beta = (syz * sxx - sxz * sxy) / det;
    let gamma = mz - alpha * mx - beta * my;
    let fitted: Vec<f64> = (0..n).map(|i| alpha * xs[i] + beta * ys[i] + gamma).collect();
    let free = PlaneFit { alpha, beta, gamma, r: pearson(&fitted, zs), n_points: n };

    Ok(PlaneFitResult { free, constrained: constrained_planefit(xs, ys, zs)? })
}

/// `z = alpha · (x - y) + gamma`, i.e. the plane with `beta = -alpha`.
pub fn constrained_planefit(xs: &[f64], ys: &[f64], zs: &[f64]) -> Result<LineFit, FitError> {
    if ys.len() != xs.len() {
        return Err(FitError::LengthMismatch);
    }
    let diff: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| x - y).collect();
    linfit(&diff, zs).map_err(|e| match e {
        FitError::Degenerate => FitError::RankDeficient,
        e => e,
    })
}

/// One row of a fit report.
#[derive(Debug, Clone, PartialEq)]
pub struct FitRow {
    pub model: String,
    pub coefficients: Vec<(String, f64)>,
    pub r: f64,
    pub n_points: usize,
}

impl From<(&str, LineFit)> for FitRow {
    fn from((model, f): (&str, LineFit)) -> Self {
        FitRow {
            model: model.to_string(),
            coefficients: vec![("slope".into(), f.slope), ("intercept".into(), f.intercept)],
            r: f.r,
            n_points: f.n_points,
        }
    }
}

impl From<(&str, PlaneFit)> for FitRow {
    fn from((model, f): (&str, PlaneFit)) -> Self {
        FitRow {
            model: model.to_string(),
            coefficients: vec![("alpha".into(), f.alpha), ("beta".into(), f.beta), ("gamma".into(), f.gamma)],
            r: f.r,
            n_points: f.n_points,
        }
    }
}

/// Columns `model,coefficients,r,n_points`; coefficients are `name=value`
/// pairs joined by `;`.
pub fn write_fit_report<W: Write>(mut w: W, comments: &[String], rows: &[FitRow]) -> io::Result<()> {
    write_header(&mut w, comments)?;
    writeln!(w, "model,coefficients,r,n_points")?;
    for row in rows {
        let coeffs: Vec<String> = row.coefficients.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(w, "{},{},{},{}", row.model, coeffs.join(";"), row.r, row.n_points)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_lines() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let f = linfit(&xs, &ys).unwrap();
        assert_eq!((f.slope, f.intercept, f.r, f.n_points), (2.0, 1.0, 1.0, 5));
        let f = linfit(&[1.0, 2.0, 3.0], &[-1.0, -2.0, -3.0]).unwrap();
        assert_eq!((f.slope, f.r), (-1.0, -1.0));
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(linfit(&[1.0, 1.0], &[0.0, 2.0]), Err(FitError::Degenerate));
        assert_eq!(linfit(&[1.0], &[0.0]), Err(FitError::TooFewPoints { need: 2, got: 1 }));
        assert_eq!(linfit(&[1.0, 2.0], &[0.0]), Err(FitError::LengthMismatch));
        assert_eq!(linfit(&[1.0, f64::NAN], &[0.0, 1.0]), Err(FitError::NonFinite));
        let collinear = planefit(&[0.0, 1.0, 2.0], &[0.0, 1.0, 2.0], &[1.0, 2.0, 3.0]);
        assert_eq!(collinear, Err(FitError::RankDeficient));
    }

    #[test]
    fn exact_planes() {
        let xs = [0.0, 1.0, 0.0, 2.0, 3.0];
        let ys = [0.0, 0.0, 1.0, 5.0, 1.0];
        let zs: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| x - y).collect();
        let f = planefit(&xs, &ys, &zs).unwrap();
        assert!((f.free.alpha - 1.0).abs() < 1e-12);
        assert!((f.free.beta + 1.0).abs() < 1e-12);
        assert!(f.free.gamma.abs() < 1e-12);
        assert!((f.free.r - 1.0).abs() < 1e-12);
        assert!((f.constrained.slope - 1.0).abs() < 1e-12);

        let f = planefit(&xs, &ys, &[3.0; 5]).unwrap();
        assert!(f.free.alpha.abs() < 1e-12 && f.free.beta.abs() < 1e-12);
        assert!((f.free.gamma - 3.0).abs() < 1e-12);
    }

    #[test]
    fn constrained_fit_with_zero_y_is_a_line_fit() {
        let xs = [1.0, 2.5, 4.0, 7.0];
        let zs = [0.3, -0.1, 0.9, 1.4];
        assert_eq!(constrained_planefit(&xs, &[0.0; 4], &zs).unwrap(), linfit(&xs, &zs).unwrap());
        assert_eq!(planefit(&xs, &[0.0; 4], &zs), Err(FitError::RankDeficient));
    }

    #[test]
    fn report_layout() {
        let f = linfit(&[0.0, 1.0], &[1.0, 3.0]).unwrap();
        let mut buf = Vec::new();
        write_fit_report(&mut buf, &[], &[("E1_vs_N", f).into()]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "model,coefficients,r,n_points\nE1_vs_N,slope=2;intercept=1,1,2\n");
    }

    proptest! {
        #[test]
        fn recovers_linear_coefficients(slope in -50.0f64..50.0, icpt in -50.0f64..50.0, n in 2usize..40) {
            let xs: Vec<f64> = (0..n).map(|i| i as f64 * 0.37 - 3.0).collect();
            let ys: Vec<f64> = xs.iter().map(|x| slope * x + icpt).collect();
            let f = linfit(&xs, &ys).unwrap();
            prop_assert!((f.slope - slope).abs() <= 1e-9 * slope.abs().max(1.0));
            prop_assert!((f.intercept - icpt).abs() <= 1e-9 * icpt.abs().max(1.0));
            if slope.abs() > 1e-6 {
                prop_assert!((f.r.abs() - 1.0).abs() <= 1e-12);
            }
        }

        #[test]
        fn affine_equivariance(
            ys in proptest::collection::vec(-10.0f64..10.0, 5),
            a in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0],
            b in -5.0f64..5.0,
            c in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0],
            d in -5.0f64..5.0,
        ) {
            let xs = [0.0, 1.0, 2.0, 3.5, 4.0];
            let f = linfit(&xs, &ys).unwrap();
            let xs2: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
            let ys2: Vec<f64> = ys.iter().map(|y| c * y + d).collect();
            let g = linfit(&xs2, &ys2).unwrap();
            let tol = 1e-9 * (1.0 + f.slope.abs() + f.intercept.abs()) * (1.0 + c.abs() / a.abs()) * (1.0 + b.abs() + d.abs());
            prop_assert!((g.slope - c / a * f.slope).abs() <= tol);
            prop_assert!((g.intercept - (c * f.intercept + d - c / a * f.slope * b)).abs() <= tol);
            prop_assert!((g.r - (a * c).signum() * f.r).abs() <= 1e-9);
        }
    }
}
