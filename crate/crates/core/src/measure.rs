//! Step-function estimates of an invariant density on `[-1, 1]` and their
//! distance to reference densities.
//!
//! Box `i` of `M` is `[s_i, s_{i+1})` with `s_i = -1 + 2i/M`; the last box is
//! closed so that `x = 1` is counted. The norms carry the box width `2/M`, so
//! they approximate the integrals of `|P - ref|` and `(P - ref)^2`.

use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::write_header;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("value {0} lies outside [-1, 1]")]
    OutOfDomain(f64),
    #[error("box count must be at least 1")]
    NoBoxes,
    #[error("histogram is empty")]
    Empty,
    #[error("stream of {len} values is shorter than the transient q = {q}")]
    TransientTooLong { q: u64, len: u64 },
    #[error("histograms have {0} and {1} boxes")]
    BoxMismatch(usize, usize),
    #[error("truncation cut {0} must lie in (0, 1)")]
    BadCut(f64),
    #[error("density is singular at {0}")]
    Singular(f64),
    #[error("{0} is not defined on [-1, 1]")]
    Incompatible(ReferenceDensity),
    #[error("state has {got} components, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("unknown reference density '{0}'")]
    UnknownReference(String),
}

/// Left edge `s_i` of box `i`.
#[inline]
pub fn box_edge(i: usize, m: usize) -> f64 {
    -1.0 + 2.0 * i as f64 / m as f64
}

#[inline]
pub fn box_midpoint(i: usize, m: usize) -> f64 {
    -1.0 + (2 * i + 1) as f64 / m as f64
}

/// Index of the box containing `x`, consistent with [`box_edge`] bit for bit.
#[inline]
pub fn bin_index(x: f64, m: usize) -> Result<usize, MeasureError> {
    if m == 0 {
        return Err(MeasureError::NoBoxes);
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(MeasureError::OutOfDomain(x));
    }
    let mut i = (((x + 1.0) * 0.5 * m as f64) as usize).min(m - 1);
    if x < box_edge(i, m) {
        i -= 1;
    } else if i + 1 < m && x >= box_edge(i + 1, m) {
        i += 1;
    }
    Ok(i)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    m: usize,
    counts: Vec<u64>,
    n: u64,
    q: u64,
}

impl Histogram {
    pub fn new(m: usize, q: u64) -> Result<Self, MeasureError> {
        if m == 0 {
            return Err(MeasureError::NoBoxes);
        }
        Ok(Histogram { m, counts: vec![0; m], n: 0, q })
    }

    pub fn boxes(&self) -> usize {
        self.m
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Samples counted.
    pub fn total(&self) -> u64 {
        self.n
    }

    pub fn transient(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn push(&mut self, x: f64) -> Result<(), MeasureError> {
        let i = bin_index(x, self.m)?;
        self.counts[i] += 1;
        self.n += 1;
        Ok(())
    }

    /// Adds another shard's counts.
    pub fn merge(&mut self, other: &Histogram) -> Result<(), MeasureError> {
        if self.m != other.m {
            return Err(MeasureError::BoxMismatch(self.m, other.m));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.n += other.n;
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut w: W, comments: &[String]) -> io::Result<()> {
        write_header(&mut w, comments)?;
        writeln!(w, "box_index,s_left,s_right,count,density")?;
        let d = density(self).ok();
        for (i, &c) in self.counts.iter().enumerate() {
            let p = d.as_ref().map_or(0.0, |d| d.values[i]);
            let right = if i + 1 == self.m { 1.0 } else { box_edge(i + 1, self.m) };
            writeln!(w, "{i},{},{right},{c},{p}", box_edge(i, self.m))?;
        }
        Ok(())
    }
}

/// Skips the first `q` values of `stream` and bins the rest into `m` boxes.
pub fn accumulate<I>(stream: I, m: usize, q: u64) -> Result<Histogram, MeasureError>
where
    I: IntoIterator<Item = f64>,
{
    let mut h = Histogram::new(m, q)?;
    let mut seen = 0u64;
    for x in stream {
        if seen >= q {
            h.push(x)?;
        }
        seen += 1;
    }
    if seen < q {
        return Err(MeasureError::TransientTooLong { q, len: seen });
    }
    Ok(h)
}

/// Piecewise-constant density `P_i = (M / 2N) · count_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub m: usize,
    pub values: Vec<f64>,
}

pub fn density(h: &Histogram) -> Result<DensityEstimate, MeasureError> {
    if h.n == 0 {
        return Err(MeasureError::Empty);
    }
    let scale = h.m as f64 / (2.0 * h.n as f64);
    let values = h.counts.iter().map(|&c| c as f64 * scale).collect();
    Ok(DensityEstimate { m: h.m, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcsineForm {
    /// On (0, 1).
    Unit,
    /// On (-1, 1).
    Sym,
}

/// Invariant density of the full logistic map.
pub fn arcsine_density(x: f64, form: ArcsineForm) -> Result<f64, MeasureError> {
    let inside = match form {
        ArcsineForm::Unit => x > 0.0 && x < 1.0,
        ArcsineForm::Sym => x > -1.0 && x < 1.0,
    };
    if !inside {
        return Err(MeasureError::Singular(x));
    }
    Ok(match form {
        ArcsineForm::Unit => 1.0 / (PI * (x * (1.0 - x)).sqrt()),
        ArcsineForm::Sym => 1.0 / (PI * ((1.0 - x) * (1.0 + x)).sqrt()),
    })
}

/// Sends the symmetric arcsine law to the uniform law on `[0, 1]`.
#[inline]
pub fn logistic_to_uniform(x: f64) -> f64 {
    (-x).clamp(-1.0, 1.0).acos() / PI
}

/// Interleaves the components: `x1_n, .., xp_n, x1_{n+1}, ..`.
pub fn mix_components<S: AsRef<[f64]>>(states: &[S], p: usize) -> Result<Vec<f64>, MeasureError> {
    let mut out = Vec::with_capacity(states.len() * p);
    for s in states {
        let s = s.as_ref();
        if s.len() != p {
            return Err(MeasureError::Dimension { expected: p, got: s.len() });
        }
        out.extend_from_slice(s);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceDensity {
    /// Constant 1/2 on [-1, 1].
    Lebesgue,
    /// Arcsine law on [0, 1].
    ArcsineUnit,
    /// Arcsine law on [-1, 1].
    ArcsineSym,
}

impl ReferenceDensity {
    pub fn name(self) -> &'static str {
        match self {
            ReferenceDensity::Lebesgue => "lebesgue",
            ReferenceDensity::ArcsineUnit => "arcsine-unit",
            ReferenceDensity::ArcsineSym => "arcsine",
        }
    }

    pub fn domain(self) -> (f64, f64) {
        match self {
            ReferenceDensity::ArcsineUnit => (0.0, 1.0),
            _ => (-1.0, 1.0),
        }
    }

    pub fn eval(self, x: f64) -> Result<f64, MeasureError> {
        match self {
            ReferenceDensity::Lebesgue => {
                if (-1.0..=1.0).contains(&x) {
                    Ok(0.5)
                } else {
                    Err(MeasureError::OutOfDomain(x))
                }
            }
            ReferenceDensity::ArcsineUnit => arcsine_density(x, ArcsineForm::Unit),
            ReferenceDensity::ArcsineSym => arcsine_density(x, ArcsineForm::Sym),
        }
    }

    /// Values at the box midpoints of an `m`-box partition of [-1, 1].
    fn at_midpoints(self, m: usize) -> Result<Vec<f64>, MeasureError> {
        if self.domain() != (-1.0, 1.0) {
            return Err(MeasureError::Incompatible(self));
        }
        (0..m).map(|i| self.eval(box_midpoint(i, m))).collect()
    }
}

impl fmt::Display for ReferenceDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReferenceDensity {
    type Err = MeasureError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lebesgue" | "uniform" => Ok(ReferenceDensity::Lebesgue),
            "arcsine" | "arcsine-sym" => Ok(ReferenceDensity::ArcsineSym),
            "arcsine-unit" => Ok(ReferenceDensity::ArcsineUnit),
            _ => Err(MeasureError::UnknownReference(s.to_string())),
        }
    }
}

/// Per-box `|P_i - ref_i| · 2/M`.
fn l1_terms(d: &DensityEstimate, r: ReferenceDensity) -> Result<Vec<f64>, MeasureError> {
    let w = 2.0 / d.m as f64;
    let refs = r.at_midpoints(d.m)?;
    Ok(d.values.iter().zip(refs).map(|(p, q)| (p - q).abs() * w).collect())
}

pub fn err_l1(d: &DensityEstimate, r: ReferenceDensity) -> Result<f64, MeasureError> {
    Ok(l1_terms(d, r)?.iter().sum())
}

pub fn err_l2_sq(d: &DensityEstimate, r: ReferenceDensity) -> Result<f64, MeasureError> {
    let w = 2.0 / d.m as f64;
    let refs = r.at_midpoints(d.m)?;
    Ok(d.values.iter().zip(refs).map(|(p, q)| (p - q) * (p - q) * w).sum())
}

/// `true` when box `i` lies wholly inside `[-cut, cut]`.
fn box_inside(i: usize, m: usize, cut: f64) -> bool {
    let right = if i + 1 == m { 1.0 } else { box_edge(i + 1, m) };
    box_edge(i, m) >= -cut && right <= cut
}

/// L1 error restricted to boxes wholly inside `[-cut, cut]`, and the
/// contribution of the excluded boxes.
pub fn err_l1_split(d: &DensityEstimate, r: ReferenceDensity, cut: f64) -> Result<(f64, f64), MeasureError> {
    if !(cut > 0.0 && cut < 1.0) {
        return Err(MeasureError::BadCut(cut));
    }
    let terms = l1_terms(d, r)?;
    let (mut inside, mut excluded) = (0.0, 0.0);
    for (i, t) in terms.iter().enumerate() {
        if box_inside(i, d.m, cut) {
            inside += t;
        } else {
            excluded += t;
        }
    }
    Ok((inside, excluded))
}

pub fn err_l1_trunc(d: &DensityEstimate, r: ReferenceDensity, cut: f64) -> Result<f64, MeasureError> {
    err_l1_split(d, r, cut).map(|(inside, _)| inside)
}

/// One row of the error-summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummary {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: u64,
    pub eps1: f64,
    pub p: usize,
    pub map: String,
    pub precision: String,
    #[serde(rename = "E1")]
    pub e1: f64,
    #[serde(rename = "E2sq")]
    pub e2sq: f64,
    #[serde(rename = "E1_trunc")]
    pub e1_trunc: Option<f64>,
    #[serde(rename = "E2", default)]
    pub e2: Option<f64>,
}

pub fn write_error_summaries<W: Write>(mut w: W, comments: &[String], rows: &[ErrorSummary]) -> io::Result<()> {
    write_header(&mut w, comments)?;
    let mut csv = csv::Writer::from_writer(w);
    for row in rows {
        csv.serialize(row).map_err(io::Error::other)?;
    }
    if rows.is_empty() {
        csv.write_record(["M", "N", "eps1", "p", "map", "precision", "E1", "E2sq", "E1_trunc", "E2"])
            .map_err(io::Error::other)?;
    }
    csv.flush()
}

pub fn read_error_summaries<R: Read>(r: R) -> Result<Vec<ErrorSummary>, csv::Error> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(r)
        .deserialize()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bin_examples() {
        assert_eq!(bin_index(-1.0, 10), Ok(0));
        assert_eq!(bin_index(1.0, 10), Ok(9));
        assert_eq!(bin_index(0.0, 10), Ok(5));
        assert!(bin_index(1.0000001, 10).is_err());
        assert!(bin_index(f64::NAN, 10).is_err());
    }

    #[test]
    fn accumulate_examples() {
        let mids: Vec<f64> = (0..10).map(|i| box_midpoint(i, 10)).collect();
        let h = accumulate(mids.iter().copied(), 10, 0).unwrap();
        assert_eq!(h.counts(), &[1; 10]);
        let h = accumulate(mids.iter().copied(), 10, 10).unwrap();
        assert_eq!((h.total(), h.counts().iter().sum::<u64>()), (0, 0));
        assert!(matches!(accumulate(mids, 10, 11), Err(MeasureError::TransientTooLong { .. })));
    }

    #[test]
    fn density_examples() {
        let h = Histogram { m: 2, counts: vec![3, 1], n: 4, q: 0 };
        assert_eq!(density(&h).unwrap().values, vec![0.75, 0.25]);
        let h = Histogram { m: 2, counts: vec![5, 0], n: 5, q: 0 };
        assert_eq!(density(&h).unwrap().values, vec![1.0, 0.0]);
        let h = Histogram { m: 4, counts: vec![7; 4], n: 28, q: 0 };
        assert_eq!(density(&h).unwrap().values, vec![0.5; 4]);
        assert_eq!(density(&Histogram::new(3, 0).unwrap()), Err(MeasureError::Empty));
    }

    #[test]
    fn error_examples() {
        let d = DensityEstimate { m: 2, values: vec![1.0, 0.0] };
        assert_eq!(err_l1(&d, ReferenceDensity::Lebesgue).unwrap(), 1.0);
        assert_eq!(err_l2_sq(&d, ReferenceDensity::Lebesgue).unwrap(), 0.5);
        let exact = DensityEstimate { m: 8, values: vec![0.5; 8] };
        assert_eq!(err_l1(&exact, ReferenceDensity::Lebesgue).unwrap(), 0.0);
        assert_eq!(err_l2_sq(&exact, ReferenceDensity::Lebesgue).unwrap(), 0.0);
        assert_eq!(
            err_l1_trunc(&d, ReferenceDensity::Lebesgue, 0.999).unwrap(),
            0.0,
            "no box of width 1 fits inside the cut"
        );
        assert!(matches!(
            err_l1(&exact, ReferenceDensity::ArcsineUnit),
            Err(MeasureError::Incompatible(_))
        ));
    }

    #[test]
    fn exact_arcsine_estimate_has_zero_truncated_error() {
        let m = 1000;
        let values = (0..m).map(|i| arcsine_density(box_midpoint(i, m), ArcsineForm::Sym).unwrap()).collect();
        let d = DensityEstimate { m, values };
        assert_eq!(err_l1_trunc(&d, ReferenceDensity::ArcsineSym, 0.98).unwrap(), 0.0);
        assert_eq!(err_l1(&d, ReferenceDensity::ArcsineSym).unwrap(), 0.0);
    }

    #[test]
    fn trunc_with_every_box_equals_full() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = 50;
        let mut values: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
        // boxes touching ±1 never fit inside a cut below 1; make them exact
        values[0] = 0.5;
        values[m - 1] = 0.5;
        let d = DensityEstimate { m, values };
        let (inside, excluded) = err_l1_split(&d, ReferenceDensity::Lebesgue, 0.999).unwrap();
        assert_eq!(excluded, 0.0);
        assert_eq!(inside, err_l1(&d, ReferenceDensity::Lebesgue).unwrap());
        assert!(err_l1_trunc(&d, ReferenceDensity::Lebesgue, 0.0).is_err());
        assert!(err_l1_trunc(&d, ReferenceDensity::Lebesgue, 1.0).is_err());
    }

    #[test]
    fn arcsine_values() {
        assert!((arcsine_density(0.5, ArcsineForm::Unit).unwrap() - 2.0 / PI).abs() < 1e-15);
        assert!((arcsine_density(0.0, ArcsineForm::Sym).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!(arcsine_density(0.0, ArcsineForm::Unit).is_err());
        assert!(arcsine_density(1.0, ArcsineForm::Sym).is_err());
    }

    /// Composite midpoint rule against the antiderivative (2/π)·asin(√x).
    #[test]
    fn arcsine_integral_on_inner_interval() {
        let (a, b, k) = (0.01, 0.99, 2_000_000);
        let h = (b - a) / k as f64;
        let num: f64 = (0..k).map(|i| arcsine_density(a + (i as f64 + 0.5) * h, ArcsineForm::Unit).unwrap() * h).sum();
        let exact = 1.0 - (2.0 / PI) * 2.0 * 0.1f64.asin();
        assert!((num - exact).abs() < 1e-6, "{num} vs {exact}");
    }

    /// Quadrature of each reference over its domain, substituting x = sin²θ
    /// for the arcsine laws to remove the endpoint singularity.
    #[test]
    fn references_integrate_to_one() {
        let k = 100_000;
        let h = 2.0 / k as f64;
        let leb: f64 = (0..k).map(|i| ReferenceDensity::Lebesgue.eval(-1.0 + (i as f64 + 0.5) * h).unwrap() * h).sum();
        assert!((leb - 1.0).abs() < 1e-6);
        let dt = (PI / 2.0) / k as f64;
        let unit: f64 = (0..k)
            .map(|i| {
                let t = (i as f64 + 0.5) * dt;
                let x = t.sin().powi(2);
                ReferenceDensity::ArcsineUnit.eval(x).unwrap() * 2.0 * t.sin() * t.cos() * dt
            })
            .sum();
        assert!((unit - 1.0).abs() < 1e-6);
        let dt = PI / k as f64;
        let sym: f64 = (0..k)
            .map(|i| {
                let t = -PI / 2.0 + (i as f64 + 0.5) * dt;
                ReferenceDensity::ArcsineSym.eval(t.sin()).unwrap() * t.cos() * dt
            })
            .sum();
        assert!((sym - 1.0).abs() < 1e-6);
    }

    #[test]
    fn uniformizing_transform() {
        assert_eq!(logistic_to_uniform(-1.0), 0.0);
        assert_eq!(logistic_to_uniform(1.0), 1.0);
        assert_eq!(logistic_to_uniform(0.0), 0.5);
    }

    #[test]
    fn mixing() {
        let s = [[1.0, 2.0], [3.0, 4.0]];
        assert_eq!(mix_components(&s, 2).unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
        let single = [[0.1], [0.2], [0.3]];
        assert_eq!(mix_components(&single, 1).unwrap(), vec![0.1, 0.2, 0.3]);
        assert!(mix_components(&s, 3).is_err());
    }

    #[test]
    fn summary_csv_round_trip() {
        let rows = vec![ErrorSummary {
            m: 100,
            n: 1_000_000,
            eps1: 1e-14,
            p: 3,
            map: "tent".into(),
            precision: "f64".into(),
            e1: 0.0123,
            e2sq: 1.5e-4,
            e1_trunc: None,
            e2: Some(1.5e-4f64.sqrt()),
        }];
        let mut buf = Vec::new();
        write_error_summaries(&mut buf, &["run=1".into()], &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# run=1\nM,N,eps1,p,map,precision,E1,E2sq,E1_trunc,E2\n"));
        assert_eq!(read_error_summaries(&buf[..]).unwrap(), rows);
    }

    fn random_hist(rng: &mut ChaCha8Rng) -> Histogram {
        let m = rng.random_range(1..500);
        let n = rng.random_range(1..5000);
        let xs: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        accumulate(xs, m, 0).unwrap()
    }

    #[test]
    fn conservation_and_normalization() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let h = random_hist(&mut rng);
            assert_eq!(h.counts().iter().sum::<u64>(), h.total());
            let d = density(&h).unwrap();
            let mass: f64 = d.values.iter().map(|p| p * 2.0 / d.m as f64).sum();
            assert!((mass - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn doubling_a_repeated_stream_keeps_the_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let xs: Vec<f64> = (0..9999).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let once = density(&accumulate(xs.iter().copied(), 37, 0).unwrap()).unwrap();
        let twice = density(&accumulate(xs.iter().chain(&xs).copied(), 37, 0).unwrap()).unwrap();
        assert_eq!(once, twice);
    }

    proptest! {
        #[test]
        fn bin_index_is_consistent_with_edges(x in -1.0f64..=1.0, m in 1usize..100_000) {
            let i = bin_index(x, m).unwrap();
            prop_assert!(i < m);
            prop_assert!(box_edge(i, m) <= x);
            prop_assert!(i + 1 == m || x < box_edge(i + 1, m));
        }

        #[test]
        fn sharded_merge_equals_sequential(xs in proptest::collection::vec(-1.0f64..=1.0, 0..400), split in 0usize..400, m in 1usize..64) {
            let split = split.min(xs.len());
            let whole = accumulate(xs.iter().copied(), m, 0).unwrap();
            let mut a = accumulate(xs[..split].iter().copied(), m, 0).unwrap();
            let b = accumulate(xs[split..].iter().copied(), m, 0).unwrap();
            a.merge(&b).unwrap();
            prop_assert_eq!(a, whole);
        }

        #[test]
        fn truncation_monotone(values in proptest::collection::vec(0.0f64..3.0, 1..300), c1 in 0.01f64..0.99, c2 in 0.01f64..0.99) {
            let d = DensityEstimate { m: values.len(), values };
            let (lo, hi) = if c1 <= c2 { (c1, c2) } else { (c2, c1) };
            let (t_lo, _) = err_l1_split(&d, ReferenceDensity::Lebesgue, lo).unwrap();
            let (t_hi, ex_hi) = err_l1_split(&d, ReferenceDensity::Lebesgue, hi).unwrap();
            prop_assert!(t_lo <= t_hi);
            prop_assert!(t_hi <= t_hi + ex_hi);
            prop_assert!(t_lo <= t_hi + ex_hi);
        }
    }
}
