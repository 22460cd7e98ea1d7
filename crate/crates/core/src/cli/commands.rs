use std::fmt::Display;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{numeric, CliError, Resolver};
use crate::arithmetic::{ArithMode, LatticeOrder};
use crate::coupling::{self, CoupledSystem, CouplingConfig, RatioRule, DOUBLE_PRECISION_SEEDS, PAPER_SEEDS};
use crate::fit::{constrained_planefit, linfit, planefit, write_fit_report, FitRow};
use crate::maps::{MapKind, MapSpec, PlaneMap};
use crate::measure::{
    density, err_l1, err_l1_trunc, err_l2_sq, logistic_to_uniform, read_error_summaries, write_error_summaries,
    ErrorSummary, Histogram, ReferenceDensity,
};
use crate::orbits::{
    classify_period, enumerate_orbit_structure, sample_orbit_structure, BitState, BrentSearch, CycleError,
    CycleOutcome, EnumerateOptions, LatticeMap, OrbitError, SampleReport,
};
use crate::report::{write_header, NOT_CRYPTOGRAPHIC};
use crate::stream::{dump, DumpFormat, Generator, GeneratorConfig};

fn config_err(e: impl Display) -> CliError {
    CliError::Config(e.to_string())
}

fn text(s: &str) -> Result<String, String> {
    Ok(s.to_string())
}

fn open_out(path: Option<&str>) -> Result<Box<dyn Write>, CliError> {
    match path {
        None | Some("-") => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        Some(p) => Ok(Box::new(BufWriter::new(File::create(p)?))),
    }
}

fn parse_mode(s: &str) -> Result<ArithMode, String> {
    match s.trim().strip_prefix("lattice:") {
        Some(n) => ArithMode::lattice(numeric::count(n)?).map_err(|e| e.to_string()),
        None => s.parse().map_err(|e: crate::arithmetic::ArithError| e.to_string()),
    }
}

fn parse_ratio(s: &str) -> Result<Option<Vec<f64>>, String> {
    if s.trim() == "linear" {
        Ok(None)
    } else {
        numeric::list(s, numeric::real).map(Some)
    }
}

fn fmt_list<T: Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Which parameters a map family reads.
fn uses(kind: MapKind) -> (bool, bool, bool) {
    match kind {
        MapKind::Tent | MapKind::LogisticUnit => (true, false, false),
        MapKind::Henon | MapKind::Lozi => (true, true, false),
        MapKind::DpFamily => (false, false, true),
        _ => (false, false, false),
    }
}

fn resolve_map(r: &mut Resolver) -> Result<MapSpec, CliError> {
    let kind: MapKind = r.get("map", "tent", |s| s.parse::<MapKind>().map_err(|e| e.to_string()))?;
    let mut spec = MapSpec::standard(kind);
    let (ua, ub, ul) = uses(kind);
    for (key, used, slot) in [("a", ua, &mut spec.a), ("b", ub, &mut spec.b), ("l", ul, &mut spec.l)] {
        if used {
            *slot = r.get(key, &slot.to_string(), numeric::real)?;
        } else if r.is_set(key) {
            return Err(config_err(format!("map {kind} has no parameter '{key}'")));
        }
    }
    spec.validate().map_err(config_err)?;
    Ok(spec)
}

/// A fully validated model: map, coupling, arithmetic and starting point.
struct System {
    map: MapSpec,
    coupling: CouplingConfig,
    mode: ArithMode,
    /// Float starting state (interval maps: one value per component).
    x0: Vec<f64>,
    /// Starting index in lattice mode.
    j0: u64,
}

impl System {
    fn planar(&self) -> bool {
        self.map.kind.is_planar()
    }
}

fn default_x0(map: &MapSpec, p: usize, mode: ArithMode) -> Option<Vec<f64>> {
    match map.kind {
        MapKind::Henon => Some(vec![0.4725166, 0.25112222222356]),
        MapKind::Lozi => Some(vec![0.88187777591, 0.0000322222356]),
        _ => {
            let seeds: &[f64] = if mode == ArithMode::Binary64 && p == 3 { &DOUBLE_PRECISION_SEEDS } else { &PAPER_SEEDS };
            let lo = map.kind.domain().map_or(-1.0, |d| d.0);
            let shift = if lo >= 1.0 { lo } else { 0.0 };
            seeds.get(..p).map(|s| s.iter().map(|v| v + shift).collect())
        }
    }
}

fn resolve_system(r: &mut Resolver, default_p: usize) -> Result<System, CliError> {
    let map = resolve_map(r)?;
    let planar = map.kind.is_planar();
    let default_p = if planar { 1 } else { default_p };
    let p = r.get("p", &default_p.to_string(), numeric::size)?;
    if planar && p != 1 {
        return Err(config_err("planar maps are not coupled; use --p 1"));
    }
    let eps1 = r.get("eps1", "1e-14", numeric::real)?;
    let coupling = match r.get("ratio", "linear", parse_ratio)? {
        None => CouplingConfig::linear(p, eps1),
        Some(c) => CouplingConfig { p, eps1, ratio: RatioRule::Custom(c) },
    };
    coupling.validate().map_err(config_err)?;
    let mode = r.get("arith", "f64", parse_mode)?;
    if let ArithMode::Lattice(n) = mode {
        if p != 1 || planar {
            return Err(config_err("lattice arithmetic applies to a single interval map"));
        }
        LatticeMap::new(map, n).map_err(config_err)?;
        let default_j = ((0.33 * n.get() as f64).round() as u64).min(n.get() - 1);
        let j0 = r.get("x0", &default_j.to_string(), numeric::count)?;
        if j0 >= n.get() {
            return Err(config_err(format!("--x0 {j0} is not a lattice index below {}", n.get())));
        }
        return Ok(System { map, coupling, mode, x0: Vec::new(), j0 });
    }
    let default = default_x0(&map, p, mode).map(|v| fmt_list(&v));
    let x0 = match default {
        Some(d) => r.get("x0", &d, |s| numeric::list(s, numeric::real))?,
        None => r.require("x0", |s| numeric::list(s, numeric::real))?,
    };
    let dim = if planar { 2 } else { p };
    if x0.len() != dim {
        return Err(config_err(format!("--x0 needs {dim} components, got {}", x0.len())));
    }
    if let Some((lo, hi)) = map.kind.domain() {
        if let Some(v) = x0.iter().find(|v| !(lo..=hi).contains(*v)) {
            return Err(config_err(format!("--x0 component {v} is outside [{lo}, {hi}]")));
        }
    }
    Ok(System { map, coupling, mode, x0, j0: 0 })
}

/// Column values of a state.
trait Fields {
    fn fields(&self) -> Vec<String>;
}

impl Fields for Vec<f64> {
    fn fields(&self) -> Vec<String> {
        self.iter().map(|v| v.to_string()).collect()
    }
}

impl Fields for Vec<f32> {
    fn fields(&self) -> Vec<String> {
        self.iter().map(|v| v.to_string()).collect()
    }
}

impl<T: Display> Fields for (T, T) {
    fn fields(&self) -> Vec<String> {
        vec![self.0.to_string(), self.1.to_string()]
    }
}

impl Fields for u64 {
    fn fields(&self) -> Vec<String> {
        vec![self.to_string()]
    }
}

fn numbered(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}_{i}")).collect()
}

pub fn iterate(r: &mut Resolver) -> Result<(), CliError> {
    let sys = resolve_system(r, 3)?;
    let n = r.get("n", "1e6", numeric::count)?;
    let summary = r.get("summary", "false", numeric::flag)?;
    let every = r.get("every", "1", numeric::count)?;
    if every == 0 {
        return Err(config_err("--every must be at least 1"));
    }
    let out = r.opt("out", text)?;
    let header = r.header("iterate");
    let mut w = open_out(out.as_deref())?;
    write_header(&mut w, &header)?;

    let dim = if sys.planar() { 2 } else if sys.x0.is_empty() { 1 } else { sys.coupling.p };
    if !summary {
        writeln!(w, "step,{}", numbered("x", dim).join(","))?;
    }
    let mut io_err: Option<io::Error> = None;
    let mut step = 0u64;
    let mut row = |w: &mut Box<dyn Write>, fields: &[String]| {
        step += 1;
        if !summary && step.is_multiple_of(every) && io_err.is_none() {
            if let Err(e) = writeln!(w, "{step},{}", fields.join(",")) {
                io_err = Some(e);
            }
        }
    };
    let start = Instant::now();
    let last: Vec<String> = match sys.mode {
        ArithMode::Lattice(order) => {
            let m = LatticeMap::new(sys.map, order).map_err(config_err)?;
            let mut j = sys.j0;
            for _ in 0..n {
                j = m.apply(j);
                row(&mut w, &[j.to_string()]);
            }
            vec![j.to_string()]
        }
        ArithMode::Binary64 if sys.planar() => {
            let m: PlaneMap<f64> = sys.map.plane_map().map_err(config_err)?;
            let mut s = (sys.x0[0], sys.x0[1]);
            for _ in 0..n {
                s = m.apply(s);
                row(&mut w, &s.fields());
            }
            s.fields()
        }
        ArithMode::Binary32 if sys.planar() => {
            let m: PlaneMap<f32> = sys.map.plane_map().map_err(config_err)?;
            let mut s = (sys.x0[0] as f32, sys.x0[1] as f32);
            for _ in 0..n {
                s = m.apply(s);
                row(&mut w, &s.fields());
            }
            s.fields()
        }
        mode => {
            let f32_mode = mode == ArithMode::Binary32;
            let last = coupling::iterate(&sys.x0, n, &sys.map, &sys.coupling, mode, |s| {
                if !summary {
                    let fields: Vec<String> = if f32_mode {
                        s.iter().map(|&v| (v as f32).to_string()).collect()
                    } else {
                        s.iter().map(|v| v.to_string()).collect()
                    };
                    row(&mut w, &fields);
                }
            })
            .map_err(config_err)?;
            if f32_mode {
                last.iter().map(|&v| (v as f32).to_string()).collect()
            } else {
                last.fields()
            }
        }
    };
    let seconds = start.elapsed().as_secs_f64();
    if let Some(e) = io_err {
        return Err(e.into());
    }
    if summary {
        let evals = n as f64 * dim as f64 / seconds.max(1e-9);
        writeln!(w, "steps,seconds,map_evals_per_second,{}", numbered("x", dim).join(","))?;
        writeln!(w, "{n},{seconds},{evals:.4e},{}", last.join(","))?;
    }
    w.flush()?;
    Ok(())
}

pub fn hist(r: &mut Resolver) -> Result<(), CliError> {
    let sys = resolve_system(r, 3)?;
    if !sys.mode.is_float() {
        return Err(config_err("hist needs --arith f32 or f64"));
    }
    if !matches!(sys.map.kind, MapKind::Tent | MapKind::LogisticSym) {
        return Err(config_err("hist works on maps of [-1, 1]: tent or logistic-sym"));
    }
    let mut ns = r.get("n", "1e6", |s| numeric::list(s, numeric::count))?;
    ns.sort_unstable();
    ns.dedup();
    if ns.is_empty() || ns[0] == 0 {
        return Err(config_err("--n needs positive sample counts"));
    }
    let m = r.get("bins", "1e5", numeric::size)?;
    if m == 0 {
        return Err(config_err("--bins must be at least 1"));
    }
    let q = r.get("transient", "0", numeric::count)?;
    let mixed = r.get("mixed", "false", numeric::flag)?;
    let uniformize = r.get("uniformize", "false", numeric::flag)?;
    if uniformize && sys.map.kind != MapKind::LogisticSym {
        return Err(config_err("--uniformize applies to logistic-sym only"));
    }
    let p = sys.coupling.p;
    let component = r.get("component", "1", numeric::size)?;
    if component == 0 || component > p {
        return Err(config_err(format!("--component must lie in 1..={p}")));
    }
    let default_ref = if uniformize || sys.map.kind == MapKind::Tent { "lebesgue" } else { "arcsine" };
    let reference: ReferenceDensity = r.get("ref", default_ref, |s| s.parse().map_err(|e: crate::measure::MeasureError| e.to_string()))?;
    let trunc = r.opt("trunc", numeric::real)?;
    if let Some(c) = trunc {
        if !(c > 0.0 && c < 1.0) {
            return Err(config_err("--trunc must lie in (0, 1)"));
        }
    }
    let hist_out = r.opt("hist-out", text)?;
    let out = r.opt("out", text)?;
    let header = r.header("hist");

    let per_step = if mixed { p as u64 } else { 1 };
    let total = q + ns[ns.len() - 1];
    let steps = total.div_ceil(per_step);
    let mut h = Histogram::new(m, q).map_err(config_err)?;
    let mut seen = 0u64;
    let mut next = 0usize;
    let mut rows = Vec::new();
    let mut failure = None;
    let precision = sys.mode.to_string();
    let mut take = |v: f64, h: &mut Histogram, rows: &mut Vec<ErrorSummary>| {
        if seen >= total || failure.is_some() {
            return;
        }
        seen += 1;
        if seen <= q {
            return;
        }
        let v = if uniformize { 2.0 * logistic_to_uniform(v) - 1.0 } else { v };
        if let Err(e) = h.push(v) {
            failure = Some(e);
            return;
        }
        if next < ns.len() && h.total() == ns[next] {
            next += 1;
            let d = density(h).expect("non-empty");
            let summary = (|| {
                let e2sq = err_l2_sq(&d, reference)?;
                Ok::<_, crate::measure::MeasureError>(ErrorSummary {
                    m,
                    n: h.total(),
                    eps1: sys.coupling.eps1,
                    p,
                    map: sys.map.kind.to_string(),
                    precision: precision.clone(),
                    e1: err_l1(&d, reference)?,
                    e2sq,
                    e1_trunc: trunc.map(|c| err_l1_trunc(&d, reference, c)).transpose()?,
                    e2: Some(e2sq.sqrt()),
                })
            })();
            match summary {
                Ok(s) => rows.push(s),
                Err(e) => failure = Some(e),
            }
        }
    };
    coupling::iterate(&sys.x0, steps, &sys.map, &sys.coupling, sys.mode, |s| {
        if mixed {
            for &v in s {
                take(v, &mut h, &mut rows);
            }
        } else {
            take(s[component - 1], &mut h, &mut rows);
        }
    })
    .map_err(config_err)?;
    if let Some(e) = failure {
        return Err(config_err(e));
    }
    let mut w = open_out(out.as_deref())?;
    write_error_summaries(&mut w, &header, &rows)?;
    w.flush()?;
    if let Some(path) = hist_out {
        let mut hw = open_out(Some(&path))?;
        h.write_csv(&mut hw, &header)?;
        hw.flush()?;
    }
    Ok(())
}

fn cycle_error(e: CycleError) -> CliError {
    match e {
        CycleError::ZeroBudget => config_err(e),
        CycleError::CounterOverflow => CliError::Resource(e.to_string()),
    }
}

#[derive(Serialize, Deserialize)]
struct Checkpoint<S> {
    fingerprint: Vec<String>,
    search: BrentSearch<S>,
}

struct CheckpointOpts {
    path: PathBuf,
    every: u64,
    resume: bool,
    fingerprint: Vec<String>,
}

fn save_checkpoint<S: Serialize + Clone>(c: &CheckpointOpts, search: &BrentSearch<S>) -> Result<(), CliError> {
    let data = Checkpoint { fingerprint: c.fingerprint.clone(), search: search.clone() };
    let tmp = c.path.with_extension("tmp");
    fs::write(&tmp, serde_json::to_vec(&data).map_err(io::Error::other)?)?;
    fs::rename(&tmp, &c.path)?;
    Ok(())
}

fn load_checkpoint<S: DeserializeOwned>(c: &CheckpointOpts) -> Result<BrentSearch<S>, CliError> {
    let bytes = fs::read(&c.path)?;
    let data: Checkpoint<S> = serde_json::from_slice(&bytes)
        .map_err(|e| config_err(format!("checkpoint {}: {e}", c.path.display())))?;
    if data.fingerprint != c.fingerprint {
        return Err(config_err(format!("checkpoint {} was written for a different system", c.path.display())));
    }
    Ok(data.search)
}

/// Budgeted cycle search that can checkpoint and resume. Gives the same
/// result as [`crate::orbits::detect_cycle`] with the same budget.
fn hunt<S, F>(x0: S, mut step: F, budget: u64, ck: Option<&CheckpointOpts>) -> Result<CycleOutcome<S>, CliError>
where
    S: BitState + Serialize + DeserializeOwned,
    F: FnMut(&mut S),
{
    if budget == 0 {
        return Err(cycle_error(CycleError::ZeroBudget));
    }
    let mut search = match ck {
        Some(c) if c.resume && c.path.exists() => load_checkpoint(c)?,
        _ => BrentSearch::new(x0, &mut step),
    };
    let every = ck.map_or(budget, |c| c.every.max(1));
    while search.period().is_none() && search.steps() < budget {
        let limit = search.steps().saturating_add(every).min(budget);
        search.run_until(limit, &mut step).map_err(cycle_error)?;
        if let Some(c) = ck {
            save_checkpoint(c, &search)?;
            eprintln!("chaolab: {} iterations searched", search.steps());
        }
    }
    Ok(match search.period() {
        Some(_) => CycleOutcome::Found(search.finish(&mut step).map_err(cycle_error)?),
        None => CycleOutcome::NotFound { iterations_used: search.steps() },
    })
}

fn write_cycle<S: Fields>(mut w: impl Write, header: &[String], dim: usize, outcome: &CycleOutcome<S>) -> io::Result<()> {
    write_header(&mut w, header)?;
    let mut cols = vec!["status".to_string(), "period".into(), "tail".into(), "iterations_used".into(), "class".into()];
    cols.extend(numbered("witness", dim));
    cols.extend(numbered("entry", dim));
    writeln!(w, "{}", cols.join(","))?;
    match outcome {
        CycleOutcome::Found(rep) => {
            let class = classify_period(rep.period as u128);
            writeln!(
                w,
                "found,{},{},{},{class},{},{}",
                rep.period,
                rep.tail,
                rep.iterations_used,
                rep.witness.fields().join(","),
                rep.entry.fields().join(",")
            )
        }
        CycleOutcome::NotFound { iterations_used } => {
            let empty = vec![""; 2 * dim].join(",");
            writeln!(w, "no cycle within budget,,,{iterations_used},,{empty}")
        }
    }
}

pub fn cycle(r: &mut Resolver) -> Result<(), CliError> {
    let sys = resolve_system(r, 1)?;
    let fingerprint = r.header("cycle");
    let budget = r.get("budget", "1e9", numeric::count)?;
    let ck = match r.opt("checkpoint", text)? {
        Some(path) => Some(CheckpointOpts {
            path: PathBuf::from(path),
            every: r.get("checkpoint-every", "1e9", numeric::count)?,
            resume: r.get("resume", "false", numeric::flag)?,
            fingerprint,
        }),
        None => None,
    };
    let out = r.opt("out", text)?;
    let header = r.header("cycle");
    let mut w = open_out(out.as_deref())?;
    match sys.mode {
        ArithMode::Lattice(order) => {
            let m = LatticeMap::new(sys.map, order).map_err(config_err)?;
            let o = hunt(sys.j0, |j: &mut u64| *j = m.apply(*j), budget, ck.as_ref())?;
            write_cycle(&mut w, &header, 1, &o)?;
        }
        ArithMode::Binary64 if sys.planar() => {
            let m: PlaneMap<f64> = sys.map.plane_map().map_err(config_err)?;
            let o = hunt((sys.x0[0], sys.x0[1]), |s: &mut (f64, f64)| *s = m.apply(*s), budget, ck.as_ref())?;
            write_cycle(&mut w, &header, 2, &o)?;
        }
        ArithMode::Binary32 if sys.planar() => {
            let m: PlaneMap<f32> = sys.map.plane_map().map_err(config_err)?;
            let x0 = (sys.x0[0] as f32, sys.x0[1] as f32);
            let o = hunt(x0, |s: &mut (f32, f32)| *s = m.apply(*s), budget, ck.as_ref())?;
            write_cycle(&mut w, &header, 2, &o)?;
        }
        ArithMode::Binary64 => {
            let mut s = CoupledSystem::<f64>::new(&sys.map, &sys.coupling).map_err(config_err)?;
            let o = hunt(sys.x0.clone(), |x: &mut Vec<f64>| s.advance(x), budget, ck.as_ref())?;
            write_cycle(&mut w, &header, sys.coupling.p, &o)?;
        }
        ArithMode::Binary32 => {
            let mut s = CoupledSystem::<f32>::new(&sys.map, &sys.coupling).map_err(config_err)?;
            let x0: Vec<f32> = sys.x0.iter().map(|&v| v as f32).collect();
            let o = hunt(x0, |x: &mut Vec<f32>| s.advance(x), budget, ck.as_ref())?;
            write_cycle(&mut w, &header, sys.coupling.p, &o)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn orbit_error(e: OrbitError) -> CliError {
    match e {
        OrbitError::TooLarge { .. } | OrbitError::OutOfMemory { .. } | OrbitError::TooManyCycles => {
            CliError::Resource(e.to_string())
        }
        OrbitError::Cycle(c) => cycle_error(c),
        e => config_err(e),
    }
}

pub fn enumerate(r: &mut Resolver) -> Result<(), CliError> {
    let map = resolve_map(r)?;
    let n = match r.opt("lattice", numeric::count)? {
        Some(n) => n,
        None => match r.get("arith", "f64", parse_mode)? {
            ArithMode::Lattice(n) => n.get(),
            _ => return Err(config_err("enumerate needs --lattice N or --arith lattice:N")),
        },
    };
    let order = LatticeOrder::new(n).map_err(config_err)?;
    let workers = r.get("workers", "1", numeric::size)?.max(1);
    let max_points = r.get("max-points", "2^30", numeric::count)?;
    let m = LatticeMap::new(map, order).map_err(config_err)?;
    let out = r.opt("out", text)?;
    let header = r.header("enumerate");
    let s = enumerate_orbit_structure(n, |j| m.apply(j), EnumerateOptions { workers, max_points })
        .map_err(orbit_error)?;
    let mut w = open_out(out.as_deref())?;
    let mut comments = header;
    comments.push(format!("{} cycles, {} points", s.cycles.len(), s.total_points));
    s.write_csv(&mut w, &comments)?;
    w.flush()?;
    Ok(())
}

fn write_sample<S: Fields>(mut w: impl Write, header: &[String], dim: usize, rep: &SampleReport<S>) -> io::Result<()> {
    write_header(&mut w, header)?;
    writeln!(w, "cycle_id,period,basin_size,relative_size,{}", numbered("witness", dim).join(","))?;
    let k = rep.samples as f64;
    for (id, c) in rep.cycles.iter().enumerate() {
        writeln!(
            w,
            "{id},{},{},{},{}",
            c.report.period,
            c.hits,
            c.hits as f64 / k,
            c.report.witness.fields().join(",")
        )?;
    }
    if !rep.overflow.is_empty() {
        let empty = vec![""; dim].join(",");
        let o = rep.overflow.len();
        writeln!(w, "overflow,,{o},{},{empty}", o as f64 / k)?;
    }
    Ok(())
}

pub fn sample(r: &mut Resolver) -> Result<(), CliError> {
    let sys = resolve_system(r, 1)?;
    let k = r.get("k", "1000", numeric::size)?;
    if k == 0 {
        return Err(config_err("--k must be at least 1"));
    }
    let budget = r.get("budget", "1e8", numeric::count)?;
    let seed = r.get("rng-seed", "0", numeric::count)?;
    let workers = r.get("workers", "1", numeric::size)?.max(1);
    let out = r.opt("out", text)?;
    let header = r.header("sample");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = open_out(out.as_deref())?;
    let (lo, hi) = sys.map.kind.domain().unwrap_or((-1.0, 1.0));
    match sys.mode {
        ArithMode::Lattice(order) => {
            let m = LatticeMap::new(sys.map, order).map_err(config_err)?;
            let seeds: Vec<u64> = (0..k).map(|_| rng.random_range(0..order.get())).collect();
            let rep = sample_orbit_structure(seeds, k, budget, workers, || |j: &mut u64| *j = m.apply(*j))
                .map_err(orbit_error)?;
            write_sample(&mut w, &header, 1, &rep)?;
        }
        mode if sys.planar() => {
            // small box around the configured start, which lies on the attractor
            let seeds: Vec<(f64, f64)> = (0..k)
                .map(|_| (sys.x0[0] + rng.random_range(-1e-3..1e-3), sys.x0[1] + rng.random_range(-1e-3..1e-3)))
                .collect();
            let m64: PlaneMap<f64> = sys.map.plane_map().map_err(config_err)?;
            let m32: PlaneMap<f32> = sys.map.plane_map().map_err(config_err)?;
            if mode == ArithMode::Binary64 {
                let rep = sample_orbit_structure(seeds, k, budget, workers, || |s: &mut (f64, f64)| *s = m64.apply(*s))
                    .map_err(orbit_error)?;
                write_sample(&mut w, &header, 2, &rep)?;
            } else {
                let seeds = seeds.into_iter().map(|(x, y)| (x as f32, y as f32));
                let rep = sample_orbit_structure(seeds, k, budget, workers, || |s: &mut (f32, f32)| *s = m32.apply(*s))
                    .map_err(orbit_error)?;
                write_sample(&mut w, &header, 2, &rep)?;
            }
        }
        mode => {
            let p = sys.coupling.p;
            let seeds: Vec<Vec<f64>> = (0..k).map(|_| (0..p).map(|_| rng.random_range(lo..hi)).collect()).collect();
            if mode == ArithMode::Binary64 {
                let template = CoupledSystem::<f64>::new(&sys.map, &sys.coupling).map_err(config_err)?;
                let rep = sample_orbit_structure(seeds, k, budget, workers, || {
                    let mut s = template.clone();
                    move |x: &mut Vec<f64>| s.advance(x)
                })
                .map_err(orbit_error)?;
                write_sample(&mut w, &header, p, &rep)?;
            } else {
                let template = CoupledSystem::<f32>::new(&sys.map, &sys.coupling).map_err(config_err)?;
                let seeds = seeds.into_iter().map(|v| v.into_iter().map(|x| x as f32).collect::<Vec<f32>>());
                let rep = sample_orbit_structure(seeds, k, budget, workers, || {
                    let mut s = template.clone();
                    move |x: &mut Vec<f32>| s.advance(x)
                })
                .map_err(orbit_error)?;
                write_sample(&mut w, &header, p, &rep)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn fit(r: &mut Resolver) -> Result<(), CliError> {
    let input = r.require("input", text)?;
    let out = r.opt("out", text)?;
    let header = r.header("fit");
    let file = File::open(Path::new(&input))?;
    let rows = read_error_summaries(file).map_err(|e| config_err(format!("{input}: {e}")))?;
    if rows.is_empty() {
        return Err(config_err(format!("{input} has no rows")));
    }
    let lg = |v: f64| v.log10();
    let mut report: Vec<FitRow> = Vec::new();
    let mut ms: Vec<usize> = rows.iter().map(|s| s.m).collect();
    ms.sort_unstable();
    ms.dedup();
    for &m in &ms {
        let sel: Vec<&ErrorSummary> = rows.iter().filter(|s| s.m == m).collect();
        let ln: Vec<f64> = sel.iter().map(|s| lg(s.n as f64)).collect();
        let e1: Vec<f64> = sel.iter().map(|s| lg(s.e1)).collect();
        let e2: Vec<f64> = sel.iter().map(|s| lg(s.e2sq)).collect();
        if let Ok(f) = linfit(&ln, &e1) {
            report.push((format!("log10_E1_vs_log10_N[M={m}]").as_str(), f).into());
        }
        if let Ok(f) = linfit(&ln, &e2) {
            report.push((format!("log10_E2sq_vs_log10_N[M={m}]").as_str(), f).into());
        }
    }
    if ms.len() >= 2 {
        let lm: Vec<f64> = rows.iter().map(|s| lg(s.m as f64)).collect();
        let ln: Vec<f64> = rows.iter().map(|s| lg(s.n as f64)).collect();
        let e1: Vec<f64> = rows.iter().map(|s| lg(s.e1)).collect();
        match planefit(&lm, &ln, &e1) {
            Ok(f) => {
                report.push(("log10_E1_vs_log10_M_log10_N", f.free).into());
                report.push(("log10_E1_vs_log10_M_minus_log10_N", f.constrained).into());
            }
            Err(_) => {
                if let Ok(f) = constrained_planefit(&lm, &ln, &e1) {
                    report.push(("log10_E1_vs_log10_M_minus_log10_N", f).into());
                }
            }
        }
    }
    if report.is_empty() {
        return Err(config_err(format!("{input} has too few distinct points to fit")));
    }
    let mut w = open_out(out.as_deref())?;
    write_fit_report(&mut w, &header, &report)?;
    w.flush()?;
    Ok(())
}

pub fn rng(r: &mut Resolver) -> Result<(), CliError> {
    let sys = resolve_system(r, 3)?;
    let n = r.get("n", "1e6", numeric::count)?;
    let format = r.get("format", "hex", |s| match s {
        "binary" => Ok(DumpFormat::Binary),
        "hex" => Ok(DumpFormat::Hex),
        _ => Err(format!("unknown format '{s}' (binary or hex)")),
    })?;
    let mixed = r.get("mixed", "false", numeric::flag)?;
    let uniformize = r.get("uniformize", "false", numeric::flag)?;
    let out = r.opt("out", text)?;
    let mut header = r.header("rng");
    header.push(NOT_CRYPTOGRAPHIC.to_string());
    let config = GeneratorConfig {
        map: sys.map,
        coupling: sys.coupling,
        mode: sys.mode,
        seed_state: sys.x0,
        uniformize,
        mixed,
    };
    let mut gen = Generator::new(&config).map_err(config_err)?;
    let mut w = open_out(out.as_deref())?;
    match format {
        DumpFormat::Hex => write_header(&mut w, &header)?,
        DumpFormat::Binary => eprintln!("chaolab: {NOT_CRYPTOGRAPHIC}"),
    }
    dump(&mut gen, n, format, &mut w)?;
    Ok(())
}
