//! C ABI over `chaolab`.
//!
//! Objects are opaque handles created by `*_new` functions and released by
//! the matching `*_free`. Every fallible call returns a [`ChaolabStatus`];
//! outputs go through caller-provided pointers and are written only on
//! success. Panics never cross the boundary.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use chaolab::arithmetic::{ArithMode, LatticeOrder};
use chaolab::coupling::{CoupledSystem, CouplingConfig, PAPER_SEEDS};
use chaolab::maps::{MapKind, MapSpec};
use chaolab::orbits::{
    detect_cycle, enumerate_orbit_structure, CycleOutcome, EnumerateOptions, LatticeMap, OrbitError, OrbitStructure,
};
use chaolab::stream::{Generator, GeneratorConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChaolabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Refused for size or memory limits.
    Resource = 3,
    /// Index past the end of a collection.
    OutOfRange = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChaolabPrecision {
    Binary32 = 0,
    Binary64 = 1,
}

impl From<ChaolabPrecision> for ArithMode {
    fn from(p: ChaolabPrecision) -> Self {
        match p {
            ChaolabPrecision::Binary32 => ArithMode::Binary32,
            ChaolabPrecision::Binary64 => ArithMode::Binary64,
        }
    }
}

/// Coupled chaotic number stream.
pub struct ChaolabGenerator(Generator);

/// All cycles of a lattice map, largest basin first.
pub struct ChaolabOrbitStructure(OrbitStructure);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChaolabCycle {
    pub period: u64,
    pub basin_size: u64,
    /// Smallest lattice index on the cycle.
    pub min_index: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChaolabCycleSearch {
    /// 1 when a cycle was found within the budget.
    pub found: u8,
    pub period: u64,
    pub tail: u64,
    pub iterations_used: u64,
}

fn guard(f: impl FnOnce() -> ChaolabStatus) -> ChaolabStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(ChaolabStatus::Panic)
}

unsafe fn map_kind(name: *const c_char) -> Result<MapKind, ChaolabStatus> {
    if name.is_null() {
        return Err(ChaolabStatus::NullPointer);
    }
    let s = CStr::from_ptr(name).to_str().map_err(|_| ChaolabStatus::InvalidArgument)?;
    s.parse().map_err(|_| ChaolabStatus::InvalidArgument)
}

unsafe fn seed(x0: *const f64, p: usize) -> Result<Vec<f64>, ChaolabStatus> {
    if x0.is_null() {
        PAPER_SEEDS.get(..p).map(<[f64]>::to_vec).ok_or(ChaolabStatus::InvalidArgument)
    } else {
        Ok(std::slice::from_raw_parts(x0, p).to_vec())
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn chaolab_status_message(status: ChaolabStatus) -> *const c_char {
    let s: &'static CStr = match status {
        ChaolabStatus::Ok => c"ok",
        ChaolabStatus::NullPointer => c"null pointer argument",
        ChaolabStatus::InvalidArgument => c"invalid argument",
        ChaolabStatus::Resource => c"refused for resource limits",
        ChaolabStatus::OutOfRange => c"index out of range",
        ChaolabStatus::Panic => c"internal error",
    };
    s.as_ptr()
}

/// Creates a stream of `p` coupled maps (`"tent"` or `"logistic-sym"`) with
/// linear coupling `eps1`. `x0` holds `p` values in `[-1, 1]`, or is null
/// for the published seeds.
///
/// # Safety
/// `map` must be a NUL-terminated string; `x0` is null or points to `p`
/// doubles; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chaolab_generator_new(
    map: *const c_char,
    p: usize,
    eps1: f64,
    precision: ChaolabPrecision,
    x0: *const f64,
    mixed: bool,
    uniformize: bool,
    out: *mut *mut ChaolabGenerator,
) -> ChaolabStatus {
    guard(|| {
        if out.is_null() {
            return ChaolabStatus::NullPointer;
        }
        let kind = match map_kind(map) {
            Ok(k) => k,
            Err(e) => return e,
        };
        let seed_state = match seed(x0, p) {
            Ok(s) => s,
            Err(e) => return e,
        };
        let config = GeneratorConfig {
            map: MapSpec::standard(kind),
            coupling: CouplingConfig::linear(p, eps1),
            mode: precision.into(),
            seed_state,
            uniformize,
            mixed,
        };
        match Generator::new(&config) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(ChaolabGenerator(g)));
                ChaolabStatus::Ok
            }
            Err(_) => ChaolabStatus::InvalidArgument,
        }
    })
}

/// Next value in `[-1, 1]` (in `[0, 1]` when uniformized).
///
/// # Safety
/// `gen` comes from [`chaolab_generator_new`]; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chaolab_generator_next(gen: *mut ChaolabGenerator, out: *mut f64) -> ChaolabStatus {
    guard(|| match (gen.as_mut(), out.is_null()) {
        (Some(g), false) => {
            *out = g.0.next_value();
            ChaolabStatus::Ok
        }
        _ => ChaolabStatus::NullPointer,
    })
}

/// Fills `buf` with `len` values in `[0, 1)`.
///
/// # Safety
/// `gen` comes from [`chaolab_generator_new`]; `buf` holds `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn chaolab_generator_fill_units(gen: *mut ChaolabGenerator, buf: *mut f64, len: usize) -> ChaolabStatus {
    guard(|| match gen.as_mut() {
        Some(_) if buf.is_null() && len > 0 => ChaolabStatus::NullPointer,
        Some(g) => {
            if len > 0 {
                let dst = std::slice::from_raw_parts_mut(buf, len);
                dst.copy_from_slice(&g.0.fill_units(len));
            }
            ChaolabStatus::Ok
        }
        None => ChaolabStatus::NullPointer,
    })
}

/// Fills `buf` with `len` bytes, two per draw.
///
/// # Safety
/// `gen` comes from [`chaolab_generator_new`]; `buf` holds `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn chaolab_generator_fill_bytes(gen: *mut ChaolabGenerator, buf: *mut u8, len: usize) -> ChaolabStatus {
    guard(|| match gen.as_mut() {
        Some(_) if buf.is_null() && len > 0 => ChaolabStatus::NullPointer,
        Some(g) => {
            if len > 0 {
                g.0.fill_bytes(std::slice::from_raw_parts_mut(buf, len));
            }
            ChaolabStatus::Ok
        }
        None => ChaolabStatus::NullPointer,
    })
}

/// # Safety
/// `gen` is null or comes from [`chaolab_generator_new`] and is not used again.
#[no_mangle]
pub unsafe extern "C" fn chaolab_generator_free(gen: *mut ChaolabGenerator) {
    if !gen.is_null() {
        drop(Box::from_raw(gen));
    }
}

/// Enumerates every cycle of a one-dimensional map on the lattice of order
/// `n`. `max_points` of 0 means the default cap.
///
/// # Safety
/// `map` must be a NUL-terminated string; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chaolab_enumerate(
    map: *const c_char,
    n: u64,
    workers: usize,
    max_points: u64,
    out: *mut *mut ChaolabOrbitStructure,
) -> ChaolabStatus {
    guard(|| {
        if out.is_null() {
            return ChaolabStatus::NullPointer;
        }
        let kind = match map_kind(map) {
            Ok(k) => k,
            Err(e) => return e,
        };
        let Ok(order) = LatticeOrder::new(n) else {
            return ChaolabStatus::InvalidArgument;
        };
        let Ok(lm) = LatticeMap::new(MapSpec::standard(kind), order) else {
            return ChaolabStatus::InvalidArgument;
        };
        let mut opts = EnumerateOptions { workers: workers.max(1), ..EnumerateOptions::default() };
        if max_points > 0 {
            opts.max_points = max_points;
        }
        match enumerate_orbit_structure(n, |j| lm.apply(j), opts) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(ChaolabOrbitStructure(s)));
                ChaolabStatus::Ok
            }
            Err(OrbitError::TooLarge { .. } | OrbitError::OutOfMemory { .. } | OrbitError::TooManyCycles) => {
                ChaolabStatus::Resource
            }
            Err(_) => ChaolabStatus::InvalidArgument,
        }
    })
}

/// Number of cycles, or 0 for a null handle.
///
/// # Safety
/// `s` is null or comes from [`chaolab_enumerate`].
#[no_mangle]
pub unsafe extern "C" fn chaolab_orbit_structure_len(s: *const ChaolabOrbitStructure) -> usize {
    s.as_ref().map_or(0, |s| s.0.cycles.len())
}

/// # Safety
/// `s` comes from [`chaolab_enumerate`]; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chaolab_orbit_structure_get(
    s: *const ChaolabOrbitStructure,
    index: usize,
    out: *mut ChaolabCycle,
) -> ChaolabStatus {
    guard(|| {
        let Some(s) = s.as_ref() else {
            return ChaolabStatus::NullPointer;
        };
        if out.is_null() {
            return ChaolabStatus::NullPointer;
        }
        match s.0.cycles.get(index) {
            Some(c) => {
                *out = ChaolabCycle { period: c.period, basin_size: c.basin_size, min_index: c.min_index };
                ChaolabStatus::Ok
            }
            None => ChaolabStatus::OutOfRange,
        }
    })
}

/// # Safety
/// `s` is null or comes from [`chaolab_enumerate`] and is not used again.
#[no_mangle]
pub unsafe extern "C" fn chaolab_orbit_structure_free(s: *mut ChaolabOrbitStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Constant-memory cycle search on `p` linearly coupled copies of an interval
/// map, starting at `x0` (null for the published seeds). `found` is 0 when
/// the budget runs out first.
///
/// # Safety
/// `map` must be a NUL-terminated string; `x0` is null or points to `p`
/// doubles; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chaolab_detect_cycle(
    map: *const c_char,
    p: usize,
    eps1: f64,
    precision: ChaolabPrecision,
    x0: *const f64,
    budget: u64,
    out: *mut ChaolabCycleSearch,
) -> ChaolabStatus {
    guard(|| {
        if out.is_null() {
            return ChaolabStatus::NullPointer;
        }
        let kind = match map_kind(map) {
            Ok(k) if !k.is_planar() => k,
            Ok(_) => return ChaolabStatus::InvalidArgument,
            Err(e) => return e,
        };
        let x0 = match seed(x0, p) {
            Ok(s) => s,
            Err(e) => return e,
        };
        let spec = MapSpec::standard(kind);
        let coupling = CouplingConfig::linear(p, eps1);
        let outcome = match precision {
            ChaolabPrecision::Binary64 => {
                let Ok(mut sys) = CoupledSystem::<f64>::new(&spec, &coupling) else {
                    return ChaolabStatus::InvalidArgument;
                };
                summarize(detect_cycle(x0, budget, |x: &mut Vec<f64>| sys.advance(x)))
            }
            ChaolabPrecision::Binary32 => {
                let Ok(mut sys) = CoupledSystem::<f32>::new(&spec, &coupling) else {
                    return ChaolabStatus::InvalidArgument;
                };
                let x0: Vec<f32> = x0.iter().map(|&v| v as f32).collect();
                summarize(detect_cycle(x0, budget, |x: &mut Vec<f32>| sys.advance(x)))
            }
        };
        match outcome {
            Some(r) => {
                *out = r;
                ChaolabStatus::Ok
            }
            None => ChaolabStatus::InvalidArgument,
        }
    })
}

fn summarize<S, E>(r: Result<CycleOutcome<S>, E>) -> Option<ChaolabCycleSearch> {
    Some(match r.ok()? {
        CycleOutcome::Found(c) => ChaolabCycleSearch {
            found: 1,
            period: c.period,
            tail: c.tail,
            iterations_used: c.iterations_used,
        },
        CycleOutcome::NotFound { iterations_used } => {
            ChaolabCycleSearch { found: 0, iterations_used, ..Default::default() }
        }
    })
}
