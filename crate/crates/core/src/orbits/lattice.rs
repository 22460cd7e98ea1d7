use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::OrbitError;
use crate::arithmetic::{round_index, LatticeOrder};
use crate::maps::{MapError, MapKind, MapSpec};
use crate::report::write_header;

const UNVISITED: u32 = u32::MAX;
const ON_PATH: u32 = u32::MAX - 1;
/// Largest lattice the status array can index.
pub const MAX_LATTICE: u64 = (u32::MAX - 2) as u64;

/// A smooth map of the unit interval (or of [1, 2], via its offset) acting on
/// the points `j/N`.
#[derive(Debug, Clone, Copy)]
pub struct LatticeMap {
    map: MapSpec,
    n: u64,
    offset: f64,
}

impl LatticeMap {
    /// Accepts the maps whose working interval has length one: the logistic
    /// and DP maps on [0, 1] and the circle/folded maps on [0, 1] or [1, 2].
    pub fn new(map: MapSpec, n: LatticeOrder) -> Result<Self, MapError> {
        map.validate()?;
        let offset = match map.kind.domain() {
            Some((lo, hi)) if hi - lo == 1.0 => lo,
            _ => return Err(MapError::NotOneDimensional(map.kind)),
        };
        Ok(LatticeMap { map, n: n.get(), offset })
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn kind(&self) -> MapKind {
        self.map.kind
    }

    #[inline]
    pub fn apply(&self, j: u64) -> u64 {
        let x = self.offset + j as f64 / self.n as f64;
        let y = self.eval(x);
        round_index(y - self.offset, self.n)
    }

    #[inline(always)]
    fn eval(&self, x: f64) -> f64 {
        use crate::maps::*;
        match self.map.kind {
            MapKind::LogisticUnit => logistic_unit(x, self.map.a),
            MapKind::FoldedLogistic => folded_logistic(x),
            MapKind::FoldedLogisticShifted => folded_logistic_shifted(x),
            MapKind::CircleMap => circle_map(x),
            MapKind::CircleMapShifted => circle_map_shifted(x),
            // validated in `new`
            MapKind::DpFamily => dp_family(x, self.map.l).unwrap_or(f64::NAN),
            _ => unreachable!("rejected in LatticeMap::new"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeCycle {
    pub period: u64,
    pub basin_size: u64,
    pub min_index: u64,
}

/// Complete cycle/basin decomposition of a map on `{0, .., N-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitStructure {
    pub n: u64,
    /// Sorted by descending basin size, ties by ascending `min_index`.
    pub cycles: Vec<LatticeCycle>,
    pub total_points: u64,
}

impl OrbitStructure {
    pub fn dominant(&self) -> Option<&LatticeCycle> {
        self.cycles.first()
    }

    pub fn max_period(&self) -> u64 {
        self.cycles.iter().map(|c| c.period).max().unwrap_or(0)
    }

    pub fn write_csv<W: Write>(&self, mut w: W, comments: &[String]) -> io::Result<()> {
        write_header(&mut w, comments)?;
        writeln!(w, "cycle_id,period,basin_size,relative_size,min_index")?;
        for (id, c) in self.cycles.iter().enumerate() {
            let rel = c.basin_size as f64 / self.n as f64;
            writeln!(w, "{id},{},{},{rel:e},{}", c.period, c.basin_size, c.min_index)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerateOptions {
    /// Threads used to tabulate the map; 1 evaluates the map during the walk
    /// without a successor table.
    pub workers: usize,
    /// Refuse lattices larger than this.
    pub max_points: u64,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions { workers: 1, max_points: 1 << 30 }
    }
}

/// Finds every cycle of `f` on `{0, .., n-1}` and the exact size of its basin.
///
/// One status word per point records unvisited / on the current path /
/// finished with a cycle id. Each unvisited start is walked until it meets a
/// marked point; meeting the current path closes a new cycle, meeting a
/// finished point joins that point's basin. The path is then walked again
/// from the start to assign it. O(N) time and memory.
///
/// With more than one worker the successor table is filled in parallel first;
/// the walk is always sequential, so ids and results do not depend on the
/// worker count.
pub fn enumerate_orbit_structure<F>(n: u64, f: F, opts: EnumerateOptions) -> Result<OrbitStructure, OrbitError>
where
    F: Fn(u64) -> u64 + Sync,
{
    if n == 0 {
        return Err(OrbitError::EmptyLattice);
    }
    if n > opts.max_points || n > MAX_LATTICE {
        return Err(OrbitError::TooLarge { n, cap: opts.max_points.min(MAX_LATTICE) });
    }
    let len = n as usize;
    let mut status: Vec<u32> = Vec::new();
    status.try_reserve_exact(len).map_err(|_| OrbitError::OutOfMemory { n })?;
    status.resize(len, UNVISITED);

    if opts.workers > 1 {
        let mut succ: Vec<u32> = Vec::new();
        succ.try_reserve_exact(len).map_err(|_| OrbitError::OutOfMemory { n })?;
        succ.resize(len, 0);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| OrbitError::Workers(e.to_string()))?;
        pool.install(|| {
            succ.par_chunks_mut(1 << 16).enumerate().for_each(|(c, chunk)| {
                let base = (c as u64) << 16;
                for (k, s) in chunk.iter_mut().enumerate() {
                    *s = f(base + k as u64) as u32;
                }
            })
        });
        walk(n, &mut status, |j| succ[j as usize] as u64)
    } else {
        walk(n, &mut status, f)
    }
}

fn walk(n: u64, status: &mut [u32], f: impl Fn(u64) -> u64) -> Result<OrbitStructure, OrbitError> {
    let mut cycles: Vec<LatticeCycle> = Vec::new();
    for start in 0..n {
        if status[start as usize] != UNVISITED {
            continue;
        }
        let mut x = start;
        while status[x as usize] == UNVISITED {
            status[x as usize] = ON_PATH;
            x = f(x);
            debug_assert!(x < n, "map left the lattice");
        }
        let id = if status[x as usize] == ON_PATH {
            let id = cycles.len() as u32;
            if id >= ON_PATH {
                return Err(OrbitError::TooManyCycles);
            }
            let mut period = 0;
            let mut min_index = x;
            let mut y = x;
            loop {
                status[y as usize] = id;
                period += 1;
                min_index = min_index.min(y);
                y = f(y);
                if y == x {
                    break;
                }
            }
            cycles.push(LatticeCycle { period, basin_size: period, min_index });
            id
        } else {
            status[x as usize]
        };
        let mut y = start;
        let mut tail = 0;
        while status[y as usize] == ON_PATH {
            status[y as usize] = id;
            tail += 1;
            y = f(y);
        }
        cycles[id as usize].basin_size += tail;
    }
    cycles.sort_by(|a, b| b.basin_size.cmp(&a.basin_size).then(a.min_index.cmp(&b.min_index)));
    let total_points = cycles.iter().map(|c| c.basin_size).sum();
    Ok(OrbitStructure { n, cycles, total_points })
}
