//! Coupled-map iteration packaged as a stream of numbers.
//!
//! The output is a deterministic chaotic sequence. It is reproducible from
//! its configuration and is not cryptographically secure randomness.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arithmetic::{ArithMode, Real};
use crate::coupling::{CoupledSystem, CouplingConfig, CouplingError, PAPER_SEEDS};
use crate::maps::{MapKind, MapSpec};
use crate::measure::logistic_to_uniform;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StreamError {
    #[error("streams are built from the tent or symmetric logistic map, not {0}")]
    UnsupportedMap(MapKind),
    #[error("uniformizing applies to the logistic map only")]
    UniformizeNeedsLogistic,
    #[error("streams need binary32 or binary64 arithmetic")]
    LatticeMode,
    #[error("seed has {got} components, coupling has {expected}")]
    SeedDimension { expected: usize, got: usize },
    #[error("seed component {0} lies outside [-1, 1]")]
    SeedOutOfRange(f64),
    #[error("no default seed for p = {0}; supply one")]
    NoDefaultSeed(usize),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub map: MapSpec,
    pub coupling: CouplingConfig,
    pub mode: ArithMode,
    pub seed_state: Vec<f64>,
    /// Push logistic output through the arcsine-to-uniform transform.
    pub uniformize: bool,
    /// Emit every component of each state instead of the first only.
    pub mixed: bool,
}

impl GeneratorConfig {
    /// Coupled tent maps seeded with the first `p` published seeds.
    pub fn tent(p: usize, eps1: f64, mode: ArithMode) -> Result<Self, StreamError> {
        Self::with_default_seed(MapSpec::tent(2.0), p, eps1, mode)
    }

    pub fn logistic(p: usize, eps1: f64, mode: ArithMode) -> Result<Self, StreamError> {
        Self::with_default_seed(MapSpec::standard(MapKind::LogisticSym), p, eps1, mode)
    }

    fn with_default_seed(map: MapSpec, p: usize, eps1: f64, mode: ArithMode) -> Result<Self, StreamError> {
        let seed = PAPER_SEEDS.get(..p).ok_or(StreamError::NoDefaultSeed(p))?;
        Ok(GeneratorConfig {
            map,
            coupling: CouplingConfig::linear(p, eps1),
            mode,
            seed_state: seed.to_vec(),
            uniformize: false,
            mixed: false,
        })
    }

    pub fn validate(&self) -> Result<(), StreamError> {
        match self.map.kind {
            MapKind::Tent | MapKind::LogisticSym => {}
            k => return Err(StreamError::UnsupportedMap(k)),
        }
        if self.uniformize && self.map.kind != MapKind::LogisticSym {
            return Err(StreamError::UniformizeNeedsLogistic);
        }
        if !self.mode.is_float() {
            return Err(StreamError::LatticeMode);
        }
        self.coupling.validate()?;
        self.map.validate().map_err(CouplingError::from)?;
        if self.seed_state.len() != self.coupling.p {
            return Err(StreamError::SeedDimension { expected: self.coupling.p, got: self.seed_state.len() });
        }
        if let Some(&bad) = self.seed_state.iter().find(|v| !(-1.0..=1.0).contains(*v)) {
            return Err(StreamError::SeedOutOfRange(bad));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum Engine {
    F32(CoupledSystem<f32>, Vec<f32>),
    F64(CoupledSystem<f64>, Vec<f64>),
}

impl Engine {
    #[inline]
    fn advance(&mut self) {
        match self {
            Engine::F32(sys, x) => sys.advance(x),
            Engine::F64(sys, x) => sys.advance(x),
        }
    }

    #[inline]
    fn component(&self, i: usize) -> f64 {
        match self {
            Engine::F32(_, x) => x[i].to_f64(),
            Engine::F64(_, x) => x[i],
        }
    }
}

/// Single-consumer stream over a coupled system.
#[derive(Debug, Clone)]
pub struct Generator {
    engine: Engine,
    p: usize,
    /// Next component to emit in mixed mode; 0 means a step is due.
    cursor: usize,
    uniformize: bool,
    mixed: bool,
}

impl Generator {
    pub fn new(config: &GeneratorConfig) -> Result<Self, StreamError> {
        config.validate()?;
        let engine = match config.mode {
            ArithMode::Binary32 => Engine::F32(
                CoupledSystem::new(&config.map, &config.coupling)?,
                config.seed_state.iter().map(|&v| f32::from_f64(v)).collect(),
            ),
            ArithMode::Binary64 => Engine::F64(
                CoupledSystem::new(&config.map, &config.coupling)?,
                config.seed_state.clone(),
            ),
            ArithMode::Lattice(_) => return Err(StreamError::LatticeMode),
        };
        Ok(Generator {
            engine,
            p: config.coupling.p,
            cursor: 0,
            uniformize: config.uniformize,
            mixed: config.mixed,
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Current state of the underlying system, widened to binary64.
    pub fn state(&self) -> Vec<f64> {
        (0..self.p).map(|i| self.engine.component(i)).collect()
    }

    /// Next value in `[-1, 1]`, or in `[0, 1]` when uniformized.
    #[inline]
    pub fn next_value(&mut self) -> f64 {
        let raw = if self.mixed {
            if self.cursor == 0 {
                self.engine.advance();
            }
            let v = self.engine.component(self.cursor);
            self.cursor = (self.cursor + 1) % self.p;
            v
        } else {
            self.engine.advance();
            self.engine.component(0)
        };
        if self.uniformize {
            logistic_to_uniform(raw)
        } else {
            raw
        }
    }

    #[inline]
    fn next_unit(&mut self) -> f64 {
        let v = self.next_value();
        let u = if self.uniformize { v } else { (v + 1.0) * 0.5 };
        u.clamp(0.0, f64::BELOW_ONE)
    }

    /// `k` values in `[0, 1)`.
    pub fn fill_units(&mut self, k: usize) -> Vec<f64> {
        (0..k).map(|_| self.next_unit()).collect()
    }

    /// Each draw contributes `floor(u · 2^16)` as two big-endian bytes.
    pub fn fill_bytes(&mut self, buf: &mut [u8]) {
        for chunk in buf.chunks_mut(2) {
            let word = (self.next_unit() * 65536.0) as u16;
            let bytes = word.to_be_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}

impl Iterator for Generator {
    type Item = f64;
    fn next(&mut self) -> Option<f64> {
        Some(self.next_value())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DumpFormat {
    /// Little-endian binary32 records.
    Binary,
    /// One binary32 bit pattern per line as eight hex digits.
    Hex,
}

/// Writes `k` values of [`Generator::fill_units`] in the chosen format.
pub fn dump<W: Write>(gen: &mut Generator, k: u64, format: DumpFormat, mut w: W) -> io::Result<()> {
    for _ in 0..k {
        let v = gen.next_unit() as f32;
        match format {
            DumpFormat::Binary => w.write_all(&v.to_le_bytes())?,
            DumpFormat::Hex => writeln!(w, "{:08x}", v.to_bits())?,
        }
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(p: usize, mode: ArithMode, mixed: bool) -> Generator {
        let mut c = GeneratorConfig::tent(p, 1e-7, mode).unwrap();
        c.mixed = mixed;
        Generator::new(&c).unwrap()
    }

    #[test]
    fn mixed_emits_post_step_components_in_order() {
        let mut sys = CoupledSystem::<f64>::new(&MapSpec::tent(2.0), &CouplingConfig::linear(2, 1e-7)).unwrap();
        let mut x = PAPER_SEEDS[..2].to_vec();
        let mut expected = Vec::new();
        for _ in 0..2 {
            sys.advance(&mut x);
            expected.extend_from_slice(&x);
        }
        let mut g = gen(2, ArithMode::Binary64, true);
        let got: Vec<f64> = (0..4).map(|_| g.next_value()).collect();
        assert_eq!(got, expected);
        let mut g = gen(2, ArithMode::Binary64, false);
        let got: Vec<f64> = (0..2).map(|_| g.next_value()).collect();
        assert_eq!(got, vec![expected[0], expected[2]]);
    }

    #[test]
    fn deinterleaving_recovers_components() {
        for mode in [ArithMode::Binary32, ArithMode::Binary64] {
            let mut mixed = gen(3, mode, true);
            let flat: Vec<f64> = (0..3000).map(|_| mixed.next_value()).collect();
            let mut plain = gen(3, mode, false);
            let firsts: Vec<f64> = (0..1000).map(|_| plain.next_value()).collect();
            let comp0: Vec<f64> = flat.iter().step_by(3).copied().collect();
            assert_eq!(comp0, firsts);
            assert_eq!(mixed.state(), flat[2997..].to_vec());
        }
    }

    #[test]
    fn reproducible() {
        let a: Vec<u64> = gen(3, ArithMode::Binary32, true).take(10_000).map(f64::to_bits).collect();
        let b: Vec<u64> = gen(3, ArithMode::Binary32, true).take(10_000).map(f64::to_bits).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn unit_and_byte_edges() {
        let mut g = gen(1, ArithMode::Binary64, false);
        // the uncoupled tent map from 0.330 lands on the fixed point -1 quickly
        let mut bytes = [0xffu8; 2];
        for _ in 0..200 {
            g.next_value();
        }
        assert_eq!(g.state(), vec![-1.0]);
        g.fill_bytes(&mut bytes);
        assert_eq!(bytes, [0, 0]);
        assert_eq!(g.fill_units(1), vec![0.0]);
        assert_eq!(((0.5f64 * 65536.0) as u16).to_be_bytes(), [0x80, 0x00]);
        assert!(f64::BELOW_ONE < 1.0 && (1.0f64).clamp(0.0, f64::BELOW_ONE) == f64::BELOW_ONE);
    }

    #[test]
    fn config_validation() {
        let mut c = GeneratorConfig::tent(3, 1e-14, ArithMode::Binary64).unwrap();
        c.uniformize = true;
        assert_eq!(c.validate(), Err(StreamError::UniformizeNeedsLogistic));
        c.uniformize = false;
        c.seed_state.pop();
        assert!(matches!(c.validate(), Err(StreamError::SeedDimension { .. })));
        let mut c = GeneratorConfig::tent(3, 1e-14, ArithMode::lattice(16).unwrap()).unwrap();
        assert_eq!(c.validate(), Err(StreamError::LatticeMode));
        c.mode = ArithMode::Binary64;
        c.map = MapSpec::standard(MapKind::CircleMap);
        assert!(matches!(c.validate(), Err(StreamError::UnsupportedMap(_))));
        assert!(GeneratorConfig::tent(8, 1e-14, ArithMode::Binary64).is_err());
    }

    #[test]
    fn uniformized_logistic_in_unit_interval() {
        let mut c = GeneratorConfig::logistic(3, 1e-7, ArithMode::Binary64).unwrap();
        c.uniformize = true;
        let mut g = Generator::new(&c).unwrap();
        assert!(g.fill_units(10_000).iter().all(|u| (0.0..1.0).contains(u)));
    }

    #[test]
    fn dump_formats() {
        let mut g = gen(3, ArithMode::Binary32, false);
        let mut bin = Vec::new();
        dump(&mut g, 4, DumpFormat::Binary, &mut bin).unwrap();
        let mut g = gen(3, ArithMode::Binary32, false);
        let mut hex = Vec::new();
        dump(&mut g, 4, DumpFormat::Hex, &mut hex).unwrap();
        let hex = String::from_utf8(hex).unwrap();
        assert_eq!(bin.len(), 16);
        for (i, line) in hex.lines().enumerate() {
            let from_bin = u32::from_le_bytes(bin[4 * i..4 * i + 4].try_into().unwrap());
            assert_eq!(u32::from_str_radix(line, 16).unwrap(), from_bin);
        }
    }
}
