//! Periodic orbits of discretized maps.
//!
//! Float trajectories are searched with a constant-memory cycle detector;
//! lattice maps are decomposed exhaustively into cycles and basins.

mod cycle;
mod lattice;
mod sample;

use std::fmt;

use thiserror::Error;

pub use cycle::{detect_cycle, BitState, BrentSearch, CycleError, CycleOutcome, CycleReport};
pub use lattice::{
    enumerate_orbit_structure, EnumerateOptions, LatticeCycle, LatticeMap, OrbitStructure, MAX_LATTICE,
};
pub use sample::{sample_orbit_structure, same_cycle, SampleReport, SampledCycle};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrbitError {
    #[error("lattice of {n} points exceeds the configured cap of {cap}")]
    TooLarge { n: u64, cap: u64 },
    #[error("could not allocate working memory for {n} points")]
    OutOfMemory { n: u64 },
    #[error("lattice must have at least one point")]
    EmptyLattice,
    #[error("too many cycles for the status encoding")]
    TooManyCycles,
    #[error("at least one sample is required")]
    NoSamples,
    #[error("worker pool: {0}")]
    Workers(String),
    #[error(transparent)]
    Cycle(#[from] CycleError),
}

/// Order-of-magnitude band of a period length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PeriodClass {
    SubMega,
    Mega,
    Giga,
    Tera,
    Peta,
    Exa,
    Zetta,
    Yotta,
    /// 10^27 and beyond.
    BeyondYotta,
}

impl PeriodClass {
    pub fn name(self) -> &'static str {
        match self {
            PeriodClass::SubMega => "sub-mega",
            PeriodClass::Mega => "Mega",
            PeriodClass::Giga => "Giga",
            PeriodClass::Tera => "Tera",
            PeriodClass::Peta => "Peta",
            PeriodClass::Exa => "Exa",
            PeriodClass::Zetta => "Zetta",
            PeriodClass::Yotta => "Yotta",
            PeriodClass::BeyondYotta => "beyond-yotta",
        }
    }
}

impl fmt::Display for PeriodClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Mega is `[10^6, 10^9)`, Giga `[10^9, 10^12)`, and so on by factors of
/// 1000 up to Yotta `[10^24, 10^27)`.
pub fn classify_period(period: u128) -> PeriodClass {
    const BANDS: [PeriodClass; 7] = [
        PeriodClass::Mega,
        PeriodClass::Giga,
        PeriodClass::Tera,
        PeriodClass::Peta,
        PeriodClass::Exa,
        PeriodClass::Zetta,
        PeriodClass::Yotta,
    ];
    if period < 1_000_000 {
        return PeriodClass::SubMega;
    }
    let mut upper: u128 = 1_000_000_000;
    for band in BANDS {
        if period < upper {
            return band;
        }
        upper *= 1000;
    }
    PeriodClass::BeyondYotta
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn named_periods() {
        assert_eq!(classify_period(3_800_716_788), PeriodClass::Giga);
        assert_eq!(classify_period(1_320_572), PeriodClass::Mega);
        assert_eq!(classify_period(999_999), PeriodClass::SubMega);
        assert_eq!(classify_period(1_000_000), PeriodClass::Mega);
        assert_eq!(classify_period(436_170_188_959), PeriodClass::Giga);
        assert_eq!(classify_period(76_355_473_953), PeriodClass::Giga);
        assert_eq!(classify_period(10u128.pow(12)), PeriodClass::Tera);
        assert_eq!(classify_period(10u128.pow(27) - 1), PeriodClass::Yotta);
        assert_eq!(classify_period(10u128.pow(27)), PeriodClass::BeyondYotta);
        assert_eq!(PeriodClass::Giga.to_string(), "Giga");
    }

    proptest! {
        #[test]
        fn classification_is_monotone(a in 1u128..10u128.pow(27), b in 1u128..10u128.pow(27)) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(classify_period(lo) <= classify_period(hi));
            prop_assert!(classify_period(hi) < PeriodClass::BeyondYotta);
        }
    }
}
