use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arithmetic::Real;
use crate::coupling::StateVector;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycleError {
    #[error("iteration budget must be at least 1")]
    ZeroBudget,
    #[error("iteration counter overflowed")]
    CounterOverflow,
}

/// A state whose equality is decided on raw bits, with a total order used to
/// pick a canonical point on a cycle.
pub trait BitState: Clone {
    fn same_bits(&self, other: &Self) -> bool;
    fn bit_cmp(&self, other: &Self) -> Ordering;
}

macro_rules! bitstate_float {
    ($($t:ty),*) => {$(
        impl BitState for $t {
            #[inline(always)]
            fn same_bits(&self, other: &Self) -> bool {
                self.to_bits() == other.to_bits()
            }
            fn bit_cmp(&self, other: &Self) -> Ordering {
                self.total_cmp(other)
            }
        }
    )*};
}

macro_rules! bitstate_int {
    ($($t:ty),*) => {$(
        impl BitState for $t {
            #[inline(always)]
            fn same_bits(&self, other: &Self) -> bool {
                self == other
            }
            fn bit_cmp(&self, other: &Self) -> Ordering {
                self.cmp(other)
            }
        }
    )*};
}

bitstate_float!(f32, f64);
bitstate_int!(u32, u64, usize, i64);

impl<A: BitState, B: BitState> BitState for (A, B) {
    #[inline(always)]
    fn same_bits(&self, other: &Self) -> bool {
        self.0.same_bits(&other.0) && self.1.same_bits(&other.1)
    }
    fn bit_cmp(&self, other: &Self) -> Ordering {
        self.0.bit_cmp(&other.0).then_with(|| self.1.bit_cmp(&other.1))
    }
}

impl<T: BitState> BitState for Vec<T> {
    #[inline]
    fn same_bits(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().zip(other).all(|(a, b)| a.same_bits(b))
    }
    fn bit_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.iter().zip(other) {
            match a.bit_cmp(b) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        self.len().cmp(&other.len())
    }
}

impl<T: Real + BitState> BitState for StateVector<T> {
    fn same_bits(&self, other: &Self) -> bool {
        self.0.same_bits(&other.0)
    }
    fn bit_cmp(&self, other: &Self) -> Ordering {
        self.0.bit_cmp(&other.0)
    }
}

/// An eventually periodic orbit: `f^(tail + period)(x0) = f^tail(x0)`, both
/// minimal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleReport<S> {
    pub period: u64,
    pub tail: u64,
    /// The state at iteration `tail`, where the orbit enters the cycle.
    pub entry: S,
    /// Smallest state on the cycle under [`BitState::bit_cmp`]; equal cycles
    /// always carry equal witnesses.
    pub witness: S,
    /// Map applications spent, including tail recovery and canonicalization.
    pub iterations_used: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CycleOutcome<S> {
    Found(CycleReport<S>),
    NotFound { iterations_used: u64 },
}

impl<S> CycleOutcome<S> {
    pub fn found(&self) -> Option<&CycleReport<S>> {
        match self {
            CycleOutcome::Found(r) => Some(r),
            CycleOutcome::NotFound { .. } => None,
        }
    }

    pub fn into_found(self) -> Option<CycleReport<S>> {
        match self {
            CycleOutcome::Found(r) => Some(r),
            CycleOutcome::NotFound { .. } => None,
        }
    }
}

/// Resumable first phase of Brent's algorithm.
///
/// The tortoise is parked at the hare's position every time the search
/// length reaches a power of two; the first time the hare meets the tortoise
/// the distance walked since the last parking is the period. Only two states
/// are held, so periods far beyond memory size are reachable. The struct
/// serializes, which is how long hunts checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrentSearch<S> {
    x0: S,
    tortoise: S,
    hare: S,
    power: u64,
    lam: u64,
    steps: u64,
    period: Option<u64>,
}

impl<S: BitState> BrentSearch<S> {
    pub fn new(x0: S, mut step: impl FnMut(&mut S)) -> Self {
        let mut hare = x0.clone();
        step(&mut hare);
        let period = x0.same_bits(&hare).then_some(1);
        BrentSearch { tortoise: x0.clone(), x0, hare, power: 1, lam: 1, steps: 1, period }
    }

    /// Map applications performed so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn period(&self) -> Option<u64> {
        self.period
    }

    pub fn start(&self) -> &S {
        &self.x0
    }

    /// Runs until the period is known or `self.steps()` reaches `limit`.
    pub fn run_until(&mut self, limit: u64, mut step: impl FnMut(&mut S)) -> Result<Option<u64>, CycleError> {
        while self.period.is_none() && self.steps < limit {
            if self.power == self.lam {
                self.tortoise = self.hare.clone();
                self.power = self.power.checked_mul(2).ok_or(CycleError::CounterOverflow)?;
                self.lam = 0;
            }
            step(&mut self.hare);
            self.lam += 1;
            self.steps = self.steps.checked_add(1).ok_or(CycleError::CounterOverflow)?;
            if self.tortoise.same_bits(&self.hare) {
                self.period = Some(self.lam);
            }
        }
        Ok(self.period)
    }

    /// Second phase: with the period known, recovers the minimal tail and the
    /// canonical witness.
    pub fn finish(&self, mut step: impl FnMut(&mut S)) -> Result<CycleReport<S>, CycleError> {
        let period = self.period.expect("finish called before the period was found");
        let mut used = self.steps;
        let bump = |used: u64, k: u64| used.checked_add(k).ok_or(CycleError::CounterOverflow);

        let mut lead = self.x0.clone();
        for _ in 0..period {
            step(&mut lead);
        }
        used = bump(used, period)?;
        let mut trail = self.x0.clone();
        let mut tail = 0u64;
        while !trail.same_bits(&lead) {
            step(&mut trail);
            step(&mut lead);
            tail = tail.checked_add(1).ok_or(CycleError::CounterOverflow)?;
        }
        used = bump(used, tail.checked_mul(2).ok_or(CycleError::CounterOverflow)?)?;

        let entry = trail;
        let mut witness = entry.clone();
        let mut walker = entry.clone();
        for _ in 1..period {
            step(&mut walker);
            if walker.bit_cmp(&witness) == Ordering::Less {
                witness = walker.clone();
            }
        }
        used = bump(used, period - 1)?;

        Ok(CycleReport { period, tail, entry, witness, iterations_used: used })
    }
}

/// Detects the cycle reached from `x0` with constant memory.
///
/// `max_iter` bounds the search phase; a cycle with `tail + period` up to
/// roughly `max_iter / 2` is always found. When the budget runs out the
/// result is [`CycleOutcome::NotFound`], which is a normal outcome.
pub fn detect_cycle<S: BitState>(
    x0: S,
    max_iter: u64,
    mut step: impl FnMut(&mut S),
) -> Result<CycleOutcome<S>, CycleError> {
    if max_iter == 0 {
        return Err(CycleError::ZeroBudget);
    }
    let mut search = BrentSearch::new(x0, &mut step);
    match search.run_until(max_iter, &mut step)? {
        Some(_) => Ok(CycleOutcome::Found(search.finish(&mut step)?)),
        None => Ok(CycleOutcome::NotFound { iterations_used: search.steps() }),
    }
}
