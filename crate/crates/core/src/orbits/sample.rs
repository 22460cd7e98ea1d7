use std::cmp::Ordering;

use rayon::prelude::*;

use super::cycle::{detect_cycle, BitState, CycleOutcome, CycleReport};
use super::OrbitError;

/// One distinct cycle reached by the sampled starts.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCycle<S> {
    /// Report of the first start (in seed order) that reached this cycle.
    pub report: CycleReport<S>,
    pub hits: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleReport<S> {
    /// Most-hit cycles first; ties broken by witness order.
    pub cycles: Vec<SampledCycle<S>>,
    /// Seeds (by index) that did not close a cycle within the budget.
    pub overflow: Vec<usize>,
    pub samples: usize,
}

/// Two reports describe the same cycle when one witness lies on the other's
/// orbit. Witnesses are canonical, so this reduces to comparing them, but the
/// walk keeps the relation honest for reports built by hand.
pub fn same_cycle<S: BitState>(a: &CycleReport<S>, b: &CycleReport<S>, mut step: impl FnMut(&mut S)) -> bool {
    if a.period != b.period {
        return false;
    }
    if a.witness.same_bits(&b.witness) {
        return true;
    }
    let mut x = a.witness.clone();
    for _ in 0..a.period {
        step(&mut x);
        if x.same_bits(&b.witness) {
            return true;
        }
    }
    false
}

/// Runs [`detect_cycle`] from each of the first `k` seeds and groups the
/// results by cycle.
///
/// `make_step` builds an independent stepper per worker. Results are gathered
/// in seed order, so the report does not depend on `workers`.
pub fn sample_orbit_structure<S, I, M, G>(
    seeds: I,
    k: usize,
    max_iter: u64,
    workers: usize,
    make_step: M,
) -> Result<SampleReport<S>, OrbitError>
where
    S: BitState + Send + Sync,
    I: IntoIterator<Item = S>,
    M: Fn() -> G + Sync,
    G: FnMut(&mut S),
{
    if k == 0 {
        return Err(OrbitError::NoSamples);
    }
    let seeds: Vec<S> = seeds.into_iter().take(k).collect();
    let run = |x0: &S| detect_cycle(x0.clone(), max_iter, make_step());
    let outcomes: Vec<_> = if workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| OrbitError::Workers(e.to_string()))?;
        pool.install(|| seeds.par_iter().map(run).collect::<Result<Vec<_>, _>>())?
    } else {
        seeds.iter().map(run).collect::<Result<Vec<_>, _>>()?
    };

    let mut cycles: Vec<SampledCycle<S>> = Vec::new();
    let mut overflow = Vec::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            CycleOutcome::Found(report) => {
                match cycles
                    .iter_mut()
                    .find(|c| c.report.period == report.period && c.report.witness.same_bits(&report.witness))
                {
                    Some(c) => c.hits += 1,
                    None => cycles.push(SampledCycle { report, hits: 1 }),
                }
            }
            CycleOutcome::NotFound { .. } => overflow.push(i),
        }
    }
    cycles.sort_by(|a, b| match b.hits.cmp(&a.hits) {
        Ordering::Equal => a.report.witness.bit_cmp(&b.report.witness),
        o => o,
    });
    Ok(SampleReport { cycles, overflow, samples: seeds.len() })
}
