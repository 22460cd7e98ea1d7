//! Discretized chaotic maps: weakly coupled tent and logistic systems used as
//! number generators, invariant-measure estimation, and the exact periodic
//! orbit structure of maps computed in finite arithmetic.

pub mod arithmetic;
pub mod cli;
pub mod coupling;
pub mod fit;
pub mod maps;
pub mod measure;
pub mod orbits;
pub mod report;
pub mod stream;
