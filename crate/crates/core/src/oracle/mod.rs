//! Numerical checks that do not depend on the rule engine: tangent ranks
//! of random points over large prime fields, exhaustive orbit counts over
//! tiny fields, and cross-ratios.

pub mod config;
pub mod cross_ratio;
pub mod field;
pub mod matrix;
pub mod orbits;
pub mod rng;
pub mod stab;

use thiserror::Error;

pub use config::{random_config, Configuration};
pub use cross_ratio::{CrossRatioError, Pencil};
pub use field::{Fp, SmallField};
pub use matrix::Matrix;
pub use orbits::{
    enumerate_orbits, gaussian_binomial, point_count, OrbitError, OrbitLimits, OrbitReport, Slicing,
};
pub use stab::{certify_density, stabilizer_dim, stabilizer_system, StabReport};

/// 2^31 − 1.
pub const DEFAULT_PRIME: u64 = 2_147_483_647;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{0} is not a prime below 2^32")]
    NotPrime(u64),
    #[error("could not draw a full-rank basis for vertex {vertex}")]
    RankSamplingFailure { vertex: String },
    #[error("at least one trial is required")]
    NoTrials,
}
