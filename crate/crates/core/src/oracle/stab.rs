//! Infinitesimal stabilizers of random points and the resulting density
//! certificate.

use rayon::prelude::*;
use serde::Serialize;

use super::config::{field, random_config, Configuration};
use super::matrix::Matrix;
use super::rng::mix;
use super::OracleError;
use crate::tree::LabeledTree;

/// Rank of the stabilizer system, best over `trials` points.
///
/// `certified_dense` means some point has an orbit of full tangent
/// dimension ("tangent-certified"); false means inconclusive, never sparse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StabReport {
    pub prime: u64,
    pub trials: usize,
    pub system_rank: u64,
    pub variety_dim: u64,
    pub lie_stab_dim: u64,
    pub certified_dense: bool,
}

impl StabReport {
    /// `lie_stab_dim − 1`: the scalars act trivially.
    pub fn pgl_stab_dim(&self) -> u64 {
        self.lie_stab_dim - 1
    }

    pub fn certificate(&self) -> &'static str {
        if self.certified_dense {
            "tangent-certified"
        } else {
            "inconclusive"
        }
    }
}

/// Assembles `C_v X B_v = 0` for every non-root vertex, with `C_v` a basis
/// of the left annihilator of `B_v`. Column `i·n + j` holds the
/// coefficient of `X[i][j]`.
pub fn stabilizer_system(c: &Configuration) -> Result<Matrix, OracleError> {
    let f = field(c.prime)?;
    let n = c.tree.ambient() as usize;
    let blocks: Vec<Matrix> = c
        .bases
        .values()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|b| {
            // rows of C span {c : c·B = 0}
            let annihilator = b.transpose().null_space(f).transpose();
            let phi = b.cols();
            let mut rows = Matrix::zeros(annihilator.rows() * phi, n * n);
            for a in 0..annihilator.rows() {
                for col in 0..phi {
                    let r = a * phi + col;
                    for i in 0..n {
                        let ci = annihilator[(a, i)];
                        if ci == 0 {
                            continue;
                        }
                        for j in 0..n {
                            rows[(r, i * n + j)] = f.mul(ci, b[(j, col)]);
                        }
                    }
                }
            }
            rows
        })
        .collect();
    Ok(blocks
        .into_iter()
        .fold(Matrix::zeros(0, n * n), |acc, b| acc.stack(&b)))
}

pub fn stabilizer_dim(c: &Configuration) -> Result<StabReport, OracleError> {
    let f = field(c.prime)?;
    let n = c.tree.ambient();
    let rank = stabilizer_system(c)?.rank(f) as u64;
    let variety_dim = c.tree.dimension();
    assert!(
        rank <= variety_dim,
        "orbit dimension {rank} exceeds variety dimension {variety_dim}"
    );
    Ok(StabReport {
        prime: c.prime,
        trials: 1,
        system_rank: rank,
        variety_dim,
        lie_stab_dim: n * n - rank,
        certified_dense: rank == variety_dim,
    })
}

/// Seed of trial `t` under a run seed.
pub fn trial_seed(seed: u64, t: usize) -> u64 {
    mix(seed ^ mix(t as u64))
}

/// Runs independent trials and keeps the largest rank; one trial of full
/// rank certifies a dense orbit.
pub fn certify_density(
    tree: &LabeledTree,
    p: u64,
    trials: usize,
    seed: u64,
) -> Result<StabReport, OracleError> {
    field(p)?;
    if trials == 0 {
        return Err(OracleError::NoTrials);
    }
    let reports: Vec<StabReport> = (0..trials)
        .into_par_iter()
        .map(|t| stabilizer_dim(&random_config(tree, p, trial_seed(seed, t))?))
        .collect::<Result<_, _>>()?;
    let best = reports
        .iter()
        .max_by_key(|r| r.system_rank)
        .copied()
        .expect("at least one trial");
    Ok(StabReport { trials, ..best })
}
