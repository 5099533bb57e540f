//! Random points of a tree variety over a prime field.

use std::collections::BTreeMap;

use rand::Rng;

use super::field::Fp;
use super::matrix::Matrix;
use super::rng::stream;
use super::OracleError;
use crate::tree::LabeledTree;

const MAX_RANK_RETRIES: u64 = 64;

/// One point: for every non-root vertex an `n × φ(v)` matrix whose columns
/// span `U_v`. The root's space is all of `F_p^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub tree: LabeledTree,
    pub prime: u64,
    pub bases: BTreeMap<String, Matrix>,
    pub seed: u64,
}

pub(crate) fn field(p: u64) -> Result<Fp, OracleError> {
    Fp::new(p).ok_or(OracleError::NotPrime(p))
}

/// Draws `U_v` as a uniformly random `φ(v)`-dimensional subspace of its
/// target's space, vertices taken in order of distance from the root.
pub fn random_config(tree: &LabeledTree, p: u64, seed: u64) -> Result<Configuration, OracleError> {
    let f = field(p)?;
    let n = tree.ambient() as usize;
    let mut by_index: Vec<Option<Matrix>> = vec![None; tree.len()];
    by_index[tree.root()] = Some(Matrix::identity(n));
    for v in tree.bfs_order() {
        let Some(t) = tree.parent(v) else { continue };
        let (rows, cols) = (tree.label(t) as usize, tree.label(v) as usize);
        let parent = by_index[t].as_ref().expect("parents come first");
        let mut found = None;
        for attempt in 0..MAX_RANK_RETRIES {
            let mut rng = stream(seed, v as u64, attempt);
            let mut r = Matrix::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    r[(i, j)] = rng.gen_range(0..p);
                }
            }
            if r.rank(f) == cols {
                found = Some(parent.mul(&r, f));
                break;
            }
        }
        by_index[v] = Some(found.ok_or_else(|| OracleError::RankSamplingFailure {
            vertex: tree.name(v).to_string(),
        })?);
    }
    let bases = (0..tree.len())
        .filter(|&v| v != tree.root())
        .map(|v| {
            (
                tree.name(v).to_string(),
                by_index[v].take().expect("every vertex drawn"),
            )
        })
        .collect();
    Ok(Configuration {
        tree: tree.clone(),
        prime: p,
        bases,
        seed,
    })
}

impl Configuration {
    pub fn basis(&self, v: usize) -> Option<&Matrix> {
        self.bases.get(self.tree.name(v))
    }

    /// Checks full column rank at every vertex and every containment.
    pub fn is_valid(&self) -> bool {
        let Ok(f) = field(self.prime) else {
            return false;
        };
        let n = self.tree.ambient() as usize;
        self.tree.edges().all(|(s, t)| {
            let bs = match self.basis(s) {
                Some(b) => b,
                None => return false,
            };
            if bs.rows() != n || bs.rank(f) != self.tree.label(s) as usize {
                return false;
            }
            match self.basis(t) {
                None => true,
                Some(bt) => {
                    let both = bt.transpose().stack(&bs.transpose());
                    both.rank(f) == self.tree.label(t) as usize
                }
            }
        })
    }
}
