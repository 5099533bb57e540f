//! Random instances shared by the integration tests.
#![allow(dead_code)]

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treeorbit::oracle::{Fp, Matrix};
use treeorbit::{validate_tree, FlagProduct, LabeledTree, RawTree};

pub const P: u64 = 2_147_483_647;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A tree with root label `n` and at most `max_vertices` vertices; each new
/// vertex hangs below a random vertex whose label is at least 2.
pub fn random_tree(rng: &mut impl Rng, max_n: u64, max_vertices: usize) -> LabeledTree {
    let n = rng.gen_range(2..=max_n);
    let count = rng.gen_range(1..=max_vertices);
    let mut labels = vec![n];
    let mut raw = RawTree::default();
    raw.labels.insert("v0".into(), n as i64);
    while labels.len() < count {
        let parents: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] >= 2).collect();
        if parents.is_empty() {
            break;
        }
        let t = parents[rng.gen_range(0..parents.len())];
        let label = rng.gen_range(1..labels[t]);
        let name = format!("v{}", labels.len());
        raw.labels.insert(name.clone(), label as i64);
        raw.edges.push((name, format!("v{t}")));
        labels.push(label);
    }
    validate_tree(&raw).expect("generated trees are valid")
}

/// A strictly increasing nonempty subset of `1..n`.
pub fn random_factor(rng: &mut impl Rng, n: u64, max_len: usize) -> Vec<u64> {
    let len = rng.gen_range(1..=max_len.min(n as usize - 1));
    let mut f: Vec<u64> = sample(rng, n as usize - 1, len)
        .into_iter()
        .map(|i| i as u64 + 1)
        .collect();
    f.sort_unstable();
    f
}

pub fn random_product(
    rng: &mut impl Rng,
    min_n: u64,
    max_n: u64,
    max_factors: usize,
    max_len: usize,
) -> FlagProduct {
    let n = rng.gen_range(min_n..=max_n);
    let m = rng.gen_range(1..=max_factors);
    let factors = (0..m).map(|_| random_factor(rng, n, max_len)).collect();
    FlagProduct::new(factors, n).expect("generated products are valid")
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, f: Fp) -> Matrix {
    let data: Vec<Vec<u64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(0..f.modulus())).collect())
        .collect();
    if rows == 0 {
        Matrix::zeros(0, cols)
    } else {
        Matrix::from_rows(&data, f)
    }
}

pub fn random_invertible(rng: &mut impl Rng, n: usize, f: Fp) -> Matrix {
    loop {
        let m = random_matrix(rng, n, n, f);
        if m.rank(f) == n {
            return m;
        }
    }
}
