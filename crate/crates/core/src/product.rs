//! Products of partial flag varieties `F(k_1,...,k_r; n)` sharing one
//! ambient dimension.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tree::{LabeledTree, MAX_LABEL};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProductError {
    #[error("ambient dimension {0} is outside 1..={max}", max = MAX_LABEL)]
    Ambient(u64),
    #[error("factor {index} is empty")]
    EmptyFactor { index: usize },
    #[error("factor {index}: entry {value} is not strictly between 0 and {ambient}")]
    OutOfRange {
        index: usize,
        value: u64,
        ambient: u64,
    },
    #[error("factor {index}: entries {entries:?} are not strictly increasing")]
    NotIncreasing { index: usize, entries: Vec<u64> },
}

/// A list of dimension vectors with a common ambient dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FlagProduct {
    factors: Vec<Vec<u64>>,
    ambient: u64,
}

impl FlagProduct {
    /// Validates every factor: nonempty, strictly increasing, entries in
    /// `(0, n)`.
    pub fn new(factors: Vec<Vec<u64>>, ambient: u64) -> Result<Self, ProductError> {
        if ambient == 0 || ambient > MAX_LABEL {
            return Err(ProductError::Ambient(ambient));
        }
        for (index, f) in factors.iter().enumerate() {
            if f.is_empty() {
                return Err(ProductError::EmptyFactor { index });
            }
            if let Some(&value) = f.iter().find(|&&k| k == 0 || k >= ambient) {
                return Err(ProductError::OutOfRange {
                    index,
                    value,
                    ambient,
                });
            }
            if f.windows(2).any(|w| w[0] >= w[1]) {
                return Err(ProductError::NotIncreasing {
                    index,
                    entries: f.clone(),
                });
            }
        }
        Ok(FlagProduct { factors, ambient })
    }

    /// Builds a product from possibly degenerate factors: entries equal to
    /// 0 or to the ambient dimension are dropped, and so are factors left
    /// empty. Entries must already be increasing and at most `ambient`.
    pub(crate) fn trimmed(factors: Vec<Vec<u64>>, ambient: u64) -> Self {
        let factors = factors
            .into_iter()
            .map(|f| {
                f.into_iter()
                    .filter(|&k| k > 0 && k < ambient)
                    .collect::<Vec<_>>()
            })
            .filter(|f| !f.is_empty())
            .collect();
        FlagProduct::new(factors, ambient).expect("trimmed factors are valid")
    }

    /// `m` copies of one factor.
    pub fn power(factor: Vec<u64>, m: usize, ambient: u64) -> Result<Self, ProductError> {
        FlagProduct::new(vec![factor; m], ambient)
    }

    pub fn factors(&self) -> &[Vec<u64>] {
        &self.factors
    }

    pub fn ambient(&self) -> u64 {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn dimension(&self) -> u64 {
        self.factors
            .iter()
            .map(|f| {
                f.iter()
                    .zip(f.iter().skip(1).chain(std::iter::once(&self.ambient)))
                    .map(|(&k, &next)| k * (next - k))
                    .sum::<u64>()
            })
            .sum()
    }

    /// Each factor `(k_1..k_r)` becomes `(n-k_r..n-k_1)`.
    pub fn dual(&self) -> Self {
        let n = self.ambient;
        FlagProduct {
            factors: self
                .factors
                .iter()
                .map(|f| f.iter().rev().map(|&k| n - k).collect())
                .collect(),
            ambient: n,
        }
    }

    /// Factors sorted lexicographically.
    pub fn sorted(&self) -> Self {
        let mut factors = self.factors.clone();
        factors.sort();
        FlagProduct {
            factors,
            ambient: self.ambient,
        }
    }

    /// The smaller of the sorted product and its sorted dual.
    pub fn canonical(&self) -> Self {
        let a = self.sorted();
        let b = self.dual().sorted();
        a.min(b)
    }

    /// All factors equal and exactly `m` of them.
    pub fn self_power(&self, m: usize) -> Option<&[u64]> {
        match self.factors.split_first() {
            Some((first, rest)) if self.factors.len() == m && rest.iter().all(|f| f == first) => {
                Some(first)
            }
            _ => None,
        }
    }

    /// Every factor is a single subspace.
    pub fn grassmannian_dims(&self) -> Option<Vec<u64>> {
        self.factors
            .iter()
            .map(|f| if f.len() == 1 { Some(f[0]) } else { None })
            .collect()
    }

    /// The star of chains joined at a root labeled `n`. Vertex `j` of
    /// factor `i` is named `f{i}_{j}` (zero padded), the root `root`.
    pub fn to_tree(&self) -> LabeledTree {
        let mut labels = BTreeMap::new();
        let mut parent_of = BTreeMap::new();
        labels.insert("root".to_string(), self.ambient);
        for (i, f) in self.factors.iter().enumerate() {
            for (j, &k) in f.iter().enumerate() {
                let name = format!("f{i:03}_{j:03}");
                labels.insert(name.clone(), k);
                let up = if j + 1 < f.len() {
                    format!("f{i:03}_{:03}", j + 1)
                } else {
                    "root".to_string()
                };
                parent_of.insert(name, up);
            }
        }
        LabeledTree::from_maps(&labels, &parent_of)
    }
}

impl fmt::Display for FlagProduct {
    /// Canonical text, e.g. `F(1,2;4)^3` or `G(1;5)*G(2;5)^2`; consecutive
    /// equal factors are grouped. The empty product prints as `pt(n)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "pt({})", self.ambient);
        }
        let mut first = true;
        let mut i = 0;
        while i < self.factors.len() {
            let factor = &self.factors[i];
            let mut run = 1;
            while i + run < self.factors.len() && &self.factors[i + run] == factor {
                run += 1;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            let entries: Vec<String> = factor.iter().map(u64::to_string).collect();
            let head = if factor.len() == 1 { "G" } else { "F" };
            write!(f, "{head}({};{})", entries.join(","), self.ambient)?;
            if run > 1 {
                write!(f, "^{run}")?;
            }
            i += run;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(factors: &[&[u64]], n: u64) -> FlagProduct {
        FlagProduct::new(factors.iter().map(|f| f.to_vec()).collect(), n).unwrap()
    }

    #[test]
    fn validation() {
        assert!(FlagProduct::new(vec![vec![3, 2]], 5).is_err());
        assert!(FlagProduct::new(vec![vec![5]], 5).is_err());
        assert!(FlagProduct::new(vec![vec![]], 5).is_err());
        assert!(FlagProduct::new(vec![], 0).is_err());
        assert!(FlagProduct::new(vec![], 3).is_ok());
    }

    #[test]
    fn duals() {
        let three = p(&[&[1, 3], &[1, 3], &[1, 3]], 4);
        assert_eq!(three.dual(), three);
        assert_eq!(p(&[&[2]], 5).dual(), p(&[&[3]], 5));
        let x = p(&[&[1, 2], &[3]], 7);
        assert_eq!(x.dual().dual(), x);
        assert_eq!(x.dual(), p(&[&[5, 6], &[4]], 7));
    }

    #[test]
    fn dimensions_match_tree() {
        let x = p(&[&[1, 2], &[3], &[2, 4, 5]], 7);
        assert_eq!(x.dimension(), x.to_tree().dimension());
        assert_eq!(p(&[&[2]], 5).dimension(), 6);
        assert_eq!(p(&[&[1, 2]], 4).dimension(), 5);
    }

    #[test]
    fn tree_round_trip() {
        let x = p(&[&[1, 2], &[3], &[1, 2]], 5);
        let back = x.to_tree().as_flag_product().unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn rendering() {
        assert_eq!(p(&[&[1, 2], &[1, 2], &[1, 2]], 4).to_string(), "F(1,2;4)^3");
        assert_eq!(p(&[&[1], &[2], &[2]], 5).to_string(), "G(1;5)*G(2;5)^2");
        assert_eq!(p(&[], 3).to_string(), "pt(3)");
    }

    #[test]
    fn canonical_form_is_order_and_duality_free() {
        let x = p(&[&[3], &[1, 2]], 5);
        let y = p(&[&[3, 4], &[2]], 5);
        assert_eq!(x.canonical(), y.canonical());
        assert_eq!(x.canonical(), p(&[&[1, 2], &[3]], 5));
    }

    #[test]
    fn trimming_drops_degenerate_entries() {
        let t = FlagProduct::trimmed(vec![vec![2, 4], vec![4], vec![1]], 4);
        assert_eq!(t, p(&[&[2], &[1]], 4));
    }
}
