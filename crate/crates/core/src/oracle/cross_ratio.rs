//! Cross-ratio of four subspaces in a pencil `Λ ⊂ Z_i ⊂ Λ'` with
//! `dim Λ' − dim Λ = 2`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::field::Fp;
use super::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CrossRatioError {
    #[error("{0} is not a prime below 2^32")]
    NotPrime(u64),
    #[error("not a pencil: {0}")]
    NotAPencil(String),
    #[error("degenerate pencil: {0}")]
    Degenerate(String),
}

/// Subspaces given by spanning row vectors over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pencil {
    #[serde(default = "default_prime")]
    pub prime: u64,
    pub common_sub: Vec<Vec<i64>>,
    pub common_sup: Vec<Vec<i64>>,
    pub pencil: [Vec<Vec<i64>>; 4],
}

fn default_prime() -> u64 {
    super::DEFAULT_PRIME
}

struct Space {
    rows: Matrix,
    dim: usize,
}

fn span(vectors: &[Vec<i64>], n: usize, f: Fp, what: &str) -> Result<Space, CrossRatioError> {
    if let Some(v) = vectors.iter().find(|v| v.len() != n) {
        return Err(CrossRatioError::NotAPencil(format!(
            "{what}: vector of length {} in a space of dimension {n}",
            v.len()
        )));
    }
    let rows: Vec<Vec<u64>> = vectors
        .iter()
        .map(|v| v.iter().map(|&x| f.from_i64(x)).collect())
        .collect();
    let mut m = if rows.is_empty() {
        Matrix::zeros(0, n)
    } else {
        Matrix::from_rows(&rows, f)
    };
    let dim = m.rref(f).len();
    let basis = Matrix::from_rows(&m.to_rows()[..dim], f);
    Ok(Space {
        rows: if dim == 0 { Matrix::zeros(0, n) } else { basis },
        dim,
    })
}

fn contains(big: &Space, small: &Space, f: Fp) -> bool {
    big.rows.stack(&small.rows).rank(f) == big.dim
}

impl Pencil {
    /// Returns the cross-ratio with `Z_1, Z_2, Z_3` sent to `0, ∞, 1`. The
    /// members must be pairwise distinct, so the value is never `0`, `1`
    /// or `∞`.
    pub fn cross_ratio(&self) -> Result<u64, CrossRatioError> {
        let f = Fp::new(self.prime).ok_or(CrossRatioError::NotPrime(self.prime))?;
        let n = self
            .common_sup
            .first()
            .map(Vec::len)
            .ok_or_else(|| CrossRatioError::NotAPencil("empty common superspace".into()))?;
        let sub = span(&self.common_sub, n, f, "common_sub")?;
        let sup = span(&self.common_sup, n, f, "common_sup")?;
        if sup.dim != sub.dim + 2 {
            return Err(CrossRatioError::NotAPencil(format!(
                "dim Λ' − dim Λ = {} − {}, expected a difference of 2",
                sup.dim, sub.dim
            )));
        }
        if !contains(&sup, &sub, f) {
            return Err(CrossRatioError::NotAPencil(
                "Λ is not contained in Λ'".into(),
            ));
        }
        let members = self
            .pencil
            .iter()
            .enumerate()
            .map(|(i, z)| span(z, n, f, &format!("pencil[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        for (i, z) in members.iter().enumerate() {
            if z.dim != sub.dim + 1 || !contains(z, &sub, f) || !contains(&sup, z, f) {
                return Err(CrossRatioError::NotAPencil(format!(
                    "member {} is not a subspace of dimension {} between Λ and Λ'",
                    i + 1,
                    sub.dim + 1
                )));
            }
        }
        for i in 0..4 {
            for j in i + 1..4 {
                if contains(&members[i], &members[j], f) {
                    return Err(CrossRatioError::Degenerate(format!(
                        "members {} and {} coincide",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }

        // basis of Λ' extending Λ by two vectors u, w
        let mut basis = sub.rows.clone();
        for r in 0..sup.rows.rows() {
            let candidate = basis.stack(&Matrix::from_rows(&[sup.rows.row(r).to_vec()], f));
            if candidate.rank(f) > basis.rows() {
                basis = candidate;
            }
        }
        let coords = basis.transpose();
        let points: Vec<(u64, u64)> = members
            .iter()
            .map(|z| {
                let outside = (0..z.rows.rows())
                    .map(|r| z.rows.row(r).to_vec())
                    .find(|v| {
                        sub.rows
                            .stack(&Matrix::from_rows(std::slice::from_ref(v), f))
                            .rank(f)
                            > sub.dim
                    })
                    .expect("member strictly contains Λ");
                let c = coords.solve(&outside, f).expect("member lies in Λ'");
                (c[sub.dim], c[sub.dim + 1])
            })
            .collect();
        let det = |a: (u64, u64), b: (u64, u64)| f.sub(f.mul(a.0, b.1), f.mul(b.0, a.1));
        let [p1, p2, p3, p4] = [points[0], points[1], points[2], points[3]];
        let num = f.mul(det(p4, p1), det(p3, p2));
        let den = f.mul(det(p4, p2), det(p3, p1));
        Ok(f.mul(num, f.inv(den)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lines(p: u64, pts: [[i64; 2]; 4]) -> Pencil {
        Pencil {
            prime: p,
            common_sub: vec![],
            common_sup: vec![vec![1, 0], vec![0, 1]],
            pencil: pts.map(|v| vec![v.to_vec()]),
        }
    }

    #[test]
    fn normalization() {
        // affine coordinate z = a / b: 0, ∞, 1, λ
        for lambda in [2, 3, 5, 6] {
            assert_eq!(
                lines(7, [[0, 1], [1, 0], [1, 1], [lambda, 1]]).cross_ratio(),
                Ok(lambda as u64)
            );
        }
    }

    #[test]
    fn planes_through_a_line() {
        // Λ = <e1>; quotient coordinates on e2, e3 give 0, ∞, 1, 3
        let p = Pencil {
            prime: 7,
            common_sub: vec![vec![1, 0, 0]],
            common_sup: vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
            pencil: [
                vec![vec![1, 0, 0], vec![2, 0, 1]],
                vec![vec![1, 0, 0], vec![0, 1, 0]],
                vec![vec![1, 1, 1], vec![0, 1, 1]],
                vec![vec![1, 3, 1], vec![5, 3, 1]],
            ],
        };
        assert_eq!(p.cross_ratio(), Ok(3));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            lines(7, [[0, 1], [0, 2], [1, 1], [3, 1]]).cross_ratio(),
            Err(CrossRatioError::Degenerate(_))
        ));
        assert!(matches!(
            lines(8, [[0, 1], [1, 0], [1, 1], [3, 1]]).cross_ratio(),
            Err(CrossRatioError::NotPrime(8))
        ));
        let mut bad = lines(7, [[0, 1], [1, 0], [1, 1], [3, 1]]);
        bad.common_sub = vec![vec![1, 0]];
        assert!(matches!(
            bad.cross_ratio(),
            Err(CrossRatioError::NotAPencil(_))
        ));
        let mut bad = lines(7, [[0, 1], [1, 0], [1, 1], [3, 1]]);
        bad.pencil[3] = vec![vec![1, 0], vec![0, 1]];
        assert!(matches!(
            bad.cross_ratio(),
            Err(CrossRatioError::NotAPencil(_))
        ));
    }
}
