//! Dense matrices over a prime field and exact elimination.

use super::field::Fp;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// Builds from row vectors, reducing entries mod `p`. Panics on ragged
    /// input.
    pub fn from_rows(rows: &[Vec<u64>], f: Fp) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, &x) in r.iter().enumerate() {
                m[(i, j)] = f.reduce(x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix, f: Fp) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out[(i, j)], f.mul(a, other[(k, j)]));
                    out[(i, j)] = v;
                }
            }
        }
        out
    }

    /// Stacks rows of `self` above rows of `other`.
    pub fn stack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "dimension mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Columns `start..end` as a new matrix.
    pub fn columns(&self, start: usize, end: usize) -> Matrix {
        let mut m = Matrix::zeros(self.rows, end - start);
        for i in 0..self.rows {
            for j in start..end {
                m[(i, j - start)] = self[(i, j)];
            }
        }
        m
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Reduces in place to reduced row echelon form, taking as pivot the
    /// first row with a nonzero entry in each column. Returns the pivot
    /// columns.
    pub fn rref(&mut self, f: Fp) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self[(i, c)] != 0) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = f.inv(self[(r, c)]);
            for j in c..self.cols {
                let v = f.mul(self[(r, j)], inv);
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                let factor = self[(i, c)];
                if i == r || factor == 0 {
                    continue;
                }
                for j in c..self.cols {
                    let v = f.sub(self[(i, j)], f.mul(factor, self[(r, j)]));
                    self[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Rank by forward elimination only.
    pub fn rank(&self, f: Fp) -> usize {
        let mut m = self.clone();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m[(i, c)] != 0) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = f.inv(m[(r, c)]);
            let cols = m.cols;
            let (head, tail) = m.data.split_at_mut((r + 1) * cols);
            let pivot_row = &head[r * cols..];
            for row in tail.chunks_mut(cols) {
                let factor = f.mul(row[c], inv);
                if factor == 0 {
                    continue;
                }
                for j in c..cols {
                    row[j] = f.sub(row[j], f.mul(factor, pivot_row[j]));
                }
            }
            r += 1;
        }
        r
    }

    /// A basis of `{x : self · x = 0}`, as the columns of the result.
    pub fn null_space(&self, f: Fp) -> Matrix {
        let mut m = self.clone();
        let pivots = m.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Matrix::zeros(self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            basis[(fc, k)] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                basis[(pc, k)] = f.neg(m[(i, fc)]);
            }
        }
        basis
    }

    /// Solves `self · x = b` for one column `b`, if consistent.
    pub fn solve(&self, b: &[u64], f: Fp) -> Option<Vec<u64>> {
        assert_eq!(b.len(), self.rows, "dimension mismatch");
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)];
            }
            aug[(i, self.cols)] = f.reduce(b[i]);
        }
        let pivots = aug.rref(f);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0; self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = aug[(i, self.cols)];
        }
        Some(x)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = u64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &u64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut u64 {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> Fp {
        Fp::new(7).unwrap()
    }

    #[test]
    fn rank_and_rref() {
        let f = f7();
        let m = Matrix::from_rows(&[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]], f);
        assert_eq!(m.rank(f), 2);
        let mut r = m.clone();
        assert_eq!(r.rref(f), vec![0, 1]);
        assert_eq!(r.row(0), &[1, 0, 1]);
        assert_eq!(r.row(1), &[0, 1, 1]);
        assert_eq!(Matrix::identity(4).rank(f), 4);
        assert_eq!(Matrix::zeros(3, 2).rank(f), 0);
    }

    #[test]
    fn null_space_annihilates() {
        let f = f7();
        let m = Matrix::from_rows(&[vec![1, 2, 3, 4], vec![0, 1, 5, 6]], f);
        let n = m.null_space(f);
        assert_eq!(n.cols(), 2);
        assert_eq!(m.mul(&n, f), Matrix::zeros(2, 2));
        assert_eq!(n.rank(f), 2);
    }

    #[test]
    fn solving() {
        let f = f7();
        let m = Matrix::from_rows(&[vec![1, 1], vec![1, 6]], f);
        let x = m.solve(&[3, 1], f).unwrap();
        assert_eq!(
            m.mul(&Matrix::from_rows(&[vec![x[0]], vec![x[1]]], f), f)
                .to_rows(),
            vec![vec![3], vec![1]]
        );
        let singular = Matrix::from_rows(&[vec![1, 1], vec![2, 2]], f);
        assert_eq!(singular.solve(&[1, 1], f), None);
    }
}
