//! Exact rational linear algebra.
//!
//! Ranks and determinants go through fraction-free Bareiss elimination on
//! denominator-cleared integer matrices; kernels and solves use rational
//! row reduction. Both paths are exact.

use num::{BigInt, BigRational, One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl QMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        QMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Rank by fraction-free (Bareiss) elimination on the integer matrix
    /// obtained by clearing denominators row by row.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| clear_row(self.row(i)))
            .collect();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        let mut prev = BigInt::one();
        for col in 0..cols {
            let Some(pivot) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, pivot);
            for r in rank + 1..rows {
                for c in col + 1..cols {
                    let num = &m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c];
                    debug_assert!((&num % &prev).is_zero(), "Bareiss divisibility");
                    m[r][c] = num / &prev;
                }
                m[r][col] = BigInt::zero();
            }
            prev = m[rank][col].clone();
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }

    /// Reduced row echelon form; returns the pivot column of each pivot row.
    pub fn rref(mut self) -> (QMatrix, Vec<usize>) {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            let Some(p) = (row..self.rows).find(|&r| !self.at(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(row, p);
            let inv = self.at(row, col).recip();
            for j in col..self.cols {
                let v = self.at(row, j) * &inv;
                self.set(row, j, v);
            }
            for r in 0..self.rows {
                if r == row || self.at(r, col).is_zero() {
                    continue;
                }
                let factor = self.at(r, col).clone();
                for j in col..self.cols {
                    let v = self.at(r, j) - self.at(row, j) * &factor;
                    self.set(r, j, v);
                }
            }
            pivots.push(col);
            row += 1;
            if row == self.rows {
                break;
            }
        }
        (self, pivots)
    }

    /// A basis of the right kernel.
    pub fn kernel_basis(&self) -> Vec<Vec<BigRational>> {
        let (r, pivots) = self.clone().rref();
        let mut out = Vec::new();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        for free in (0..self.cols).filter(|c| !pivot_set.contains(c)) {
            let mut v = vec![BigRational::zero(); self.cols];
            v[free] = BigRational::one();
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = -r.at(prow, free).clone();
            }
            out.push(v);
        }
        out
    }

    /// One exact solution of `A x = b`, if consistent.
    pub fn solve(&self, b: &[BigRational]) -> Option<Vec<BigRational>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = QMatrix::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // inconsistent: pivot in the augmented column
        }
        let mut x = vec![BigRational::zero(); self.cols];
        for (prow, &pcol) in pivots.iter().enumerate() {
            x[pcol] = r.at(prow, self.cols).clone();
        }
        Some(x)
    }

    /// Determinant of a square matrix, by Bareiss on the cleared integer
    /// matrix with the scale factored back in.
    pub fn determinant(&self) -> BigRational {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigRational::one();
        }
        let mut scale = BigRational::one();
        let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for i in 0..n {
            let (ints, denom) = clear_row_with_denominator(self.row(i));
            scale *= BigRational::new(BigInt::one(), denom);
            m.push(ints);
        }
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
                return BigRational::zero();
            };
            if p != col {
                m.swap(col, p);
                sign = -sign;
            }
            for r in col + 1..n {
                for c in col + 1..n {
                    let num = &m[col][col] * &m[r][c] - &m[r][col] * &m[col][c];
                    m[r][c] = num / &prev;
                }
                m[r][col] = BigInt::zero();
            }
            prev = m[col][col].clone();
        }
        scale * BigRational::from_integer(sign * m[n - 1][n - 1].clone())
    }
}

fn clear_row(row: &[BigRational]) -> Vec<BigInt> {
    clear_row_with_denominator(row).0
}

fn clear_row_with_denominator(row: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let mut lcm = BigInt::one();
    for v in row {
        lcm = num::integer::lcm(lcm, v.denom().clone());
    }
    (
        row.iter().map(|v| v.numer() * (&lcm / v.denom())).collect(),
        lcm,
    )
}

/// Exact rank of an integer matrix.
pub fn int_rank(rows: &[Vec<BigInt>]) -> usize {
    QMatrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|v| BigRational::from_integer(v.clone())).collect())
            .collect(),
    )
    .rank()
}

pub fn qr(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| qr(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_examples() {
        assert_eq!(mat(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(mat(&[&[1, 0], &[0, 1]]).rank(), 2);
        assert_eq!(mat(&[&[0, 0], &[0, 0]]).rank(), 0);
        assert_eq!(mat(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]).rank(), 2);
    }

    #[test]
    fn rank_agrees_with_rref() {
        let samples = [
            mat(&[&[2, 4, 1], &[1, 2, 0], &[3, 6, 1]]),
            mat(&[&[1, 1, 1, 1], &[1, 2, 3, 4]]),
            mat(&[&[5]]),
        ];
        for m in samples {
            let (_, pivots) = m.clone().rref();
            assert_eq!(m.rank(), pivots.len());
        }
    }

    #[test]
    fn solve_and_kernel() {
        let a = mat(&[&[1, 2], &[3, 4]]);
        let x = a.solve(&[qr(5), qr(11)]).unwrap();
        assert_eq!(x, vec![qr(1), qr(2)]);

        let singular = mat(&[&[1, 2], &[2, 4]]);
        assert!(singular.solve(&[qr(1), qr(3)]).is_none());
        let k = singular.kernel_basis();
        assert_eq!(k.len(), 1);
        // kernel vector satisfies x + 2y = 0
        assert_eq!(&k[0][0] + &k[0][1] * qr(2), BigRational::zero());
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(mat(&[&[2, 0], &[0, 3]]).determinant(), qr(6));
        assert_eq!(mat(&[&[1, 2], &[3, 4]]).determinant(), qr(-2));
        assert_eq!(mat(&[&[1, 2], &[2, 4]]).determinant(), qr(0));
        // 4x4 standard symplectic form has determinant 1
        let omega = mat(&[
            &[0, 0, 1, 0],
            &[0, 0, 0, 1],
            &[-1, 0, 0, 0],
            &[0, -1, 0, 0],
        ]);
        assert_eq!(omega.determinant(), qr(1));
    }
}
