//! Small dense matrices over ℚ(i) with exact Gaussian elimination.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    nrows: usize,
    ncols: usize,
    data: Vec<Scalar>,
}

impl Mat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Mat {
            nrows,
            ncols,
            data: vec![Scalar::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        Ok(Mat {
            nrows,
            ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn at(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.ncols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.ncols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Scalar]> {
        (0..self.nrows).map(|i| self.row(i))
    }

    /// Stack matrices vertically; all must share a column count.
    pub fn vstack(blocks: &[&Mat]) -> Result<Mat> {
        let ncols = blocks.first().map_or(0, |b| b.ncols);
        if blocks.iter().any(|b| b.ncols != ncols) {
            return Err(Error::InvalidInput("vstack with mixed widths".into()));
        }
        let nrows = blocks.iter().map(|b| b.nrows).sum();
        let mut data = Vec::with_capacity(nrows * ncols);
        for b in blocks {
            data.extend(b.data.iter().cloned());
        }
        Ok(Mat { nrows, ncols, data })
    }

    /// Keep the columns in `cols`, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Mat {
        let mut out = Mat::zeros(self.nrows, cols.len());
        for i in 0..self.nrows {
            for (jj, &j) in cols.iter().enumerate() {
                out.set(i, jj, self.at(i, j).clone());
            }
        }
        out
    }

    pub fn mul_mat(&self, other: &Mat) -> Mat {
        assert_eq!(self.ncols, other.nrows, "dimension mismatch");
        let mut out = Mat::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.ncols {
                    let v = &(a * other.at(k, j)) + out.at(i, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.ncols, v.len(), "dimension mismatch");
        self.rows()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = vec![];
        let mut r = 0;
        for c in 0..self.ncols {
            if r == self.nrows {
                break;
            }
            let Some(pr) = (r..self.nrows).find(|&i| !self.at(i, c).is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..self.ncols {
                    let tmp = self.at(pr, j).clone();
                    self.set(pr, j, self.at(r, j).clone());
                    self.set(r, j, tmp);
                }
            }
            let inv = self.at(r, c).inv();
            for j in c..self.ncols {
                let v = self.at(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.nrows {
                if i == r || self.at(i, c).is_zero() {
                    continue;
                }
                let f = self.at(i, c).clone();
                for j in c..self.ncols {
                    let v = self.at(i, j) - &(&f * self.at(r, j));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref_in_place().len()
    }

    pub fn kernel_dim(&self) -> usize {
        self.ncols - self.rank()
    }

    /// One solution of A·x = b with every free variable set to zero
    /// (pivots are the leftmost independent columns); None if inconsistent.
    pub fn solve_general(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(self.nrows, b.len(), "dimension mismatch");
        let mut aug = Mat::zeros(self.nrows, self.ncols + 1);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, self.ncols, b[i].clone());
        }
        let pivots = aug.rref_in_place();
        if pivots.contains(&self.ncols) {
            return None;
        }
        let mut x = vec![Scalar::zero(); self.ncols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.at(r, self.ncols).clone();
        }
        Some(x)
    }

    /// Unique solution of a square invertible system.
    pub fn solve_square(&self, b: &[Scalar]) -> Result<Vec<Scalar>> {
        if self.nrows != self.ncols {
            return Err(Error::SingularMatrix(format!(
                "expected square system, got {}x{}",
                self.nrows, self.ncols
            )));
        }
        if self.rank() != self.ncols {
            return Err(Error::SingularMatrix(format!(
                "rank-deficient {}x{} system",
                self.nrows, self.ncols
            )));
        }
        Ok(self.solve_general(b).expect("full-rank square system"))
    }

    pub fn inverse(&self) -> Result<Mat> {
        if self.nrows != self.ncols {
            return Err(Error::SingularMatrix("inverse of non-square matrix".into()));
        }
        let n = self.nrows;
        let mut aug = Mat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, n + i, Scalar::one());
        }
        let pivots = aug.rref_in_place();
        if pivots.len() != n || pivots.iter().enumerate().any(|(k, &c)| k != c) {
            return Err(Error::SingularMatrix(format!("singular {n}x{n} matrix")));
        }
        let mut out = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, aug.at(i, n + j).clone());
            }
        }
        Ok(out)
    }

    pub fn is_invertible(&self) -> bool {
        self.nrows == self.ncols && self.rank() == self.ncols
    }
}

impl serde::Serialize for Mat {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = ser.serialize_seq(Some(self.nrows))?;
        for i in 0..self.nrows {
            seq.serialize_element(self.row(i))?;
        }
        seq.end()
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.nrows {
            write!(f, "[")?;
            for j in 0..self.ncols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.at(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}
