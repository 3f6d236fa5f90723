//! Dense matrices over a [`DiffRing`].

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ring::{DiffRing, El, Val};

/// Row-major dense matrix. Like [`El`], a matrix does not know its ring.
#[derive(Clone, Debug)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<El>,
}

impl Mat {
    pub fn new(rows: usize, cols: usize, data: Vec<El>) -> Result<Mat> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(alloc::format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> El>(rows: usize, cols: usize, mut f: F) -> Mat {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Build from nested rows; all rows must have the same length.
    pub fn from_rows(rows: Vec<Vec<El>>) -> Result<Mat> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Mat::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &El {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: El) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[El] {
        &self.data
    }

    pub fn map<F: FnMut(&El) -> El>(&self, f: F) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn column(&self, j: usize) -> Vec<El> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn from_columns(cols: &[Vec<El>]) -> Result<Mat> {
        let c = cols.len();
        let r = cols.first().map_or(0, |x| x.len());
        if cols.iter().any(|x| x.len() != r) {
            return Err(Error::ShapeMismatch("ragged columns".into()));
        }
        Ok(Mat::from_fn(r, c, |i, j| cols[j][i].clone()))
    }

    fn vals(&self) -> Vec<Vec<Val>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).0.clone()).collect()).collect()
    }
}

impl DiffRing {
    pub fn mat_zero(&self, rows: usize, cols: usize) -> Mat {
        Mat::from_fn(rows, cols, |_, _| self.zero())
    }

    pub fn mat_identity(&self, n: usize) -> Mat {
        Mat::from_fn(n, n, |i, j| if i == j { self.one() } else { self.zero() })
    }

    /// Matrix unit `E_{ij}` (0-based).
    pub fn mat_unit(&self, n: usize, i: usize, j: usize) -> Mat {
        Mat::from_fn(n, n, |a, b| if a == i && b == j { self.one() } else { self.zero() })
    }

    pub fn mat_scalar(&self, n: usize, c: &El) -> Mat {
        Mat::from_fn(n, n, |i, j| if i == j { c.clone() } else { self.zero() })
    }

    pub fn mat_diag(&self, entries: &[El]) -> Mat {
        let n = entries.len();
        Mat::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { self.zero() })
    }

    fn same_shape(a: &Mat, b: &Mat) -> Result<()> {
        if a.rows != b.rows || a.cols != b.cols {
            return Err(Error::ShapeMismatch(alloc::format!(
                "{}x{} vs {}x{}",
                a.rows,
                a.cols,
                b.rows,
                b.cols
            )));
        }
        Ok(())
    }

    pub fn mat_add(&self, a: &Mat, b: &Mat) -> Result<Mat> {
        DiffRing::same_shape(a, b)?;
        Ok(Mat::from_fn(a.rows, a.cols, |i, j| self.add(a.get(i, j), b.get(i, j))))
    }

    pub fn mat_sub(&self, a: &Mat, b: &Mat) -> Result<Mat> {
        DiffRing::same_shape(a, b)?;
        Ok(Mat::from_fn(a.rows, a.cols, |i, j| self.sub(a.get(i, j), b.get(i, j))))
    }

    pub fn mat_neg(&self, a: &Mat) -> Mat {
        a.map(|x| self.neg(x))
    }

    pub fn mat_scale(&self, a: &Mat, c: &El) -> Mat {
        a.map(|x| self.mul(c, x))
    }

    pub fn mat_mul(&self, a: &Mat, b: &Mat) -> Result<Mat> {
        if a.cols != b.rows {
            return Err(Error::ShapeMismatch(alloc::format!(
                "cannot multiply {}x{} by {}x{}",
                a.rows,
                a.cols,
                b.rows,
                b.cols
            )));
        }
        Ok(Mat::from_fn(a.rows, b.cols, |i, j| {
            let mut acc = self.zero();
            for k in 0..a.cols {
                let (x, y) = (a.get(i, k), b.get(k, j));
                if self.is_zero(x) || self.is_zero(y) {
                    continue;
                }
                acc = self.add(&acc, &self.mul(x, y));
            }
            acc
        }))
    }

    /// Product of a chain of matrices.
    pub fn mat_product(&self, factors: &[&Mat]) -> Result<Mat> {
        let mut it = factors.iter();
        let first = it.next().ok_or_else(|| Error::ShapeMismatch("empty product".into()))?;
        it.try_fold((*first).clone(), |acc, m| self.mat_mul(&acc, m))
    }

    pub fn mat_vec(&self, a: &Mat, v: &[El]) -> Result<Vec<El>> {
        let col = Mat::from_columns(&[v.to_vec()])?;
        Ok(self.mat_mul(a, &col)?.data)
    }

    /// Entrywise derivative.
    pub fn mat_d(&self, a: &Mat) -> Mat {
        a.map(|x| self.d(x))
    }

    pub fn mat_is_zero(&self, a: &Mat) -> bool {
        a.data.iter().all(|x| self.is_zero(x))
    }

    pub fn mat_eq(&self, a: &Mat, b: &Mat) -> bool {
        a.rows == b.rows && a.cols == b.cols && a.data.iter().zip(&b.data).all(|(x, y)| self.eq(x, y))
    }

    pub fn trace(&self, a: &Mat) -> El {
        self.sum((0..a.rows.min(a.cols)).map(|i| a.get(i, i)).collect::<Vec<_>>())
    }

    /// `[a, b] = ab - ba`.
    pub fn commutator(&self, a: &Mat, b: &Mat) -> Result<Mat> {
        self.mat_sub(&self.mat_mul(a, b)?, &self.mat_mul(b, a)?)
    }

    /// Kronecker product with `(a ⊗ b)[(i,k),(j,l)] = a[i,j]·b[k,l]`.
    pub fn kron(&self, a: &Mat, b: &Mat) -> Mat {
        Mat::from_fn(a.rows * b.rows, a.cols * b.cols, |r, c| {
            let (i, k) = (r / b.rows, r % b.rows);
            let (j, l) = (c / b.cols, c % b.cols);
            self.mul(a.get(i, j), b.get(k, l))
        })
    }

    /// The scalar `c` if `a = c·I`.
    pub fn scalar_of(&self, a: &Mat) -> Option<El> {
        if !a.is_square() || a.rows == 0 {
            return None;
        }
        let c = a.get(0, 0).clone();
        for i in 0..a.rows {
            for j in 0..a.cols {
                let ok = if i == j { self.eq(a.get(i, j), &c) } else { self.is_zero(a.get(i, j)) };
                if !ok {
                    return None;
                }
            }
        }
        Some(c)
    }

    pub fn det(&self, a: &Mat) -> Result<El> {
        if !a.is_square() {
            return Err(Error::ShapeMismatch("determinant of a non-square matrix".into()));
        }
        Ok(El(self.det_v(&a.vals())))
    }

    pub fn adjugate(&self, a: &Mat) -> Result<Mat> {
        if !a.is_square() {
            return Err(Error::ShapeMismatch("adjugate of a non-square matrix".into()));
        }
        let n = a.rows;
        if n == 1 {
            return Ok(self.mat_identity(1));
        }
        let v = a.vals();
        Ok(Mat::from_fn(n, n, |i, j| {
            // adj[i][j] = (-1)^{i+j} det(minor without row j, column i)
            let minor: Vec<Vec<Val>> = v
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != j)
                .map(|(_, row)| row.iter().enumerate().filter(|(c, _)| *c != i).map(|(_, x)| x.clone()).collect())
                .collect();
            let d = El(self.det_v(&minor));
            if (i + j) % 2 == 0 {
                d
            } else {
                self.neg(&d)
            }
        }))
    }

    /// Inverse over the ring, if the determinant is a unit.
    pub fn mat_inverse(&self, a: &Mat) -> Result<Mat> {
        if !a.is_square() {
            return Err(Error::ShapeMismatch("inverse of a non-square matrix".into()));
        }
        if let Some(inv) = self.gauss_jordan_inverse(a) {
            return Ok(inv);
        }
        let det = self.det(a)?;
        let inv_det = self.inverse(&det).ok_or(Error::NotInvertible)?;
        let adj = self.adjugate(a)?;
        Ok(self.mat_scale(&adj, &inv_det))
    }

    /// Elimination using only unit pivots; `None` when no unit pivot is available at some step.
    fn gauss_jordan_inverse(&self, a: &Mat) -> Option<Mat> {
        let n = a.rows;
        let mut m = a.clone();
        let mut inv = self.mat_identity(n);
        for col in 0..n {
            let (row, pinv) = (col..n).find_map(|r| {
                let x = m.get(r, col);
                if self.is_zero(x) {
                    None
                } else {
                    self.inverse(x).map(|i| (r, i))
                }
            })?;
            if row != col {
                for j in 0..n {
                    m.data.swap(row * n + j, col * n + j);
                    inv.data.swap(row * n + j, col * n + j);
                }
            }
            for j in 0..n {
                let x = self.mul(m.get(col, j), &pinv);
                m.set(col, j, x);
                let y = self.mul(inv.get(col, j), &pinv);
                inv.set(col, j, y);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = m.get(r, col).clone();
                if self.is_zero(&f) {
                    continue;
                }
                for j in 0..n {
                    let x = self.sub(m.get(r, j), &self.mul(&f, m.get(col, j)));
                    m.set(r, j, x);
                    let y = self.sub(inv.get(r, j), &self.mul(&f, inv.get(col, j)));
                    inv.set(r, j, y);
                }
            }
        }
        Some(inv)
    }

    /// Whether the matrix is invertible over the ring.
    pub fn is_invertible(&self, a: &Mat) -> bool {
        a.is_square() && self.mat_inverse(a).is_ok()
    }

    pub fn mat_parse<S: AsRef<str>>(&self, rows: &[Vec<S>]) -> Result<Mat> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|e| self.parse(e.as_ref())).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Mat::from_rows(parsed)
    }

    pub fn mat_format(&self, a: &Mat) -> Vec<Vec<String>> {
        (0..a.rows).map(|i| (0..a.cols).map(|j| self.format(a.get(i, j))).collect()).collect()
    }

    /// Image of a matrix over an ancestor ring.
    pub fn mat_embed(&self, from: &DiffRing, a: &Mat) -> Result<Mat> {
        let data = a.data.iter().map(|x| self.embed(from, x)).collect::<Result<Vec<_>>>()?;
        Mat::new(a.rows, a.cols, data)
    }
}
