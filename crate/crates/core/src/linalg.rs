//! Linear systems: rational coefficients with ring-valued right-hand sides, and kernels of
//! matrices over a ring.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::matrix::Mat;
use crate::ring::{DiffRing, El, Rational};

/// Solve `C·z = rhs` where `C` has rational entries and `rhs` lives in `ring`.
///
/// Returns one solution (free unknowns set to zero), or `None` when the system is inconsistent.
pub fn solve_rational(ring: &DiffRing, coeffs: &[Vec<Rational>], rhs: &[El]) -> Option<Vec<El>> {
    let rows = coeffs.len();
    let cols = coeffs.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<Rational>> = coeffs.to_vec();
    let mut b: Vec<El> = rhs.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        b[r] = ring.scale(&b[r], &inv);
        for i in 0..rows {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in 0..cols {
                let t = &f * &a[r][j];
                a[i][j] -= t;
            }
            b[i] = ring.sub(&b[i], &ring.scale(&b[r], &f));
        }
        pivots.push(c);
        r += 1;
    }
    if b[r..].iter().any(|x| !ring.is_zero(x)) {
        return None;
    }
    let mut z = vec![ring.zero(); cols];
    for (k, c) in pivots.into_iter().enumerate() {
        z[c] = b[k].clone();
    }
    Some(z)
}

/// Rank of a rational matrix.
pub fn rational_rank(coeffs: &[Vec<Rational>]) -> usize {
    let mut a = coeffs.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[r][c];
            for j in 0..cols {
                let t = &f * &a[r][j];
                a[i][j] -= t;
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

impl DiffRing {
    /// Generators of `{v : m·v = 0}` obtained by fraction-free elimination, one per free
    /// column. Unit pivots are normalized; otherwise vectors are scaled by pivot products and
    /// then reduced by exact division. The result spans the kernel over the fraction field;
    /// callers decide whether it is a basis over the ring.
    pub fn kernel(&self, m: &Mat) -> Vec<Vec<El>> {
        let rows = m.rows();
        let cols = m.cols();
        let mut a: Vec<Vec<El>> = (0..rows).map(|i| (0..cols).map(|j| m.get(i, j).clone()).collect()).collect();
        let mut pivot_cols: Vec<usize> = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let candidates: Vec<usize> = (r..rows).filter(|&i| !self.is_zero(&a[i][c])).collect();
            if candidates.is_empty() {
                continue;
            }
            let unit = candidates.iter().find_map(|&i| self.inverse(&a[i][c]).map(|inv| (i, inv)));
            let p = match &unit {
                Some((i, _)) => *i,
                None => candidates[0],
            };
            a.swap(r, p);
            if let Some((_, inv)) = unit {
                for x in a[r].iter_mut() {
                    *x = self.mul(x, &inv);
                }
            }
            let pivot = a[r][c].clone();
            for i in 0..rows {
                if i == r || self.is_zero(&a[i][c]) {
                    continue;
                }
                let f = a[i][c].clone();
                for j in 0..cols {
                    // row_i ← pivot·row_i − f·row_r
                    let lhs = self.mul(&pivot, &a[i][j]);
                    a[i][j] = self.sub(&lhs, &self.mul(&f, &a[r][j]));
                }
                reduce_row(self, &mut a[i]);
            }
            pivot_cols.push(c);
            r += 1;
        }
        // later eliminations rescale earlier pivot rows, so read pivots off the final matrix
        let pivots: Vec<(usize, El)> = pivot_cols.iter().enumerate().map(|(k, &c)| (c, a[k][c].clone())).collect();
        let mut out = Vec::new();
        for f in (0..cols).filter(|c| !pivot_cols.contains(c)) {
            // scale so every pivot equation can be solved without division
            let mut scale = self.one();
            for (_, p) in &pivots {
                if self.inverse(p).is_none() {
                    scale = self.mul(&scale, p);
                }
            }
            let mut v = vec![self.zero(); cols];
            v[f] = scale.clone();
            let mut ok = true;
            for (k, (pc, p)) in pivots.iter().enumerate() {
                let rhs = self.neg(&self.mul(&a[k][f], &scale));
                match self.div_exact(&rhs, p) {
                    Some(x) => v[*pc] = x,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            for (_, p) in &pivots {
                while self.inverse(p).is_none() {
                    let divided: Option<Vec<El>> = v.iter().map(|x| self.div_exact(x, p)).collect();
                    match divided {
                        Some(d) if v.iter().any(|x| !self.is_zero(x)) => v = d,
                        _ => break,
                    }
                }
            }
            out.push(v);
        }
        out
    }
}

/// Divide a row by rational content so entries stay small.
fn reduce_row(ring: &DiffRing, row: &mut [El]) {
    let lead = row.iter().find_map(|x| ring.as_rational(x).filter(|q| !q.is_zero()));
    if let Some(q) = lead {
        if !q.is_one() && row.iter().all(|x| ring.is_zero(x) || ring.as_rational(x).is_some()) {
            let inv = q.recip();
            for x in row.iter_mut() {
                *x = ring.scale(x, &inv);
            }
        }
    }
}
