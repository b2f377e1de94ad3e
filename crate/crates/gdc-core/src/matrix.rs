//! Dense complex matrices for representation backends.
//!
//! Sizes here are tiny (at most 16×16), so plain Gaussian elimination with
//! partial pivoting covers inversion and nullspace extraction; decompositions
//! that need more care (SVD, eigenvalues) are delegated to nalgebra at the
//! call sites that need them.

use crate::error::{Error, Result};
use crate::scalar::{AdScalar, Scalar};
use num_complex::Complex64;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    a: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            a: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut a = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            a.extend_from_slice(row);
        }
        CMat { rows: r, cols: c, a }
    }

    /// Real entries convenience constructor.
    pub fn from_rows_re(rows: &[Vec<f64>]) -> Self {
        let converted: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|row| row.iter().map(|&v| Complex64::new(v, 0.0)).collect())
            .collect();
        CMat::from_rows(&converted)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.a[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.a
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            a: self.a.iter().zip(&other.a).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            a: self.a.iter().map(|x| x * s).collect(),
        }
    }

    pub fn neg(&self) -> CMat {
        self.scale(-Complex64::ONE)
    }

    pub fn transpose(&self) -> CMat {
        let mut out = CMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn conj(&self) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            a: self.a.iter().map(|x| x.conj()).collect(),
        }
    }

    pub fn adjoint(&self) -> CMat {
        self.transpose().conj()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Kronecker product self ⊗ other.
    pub fn kron(&self, other: &CMat) -> CMat {
        let mut out = CMat::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let s = self.get(i, j);
                if s == Complex64::ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, s * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag_abs(&self) -> f64 {
        self.a.iter().map(|x| x.im.abs()).fold(0.0, f64::max)
    }

    /// Matrix-vector product with plain complex entries.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Matrix-vector product against derivative-carrying (or other lifted)
    /// scalars: the matrix entries enter as constants.
    pub fn apply_generic<T: AdScalar>(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for j in 0..self.cols {
                    let e = self.get(i, j);
                    if e == Complex64::ZERO {
                        continue;
                    }
                    acc = acc.add(&T::from_c(e).mul(&v[j]));
                }
                acc
            })
            .collect()
    }

    /// Row-vector times matrix with lifted scalars (used for dual spinors).
    pub fn apply_left_generic<T: AdScalar>(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols)
            .map(|j| {
                let mut acc = T::zero();
                for i in 0..self.rows {
                    let e = self.get(i, j);
                    if e == Complex64::ZERO {
                        continue;
                    }
                    acc = acc.add(&v[i].mul(&T::from_c(e)));
                }
                acc
            })
            .collect()
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<CMat> {
        assert_eq!(self.rows, self.cols, "inverse of square matrix only");
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = CMat::identity(n);
        let scale = self.max_abs().max(1.0);
        for col in 0..n {
            let (pivot_row, pivot_mag) = (col..n)
                .map(|r| (r, m.get(r, col).norm()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty pivot range");
            if pivot_mag < 1e-12 * scale {
                return Err(Error::SingularMatrix { pivot: pivot_mag });
            }
            if pivot_row != col {
                m.swap_rows(pivot_row, col);
                inv.swap_rows(pivot_row, col);
            }
            let p = m.get(col, col);
            for j in 0..n {
                m.set(col, j, m.get(col, j) / p);
                inv.set(col, j, inv.get(col, j) / p);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = m.get(r, col);
                if f == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    let mv = m.get(r, j) - f * m.get(col, j);
                    m.set(r, j, mv);
                    let iv = inv.get(r, j) - f * inv.get(col, j);
                    inv.set(r, j, iv);
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.a.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Orthonormal-free nullspace basis via row echelon reduction; the
    /// tolerance is relative to the largest entry.
    pub fn nullspace(&self, rel_tol: f64) -> Vec<Vec<Complex64>> {
        let mut m = self.clone();
        let rows = m.rows;
        let cols = m.cols;
        let scale = m.max_abs().max(1.0);
        let tol = rel_tol * scale;
        let mut pivot_cols: Vec<usize> = Vec::new();
        let mut row = 0usize;
        for col in 0..cols {
            let (pivot_row, pivot_mag) = match (row..rows)
                .map(|r| (r, m.get(r, col).norm()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
            {
                Some(p) => p,
                None => break,
            };
            if pivot_mag <= tol {
                continue;
            }
            m.swap_rows(pivot_row, row);
            let p = m.get(row, col);
            for j in 0..cols {
                m.set(row, j, m.get(row, j) / p);
            }
            for r in 0..rows {
                if r == row {
                    continue;
                }
                let f = m.get(r, col);
                if f == Complex64::ZERO {
                    continue;
                }
                for j in 0..cols {
                    let v = m.get(r, j) - f * m.get(row, j);
                    m.set(r, j, v);
                }
            }
            pivot_cols.push(col);
            row += 1;
            if row == rows {
                break;
            }
        }
        let pivot_set: std::collections::BTreeSet<usize> = pivot_cols.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![Complex64::ZERO; cols];
            v[free] = Complex64::ONE;
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -m.get(r, free);
            }
            basis.push(v);
        }
        basis
    }

    /// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
    ///
    /// Returns the real eigenvalues in ascending order paired with their
    /// orthonormal eigenvectors. The input must be square and Hermitian to
    /// roundoff; only its Hermitian part influences the result.
    pub fn hermitian_eigen(&self) -> Result<Vec<(f64, Vec<Complex64>)>> {
        if self.rows != self.cols {
            return Err(Error::Internal(format!(
                "hermitian_eigen needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut h = self.clone();
        let mut v = CMat::identity(n);
        let scale = h.max_abs().max(1.0);
        for _sweep in 0..60 {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off.max(h.get(p, q).norm());
                }
            }
            if off < 1e-15 * scale {
                let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..n)
                    .map(|j| (h.get(j, j).re, (0..n).map(|i| v.get(i, j)).collect()))
                    .collect();
                pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                return Ok(pairs);
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = h.get(p, q);
                    if apq.norm() < 1e-18 * scale {
                        continue;
                    }
                    let app = h.get(p, p).re;
                    let aqq = h.get(q, q).re;
                    let phase = apq / apq.norm();
                    let tau = (aqq - app) / (2.0 * apq.norm());
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // Rotation J: J[p][p] = J[q][q] = c, J[p][q] = s·phase,
                    // J[q][p] = −s·conj(phase); update H ← Jᴴ H J, V ← V J.
                    for i in 0..n {
                        let hip = h.get(i, p);
                        let hiq = h.get(i, q);
                        h.set(i, p, hip * c - hiq * s * phase.conj());
                        h.set(i, q, hip * s * phase + hiq * c);
                        let vip = v.get(i, p);
                        let viq = v.get(i, q);
                        v.set(i, p, vip * c - viq * s * phase.conj());
                        v.set(i, q, vip * s * phase + viq * c);
                    }
                    for j in 0..n {
                        let hpj = h.get(p, j);
                        let hqj = h.get(q, j);
                        h.set(p, j, hpj * c - hqj * s * phase);
                        h.set(q, j, hpj * s * phase.conj() + hqj * c);
                    }
                }
            }
        }
        Err(Error::Internal(
            "Jacobi eigen-iteration failed to converge in 60 sweeps".into(),
        ))
    }

    /// Singular values (ascending) and right singular vectors of `self`,
    /// from the eigen-decomposition of selfᴴ·self.
    pub fn singular_triples(&self) -> Result<Vec<(f64, Vec<Complex64>)>> {
        let gram = self.adjoint().matmul(self);
        let eig = gram.hermitian_eigen()?;
        Ok(eig
            .into_iter()
            .map(|(lam, vec)| (lam.max(0.0).sqrt(), vec))
            .collect())
    }
}

/// Frobenius distance between two matrices.
pub fn frobenius_distance(a: &CMat, b: &CMat) -> f64 {
    a.sub(b).a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Max-norm of a complex vector understood through any lifted scalar.
pub fn vec_max_abs<T: AdScalar>(v: &[T]) -> f64 {
    v.iter().map(|x| x.abs_val()).fold(0.0, f64::max)
}

/// Subtract vectors of lifted scalars.
pub fn vec_sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

/// Add vectors of lifted scalars.
pub fn vec_add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

/// Scale a vector of lifted scalars.
pub fn vec_scale<T: Scalar>(a: &[T], s: &T) -> Vec<T> {
    a.iter().map(|x| x.mul(s)).collect()
}
