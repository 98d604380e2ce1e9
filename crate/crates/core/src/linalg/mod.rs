//! Small dense complex linear algebra (dimension at most 8).
//!
//! Eigenvalues go through the characteristic polynomial and a simultaneous
//! root iteration; they are then polished and certified against the matrix
//! itself, so the quality of the polynomial coefficients only affects the
//! starting point.

mod eigen;
mod expm;
mod poly;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

pub use eigen::{certify_eigenvalue, eigenvalues, match_multisets};
pub use expm::expm;
pub use poly::{char_poly, poly_roots, PolyCoeffs};

/// Largest supported dimension.
pub const MAX_DIM: usize = 8;

/// Pivot threshold of [`solve_linear`], relative to the largest entry.
pub const SINGULAR_REL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is singular to working precision (pivot {pivot:e} at column {column})")]
    Singular { column: usize, pivot: f64 },
    #[error("root iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        best: Vec<Complex64>,
    },
    #[error("matrix exponential overflowed")]
    Overflow,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite entry in input")]
    NonFinite,
}

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format!("{:.6e}", self[(i, j)])).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&n), "dimension {n} outside 1..={MAX_DIM}");
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self, LinalgError> {
        let n = rows.len();
        if n == 0 || n > MAX_DIM {
            return Err(LinalgError::Dimension(format!("{n} rows")));
        }
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(LinalgError::Dimension(format!("row {i} has {} entries", row.len())));
            }
            for (j, v) in row.iter().enumerate() {
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(LinalgError::NonFinite);
                }
                m[(i, j)] = *v;
            }
        }
        Ok(m)
    }

    pub fn from_real(rows: &[&[f64]]) -> Result<Self, LinalgError> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|v| v * s).collect() }
    }

    /// `self - shift * I`.
    pub fn shifted(&self, shift: Complex64) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)] -= shift;
        }
        m
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    /// Determinant via partial-pivot LU; exact zero for an exactly singular matrix.
    pub fn det(&self) -> Complex64 {
        let lu = Lu::factor(self);
        lu.det()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n);
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n);
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Packed LU factors with row permutation.
pub(crate) struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    /// Partial-pivot factorization; never fails, zero pivots are kept as-is.
    pub(crate) fn factor(m: &ComplexMatrix) -> Self {
        let n = m.n;
        let mut lu = m.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for col in 0..n {
            let (p, _) = (col..n)
                .map(|r| (r, lu[r * n + col].norm()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if p != col {
                for j in 0..n {
                    lu.swap(col * n + j, p * n + j);
                }
                perm.swap(col, p);
                swaps += 1;
            }
            let pivot = lu[col * n + col];
            if pivot == Complex64::new(0.0, 0.0) {
                continue;
            }
            for r in (col + 1)..n {
                let factor = lu[r * n + col] / pivot;
                lu[r * n + col] = factor;
                for j in (col + 1)..n {
                    let u = lu[col * n + j];
                    lu[r * n + j] -= factor * u;
                }
            }
        }
        Self { n, lu, perm, swaps }
    }

    pub(crate) fn pivots(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.n).map(move |i| self.lu[i * self.n + i])
    }

    /// Replaces pivots smaller than `floor` in magnitude by `floor`.
    pub(crate) fn floor_pivots(&mut self, floor: f64) {
        for i in 0..self.n {
            let p = &mut self.lu[i * self.n + i];
            if p.norm() < floor {
                *p = Complex64::new(floor, 0.0);
            }
        }
    }

    pub(crate) fn det(&self) -> Complex64 {
        let mut det: Complex64 = self.pivots().product();
        if self.swaps % 2 == 1 {
            det = -det;
        }
        det
    }

    pub(crate) fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[i * n + j];
                x[i] = x[i] - l * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let u = self.lu[i * n + j];
                x[i] = x[i] - u * x[j];
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }

    /// Trace of the inverse, i.e. `sum_i (A^{-1})_{ii}`.
    pub(crate) fn trace_of_inverse(&self) -> Complex64 {
        let n = self.n;
        let mut total = Complex64::new(0.0, 0.0);
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            e.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            e[i] = Complex64::new(1.0, 0.0);
            total += self.solve(&e)[i];
        }
        total
    }
}

/// Solves `m x = rhs` by Gaussian elimination with partial pivoting.
///
/// Fails with [`LinalgError::Singular`] when a pivot falls below
/// `1e-14` times the largest entry of `m`.
pub fn solve_linear(m: &ComplexMatrix, rhs: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
    if rhs.len() != m.n {
        return Err(LinalgError::Dimension(format!(
            "rhs has {} entries, matrix is {}x{}",
            rhs.len(),
            m.n,
            m.n
        )));
    }
    if !m.is_finite() || rhs.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(LinalgError::NonFinite);
    }
    let lu = Lu::factor(m);
    let threshold = SINGULAR_REL * m.max_abs();
    for (column, p) in lu.pivots().enumerate() {
        if p.norm() <= threshold || p.norm() == 0.0 {
            return Err(LinalgError::Singular { column, pivot: p.norm() });
        }
    }
    Ok(lu.solve(rhs))
}
