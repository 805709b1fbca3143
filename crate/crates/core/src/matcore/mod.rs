//! Dense complex linear algebra kernel.
//!
//! Everything in the crate moves through [`ComplexMatrix`], a dense row-major
//! complex matrix. The kernel stays deliberately small: arithmetic, adjoints,
//! LU solves with a 1-norm condition estimate, a Padé matrix exponential and
//! Hermitian eigenvalues via tridiagonalisation + QL. All matrices in scope
//! are tiny (typical sizes 1..=8), so nothing here is blocked or parallel.

mod eig;
mod expm;
mod solve;

pub use eig::hermitian_eigenvalues;
pub use expm::expm;
pub use solve::{solve, solve_with_cond};

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

/// Dense complex matrix, row-major, 64-bit components.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

/// Shorthand for a complex scalar with zero imaginary part.
#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Shorthand for a general complex scalar.
#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::default(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = re(1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    /// Build from nested rows; panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            entries: rows.iter().flatten().copied().collect(),
        }
    }

    /// Build from real nested rows (imaginary parts zero).
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let r: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| re(x)).collect())
            .collect();
        Self::from_rows(&r)
    }

    /// Column vector from a slice.
    pub fn col_vector(v: &[Complex64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            entries: v.to_vec(),
        }
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
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

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&e| e * z).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// 1-norm: maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Contiguous block starting at (row, col) of the given shape.
    pub fn block(&self, row: usize, col: usize, rows: usize, cols: usize) -> Self {
        assert!(row + rows <= self.rows && col + cols <= self.cols, "block out of range");
        Self::from_fn(rows, cols, |i, j| self[(row + i, col + j)])
    }

    pub fn column(&self, j: usize) -> Self {
        self.block(0, j, self.rows, 1)
    }

    pub fn set_block(&mut self, row: usize, col: usize, m: &ComplexMatrix) {
        assert!(row + m.rows <= self.rows && col + m.cols <= self.cols, "block out of range");
        for i in 0..m.rows {
            for j in 0..m.cols {
                self[(row + i, col + j)] = m[(i, j)];
            }
        }
    }

    /// Columns of `self` followed by columns of `other`.
    pub fn hstack(&self, other: &ComplexMatrix) -> Self {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        m.set_block(0, 0, self);
        m.set_block(0, self.cols, other);
        m
    }

    /// Checks squareness, returning a dimension error naming `op`.
    pub fn require_square(&self, op: &'static str) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::Dimension {
                op,
                expected: "square matrix".into(),
                got: format!("{}x{}", self.rows, self.cols),
            })
        }
    }

    /// Checks an exact shape, returning a dimension error naming `op`.
    pub fn require_shape(&self, rows: usize, cols: usize, op: &'static str) -> Result<()> {
        if self.rows == rows && self.cols == cols {
            Ok(())
        } else {
            Err(Error::Dimension {
                op,
                expected: format!("{rows}x{cols}"),
                got: format!("{}x{}", self.rows, self.cols),
            })
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "sub shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(re(-1.0))
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "mul shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::default() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Hermiticity test: `|M - M*| <= tol * (1 + |M|)` in the Frobenius norm.
pub fn is_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let dev = (m - &m.adjoint()).norm_fro();
    dev <= tol * (1.0 + m.norm_fro())
}

/// Nonnegative-definiteness test: Hermitian and min eigenvalue above
/// `-tol * (1 + |M|)`. Eigenvalues come from the tridiagonalisation + QL
/// path in [`hermitian_eigenvalues`]; the Hermitian part of `M` is used.
pub fn is_nonneg_definite(m: &ComplexMatrix, tol: f64) -> bool {
    if !is_hermitian(m, tol) {
        return false;
    }
    let eigs = match hermitian_eigenvalues(m) {
        Ok(e) => e,
        Err(_) => return false,
    };
    let floor = -tol * (1.0 + m.norm_fro());
    eigs.first().map_or(true, |&min| min >= floor)
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    let eigs = hermitian_eigenvalues(m)?;
    Ok(eigs.first().copied().unwrap_or(0.0))
}

/// Largest eigenvalue of the Hermitian part of `m`.
pub fn max_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    let eigs = hermitian_eigenvalues(m)?;
    Ok(eigs.last().copied().unwrap_or(0.0))
}

/// Determinant via LU factorisation.
pub fn determinant(m: &ComplexMatrix) -> Result<Complex64> {
    m.require_square("determinant")?;
    solve::lu_determinant(m)
}
