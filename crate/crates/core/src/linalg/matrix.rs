//! Dense complex matrices in row-major order.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut, Mul};

use num_complex::Complex;
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Double-precision complex scalar.
pub type C64 = Complex<f64>;

/// Dense complex matrix, row-major. Column vectors are `d×1` matrices.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Build from nested rows; panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let nr = rows.len();
        let nc = if nr == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(nr * nc);
        for row in rows {
            assert_eq!(row.len(), nc, "ragged rows");
            data.extend_from_slice(row);
        }
        Self { rows: nr, cols: nc, data }
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    /// Column vector from components.
    pub fn column_vector(entries: &[C64]) -> Self {
        Self { rows: entries.len(), cols: 1, data: entries.to_vec() }
    }

    /// Standard basis column `e_i` in dimension `dim`.
    pub fn basis_vector(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim, 1);
        v[(i, 0)] = C64::new(1.0, 0.0);
        v
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

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn column(&self, c: usize) -> Self {
        let mut v = Self::zeros(self.rows, 1);
        for r in 0..self.rows {
            v[(r, 0)] = self[(r, c)];
        }
        v
    }

    pub fn set_column(&mut self, c: usize, v: &Self) {
        assert_eq!(v.rows, self.rows);
        assert_eq!(v.cols, 1);
        for r in 0..self.rows {
            self[(r, c)] = v[(r, 0)];
        }
    }

    /// Matrix whose columns are the selected columns of `self`, in order.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, idx.len());
        for (j, &c) in idx.iter().enumerate() {
            for r in 0..self.rows {
                m[(r, j)] = self[(r, c)];
            }
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out[(r, c)] += a * other[(k, c)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: C64) -> Self {
        let data = self.data.iter().map(|a| a * s).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Squared Hilbert–Schmidt (Frobenius) norm.
    pub fn hs_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hs_norm(&self) -> f64 {
        self.hs_norm_sqr().sqrt()
    }

    /// Hilbert–Schmidt inner product `tr(self* · other)`. For column vectors
    /// this is the usual `⟨self, other⟩`, antilinear in the first argument.
    pub fn hs_inner(&self, other: &Self) -> C64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `(A + A*)/2`, the Hermitian part.
    pub fn hermitize(&self) -> Self {
        self.add(&self.adjoint()).scale_re(0.5)
    }

    /// Rank-one `u · v*` for column vectors.
    pub fn outer(u: &Self, v: &Self) -> Self {
        assert_eq!(u.cols, 1);
        assert_eq!(v.cols, 1);
        u.matmul(&v.adjoint())
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.sub(other).hs_norm() <= tol
    }

    /// ‖A − A*‖_HS / ‖A‖_HS (0 for the zero matrix).
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.hs_norm();
        if n == 0.0 {
            0.0
        } else {
            self.sub(&self.adjoint()).hs_norm() / n
        }
    }

    /// ‖A*A − I‖_HS.
    pub fn unitarity_residual(&self) -> f64 {
        assert!(self.is_square());
        self.adjoint().matmul(self).sub(&Self::identity(self.rows)).hs_norm()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}
