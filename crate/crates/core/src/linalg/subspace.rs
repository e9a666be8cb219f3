//! Linear subspaces of ℂ^d carried by orthonormal bases.

use alloc::vec::Vec;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// A subspace of ℂ^d, represented by a matrix of orthonormal basis columns.
/// The trivial subspace has a basis with zero columns, never a null object.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: ComplexMatrix,
    tol_rank: f64,
}

/// Sequential Gram–Schmidt with one re-orthogonalization pass. Directions
/// whose residual norm after projection is at most `tol_rank` are discarded.
pub fn orthonormalize(
    ambient: usize,
    vectors: &[ComplexMatrix],
    tol_rank: f64,
) -> Result<Subspace> {
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    for v in vectors {
        if v.rows() != ambient || v.cols() != 1 {
            return Err(Error::DimensionMismatch { expected: ambient, found: v.rows() });
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let coeff = b.hs_inner(&r);
                r = r.sub(&b.scale(coeff));
            }
        }
        let norm = r.hs_norm();
        if norm > tol_rank {
            basis.push(r.scale_re(1.0 / norm));
            if basis.len() == ambient {
                break;
            }
        }
    }
    let mut mat = ComplexMatrix::zeros(ambient, basis.len());
    for (j, b) in basis.iter().enumerate() {
        mat.set_column(j, b);
    }
    Ok(Subspace { ambient, basis: mat, tol_rank })
}

impl Subspace {
    pub fn trivial(ambient: usize, tol_rank: f64) -> Self {
        Self { ambient, basis: ComplexMatrix::zeros(ambient, 0), tol_rank }
    }

    pub fn full(ambient: usize, tol_rank: f64) -> Self {
        Self { ambient, basis: ComplexMatrix::identity(ambient), tol_rank }
    }

    /// Span of a single vector (trivial subspace for a ~zero vector).
    pub fn span_of(v: &ComplexMatrix, tol_rank: f64) -> Self {
        orthonormalize(v.rows(), core::slice::from_ref(v), tol_rank)
            .expect("span_of: consistent dimensions")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_trivial(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    /// `0 < dim < ambient`.
    pub fn is_proper_nontrivial(&self) -> bool {
        !self.is_trivial() && !self.is_full()
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn tol_rank(&self) -> f64 {
        self.tol_rank
    }

    /// Orthogonal projection of a column vector onto the subspace.
    pub fn project(&self, v: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(v.rows(), self.ambient);
        let coeffs = self.basis.adjoint().matmul(v);
        self.basis.matmul(&coeffs)
    }

    /// `‖v − P_W v‖ ≤ tol·‖v‖`.
    pub fn contains_vector(&self, v: &ComplexMatrix, tol: f64) -> bool {
        let norm = v.hs_norm();
        if norm == 0.0 {
            return true;
        }
        v.sub(&self.project(v)).hs_norm() <= tol * norm
    }

    /// Every basis vector of `other` lies in `self` within `tol`.
    pub fn contains_subspace(&self, other: &Subspace, tol: f64) -> bool {
        (0..other.dim()).all(|j| self.contains_vector(&other.basis.column(j), tol))
    }

    /// Same span, checked via mutual containment.
    pub fn approx_eq_span(&self, other: &Subspace, tol: f64) -> bool {
        self.dim() == other.dim()
            && self.contains_subspace(other, tol)
            && other.contains_subspace(self, tol)
    }

    /// Orthonormalized span of `A·(basis of self)`.
    pub fn image(&self, a: &ComplexMatrix) -> Result<Subspace> {
        if a.cols() != self.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: a.cols() });
        }
        let mapped: Vec<ComplexMatrix> =
            (0..self.dim()).map(|j| a.matmul(&self.basis.column(j))).collect();
        orthonormalize(a.rows(), &mapped, self.tol_rank)
    }

    /// Orthogonal complement; its dimension is exactly `ambient − dim`.
    pub fn orth_complement(&self) -> Subspace {
        let d = self.ambient;
        let want = d - self.dim();
        if want == 0 {
            return Subspace::trivial(d, self.tol_rank);
        }
        // columns of I − BB* span the complement
        let p = ComplexMatrix::identity(d).sub(&self.basis.matmul(&self.basis.adjoint()));
        let cols: Vec<ComplexMatrix> = (0..d).map(|j| p.column(j)).collect();
        for tol in [self.tol_rank, 1e-12, 1e-14] {
            let comp = orthonormalize(d, &cols, tol).expect("complement: consistent dims");
            if comp.dim() == want {
                return comp;
            }
        }
        unreachable!("orthogonal complement rank defect");
    }

    /// Dimension of the joint span of both subspaces.
    pub fn union_dim(&self, other: &Subspace) -> Result<usize> {
        if other.ambient != self.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: other.ambient });
        }
        let mut cols: Vec<ComplexMatrix> = (0..self.dim()).map(|j| self.basis.column(j)).collect();
        cols.extend((0..other.dim()).map(|j| other.basis.column(j)));
        Ok(orthonormalize(self.ambient, &cols, self.tol_rank)?.dim())
    }

    /// `dim W1 + dim W2 − dim span(W1 ∪ W2)`, clamped at zero.
    pub fn intersect_dim(&self, other: &Subspace) -> Result<usize> {
        let union = self.union_dim(other)?;
        Ok((self.dim() + other.dim()).saturating_sub(union))
    }
}
