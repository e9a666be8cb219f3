//! Kusuoka measures of arbitrary operator families, decoupled from the
//! `(U, Π)` construction.
//!
//! A family `{A_1, …, A_k}` with `Σ A_i·A_i* = I` and a density `ρ` fixed by
//! `Φ(ρ) = Σ A_i* ρ A_i` assigns each cylinder the value
//! `tr(A_{i_n}* ⋯ A_{i_1}* ρ A_{i_1} ⋯ A_{i_n})`, which is automatically
//! consistent and shift-invariant. `Φ` is a quantum channel (Kraus operators
//! `A_i*`), so a stationary density always exists; it is unique and
//! positive-definite when the family is irreducible.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::ergodicity::algebra_irreducible;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, C64, ComplexMatrix};
use crate::pifs::{OutcomeString, Pifs};
use crate::quantum::DensityMatrix;
use crate::tol::Tolerances;

/// Transfer-matrix diagnostics run up to this dimension; above it the
/// `d⁴` memory/eigensolve cost is not worth it and only the iterative
/// route is used.
pub const TRANSFER_MATRIX_MAX_DIM: usize = 8;

/// Relative threshold below which a singular value of `T − I` counts as
/// zero when measuring the fixed-space dimension.
const NULLSPACE_TOL: f64 = 1e-7;

const MAX_FIXED_POINT_ITERS: usize = 200_000;

/// Operators with `Σ A_i·A_i* = I`.
#[derive(Clone, Debug)]
pub struct OperatorFamily {
    dim: usize,
    ops: Vec<ComplexMatrix>,
}

impl OperatorFamily {
    pub fn new(ops: Vec<ComplexMatrix>, tols: &Tolerances) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::BadDimension { dim: 0 });
        }
        let dim = ops[0].rows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for a in &ops {
            if !a.is_square() || a.rows() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: a.rows() });
            }
            if !a.is_finite() {
                return Err(Error::NonFinite);
            }
            sum = sum.add(&a.matmul(&a.adjoint()));
        }
        let residual = sum.sub(&ComplexMatrix::identity(dim)).hs_norm();
        if residual > tols.tol_sum {
            return Err(Error::InvalidFamily { residual });
        }
        Ok(Self { dim, ops })
    }

    /// The family `{U*·√Π_i}` of a PIFS (adjoints of its Kraus factors).
    pub fn from_pifs(p: &Pifs) -> Self {
        let ops: Vec<ComplexMatrix> = p.kraus().iter().map(|k| k.adjoint()).collect();
        Self { dim: p.dim(), ops }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    /// `Φ(X) = Σ A_i* X A_i`.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for a in &self.ops {
            out = out.add(&a.adjoint().matmul(x).matmul(a));
        }
        out
    }

    fn fixed_point_residual(&self, rho: &ComplexMatrix) -> f64 {
        self.apply(rho).sub(rho).hs_norm()
    }
}

/// A stationary density with solver diagnostics.
#[derive(Clone, Debug)]
pub struct StationaryDensity {
    pub rho: DensityMatrix,
    /// `‖Φ(ρ) − ρ‖_HS`.
    pub residual: f64,
    /// Numerical dimension of the eigenvalue-1 eigenspace of the transfer
    /// matrix, when the transfer route ran (`d ≤ 8`).
    pub fixed_space_dim: Option<usize>,
    /// Warning flag: the fixed space has dimension above one, so the family
    /// is reducible and the returned density is one of many.
    pub non_unique: bool,
    /// Smallest eigenvalue of the returned density.
    pub min_eigenvalue: f64,
}

fn unvec(v: &ComplexMatrix, d: usize) -> ComplexMatrix {
    // column-stacking convention
    ComplexMatrix::from_fn(d, d, |a, b| v[(a + b * d, 0)])
}

fn vec_index(a: usize, b: usize, d: usize) -> usize {
    a + b * d
}

/// The `d²×d²` matrix of `Φ` in the standard basis `E_ab`.
fn transfer_matrix(family: &OperatorFamily) -> ComplexMatrix {
    let d = family.dim;
    let mut t = ComplexMatrix::zeros(d * d, d * d);
    for b in 0..d {
        for a in 0..d {
            let mut e = ComplexMatrix::zeros(d, d);
            e[(a, b)] = C64::new(1.0, 0.0);
            let image = family.apply(&e);
            let col = vec_index(a, b, d);
            for bb in 0..d {
                for aa in 0..d {
                    t[(vec_index(aa, bb, d), col)] = image[(aa, bb)];
                }
            }
        }
    }
    t
}

/// Null space of `T − I`: dimension and an orthonormal basis, via the
/// spectral decomposition of `(T − I)*(T − I)`.
fn transfer_fixed_space(
    family: &OperatorFamily,
    tols: &Tolerances,
) -> Result<(usize, Vec<ComplexMatrix>)> {
    let d = family.dim;
    let n = d * d;
    let m = transfer_matrix(family).sub(&ComplexMatrix::identity(n));
    let gram = m.adjoint().matmul(&m);
    let dec = hermitian_eig(&gram, tols.tol_cluster, tols)?;
    let s_max = dec.eigenvalues.last().map(|z| z.re.max(0.0)).unwrap_or(0.0).sqrt();
    let cut = NULLSPACE_TOL * s_max.max(1.0);
    let mut basis = Vec::new();
    for (i, lambda) in dec.eigenvalues.iter().enumerate() {
        if lambda.re.max(0.0).sqrt() <= cut {
            basis.push(dec.eigenvectors.column(i));
        }
    }
    Ok((basis.len(), basis))
}

fn min_eig(m: &ComplexMatrix, tols: &Tolerances) -> Result<f64> {
    let dec = hermitian_eig(m, tols.tol_cluster, tols)?;
    Ok(dec.eigenvalues.first().map(|z| z.re).unwrap_or(0.0))
}

/// Try to turn a candidate matrix into a valid stationary density.
fn accept(
    family: &OperatorFamily,
    cand: &ComplexMatrix,
    tols: &Tolerances,
) -> Option<(ComplexMatrix, f64, f64)> {
    let h = cand.hermitize();
    let tr = h.trace().re;
    if tr.abs() < 1e-10 {
        return None;
    }
    let rho = h.scale_re(1.0 / tr);
    let minimum = min_eig(&rho, tols).ok()?;
    if minimum < -tols.tol_psd {
        return None;
    }
    let residual = family.fixed_point_residual(&rho);
    (residual <= tols.tol_fix).then_some((rho, residual, minimum))
}

/// Find a density fixed by `Φ(ρ) = Σ A_i* ρ A_i`.
///
/// `I/d` is tested first (exact for measurement-derived families), then the
/// transfer-matrix null space supplies candidates (and the fixed-space
/// multiplicity for the non-uniqueness warning), then damped iteration
/// `ρ ← (ρ + Φ(ρ))/2` from `I/d` — the damping maps peripheral spectrum off
/// the unit circle, so it converges where plain power iteration cycles.
pub fn stationary_density(
    family: &OperatorFamily,
    tols: &Tolerances,
) -> Result<StationaryDensity> {
    let d = family.dim;
    let (fixed_space_dim, null_basis) = if d <= TRANSFER_MATRIX_MAX_DIM {
        let (dim, basis) = transfer_fixed_space(family, tols)?;
        (Some(dim), basis)
    } else {
        (None, Vec::new())
    };
    let non_unique = fixed_space_dim.map(|q| q > 1).unwrap_or(false);

    let finish = |rho: ComplexMatrix, residual: f64, minimum: f64| StationaryDensity {
        rho: DensityMatrix::from_evolved(rho),
        residual,
        fixed_space_dim,
        non_unique,
        min_eigenvalue: minimum,
    };

    let uniform = ComplexMatrix::identity(d).scale_re(1.0 / d as f64);
    if let Some((rho, residual, minimum)) = accept(family, &uniform, tols) {
        return Ok(finish(rho, residual, minimum));
    }

    // candidates straight from the null space: each basis vector, and the
    // projection of vec(I/d) onto the null space
    let mut candidates: Vec<ComplexMatrix> =
        null_basis.iter().map(|v| unvec(v, d)).collect();
    if !null_basis.is_empty() {
        let vec_uniform = ComplexMatrix::from_fn(d * d, 1, |r, _| {
            let (a, b) = (r % d, r / d);
            if a == b { C64::new(1.0 / d as f64, 0.0) } else { C64::new(0.0, 0.0) }
        });
        let mut proj = ComplexMatrix::zeros(d * d, 1);
        for v in &null_basis {
            let coeff = v.hs_inner(&vec_uniform);
            proj = proj.add(&v.scale(coeff));
        }
        candidates.push(unvec(&proj, d));
    }
    for cand in &candidates {
        if let Some((rho, residual, minimum)) = accept(family, cand, tols) {
            return Ok(finish(rho, residual, minimum));
        }
    }

    // damped fixed-point iteration
    let mut rho = uniform;
    let mut best = f64::INFINITY;
    for _ in 0..MAX_FIXED_POINT_ITERS {
        let next = rho.add(&family.apply(&rho)).scale_re(0.5);
        let residual = family.fixed_point_residual(&next);
        rho = next;
        best = best.min(residual);
        if residual <= tols.tol_fix {
            let minimum = min_eig(&rho.hermitize(), tols)?;
            return Ok(finish(rho, residual, minimum));
        }
    }
    Err(Error::NoFixedPoint { residual: best })
}

/// An operator family with a stationary density: evaluates the measure on
/// cylinder sets.
#[derive(Clone, Debug)]
pub struct KusuokaSystem {
    family: OperatorFamily,
    rho: DensityMatrix,
    irreducible: bool,
}

impl KusuokaSystem {
    /// Solve for the stationary density and record irreducibility.
    pub fn new(family: OperatorFamily, tols: &Tolerances) -> Result<Self> {
        let stationary = stationary_density(&family, tols)?;
        let irreducible = algebra_irreducible(family.ops(), tols.tol_rank).irreducible;
        Ok(Self { family, rho: stationary.rho, irreducible })
    }

    /// Use a caller-provided density, validating the fixed-point condition.
    pub fn with_density(
        family: OperatorFamily,
        rho: DensityMatrix,
        tols: &Tolerances,
    ) -> Result<Self> {
        let residual = family.fixed_point_residual(rho.matrix());
        if residual > tols.tol_fix {
            return Err(Error::NoFixedPoint { residual });
        }
        let irreducible = algebra_irreducible(family.ops(), tols.tol_rank).irreducible;
        Ok(Self { family, rho, irreducible })
    }

    pub fn family(&self) -> &OperatorFamily {
        &self.family
    }

    pub fn density(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn irreducible(&self) -> bool {
        self.irreducible
    }

    /// `ℙ_ρ(C_s) = tr(M* ρ M)` with `M = A_{i_1}···A_{i_n}`; 1 on `ε`.
    pub fn cylinder_prob(&self, s: &OutcomeString) -> Result<f64> {
        if s.is_empty() {
            return Ok(1.0);
        }
        let mut m: Option<ComplexMatrix> = None;
        for &i in s.symbols() {
            if i >= self.family.k() {
                return Err(Error::SymbolOutOfRange { symbol: i + 1, k: self.family.k() });
            }
            let a = &self.family.ops()[i];
            m = Some(match m {
                None => a.clone(),
                Some(prev) => prev.matmul(a),
            });
        }
        let m = m.expect("nonempty string");
        let p = m.adjoint().matmul(self.rho.matrix()).matmul(&m).trace().re;
        Ok(p.clamp(0.0, 1.0))
    }
}
