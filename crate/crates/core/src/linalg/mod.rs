//! Dense complex linear algebra kernel.
//!
//! Everything operates on small dense matrices (dimensions up to a few
//! hundred); no sparsity, no blocking. The eigensolver is a cyclic complex
//! Jacobi iteration — only the residual contracts matter, not the algorithm.

mod eigen;
mod matrix;
mod subspace;

pub use eigen::{hermitian_eig, psd_sqrt, unitary_eig, EigenCluster, SpectralDecomposition};
pub use matrix::{ComplexMatrix, C64};
pub use subspace::{orthonormalize, Subspace};
