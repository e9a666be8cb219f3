//! Repeated measurements of a unitarily evolving quantum system, modelled as
//! a partial iterated function system on density matrices.
//!
//! A system in state `ρ` evolves under a unitary `U`, is measured with a POVM
//! `{Π_1, …, Π_k}`, and emits the observed outcome. Iterating this procedure
//! produces a probability measure on the space of infinite outcome sequences,
//! defined on cylinder sets through traces of products of the Kraus factors
//! `√Π_i · U`. This crate evaluates that measure exactly on finite cylinders,
//! decides whether it is ergodic (with independently checkable witnesses for
//! the negative case), verifies its reversibility for two-projection
//! measurements, and cross-checks everything against seeded Monte Carlo
//! trajectory sampling.
//!
//! The crate is `no_std`-compatible (`alloc` required): disable default
//! features and enable `libm` for float math. All computations are pure
//! functions of their inputs; values are immutable after construction and
//! safe to share across threads.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod ergodicity;
pub mod error;
pub mod instances;
pub mod linalg;
pub mod markov;
pub mod measure;
pub mod pifs;
pub mod quantum;
pub mod reversibility;
pub mod rng;
pub mod tol;
pub mod trajectories;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, SpectralDecomposition, Subspace, C64};
pub use pifs::{OutcomeString, Pifs};
pub use quantum::{DensityMatrix, Povm, PovmKindTag, Unitary};
pub use tol::Tolerances;
