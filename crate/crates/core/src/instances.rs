//! Ready-made unitaries and measurements: named fixtures plus seeded random
//! instance generators for the criterion-equivalence suites.
//!
//! Random rank-1 POVMs come from harmonic frames (rows of a DFT matrix
//! restricted to a random exponent set) rotated by a Haar unitary: this
//! produces `k ≥ d` unit vectors whose scaled projections sum to the
//! identity for any admissible `(d, k)`.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::Result;
use crate::linalg::{unitary_eig, C64, ComplexMatrix};
use crate::quantum::{haar_random_unitary, validate_povm, Povm, Unitary};
use crate::rng::CounterRng;
use crate::tol::Tolerances;

fn defaults() -> Tolerances {
    Tolerances::default()
}

/// The 2×2 Hadamard matrix.
pub fn hadamard() -> Unitary {
    let s = 1.0 / 2.0f64.sqrt();
    let m = ComplexMatrix::from_rows(&[
        alloc::vec![C64::new(s, 0.0), C64::new(s, 0.0)],
        alloc::vec![C64::new(s, 0.0), C64::new(-s, 0.0)],
    ]);
    Unitary::new(m, &defaults()).expect("Hadamard is unitary")
}

/// Diagonal unitary with the given unit-modulus entries.
pub fn diagonal_unitary(phases: &[C64]) -> Unitary {
    Unitary::new(ComplexMatrix::diagonal(phases), &defaults()).expect("diagonal unitary")
}

/// `diag(e^{iθ_1}, …, e^{iθ_d})`.
pub fn phase_unitary(angles: &[f64]) -> Unitary {
    let phases: Vec<C64> = angles.iter().map(|&t| C64::new(t.cos(), t.sin())).collect();
    diagonal_unitary(&phases)
}

/// PVM of the `d` computational-basis projectors.
pub fn computational_pvm(d: usize) -> Povm {
    let elements: Vec<ComplexMatrix> = (0..d)
        .map(|i| {
            let e = ComplexMatrix::basis_vector(d, i);
            ComplexMatrix::outer(&e, &e)
        })
        .collect();
    validate_povm(elements, &defaults()).expect("basis projectors form a PVM")
}

/// Two-projection PVM splitting the computational basis into
/// `{e_1, …, e_{d−1}}` and `{e_d}`.
pub fn computational_split_povm(d: usize) -> Povm {
    let mut p1 = ComplexMatrix::zeros(d, d);
    for i in 0..d - 1 {
        p1[(i, i)] = C64::new(1.0, 0.0);
    }
    let ed = ComplexMatrix::basis_vector(d, d - 1);
    let p2 = ComplexMatrix::outer(&ed, &ed);
    validate_povm(alloc::vec![p1, p2], &defaults()).expect("block split is a PVM")
}

/// Two-projection PVM `{I − |z⟩⟨z|, |z⟩⟨z|}` from a unit vector `z`.
pub fn two_proj_povm_from_z(z: &ComplexMatrix, tols: &Tolerances) -> Result<Povm> {
    let zz = ComplexMatrix::outer(z, z);
    let p1 = ComplexMatrix::identity(z.rows()).sub(&zz);
    validate_povm(alloc::vec![p1, zz], tols)
}

/// Seeded random two-projection PVM with a Haar-random `z`.
pub fn random_two_proj_povm(d: usize, seed: u64) -> Povm {
    let z = crate::quantum::haar_random_vector(d, seed);
    two_proj_povm_from_z(&z, &defaults()).expect("rank-(d−1,1) split is a PVM")
}

/// Rank-1 POVM from a harmonic frame: `φ_i = (1/√d)(ω^{i·n_1}, …, ω^{i·n_d})`
/// with `ω = e^{2πi/k}` and distinct exponents `n_j`.
pub fn harmonic_rank1_povm(d: usize, k: usize, exponents: &[usize]) -> Result<Povm> {
    assert_eq!(exponents.len(), d, "need d distinct exponents");
    let omega = 2.0 * core::f64::consts::PI / k as f64;
    let scale = d as f64 / k as f64;
    let inv_sqrt_d = 1.0 / (d as f64).sqrt();
    let mut elements = Vec::with_capacity(k);
    for i in 0..k {
        let phi = ComplexMatrix::from_fn(d, 1, |r, _| {
            let t = omega * (i * exponents[r]) as f64;
            C64::new(t.cos(), t.sin()) * inv_sqrt_d
        });
        elements.push(ComplexMatrix::outer(&phi, &phi).scale_re(scale));
    }
    validate_povm(elements, &defaults())
}

/// Seeded random rank-1 POVM: harmonic frame on a random exponent set,
/// rotated by a Haar unitary.
pub fn random_rank1_povm(d: usize, k: usize, seed: u64) -> Povm {
    assert!(k >= d);
    let mut rng = CounterRng::stream(seed, 2);
    // choose d distinct exponents from 0..k
    let mut pool: Vec<usize> = (0..k).collect();
    let mut exponents = Vec::with_capacity(d);
    for _ in 0..d {
        let idx = (rng.next_u64() % pool.len() as u64) as usize;
        exponents.push(pool.swap_remove(idx));
    }
    let base = harmonic_rank1_povm(d, k, &exponents).expect("harmonic frame is tight");
    let w = haar_random_unitary(d, seed.wrapping_add(0x5EED));
    let rotated: Vec<ComplexMatrix> = base
        .elements()
        .iter()
        .map(|p| w.matrix().matmul(p).matmul(&w.matrix().adjoint()))
        .collect();
    validate_povm(rotated, &defaults()).expect("rotation preserves the POVM")
}

/// PVM of rank-1 projectors onto the columns of a Haar-random unitary.
pub fn random_onb_pvm(d: usize, seed: u64) -> Povm {
    let v = haar_random_unitary(d, seed);
    let elements: Vec<ComplexMatrix> = (0..d)
        .map(|j| {
            let col = v.matrix().column(j);
            ComplexMatrix::outer(&col, &col)
        })
        .collect();
    validate_povm(elements, &defaults()).expect("orthonormal columns form a PVM")
}

/// PVM of projectors onto an eigenbasis of `u` (rank-1 per eigenvector,
/// ignoring degeneracy structure).
pub fn eigenbasis_pvm(u: &Unitary, tols: &Tolerances) -> Result<Povm> {
    let dec = unitary_eig(u.matrix(), tols.tol_cluster, tols)?;
    let elements: Vec<ComplexMatrix> = (0..u.dim())
        .map(|j| {
            let col = dec.eigenvectors.column(j);
            ComplexMatrix::outer(&col, &col)
        })
        .collect();
    validate_povm(elements, tols)
}

/// Seeded non-ergodic two-projection instance: `U` is rebuilt from a Haar
/// eigenbasis with random phases, and `z` is confined to the span of all but
/// the first eigenvector, which therefore lies in `Θ = span{z}^⊥`.
pub fn nonergodic_two_proj_instance(d: usize, seed: u64) -> (Unitary, Povm) {
    let v = haar_random_unitary(d, seed);
    let mut rng = CounterRng::stream(seed, 3);
    let phases: Vec<C64> = (0..d)
        .map(|_| {
            let t = rng.next_f64() * 2.0 * core::f64::consts::PI;
            C64::new(t.cos(), t.sin())
        })
        .collect();
    let u = v
        .matrix()
        .matmul(&ComplexMatrix::diagonal(&phases))
        .matmul(&v.matrix().adjoint());
    let unitary = Unitary::new(u, &defaults()).expect("similarity keeps unitarity");

    // z ∈ span{v_2, …, v_d}
    let mut z = ComplexMatrix::zeros(d, 1);
    for j in 1..d {
        let (x, y) = rng.next_gaussian_pair();
        z = z.add(&v.matrix().column(j).scale(C64::new(x, y)));
    }
    let z = z.scale_re(1.0 / z.hs_norm());
    let povm = two_proj_povm_from_z(&z, &defaults()).expect("valid split");
    (unitary, povm)
}

/// Seeded reducible rank-1 instance (`d = 4`, `k = 6`): two harmonic triples
/// supported on orthogonal planes, with a block-diagonal unitary preserving
/// the planes. The plane spanned by the first triple is a non-trivial
/// invariant subspace containing `φ_1, φ_2, φ_3` and orthogonal to the rest.
pub fn reducible_rank1_instance(seed: u64) -> (Unitary, Povm) {
    let d = 4;
    let k = 6;
    let scale = d as f64 / k as f64;
    let mut elements = Vec::with_capacity(k);
    for block in 0..2 {
        for i in 0..3 {
            let t = i as f64 * 2.0 * core::f64::consts::PI / 3.0;
            let mut phi = ComplexMatrix::zeros(d, 1);
            phi[(2 * block, 0)] = C64::new(t.cos(), 0.0);
            phi[(2 * block + 1, 0)] = C64::new(t.sin(), 0.0);
            elements.push(ComplexMatrix::outer(&phi, &phi).scale_re(scale));
        }
    }
    let povm = validate_povm(elements, &defaults()).expect("paired triples are tight");

    let a = haar_random_unitary(2, seed.wrapping_mul(2).wrapping_add(1));
    let b = haar_random_unitary(2, seed.wrapping_mul(2).wrapping_add(2));
    let mut u = ComplexMatrix::zeros(d, d);
    for r in 0..2 {
        for c in 0..2 {
            u[(r, c)] = a.matrix()[(r, c)];
            u[(r + 2, c + 2)] = b.matrix()[(r, c)];
        }
    }
    (Unitary::new(u, &defaults()).expect("block unitary"), povm)
}
