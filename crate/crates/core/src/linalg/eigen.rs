//! Spectral decompositions of Hermitian and unitary matrices.
//!
//! Hermitian matrices are diagonalized by a cyclic complex Jacobi iteration.
//! A unitary `U` is normal, so it is diagonalized jointly with its commuting
//! Hermitian parts `H1 = (U + U*)/2` and `H2 = (U − U*)/(2i)`: diagonalize
//! `H1`, then re-diagonalize the compression of `H2` inside each (near-)
//! degenerate block. This keeps the whole kernel on the Hermitian solver.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::matrix::{C64, ComplexMatrix};
use crate::error::{Error, Result};
use crate::tol::Tolerances;

const MAX_JACOBI_SWEEPS: usize = 100;
/// Stage-1 grouping width on `Re λ` when splitting a unitary spectrum.
/// Groups this wide are isolated enough that their joint span is accurate,
/// and the imaginary part separates members exactly.
const STAGE1_GROUP_TOL: f64 = 1e-6;

/// A set of (near-)equal eigenvalues.
#[derive(Clone, Debug)]
pub struct EigenCluster {
    /// Indices into `eigenvalues` / eigenvector columns.
    pub indices: Vec<usize>,
    /// Representative value for the cluster.
    pub representative: C64,
}

/// Result of `hermitian_eig` / `unitary_eig`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    /// Eigenvalues: real for Hermitian input, unit-modulus for unitary input.
    pub eigenvalues: Vec<C64>,
    /// Orthonormal eigenvectors as columns, aligned with `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
    /// Partition of eigenvalue indices into degenerate groups.
    pub clusters: Vec<EigenCluster>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Orthonormal basis of the eigenspace belonging to cluster `c`.
    pub fn cluster_basis(&self, c: usize) -> ComplexMatrix {
        self.eigenvectors.select_columns(&self.clusters[c].indices)
    }
}

fn offdiag_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                s += a[(p, q)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic complex Jacobi for a Hermitian matrix. Returns eigenvalues sorted
/// ascending with matching orthonormal eigenvector columns.
fn jacobi_hermitian(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = a.rows();
    // exact Hermitian part; the caller has already checked the residual
    let mut m = a.hermitize();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.hs_norm();
    if scale == 0.0 || n == 1 {
        let vals = (0..n).map(|i| m[(i, i)].re).collect();
        return Ok((vals, v));
    }

    let target = scale * f64::EPSILON * n as f64;
    let skip = scale * f64::EPSILON / (n * n) as f64;
    let mut converged = false;
    for _ in 0..MAX_JACOBI_SWEEPS {
        if offdiag_norm(&m) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = m[(p, q)];
                let absb = b.norm();
                if absb <= skip {
                    continue;
                }
                // Unitary G = D·R with D = diag(1, φ), φ = conj(b)/|b|, and a
                // real rotation R chosen so that (G* M G)_pq = 0.
                let phi = b.conj() / absb;
                let tau = (m[(q, q)].re - m[(p, p)].re) / (2.0 * absb);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sphi = phi * s;
                let cphi = phi * c;

                // columns: M ← M·G, V ← V·G
                for r in 0..n {
                    let mp = m[(r, p)];
                    let mq = m[(r, q)];
                    m[(r, p)] = mp * c - mq * sphi;
                    m[(r, q)] = mp * s + mq * cphi;
                    let vp = v[(r, p)];
                    let vq = v[(r, q)];
                    v[(r, p)] = vp * c - vq * sphi;
                    v[(r, q)] = vp * s + vq * cphi;
                }
                // rows: M ← G*·M
                let sphic = sphi.conj();
                let cphic = cphi.conj();
                for col in 0..n {
                    let mp = m[(p, col)];
                    let mq = m[(q, col)];
                    m[(p, col)] = mp * c - mq * sphic;
                    m[(q, col)] = mp * s + mq * cphic;
                }
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
            }
        }
    }
    if !converged && offdiag_norm(&m) > target {
        return Err(Error::NoConvergence { sweeps: MAX_JACOBI_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| m[(i, i)].re).collect();
    let vecs = v.select_columns(&order);
    Ok((vals, vecs))
}

/// Single-linkage clusters of sorted real values: split where the gap
/// between neighbours exceeds `tol`.
fn cluster_sorted_reals(vals: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..vals.len() {
        match clusters.last_mut() {
            Some(c) if vals[i] - vals[*c.last().unwrap()] <= tol => c.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    clusters
}

/// Spectral decomposition of a Hermitian matrix.
///
/// Eigenvalues come back sorted ascending; clusters are single-linkage
/// groups at radius `tol_cluster`.
pub fn hermitian_eig(
    a: &ComplexMatrix,
    tol_cluster: f64,
    tols: &Tolerances,
) -> Result<SpectralDecomposition> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let res = a.hermiticity_residual();
    if res > tols.tol_herm {
        return Err(Error::NotHermitian { residual: res });
    }
    let (vals, vecs) = jacobi_hermitian(a)?;
    let clusters = cluster_sorted_reals(&vals, tol_cluster)
        .into_iter()
        .map(|indices| {
            let mean = indices.iter().map(|&i| vals[i]).sum::<f64>() / indices.len() as f64;
            EigenCluster { indices, representative: C64::new(mean, 0.0) }
        })
        .collect();
    Ok(SpectralDecomposition {
        eigenvalues: vals.into_iter().map(|x| C64::new(x, 0.0)).collect(),
        eigenvectors: vecs,
        clusters,
    })
}

/// Angular distance on the unit circle, in `[0, π]`.
fn angular_distance(a: f64, b: f64) -> f64 {
    let mut d = (a - b).abs() % (2.0 * core::f64::consts::PI);
    if d > core::f64::consts::PI {
        d = 2.0 * core::f64::consts::PI - d;
    }
    d
}

/// Spectral decomposition of a unitary matrix.
///
/// Eigenvalues are sorted by argument in `(−π, π]`; clusters are
/// single-linkage groups under angular distance `tol_cluster`.
pub fn unitary_eig(
    u: &ComplexMatrix,
    tol_cluster: f64,
    tols: &Tolerances,
) -> Result<SpectralDecomposition> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch { expected: u.rows(), found: u.cols() });
    }
    if !u.is_finite() {
        return Err(Error::NonFinite);
    }
    let res = u.unitarity_residual();
    if res > tols.tol_unit {
        return Err(Error::NotUnitary { residual: res });
    }
    let d = u.rows();
    let ua = u.adjoint();
    let h1 = u.add(&ua).scale_re(0.5);
    let h2 = u.sub(&ua).scale(C64::new(0.0, -0.5));

    let (vals1, vecs1) = jacobi_hermitian(&h1)?;
    let mut vectors: Vec<ComplexMatrix> = Vec::with_capacity(d);
    for group in cluster_sorted_reals(&vals1, STAGE1_GROUP_TOL) {
        if group.len() == 1 {
            vectors.push(vecs1.column(group[0]));
            continue;
        }
        let vc = vecs1.select_columns(&group);
        let compressed = vc.adjoint().matmul(&h2).matmul(&vc);
        let (_, w) = jacobi_hermitian(&compressed)?;
        let refined = vc.matmul(&w);
        for j in 0..group.len() {
            vectors.push(refined.column(j));
        }
    }

    // Rayleigh quotients give the eigenvalues; sort by argument.
    let mut pairs: Vec<(C64, ComplexMatrix)> = vectors
        .into_iter()
        .map(|v| {
            let lambda = v.hs_inner(&u.matmul(&v));
            (lambda, v)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.arg().partial_cmp(&b.0.arg()).unwrap());

    let eigenvalues: Vec<C64> = pairs.iter().map(|(l, _)| *l).collect();
    let mut eigenvectors = ComplexMatrix::zeros(d, d);
    for (j, (_, v)) in pairs.iter().enumerate() {
        eigenvectors.set_column(j, v);
    }

    let clusters = cluster_unit_circle(&eigenvalues, tol_cluster);
    Ok(SpectralDecomposition { eigenvalues, eigenvectors, clusters })
}

/// Circular single-linkage clustering of unit-modulus values sorted by
/// argument.
fn cluster_unit_circle(vals: &[C64], tol: f64) -> Vec<EigenCluster> {
    let n = vals.len();
    if n == 0 {
        return Vec::new();
    }
    let args: Vec<f64> = vals.iter().map(|z| z.arg()).collect();
    // circular gaps between consecutive sorted arguments
    let gap_after = |i: usize| angular_distance(args[(i + 1) % n], args[i]);
    let mut start = None;
    for i in 0..n {
        if gap_after(i) > tol {
            start = Some((i + 1) % n);
            break;
        }
    }
    let Some(start) = start else {
        // everything within tol of its neighbour: one cluster
        return vec![make_circle_cluster((0..n).collect(), vals)];
    };
    let mut clusters = Vec::new();
    let mut current: Vec<usize> = vec![start];
    for step in 0..n - 1 {
        let i = (start + step) % n;
        let j = (start + step + 1) % n;
        if gap_after(i) <= tol {
            current.push(j);
        } else {
            clusters.push(make_circle_cluster(core::mem::take(&mut current), vals));
            current.push(j);
        }
    }
    clusters.push(make_circle_cluster(current, vals));
    clusters.sort_by(|a, b| a.indices[0].cmp(&b.indices[0]));
    clusters
}

fn make_circle_cluster(indices: Vec<usize>, vals: &[C64]) -> EigenCluster {
    let sum: C64 = indices.iter().map(|&i| vals[i]).sum();
    let rep = if sum.norm() > 1e-12 { sum / sum.norm() } else { vals[indices[0]] };
    EigenCluster { indices, representative: rep }
}

/// Positive semi-definite square root.
///
/// Eigenvalues in `[−tol_psd, 0)` are clipped to zero; anything lower is an
/// error.
pub fn psd_sqrt(a: &ComplexMatrix, tols: &Tolerances) -> Result<ComplexMatrix> {
    let dec = hermitian_eig(a, tols.tol_cluster, tols)?;
    let mut sqrt_vals = Vec::with_capacity(dec.dim());
    for lambda in &dec.eigenvalues {
        let x = lambda.re;
        if x < -tols.tol_psd {
            return Err(Error::NotPsd { index: None, min_eigenvalue: x });
        }
        sqrt_vals.push(C64::new(x.max(0.0).sqrt(), 0.0));
    }
    let v = &dec.eigenvectors;
    let s = v.matmul(&ComplexMatrix::diagonal(&sqrt_vals)).matmul(&v.adjoint());
    Ok(s.hermitize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn identity_has_single_cluster() {
        let dec = hermitian_eig(&ComplexMatrix::identity(2), 1e-8, &tols()).unwrap();
        assert_eq!(dec.eigenvalues.len(), 2);
        assert!((dec.eigenvalues[0].re - 1.0).abs() < 1e-14);
        assert!((dec.eigenvalues[1].re - 1.0).abs() < 1e-14);
        assert_eq!(dec.clusters.len(), 1);
    }

    #[test]
    fn diag_01_has_two_clusters() {
        let a = ComplexMatrix::diagonal(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let dec = hermitian_eig(&a, 1e-8, &tols()).unwrap();
        assert!((dec.eigenvalues[0].re - 0.0).abs() < 1e-14);
        assert!((dec.eigenvalues[1].re - 1.0).abs() < 1e-14);
        assert_eq!(dec.clusters.len(), 2);
    }

    #[test]
    fn pauli_x_diagonalizes_by_hand() {
        // hand diagonalization: eigenvalues ∓1 with eigenvectors (e1 ∓ e2)/√2
        let x = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        let dec = hermitian_eig(&x, 1e-8, &tols()).unwrap();
        assert!((dec.eigenvalues[0].re + 1.0).abs() < 1e-12);
        assert!((dec.eigenvalues[1].re - 1.0).abs() < 1e-12);
        assert_eq!(dec.clusters.len(), 2);
        let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
        for (j, sign) in [(0usize, -1.0), (1usize, 1.0)] {
            let v = dec.eigenvectors.column(j);
            let expect = ComplexMatrix::column_vector(&[c(inv_sqrt2, 0.0), c(sign * inv_sqrt2, 0.0)]);
            // equality up to a global phase: |⟨v, expect⟩| = 1
            assert!((v.hs_inner(&expect).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.5, 0.0), c(0.0, 0.0)],
        ]);
        assert!(matches!(
            hermitian_eig(&a, 1e-8, &tols()),
            Err(Error::NotHermitian { .. })
        ));
    }

    fn random_hermitian(d: usize, rng: &mut CounterRng) -> ComplexMatrix {
        let a = ComplexMatrix::from_fn(d, d, |_, _| {
            let (x, y) = rng.next_gaussian_pair();
            c(x, y)
        });
        a.hermitize()
    }

    #[test]
    fn random_hermitian_reconstruction() {
        let mut rng = CounterRng::new(11);
        for d in [2, 3, 5, 8] {
            let a = random_hermitian(d, &mut rng);
            let dec = hermitian_eig(&a, 1e-8, &tols()).unwrap();
            let v = &dec.eigenvectors;
            // V*V = I
            assert!(v.adjoint().matmul(v).approx_eq(&ComplexMatrix::identity(d), 1e-12));
            // A = VΛV*
            let recon = v
                .matmul(&ComplexMatrix::diagonal(&dec.eigenvalues))
                .matmul(&v.adjoint());
            assert!(recon.sub(&a).hs_norm() <= 1e-11 * a.hs_norm().max(1.0));
            // eigenvalues ascending
            for w in dec.eigenvalues.windows(2) {
                assert!(w[0].re <= w[1].re + 1e-12);
            }
        }
    }

    #[test]
    fn diagonal_unitary_three_singleton_clusters() {
        let u = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)]);
        let dec = unitary_eig(&u, 1e-8, &tols()).unwrap();
        assert_eq!(dec.clusters.len(), 3);
        // sorted by argument: 0, π/2, π — eigenvectors e1, e2, e3
        for (j, i) in [(0usize, 0usize), (1, 1), (2, 2)] {
            let v = dec.eigenvectors.column(j);
            let e = ComplexMatrix::basis_vector(3, i);
            assert!((v.hs_inner(&e).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hadamard_eigenvalues_plus_minus_one() {
        // characteristic polynomial λ² − tr(H)λ + det(H) = λ² − 1 by brute force
        let s = 1.0 / 2.0f64.sqrt();
        let h = ComplexMatrix::from_rows(&[
            vec![c(s, 0.0), c(s, 0.0)],
            vec![c(s, 0.0), c(-s, 0.0)],
        ]);
        let dec = unitary_eig(&h, 1e-8, &tols()).unwrap();
        assert_eq!(dec.clusters.len(), 2);
        let mut args: Vec<f64> = dec.eigenvalues.iter().map(|z| z.arg()).collect();
        args.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(args[0].abs() < 1e-10); // +1
        assert!((args[1] - core::f64::consts::PI).abs() < 1e-10); // −1
    }

    #[test]
    fn identity_unitary_one_cluster_dim_three() {
        let dec = unitary_eig(&ComplexMatrix::identity(3), 1e-8, &tols()).unwrap();
        assert_eq!(dec.clusters.len(), 1);
        assert_eq!(dec.clusters[0].indices.len(), 3);
        assert!((dec.clusters[0].representative - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn conjugate_pair_eigenvalues_are_separated() {
        // rotation by θ has eigenvalues e^{±iθ} with equal real parts:
        // the two-stage split must not mix them
        let th = 0.7f64;
        let u = ComplexMatrix::from_rows(&[
            vec![c(th.cos(), 0.0), c(-th.sin(), 0.0)],
            vec![c(th.sin(), 0.0), c(th.cos(), 0.0)],
        ]);
        let dec = unitary_eig(&u, 1e-8, &tols()).unwrap();
        assert_eq!(dec.clusters.len(), 2);
        for (j, lambda) in dec.eigenvalues.iter().enumerate() {
            let v = dec.eigenvectors.column(j);
            let residual = u.matmul(&v).sub(&v.scale(*lambda)).hs_norm();
            assert!(residual < 1e-12, "residual {residual}");
            assert!((lambda.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_unitary_contract() {
        // Haar-ish matrices via Gaussian + Gram-Schmidt happen further up in
        // the quantum module; here a product of rotations exercises d = 4.
        let mut rng = CounterRng::new(5);
        let d = 4;
        let mut u = ComplexMatrix::identity(d);
        for p in 0..d {
            for q in (p + 1)..d {
                let (x, y) = rng.next_gaussian_pair();
                let thc = x.cos();
                let ths = x.sin();
                let phase = C64::new(y.cos(), y.sin());
                let mut g = ComplexMatrix::identity(d);
                g[(p, p)] = c(thc, 0.0);
                g[(p, q)] = phase * ths;
                g[(q, p)] = -phase.conj() * ths;
                g[(q, q)] = c(thc, 0.0);
                u = u.matmul(&g);
            }
        }
        assert!(u.unitarity_residual() < 1e-12);
        let dec = unitary_eig(&u, 1e-8, &tols()).unwrap();
        let total: usize = dec.clusters.iter().map(|cl| cl.indices.len()).sum();
        assert_eq!(total, d);
        let v = &dec.eigenvectors;
        assert!(v.adjoint().matmul(v).approx_eq(&ComplexMatrix::identity(d), 1e-11));
        for (j, lambda) in dec.eigenvalues.iter().enumerate() {
            let vj = v.column(j);
            assert!(u.matmul(&vj).sub(&vj.scale(*lambda)).hs_norm() < 1e-10);
        }
    }

    #[test]
    fn psd_sqrt_of_projection_is_projection() {
        // √(cP) = √c·P for an orthogonal projection P. Noise on the zero
        // eigenvalues enters the root at √eps ≈ 1.5e−8, hence the bound.
        let v = ComplexMatrix::column_vector(&[c(0.6, 0.0), c(0.8, 0.0)]);
        let p = ComplexMatrix::outer(&v, &v);
        let s = psd_sqrt(&p, &tols()).unwrap();
        assert!(s.approx_eq(&p, 1e-7));
        let cp = p.scale_re(4.0);
        let scp = psd_sqrt(&cp, &tols()).unwrap();
        assert!(scp.approx_eq(&p.scale_re(2.0), 1e-7));
    }

    #[test]
    fn psd_sqrt_zero_and_squares_back() {
        let z = ComplexMatrix::zeros(3, 3);
        assert!(psd_sqrt(&z, &tols()).unwrap().approx_eq(&z, 0.0));

        let mut rng = CounterRng::new(3);
        for d in [2, 4] {
            let g = ComplexMatrix::from_fn(d, d, |_, _| {
                let (x, y) = rng.next_gaussian_pair();
                c(x, y)
            });
            let a = g.matmul(&g.adjoint()); // PSD
            let s = psd_sqrt(&a, &tols()).unwrap();
            assert!(s.matmul(&s).approx_eq(&a, 1e-10 * a.hs_norm().max(1.0)));
        }
    }

    #[test]
    fn psd_sqrt_rejects_negative() {
        let a = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(-0.5, 0.0)]);
        assert!(matches!(psd_sqrt(&a, &tols()), Err(Error::NotPsd { .. })));
    }
}
