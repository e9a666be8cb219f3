//! Validated quantum primitives: density matrices, unitaries, POVMs, and
//! classification of measurements into the classes the ergodicity criteria
//! dispatch on.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, psd_sqrt, C64, ComplexMatrix, Subspace};
use crate::rng::CounterRng;
use crate::tol::Tolerances;

/// Hermitian, positive semi-definite, trace-one state on ℂ^d.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validate Hermiticity, positivity and unit trace.
    pub fn new(mat: ComplexMatrix, tols: &Tolerances) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch { expected: mat.rows(), found: mat.cols() });
        }
        if !mat.is_finite() {
            return Err(Error::NonFinite);
        }
        let dec = hermitian_eig(&mat, tols.tol_cluster, tols)?;
        let min = dec.eigenvalues.first().map(|z| z.re).unwrap_or(0.0);
        if min < -tols.tol_psd {
            return Err(Error::NotPsd { index: None, min_eigenvalue: min });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tols.tol_trace || tr.im.abs() > tols.tol_trace {
            return Err(Error::ProbabilityNotNormalized { sum: tr.re });
        }
        Ok(Self { mat })
    }

    /// Pure state `|v⟩⟨v|` from a (not necessarily normalized) vector.
    pub fn pure(v: &ComplexMatrix) -> Result<Self> {
        let norm = v.hs_norm();
        if norm == 0.0 || !v.is_finite() {
            return Err(Error::NonFinite);
        }
        let unit = v.scale_re(1.0 / norm);
        Ok(Self { mat: ComplexMatrix::outer(&unit, &unit) })
    }

    /// Internal constructor for states produced by algebraically
    /// trace-one, PSD-preserving maps; hermitizes and renormalizes only.
    pub(crate) fn from_evolved(mat: ComplexMatrix) -> Self {
        let h = mat.hermitize();
        let tr = h.trace().re;
        Self { mat: h.scale_re(1.0 / tr) }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }
}

/// The maximally mixed state `I/d`.
pub fn maximally_mixed(d: usize) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::BadDimension { dim: d });
    }
    Ok(DensityMatrix { mat: ComplexMatrix::identity(d).scale_re(1.0 / d as f64) })
}

/// Unitary operator on ℂ^d.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary {
    mat: ComplexMatrix,
}

impl Unitary {
    pub fn new(mat: ComplexMatrix, tols: &Tolerances) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch { expected: mat.rows(), found: mat.cols() });
        }
        if !mat.is_finite() {
            return Err(Error::NonFinite);
        }
        let residual = mat.unitarity_residual();
        if residual > tols.tol_unit {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }
}

/// Haar-distributed random unitary, deterministic per seed: QR of a complex
/// Gaussian matrix with the positive-diagonal normalization of R.
pub fn haar_random_unitary(d: usize, seed: u64) -> Unitary {
    assert!(d >= 1);
    let mut rng = CounterRng::stream(seed, 0);
    let g = ComplexMatrix::from_fn(d, d, |_, _| {
        let (x, y) = rng.next_gaussian_pair();
        C64::new(x, y)
    });
    // Gram-Schmidt with a re-orthogonalization pass; the implied R has a
    // positive real diagonal, which makes Q Haar-distributed.
    let mut q = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        let mut v = g.column(j);
        for _ in 0..2 {
            for i in 0..j {
                let qi = q.column(i);
                let coeff = qi.hs_inner(&v);
                v = v.sub(&qi.scale(coeff));
            }
        }
        let norm = v.hs_norm();
        q.set_column(j, &v.scale_re(1.0 / norm));
    }
    Unitary { mat: q }
}

/// Haar-random unit vector in ℂ^d, deterministic per seed.
pub fn haar_random_vector(d: usize, seed: u64) -> ComplexMatrix {
    let mut rng = CounterRng::stream(seed, 1);
    loop {
        let v = ComplexMatrix::from_fn(d, 1, |_, _| {
            let (x, y) = rng.next_gaussian_pair();
            C64::new(x, y)
        });
        let norm = v.hs_norm();
        if norm > 1e-6 {
            return v.scale_re(1.0 / norm);
        }
    }
}

/// Measurement classes the criteria dispatch on; ordered from most generic
/// to most specific.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PovmKindTag {
    General,
    Pvm,
    RankOnePovm,
    TwoProjRankOne,
}

impl PovmKindTag {
    pub fn name(self) -> &'static str {
        match self {
            PovmKindTag::General => "General",
            PovmKindTag::Pvm => "Pvm",
            PovmKindTag::RankOnePovm => "RankOnePovm",
            PovmKindTag::TwoProjRankOne => "TwoProjRankOne",
        }
    }
}

/// View of a POVM whose elements are all projections.
#[derive(Clone, Debug)]
pub struct PvmView {
    /// Rank of each projection.
    pub ranks: Vec<usize>,
}

/// View of a POVM of `k` uniformly scaled rank-1 projections
/// `Π_i = (d/k)·|φ_i⟩⟨φ_i|`.
#[derive(Clone, Debug)]
pub struct Rank1View {
    /// `d/k`.
    pub scale: f64,
    /// Unit vectors `φ_i`, phases fixed so the first nonzero coordinate is
    /// real positive.
    pub vectors: Vec<ComplexMatrix>,
}

/// View of a two-element PVM with ranks `(d−1, 1)`.
#[derive(Clone, Debug)]
pub struct TwoProjView {
    /// Unit vector spanning `im Π_2`.
    pub z: ComplexMatrix,
    /// `Θ = im Π_1 = span{z}^⊥`.
    pub theta: Subspace,
}

/// Validated measurement: Hermitian PSD non-zero elements summing to the
/// identity, with every applicable classification view attached.
#[derive(Clone, Debug)]
pub struct Povm {
    dim: usize,
    elements: Vec<ComplexMatrix>,
    ranks: Vec<usize>,
    tag: PovmKindTag,
    pvm: Option<PvmView>,
    rank1: Option<Rank1View>,
    two_proj: Option<TwoProjView>,
}

/// Fix the phase of a unit vector: first coordinate of magnitude above
/// `threshold` is made real positive.
fn canonical_phase(v: &ComplexMatrix, threshold: f64) -> ComplexMatrix {
    for r in 0..v.rows() {
        let z = v[(r, 0)];
        let n = z.norm();
        if n > threshold {
            return v.scale(z.conj() / n);
        }
    }
    v.clone()
}

/// Validate a list of matrices as a POVM and classify it.
pub fn validate_povm(elements: Vec<ComplexMatrix>, tols: &Tolerances) -> Result<Povm> {
    if elements.is_empty() {
        return Err(Error::BadDimension { dim: 0 });
    }
    let d = elements[0].rows();
    if d < 2 {
        return Err(Error::BadDimension { dim: d });
    }
    let k = elements.len();

    let mut ranks = Vec::with_capacity(k);
    let mut decomps = Vec::with_capacity(k);
    for (i, p) in elements.iter().enumerate() {
        if !p.is_square() || p.rows() != d {
            return Err(Error::DimensionMismatch { expected: d, found: p.rows() });
        }
        if !p.is_finite() {
            return Err(Error::NonFinite);
        }
        let dec = hermitian_eig(p, tols.tol_cluster, tols)?;
        let min = dec.eigenvalues.first().map(|z| z.re).unwrap_or(0.0);
        if min < -tols.tol_psd {
            return Err(Error::NotPsd { index: Some(i), min_eigenvalue: min });
        }
        let rank = dec.eigenvalues.iter().filter(|z| z.re > tols.tol_psd).count();
        if rank == 0 {
            return Err(Error::ZeroElement { index: i });
        }
        ranks.push(rank);
        decomps.push(dec);
    }

    let mut sum = ComplexMatrix::zeros(d, d);
    for p in &elements {
        sum = sum.add(p);
    }
    let sum_residual = sum.sub(&ComplexMatrix::identity(d)).hs_norm();
    if sum_residual > tols.tol_sum {
        return Err(Error::SumNotIdentity { residual: sum_residual });
    }

    // classification views
    let proj_tol = |p: &ComplexMatrix| tols.tol_recon * (1.0 + p.hs_norm());
    let all_projections = elements
        .iter()
        .all(|p| p.matmul(p).sub(p).hs_norm() <= proj_tol(p));
    let mutually_orthogonal = || {
        for i in 0..k {
            for j in (i + 1)..k {
                let cross = elements[i].matmul(&elements[j]).hs_norm();
                if cross > proj_tol(&elements[i]) {
                    return false;
                }
            }
        }
        true
    };
    let pvm = if all_projections && mutually_orthogonal() {
        Some(PvmView { ranks: ranks.clone() })
    } else {
        None
    };

    let rank1 = if ranks.iter().all(|&r| r == 1) {
        let scale = d as f64 / k as f64;
        let mut vectors = Vec::with_capacity(k);
        let mut ok = true;
        for (i, dec) in decomps.iter().enumerate() {
            // dominant eigenvector carries the whole element
            let v = canonical_phase(&dec.eigenvectors.column(d - 1), 1e-8);
            let recon = ComplexMatrix::outer(&v, &v).scale_re(scale);
            if recon.sub(&elements[i]).hs_norm() > tols.tol_recon * (1.0 + scale) {
                ok = false;
                break;
            }
            vectors.push(v);
        }
        ok.then_some(Rank1View { scale, vectors })
    } else {
        None
    };

    let two_proj = match (&pvm, k) {
        (Some(view), 2) if view.ranks[0] == d - 1 && view.ranks[1] == 1 => {
            let z = canonical_phase(&decomps[1].eigenvectors.column(d - 1), 1e-8);
            let theta = Subspace::span_of(&z, tols.tol_rank).orth_complement();
            Some(TwoProjView { z, theta })
        }
        _ => None,
    };

    let tag = if two_proj.is_some() {
        PovmKindTag::TwoProjRankOne
    } else if rank1.is_some() {
        PovmKindTag::RankOnePovm
    } else if pvm.is_some() {
        PovmKindTag::Pvm
    } else {
        PovmKindTag::General
    };

    Ok(Povm { dim: d, elements, ranks, tag, pvm, rank1, two_proj })
}

impl Povm {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of outcomes.
    pub fn k(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &ComplexMatrix {
        &self.elements[i]
    }

    /// Numerical rank of each element.
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Most specific classification.
    pub fn tag(&self) -> PovmKindTag {
        self.tag
    }

    pub fn pvm_view(&self) -> Option<&PvmView> {
        self.pvm.as_ref()
    }

    pub fn rank1_view(&self) -> Option<&Rank1View> {
        self.rank1.as_ref()
    }

    pub fn two_proj_view(&self) -> Option<&TwoProjView> {
        self.two_proj.as_ref()
    }

    /// Square roots of the elements. Scaled projections use the exact
    /// identity `√(cP) = √c·P`, which keeps the Kraus factors at float
    /// accuracy; general elements go through the spectral square root.
    pub fn sqrt_elements(&self, tols: &Tolerances) -> Result<Vec<ComplexMatrix>> {
        if self.pvm.is_some() {
            return Ok(self.elements.clone());
        }
        if let Some(view) = &self.rank1 {
            let inv = 1.0 / view.scale.sqrt();
            return Ok(self.elements.iter().map(|p| p.scale_re(inv)).collect());
        }
        self.elements.iter().map(|p| psd_sqrt(p, tols)).collect()
    }
}
