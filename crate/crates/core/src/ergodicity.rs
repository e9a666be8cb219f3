//! Ergodicity criteria for the outcome measure, with cross-validation.
//!
//! Irreducibility of the Kraus family `{√Π_i·U}` is sufficient for
//! ergodicity for any measurement. For rank-1 POVMs and for two-projection
//! PVMs with ranks `(d−1, 1)` it is also necessary, and each class has an
//! equivalent criterion with a finite search space:
//!
//! * rank-1: strong connectivity of the outcome transition matrix, or
//!   equivalently nonexistence of a non-trivial `U`-invariant subspace `W`
//!   with every `φ_i ∈ W ∪ W^⊥`;
//! * two-projection: no eigenvector of `U` inside `Θ = im Π_1`.
//!
//! The general irreducibility test is a Burnside closure: the family is
//! irreducible over ℂ exactly when the unital algebra it generates spans the
//! full `d²`-dimensional matrix space.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{orthonormalize, unitary_eig, C64, ComplexMatrix, Subspace};
use crate::markov::{is_irreducible, transition_matrix};
use crate::pifs::Pifs;
use crate::quantum::{Povm, PovmKindTag, Unitary};
use crate::tol::Tolerances;

/// Subset search refuses alphabets beyond this size (2^k enumeration).
pub const SUBSET_SEARCH_MAX_K: usize = 20;

/// Result of the Burnside closure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlgebraClosure {
    /// `dimension == d²`.
    pub irreducible: bool,
    /// Dimension of the unital algebra generated by the family, as a
    /// subspace of the `d²`-dimensional matrix space.
    pub dimension: usize,
}

/// Dimension of the unital algebra generated by `family`, computed as the
/// span of all words: seed with `I`, close under left multiplication by the
/// generators, orthonormalizing in the Hilbert–Schmidt inner product.
///
/// Generators and accepted basis elements are normalized to unit norm, and
/// a candidate direction counts as new only when its residual exceeds
/// `tol_rank` absolutely. Directions carried purely by rounding noise (a
/// family within `tol_rank` of a reducible one) are therefore discarded —
/// numerical irreducibility is a thresholded rank decision.
pub fn algebra_irreducible(family: &[ComplexMatrix], tol_rank: f64) -> AlgebraClosure {
    assert!(!family.is_empty(), "need a nonempty family");
    let d = family[0].rows();
    let full = d * d;
    let generators: Vec<ComplexMatrix> = family
        .iter()
        .filter(|g| g.hs_norm() > 1e-300)
        .map(|g| g.scale_re(1.0 / g.hs_norm()))
        .collect();

    let mut basis: Vec<ComplexMatrix> = Vec::with_capacity(full);
    let try_add = |basis: &mut Vec<ComplexMatrix>, cand: &ComplexMatrix| -> bool {
        let mut r = cand.clone();
        for _ in 0..2 {
            for b in basis.iter() {
                let coeff = b.hs_inner(&r);
                r = r.sub(&b.scale(coeff));
            }
        }
        let norm = r.hs_norm();
        if norm > tol_rank {
            basis.push(r.scale_re(1.0 / norm));
            true
        } else {
            false
        }
    };

    try_add(&mut basis, &ComplexMatrix::identity(d).scale_re(1.0 / (d as f64).sqrt()));
    let mut frontier: Vec<usize> = vec![0];
    while let Some(idx) = frontier.pop() {
        if basis.len() == full {
            break;
        }
        let current = basis[idx].clone();
        for g in &generators {
            let cand = g.matmul(&current);
            if try_add(&mut basis, &cand) {
                frontier.push(basis.len() - 1);
            }
            if basis.len() == full {
                break;
            }
        }
    }
    AlgebraClosure { irreducible: basis.len() == full, dimension: basis.len() }
}

/// A family and its adjoints are irreducible together; this self-test
/// returns whether the two closures agree.
pub fn adjoint_family_equiv_check(family: &[ComplexMatrix], tol_rank: f64) -> bool {
    let adjoints: Vec<ComplexMatrix> = family.iter().map(|a| a.adjoint()).collect();
    algebra_irreducible(family, tol_rank).irreducible
        == algebra_irreducible(&adjoints, tol_rank).irreducible
}

/// Invariance criterion for scaled-projection POVMs: `W` is invariant for
/// every `√Π_i·U` exactly when `U(W) = W` and every `Π_i(W) ⊆ W`. Both
/// sides are computed; disagreement (a tolerance breakdown) is an error.
pub fn scaled_projection_criterion(
    u: &Unitary,
    povm: &Povm,
    w: &Subspace,
    tols: &Tolerances,
) -> Result<bool> {
    if povm.pvm_view().is_none() && povm.rank1_view().is_none() {
        return Err(Error::WrongPovmKind { expected: "scaled-projection (PVM or rank-1)" });
    }
    if !w.is_proper_nontrivial() {
        return Err(Error::TrivialSubspace);
    }
    let tol = tols.tol_membership;

    let image_u = w.image(u.matrix())?;
    let mut lhs = image_u.approx_eq_span(w, tol);
    if lhs {
        for p in povm.elements() {
            if !w.contains_subspace(&w.image(p)?, tol) {
                lhs = false;
                break;
            }
        }
    }

    let mut rhs = true;
    for root in povm.sqrt_elements(tols)? {
        let k = root.matmul(u.matrix());
        if !w.contains_subspace(&w.image(&k)?, tol) {
            rhs = false;
            break;
        }
    }

    if lhs != rhs {
        return Err(Error::CriterionMismatch {
            detail: alloc::format!(
                "projection-invariance {lhs} vs composed-operator invariance {rhs}"
            ),
        });
    }
    Ok(lhs)
}

/// Smallest `U`-invariant subspace containing the selected vectors: the span
/// of `U^m·v` for `m ≤ d−1`. By Cayley–Hamilton, `U^d` is a polynomial in
/// lower powers, so depth `d−1` already closes the orbit.
fn krylov_invariant_span(
    u: &Unitary,
    vectors: &[&ComplexMatrix],
    tol_rank: f64,
) -> Result<Subspace> {
    let d = u.dim();
    let mut generated: Vec<ComplexMatrix> = Vec::with_capacity(vectors.len() * d);
    for &v in vectors {
        let mut cur = v.clone();
        for _ in 0..d {
            generated.push(cur.clone());
            cur = u.matrix().matmul(&cur);
        }
    }
    orthonormalize(d, &generated, tol_rank)
}

/// Advance a combination of `{0, …, k−1}` to its lexicographic successor;
/// returns `false` once exhausted.
fn next_combination(subset: &mut [usize], k: usize) -> bool {
    let size = subset.len();
    let mut i = size;
    while i > 0 {
        i -= 1;
        if subset[i] != i + k - size {
            subset[i] += 1;
            for j in i + 1..size {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Exhaustive search for a non-trivial `U`-invariant subspace `W` with
/// `φ_i ∈ W` for `i ∈ S` and `φ_j ⊥ W` otherwise. Subsets are enumerated by
/// increasing cardinality, then lexicographically; the first hit is
/// returned. A returned `W` passes `scaled_projection_criterion`.
pub fn rank1_subset_search(
    u: &Unitary,
    povm: &Povm,
    tols: &Tolerances,
) -> Result<Option<(Vec<usize>, Subspace)>> {
    let Some(view) = povm.rank1_view() else {
        return Err(Error::WrongPovmKind { expected: "rank-1 POVM" });
    };
    let k = povm.k();
    if k > SUBSET_SEARCH_MAX_K {
        return Err(Error::TooManyOutcomes { k, max: SUBSET_SEARCH_MAX_K });
    }
    let d = u.dim();

    for size in 1..k {
        let mut subset: Vec<usize> = (0..size).collect();
        loop {
            let selected: Vec<&ComplexMatrix> =
                subset.iter().map(|&i| &view.vectors[i]).collect();
            let w = krylov_invariant_span(u, &selected, tols.tol_rank)?;
            if w.dim() <= d - 1 {
                let rest_orthogonal = (0..k)
                    .filter(|i| !subset.contains(i))
                    .all(|j| w.project(&view.vectors[j]).hs_norm() <= tols.tol_membership);
                if rest_orthogonal {
                    return Ok(Some((subset, w)));
                }
            }
            if !next_combination(&mut subset, k) {
                break;
            }
        }
    }
    Ok(None)
}

/// Per-cluster geometry of `Θ = span{z}^⊥` against the eigenspaces of `U`.
struct ThetaGeometry {
    /// `dim(Θ ∩ E_λ)` per cluster.
    dims: Vec<usize>,
    /// A unit vector in `Θ ∩ E_λ` per cluster, when the intersection is
    /// positive-dimensional, with its Rayleigh eigenvalue.
    witnesses: Vec<Option<(ComplexMatrix, C64)>>,
    /// Orthonormal basis of `⊕_λ (Θ ∩ E_λ)` — the part on which `Π_1·U`
    /// acts unitarily forever.
    invariant_basis: Vec<ComplexMatrix>,
}

fn theta_geometry(u: &Unitary, povm: &Povm, tols: &Tolerances) -> Result<ThetaGeometry> {
    let Some(view) = povm.two_proj_view() else {
        return Err(Error::WrongPovmKind { expected: "two-projection rank-(d−1,1) PVM" });
    };
    let dec = unitary_eig(u.matrix(), tols.tol_cluster, tols)?;
    let umat = u.matrix();

    let mut dims = Vec::with_capacity(dec.clusters.len());
    let mut witnesses = Vec::with_capacity(dec.clusters.len());
    let mut invariant_basis = Vec::new();
    for c in 0..dec.clusters.len() {
        let vc = dec.cluster_basis(c);
        let m = vc.cols();
        let coords = vc.adjoint().matmul(&view.z);
        let overlap = coords.hs_norm();
        let (dim, in_theta) = if overlap <= tols.tol_membership {
            // z has no component here: the whole eigenspace lies in Θ
            (m, vc.clone())
        } else {
            // quotient out the z-direction inside the eigenspace
            let zhat = coords.scale_re(1.0 / overlap);
            let mut cands = Vec::with_capacity(m);
            for j in 0..m {
                let e = ComplexMatrix::basis_vector(m, j);
                let coeff = zhat.hs_inner(&e);
                cands.push(e.sub(&zhat.scale(coeff)));
            }
            let inside = orthonormalize(m, &cands, 1e-12)?;
            (m - 1, vc.matmul(inside.basis()))
        };
        dims.push(dim);
        if dim >= 1 {
            let v = in_theta.column(0);
            let lambda = v.hs_inner(&umat.matmul(&v));
            witnesses.push(Some((v, lambda)));
        } else {
            witnesses.push(None);
        }
        for j in 0..dim {
            invariant_basis.push(in_theta.column(j));
        }
    }
    Ok(ThetaGeometry { dims, witnesses, invariant_basis })
}

/// Search for an eigenvector of `U` inside `Θ`: per eigenvalue cluster,
/// `dim(Θ ∩ E_λ)` is `dim E_λ` minus one when `z` meets the cluster. The
/// returned vector satisfies `‖Uv − λv‖ ≈ 0` and `⟨z, v⟩ ≈ 0`.
pub fn pvm2_eigenvector_in_theta(
    u: &Unitary,
    povm: &Povm,
    tols: &Tolerances,
) -> Result<Option<(ComplexMatrix, C64)>> {
    let geom = theta_geometry(u, povm, tols)?;
    Ok(geom.witnesses.into_iter().flatten().next())
}

/// `Σ_λ dim(Θ ∩ ker(U − λI))`, the limit of the trace sequence.
pub fn theta_spectral_value(u: &Unitary, povm: &Povm, tols: &Tolerances) -> Result<usize> {
    Ok(theta_geometry(u, povm, tols)?.dims.iter().sum())
}

/// The sequence `tr((Π_1·U)^m (Π_1·U)^{*m})` for `m = 1..=m_max` together
/// with its spectral limit.
#[derive(Clone, Debug)]
pub struct TraceLimit {
    pub sequence: Vec<f64>,
    pub spectral_value: f64,
    /// `sequence[m_max] − spectral_value`.
    pub convergence_gap: f64,
}

pub fn lemma_trace_limit(
    u: &Unitary,
    povm: &Povm,
    m_max: usize,
    tols: &Tolerances,
) -> Result<TraceLimit> {
    if povm.two_proj_view().is_none() {
        return Err(Error::WrongPovmKind { expected: "two-projection rank-(d−1,1) PVM" });
    }
    assert!(m_max >= 1);
    let spectral_value = theta_spectral_value(u, povm, tols)? as f64;
    let a = povm.element(0).matmul(u.matrix());
    let mut sequence = Vec::with_capacity(m_max);
    let mut power = a.clone();
    sequence.push(power.hs_norm_sqr());
    for _ in 1..m_max {
        power = a.matmul(&power);
        sequence.push(power.hs_norm_sqr());
    }
    let convergence_gap = sequence[m_max - 1] - spectral_value;
    Ok(TraceLimit { sequence, spectral_value, convergence_gap })
}

/// Suggested iteration depth for the trace limit.
#[derive(Clone, Copy, Debug)]
pub struct MmaxSuggestion {
    pub m_max: usize,
    /// Estimated decay rate (spectral radius of `Π_1·U` off the invariant
    /// part); `None` when that part is already everything.
    pub rate: Option<f64>,
    /// The target gap was not reached within the cap; the reported
    /// `convergence_gap` should be read accordingly.
    pub capped: bool,
}

/// Pick `m` so that the trace sequence is within `target_gap` of its limit:
/// compress `Π_1·U` onto the complement of the invariant part and double
/// `m` until the squared norm of the `m`-th power falls below the target.
pub fn suggest_m_max(
    u: &Unitary,
    povm: &Povm,
    target_gap: f64,
    cap: usize,
    tols: &Tolerances,
) -> Result<MmaxSuggestion> {
    let geom = theta_geometry(u, povm, tols)?;
    let d = u.dim();
    let inv = orthonormalize(d, &geom.invariant_basis, tols.tol_rank)?;
    if inv.dim() == d {
        return Ok(MmaxSuggestion { m_max: 1, rate: None, capped: false });
    }
    let q = inv.orth_complement();
    let a = povm.element(0).matmul(u.matrix());
    let c = q.basis().adjoint().matmul(&a).matmul(q.basis());

    let mut power = c.clone();
    let mut m = 1usize;
    while power.hs_norm_sqr() > 0.5 * target_gap && m < cap {
        power = power.matmul(&power);
        m *= 2;
    }
    let rate = if power.hs_norm() > 0.0 {
        Some(power.hs_norm().powf(1.0 / m as f64))
    } else {
        Some(0.0)
    };
    let capped = power.hs_norm_sqr() > 0.5 * target_gap;
    Ok(MmaxSuggestion { m_max: m.min(cap), rate, capped })
}

/// `ℙ_*` of the eventually-all-1 tail set: `spectral_value / d`. Lies in
/// `[1/d, (d−1)/d]` whenever an eigenvector witness exists.
pub fn nonergodic_tail_mass(u: &Unitary, povm: &Povm, tols: &Tolerances) -> Result<f64> {
    Ok(theta_spectral_value(u, povm, tols)? as f64 / u.dim() as f64)
}

/// Tri-state outcome of the ergodicity decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictStatus {
    Ergodic,
    NonErgodic,
    /// The sufficient condition failed for a measurement class where
    /// necessity is not established; nothing is asserted either way.
    UnknownSufficientOnly,
}

impl VerdictStatus {
    pub fn name(self) -> &'static str {
        match self {
            VerdictStatus::Ergodic => "Ergodic",
            VerdictStatus::NonErgodic => "NonErgodic",
            VerdictStatus::UnknownSufficientOnly => "UnknownSufficientOnly",
        }
    }
}

/// Which criterion produced the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Criterion {
    Rank1Equivalence,
    TwoProjEquivalence,
    KusuokaSufficient,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::Rank1Equivalence => "Rank1Equivalence",
            Criterion::TwoProjEquivalence => "TwoProjEquivalence",
            Criterion::KusuokaSufficient => "KusuokaSufficient",
        }
    }
}

/// Independently checkable evidence for a `NonErgodic` verdict.
#[derive(Clone, Debug)]
pub enum Witness {
    /// Outcome indices (0-based) whose vectors span the invariant subspace,
    /// plus that subspace.
    IndexSubset { subset: Vec<usize>, subspace: Subspace },
    /// A non-trivial invariant subspace.
    InvariantSubspace { subspace: Subspace },
    /// An eigenvector of `U` lying in `Θ`.
    EigenvectorInTheta { vector: ComplexMatrix, eigenvalue: C64 },
}

/// Full ergodicity decision with cross-check summary.
#[derive(Clone, Debug)]
pub struct ErgodicityVerdict {
    pub status: VerdictStatus,
    pub criterion_used: Criterion,
    pub witness: Option<Witness>,
    /// Burnside closure of the Kraus family, run on every path.
    pub algebra: AlgebraClosure,
    /// Whether every criterion evaluated on this instance agreed. On the two
    /// theorem classes this includes `irreducible ⇔ Ergodic`.
    pub consistent: bool,
}

/// Decide ergodicity, dispatching on the measurement class.
pub fn ergodicity_verdict(p: &Pifs, tols: &Tolerances) -> Result<ErgodicityVerdict> {
    let algebra = algebra_irreducible(p.kraus(), tols.tol_rank);
    let povm = p.povm();
    let u = p.unitary();

    match povm.tag() {
        PovmKindTag::TwoProjRankOne => {
            let found = pvm2_eigenvector_in_theta(u, povm, tols)?;
            let status = if found.is_some() {
                VerdictStatus::NonErgodic
            } else {
                VerdictStatus::Ergodic
            };
            let mut consistent =
                algebra.irreducible == matches!(status, VerdictStatus::Ergodic);
            // d = 2 keeps the rank-1 route available as a cross-check
            if povm.rank1_view().is_some() {
                let q = transition_matrix(p)?;
                let check = is_irreducible(&q, p.zero_prob_threshold());
                consistent &= check.irreducible == matches!(status, VerdictStatus::Ergodic);
            }
            let witness = found
                .map(|(vector, eigenvalue)| Witness::EigenvectorInTheta { vector, eigenvalue });
            Ok(ErgodicityVerdict {
                status,
                criterion_used: Criterion::TwoProjEquivalence,
                witness,
                algebra,
                consistent,
            })
        }
        PovmKindTag::RankOnePovm => {
            let q = transition_matrix(p)?;
            let check = is_irreducible(&q, p.zero_prob_threshold());
            let status = if check.irreducible {
                VerdictStatus::Ergodic
            } else {
                VerdictStatus::NonErgodic
            };
            let mut consistent =
                algebra.irreducible == matches!(status, VerdictStatus::Ergodic);
            let witness = if check.irreducible {
                None
            } else {
                match rank1_subset_search(u, povm, tols)? {
                    Some((subset, subspace)) => Some(Witness::IndexSubset { subset, subspace }),
                    None => {
                        // the equivalence guarantees a subset witness; fall
                        // back to the transition-graph closed set
                        consistent = false;
                        check.witness.map(|subset| {
                            let view = povm.rank1_view().expect("rank-1 tag");
                            let selected: Vec<&ComplexMatrix> =
                                subset.iter().map(|&i| &view.vectors[i]).collect();
                            let subspace =
                                krylov_invariant_span(u, &selected, tols.tol_rank)
                                    .unwrap_or_else(|_| Subspace::trivial(u.dim(), tols.tol_rank));
                            Witness::IndexSubset { subset, subspace }
                        })
                    }
                }
            };
            Ok(ErgodicityVerdict {
                status,
                criterion_used: Criterion::Rank1Equivalence,
                witness,
                algebra,
                consistent,
            })
        }
        _ => {
            let status = if algebra.irreducible {
                VerdictStatus::Ergodic
            } else {
                VerdictStatus::UnknownSufficientOnly
            };
            Ok(ErgodicityVerdict {
                status,
                criterion_used: Criterion::KusuokaSufficient,
                witness: None,
                algebra,
                consistent: true,
            })
        }
    }
}
