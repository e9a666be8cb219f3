//! The partial iterated function system of a repeatedly measured system.
//!
//! A step applies the unitary channel `ρ ↦ UρU*`, then the Lüders update for
//! the observed outcome `i`, so the branch maps are
//! `F_i(ρ) = √Π_i UρU* √Π_i / p_i(ρ)` with `p_i(ρ) = tr(Π_i UρU*)`; `F_i` is
//! undefined where `p_i` vanishes. Iterating from the maximally mixed state
//! induces a shift-invariant measure on outcome sequences whose cylinder
//! values are exact trace formulas in the Kraus factors `K_i = √Π_i·U`.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::quantum::{maximally_mixed, DensityMatrix, Povm, Unitary};
use crate::tol::Tolerances;

/// Finite outcome string over `I_k = {1, …, k}`, stored 0-based and rendered
/// 1-based. The empty string `ε` is allowed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct OutcomeString {
    symbols: Vec<usize>,
}

impl OutcomeString {
    /// Empty string `ε`.
    pub fn empty() -> Self {
        Self::default()
    }

    /// From 0-based symbols.
    pub fn new(symbols: Vec<usize>) -> Self {
        Self { symbols }
    }

    /// From 1-based symbols, validated against the alphabet size.
    pub fn from_one_based(symbols: &[usize], k: usize) -> Result<Self> {
        let mut out = Vec::with_capacity(symbols.len());
        for &s in symbols {
            if s < 1 || s > k {
                return Err(Error::SymbolOutOfRange { symbol: s, k });
            }
            out.push(s - 1);
        }
        Ok(Self { symbols: out })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// 0-based symbols.
    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn push(&mut self, symbol: usize) {
        self.symbols.push(symbol);
    }

    pub fn reversed(&self) -> Self {
        let mut symbols = self.symbols.clone();
        symbols.reverse();
        Self { symbols }
    }

    /// The constant string `s^n` of a single 0-based symbol.
    pub fn repeated(symbol: usize, n: usize) -> Self {
        Self { symbols: alloc::vec![symbol; n] }
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.symbols.iter().map(|&s| s + 1).collect()
    }
}

impl fmt::Display for OutcomeString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.symbols.is_empty() {
            return write!(f, "ε");
        }
        for (i, s) in self.symbols.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", s + 1)?;
        }
        Ok(())
    }
}

/// Cylinder probability evaluated along both exact routes: the trace of the
/// Kraus product against `ρ_* = I/d`, and the scaled squared
/// Hilbert–Schmidt norm of the reversed adjoint product. The two agree up to
/// rounding; `value()` reports the canonical (trace) route.
#[derive(Clone, Copy, Debug)]
pub struct CylinderProb {
    pub trace_formula: f64,
    pub hs_formula: f64,
}

impl CylinderProb {
    /// Canonical value (trace route, clamped to `[0, 1]`).
    pub fn value(&self) -> f64 {
        self.trace_formula
    }

    pub fn difference(&self) -> f64 {
        (self.trace_formula - self.hs_formula).abs()
    }
}

/// The PIFS `(S(ℂ^d), F_i, p_i)` of a unitary `U` and a POVM `Π`, with the
/// Kraus factors `K_i = √Π_i·U` precomputed. Immutable after construction;
/// all evaluations are pure.
#[derive(Clone, Debug)]
pub struct Pifs {
    u: Unitary,
    povm: Povm,
    /// `K_i = √Π_i · U`.
    kraus: Vec<ComplexMatrix>,
    /// `K_i* = U*·√Π_i`, kept for the Hilbert–Schmidt route.
    kraus_adj: Vec<ComplexMatrix>,
    zero_prob_threshold: f64,
}

impl Pifs {
    /// Build and validate: `Σ K_i*K_i = I` and `Σ K_i ρ_* K_i* = ρ_*`.
    pub fn new(u: Unitary, povm: Povm, tols: &Tolerances) -> Result<Self> {
        let d = u.dim();
        if povm.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: povm.dim() });
        }
        let roots = povm.sqrt_elements(tols)?;
        let kraus: Vec<ComplexMatrix> = roots.iter().map(|s| s.matmul(u.matrix())).collect();
        let kraus_adj: Vec<ComplexMatrix> = kraus.iter().map(|k| k.adjoint()).collect();

        let mut ksum = ComplexMatrix::zeros(d, d);
        let mut stationary = ComplexMatrix::zeros(d, d);
        for (k, ka) in kraus.iter().zip(&kraus_adj) {
            ksum = ksum.add(&ka.matmul(k));
            stationary = stationary.add(&k.matmul(ka)); // K·(I/d)·K* summed, scaled below
        }
        let residual = ksum.sub(&ComplexMatrix::identity(d)).hs_norm();
        if residual > tols.tol_sum {
            return Err(Error::SumNotIdentity { residual });
        }
        let stat_residual = stationary
            .scale_re(1.0 / d as f64)
            .sub(&ComplexMatrix::identity(d).scale_re(1.0 / d as f64))
            .hs_norm();
        if stat_residual > tols.tol_sum {
            return Err(Error::SumNotIdentity { residual: stat_residual });
        }

        Ok(Self { u, povm, kraus, kraus_adj, zero_prob_threshold: tols.zero_prob_threshold })
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    /// Alphabet size.
    pub fn k(&self) -> usize {
        self.povm.k()
    }

    pub fn unitary(&self) -> &Unitary {
        &self.u
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    /// The Kraus factors `K_i = √Π_i·U`.
    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn zero_prob_threshold(&self) -> f64 {
        self.zero_prob_threshold
    }

    /// `ρ_* = I/d`, the fixed initial state.
    pub fn stationary_state(&self) -> DensityMatrix {
        maximally_mixed(self.dim()).expect("d >= 2 by construction")
    }

    fn check_symbol(&self, i: usize) -> Result<()> {
        if i >= self.k() {
            return Err(Error::SymbolOutOfRange { symbol: i + 1, k: self.k() });
        }
        Ok(())
    }

    /// Born probability `p_i(ρ) = tr(Π_i UρU*) = tr(K_i ρ K_i*)`, clamped to
    /// `[0, 1]`.
    pub fn outcome_prob(&self, rho: &DensityMatrix, i: usize) -> Result<f64> {
        self.check_symbol(i)?;
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: rho.dim() });
        }
        let k = &self.kraus[i];
        let p = k.matmul(rho.matrix()).matmul(&self.kraus_adj[i]).trace().re;
        Ok(p.clamp(0.0, 1.0))
    }

    /// All `k` outcome probabilities at once.
    pub fn outcome_probs(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        (0..self.k()).map(|i| self.outcome_prob(rho, i)).collect()
    }

    /// Branch map `F_i(ρ) = K_i ρ K_i* / p_i(ρ)`; undefined (error) on the
    /// zero-probability branch.
    pub fn evolve(&self, rho: &DensityMatrix, i: usize) -> Result<DensityMatrix> {
        let p = self.outcome_prob(rho, i)?;
        if p <= self.zero_prob_threshold {
            return Err(Error::ZeroProbabilityBranch { symbol: i, prob: p });
        }
        let n = self.kraus[i].matmul(rho.matrix()).matmul(&self.kraus_adj[i]);
        Ok(DensityMatrix::from_evolved(n))
    }

    /// Closed-form string probability `tr(M ρ M*)` with
    /// `M = K_{i_n}···K_{i_1}`; `p_ε(ρ) = 1`.
    pub fn string_prob(&self, rho: &DensityMatrix, s: &OutcomeString) -> Result<f64> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: rho.dim() });
        }
        if s.is_empty() {
            return Ok(1.0);
        }
        // accumulate left-to-right in outcome order: M ← K_i · M
        let mut m: Option<ComplexMatrix> = None;
        for &i in s.symbols() {
            self.check_symbol(i)?;
            m = Some(match m {
                None => self.kraus[i].clone(),
                Some(prev) => self.kraus[i].matmul(&prev),
            });
        }
        let m = m.expect("nonempty string");
        let p = m.matmul(rho.matrix()).matmul(&m.adjoint()).trace().re;
        Ok(p.clamp(0.0, 1.0))
    }

    /// Recursive route for cross-validation: `p_{ιj}(ρ) = p_j(F_ι(ρ))·p_ι(ρ)`
    /// with the zero-probability short-circuit. The closed form above is the
    /// canonical (numerically stabler) path.
    pub fn string_prob_recursive(&self, rho: &DensityMatrix, s: &OutcomeString) -> Result<f64> {
        let mut prob = 1.0;
        let mut state = rho.clone();
        for &i in s.symbols() {
            let p = self.outcome_prob(&state, i)?;
            if p <= self.zero_prob_threshold {
                return Ok(0.0);
            }
            prob *= p;
            state = self.evolve(&state, i)?;
        }
        Ok(prob)
    }

    /// Measure of the cylinder `C_s`: `p_s(ρ_*)`, evaluated along both the
    /// trace route and the Hilbert–Schmidt route
    /// `(1/d)·‖U*√Π_{i_1}···U*√Π_{i_n}‖²`.
    pub fn kusuoka_cylinder_prob(&self, s: &OutcomeString) -> Result<CylinderProb> {
        let trace = self.string_prob(&self.stationary_state(), s)?;
        let hs = if s.is_empty() {
            1.0
        } else {
            let mut n: Option<ComplexMatrix> = None;
            for &i in s.symbols() {
                n = Some(match n {
                    None => self.kraus_adj[i].clone(),
                    Some(prev) => prev.matmul(&self.kraus_adj[i]),
                });
            }
            n.expect("nonempty string").hs_norm_sqr() / self.dim() as f64
        };
        Ok(CylinderProb { trace_formula: trace, hs_formula: hs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{
        computational_pvm, computational_split_povm, diagonal_unitary, hadamard,
        harmonic_rank1_povm,
    };
    use crate::linalg::C64;
    use crate::quantum::validate_povm;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// d = 3, U = diag(1, i, −1), blocks {e1,e2} / {e3}: the canonical
    /// non-ergodic two-projection instance (delta transitions).
    fn block_instance() -> Pifs {
        let u = diagonal_unitary(&[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)]);
        Pifs::new(u, computational_split_povm(3), &tols()).unwrap()
    }

    fn hadamard_instance() -> Pifs {
        Pifs::new(hadamard(), computational_pvm(2), &tols()).unwrap()
    }

    #[test]
    fn outcome_string_rendering() {
        let s = OutcomeString::from_one_based(&[1, 2, 1], 2).unwrap();
        assert_eq!(s.symbols(), &[0, 1, 0]);
        assert_eq!(alloc::format!("{s}"), "1,2,1");
        assert_eq!(alloc::format!("{}", OutcomeString::empty()), "ε");
        assert!(OutcomeString::from_one_based(&[3], 2).is_err());
        assert!(OutcomeString::from_one_based(&[0], 2).is_err());
    }

    #[test]
    fn rank1_first_measurement_is_uniform() {
        // every outcome equally likely from ρ_*
        let povm = harmonic_rank1_povm(2, 3, &[0, 1]).unwrap();
        let p = Pifs::new(hadamard(), povm, &tols()).unwrap();
        let rho = p.stationary_state();
        for i in 0..3 {
            assert!((p.outcome_prob(&rho, i).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn block_instance_first_probabilities() {
        // proportional to the projection ranks: (d−1)/d and 1/d
        let p = block_instance();
        let rho = p.stationary_state();
        assert!((p.outcome_prob(&rho, 0).unwrap() - 2.0 / 3.0).abs() < 1e-14);
        assert!((p.outcome_prob(&rho, 1).unwrap() - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn trivial_single_element_povm() {
        let povm = validate_povm(alloc::vec![ComplexMatrix::identity(2)], &tols()).unwrap();
        let p = Pifs::new(hadamard(), povm, &tols()).unwrap();
        let rho = p.stationary_state();
        assert!((p.outcome_prob(&rho, 0).unwrap() - 1.0).abs() < 1e-14);
        let s = OutcomeString::repeated(0, 5);
        assert!((p.string_prob(&rho, &s).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank1_evolution_is_constant() {
        // F_i(ρ) = |φ_i⟩⟨φ_i| for every admissible ρ
        let povm = harmonic_rank1_povm(2, 3, &[0, 1]).unwrap();
        let phis: Vec<ComplexMatrix> = povm.rank1_view().unwrap().vectors.clone();
        let p = Pifs::new(hadamard(), povm, &tols()).unwrap();

        let rho_star = p.stationary_state();
        let other = DensityMatrix::pure(&ComplexMatrix::column_vector(&[
            c(0.6, 0.0),
            c(0.0, 0.8),
        ]))
        .unwrap();
        for i in 0..3 {
            for rho in [&rho_star, &other] {
                let out = p.evolve(rho, i).unwrap();
                let expected = ComplexMatrix::outer(&phis[i], &phis[i]);
                assert!(out.matrix().approx_eq(&expected, 1e-12));
            }
        }
    }

    #[test]
    fn block_instance_evolution() {
        let p = block_instance();
        let rho = p.stationary_state();
        // F_1(ρ_*) = Π_1/(d−1), F_2(ρ_*) = Π_2
        let f1 = p.evolve(&rho, 0).unwrap();
        assert!(f1
            .matrix()
            .approx_eq(&p.povm().element(0).scale_re(0.5), 1e-13));
        let f2 = p.evolve(&rho, 1).unwrap();
        assert!(f2.matrix().approx_eq(p.povm().element(1), 1e-13));
        // cross branches are forbidden: p_2(F_1(ρ_*)) = 0
        assert!(matches!(
            p.evolve(&f1, 1),
            Err(Error::ZeroProbabilityBranch { .. })
        ));
    }

    #[test]
    fn string_probabilities_by_hand() {
        let p = block_instance();
        let rho = p.stationary_state();
        // ε
        assert_eq!(p.string_prob(&rho, &OutcomeString::empty()).unwrap(), 1.0);
        // delta transitions kill mixed strings
        let s12 = OutcomeString::new(alloc::vec![0, 1]);
        assert!(p.string_prob(&rho, &s12).unwrap() < 1e-15);

        // Hadamard + computational basis: p(1,1) = 1/2·|⟨e1, H e1⟩|² = 1/4
        let h = hadamard_instance();
        let s11 = OutcomeString::new(alloc::vec![0, 0]);
        assert!((h.string_prob(&h.stationary_state(), &s11).unwrap() - 0.25).abs() < 1e-13);
    }

    #[test]
    fn cylinder_probabilities_match_both_routes() {
        let p = block_instance();
        for n in 1..=10 {
            let ones = p.kusuoka_cylinder_prob(&OutcomeString::repeated(0, n)).unwrap();
            assert!((ones.value() - 2.0 / 3.0).abs() < 1e-13, "n = {n}");
            assert!(ones.difference() < 1e-13);
            let twos = p.kusuoka_cylinder_prob(&OutcomeString::repeated(1, n)).unwrap();
            assert!((twos.value() - 1.0 / 3.0).abs() < 1e-13, "n = {n}");
            assert!(twos.difference() < 1e-13);
        }
    }

    #[test]
    fn total_probability_over_all_strings() {
        for p in [block_instance(), hadamard_instance()] {
            let k = p.k();
            for n in 1..=8 {
                let mut total = 0.0;
                // simple radix enumeration
                let count = k.pow(n as u32);
                for idx in 0..count {
                    let mut rest = idx;
                    let mut symbols = Vec::with_capacity(n);
                    for _ in 0..n {
                        symbols.push(rest % k);
                        rest /= k;
                    }
                    total += p
                        .kusuoka_cylinder_prob(&OutcomeString::new(symbols))
                        .unwrap()
                        .value();
                }
                assert!((total - 1.0).abs() < 1e-10, "n = {n}, total = {total}");
            }
        }
    }

    #[test]
    fn recursive_route_agrees_with_closed_form() {
        let p = hadamard_instance();
        let rho = p.stationary_state();
        for n in 0..=6usize {
            for idx in 0..2usize.pow(n as u32) {
                let mut rest = idx;
                let mut symbols = Vec::with_capacity(n);
                for _ in 0..n {
                    symbols.push(rest % 2);
                    rest /= 2;
                }
                let s = OutcomeString::new(symbols);
                let closed = p.string_prob(&rho, &s).unwrap();
                let rec = p.string_prob_recursive(&rho, &s).unwrap();
                assert!((closed - rec).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn outcome_probabilities_sum_to_one() {
        let p = hadamard_instance();
        let probs = p.outcome_probs(&p.stationary_state()).unwrap();
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
