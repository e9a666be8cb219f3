//! Markov layer of rank-1 POVMs.
//!
//! For a rank-1 POVM every branch map is constant (`F_i ≡ |φ_i⟩⟨φ_i|`), so
//! the outcome process is a Markov chain on `I_k` with uniform initial
//! distribution and bistochastic transition matrix
//! `Q_ij = p_j(ρ_i) = (d/k)·|⟨φ_j, Uφ_i⟩|²`; the cylinder measure factorizes
//! over `Q`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::pifs::{OutcomeString, Pifs};

/// Row-stochastic (in fact bistochastic) transition matrix on `I_k`.
/// Row `i` holds the outcome distribution after previous outcome `i`.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    k: usize,
    q: Vec<f64>,
}

impl TransitionMatrix {
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.k + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.q[i * self.k..(i + 1) * self.k]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.k).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.k)
            .map(|j| (0..self.k).map(|i| self.get(i, j)).sum())
            .collect()
    }

    /// Largest deviation of any row or column sum from 1.
    pub fn bistochastic_residual(&self) -> f64 {
        self.row_sums()
            .iter()
            .chain(self.column_sums().iter())
            .map(|s| (s - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Transition matrix `Q_ij = (d/k)·|⟨φ_j, Uφ_i⟩|²` of a rank-1 instance.
pub fn transition_matrix(p: &Pifs) -> Result<TransitionMatrix> {
    let Some(view) = p.povm().rank1_view() else {
        return Err(Error::WrongPovmKind { expected: "rank-1 POVM" });
    };
    let k = p.k();
    let u = p.unitary().matrix();
    let mapped: Vec<_> = view.vectors.iter().map(|phi| u.matmul(phi)).collect();
    let mut q = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            q[i * k + j] = view.scale * view.vectors[j].hs_inner(&mapped[i]).norm_sqr();
        }
    }
    let tm = TransitionMatrix { k, q };
    Ok(tm)
}

/// Markov factorization of the cylinder measure:
/// `(1/k)·Q_{i_1 i_2}·…·Q_{i_{n−1} i_n}` with uniform initial distribution.
pub fn markov_cylinder_prob(q: &TransitionMatrix, s: &OutcomeString) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::EmptyString);
    }
    for &sym in s.symbols() {
        if sym >= q.k() {
            return Err(Error::SymbolOutOfRange { symbol: sym + 1, k: q.k() });
        }
    }
    let mut prob = 1.0 / q.k() as f64;
    for w in s.symbols().windows(2) {
        prob *= q.get(w[0], w[1]);
    }
    Ok(prob)
}

/// Result of the strong-connectivity test on the transition graph.
#[derive(Clone, Debug)]
pub struct IrreducibilityCheck {
    pub irreducible: bool,
    /// When reducible: a proper nonempty closed set `S` (no edges leave it).
    pub witness: Option<Vec<usize>>,
}

/// Strong connectivity of the graph with an edge `i → j` whenever
/// `Q_ij > threshold`. Reachability closure is cubic in `k`, which is all
/// these alphabet sizes need.
pub fn is_irreducible(q: &TransitionMatrix, threshold: f64) -> IrreducibilityCheck {
    let k = q.k();
    let mut reach = vec![false; k * k];
    for i in 0..k {
        reach[i * k + i] = true;
        for j in 0..k {
            if q.get(i, j) > threshold {
                reach[i * k + j] = true;
            }
        }
    }
    for mid in 0..k {
        for i in 0..k {
            if reach[i * k + mid] {
                for j in 0..k {
                    if reach[mid * k + j] {
                        reach[i * k + j] = true;
                    }
                }
            }
        }
    }
    let strongly_connected =
        (0..k).all(|i| (0..k).all(|j| reach[i * k + j] && reach[j * k + i]));
    if strongly_connected {
        return IrreducibilityCheck { irreducible: true, witness: None };
    }

    // mutual-reachability classes; a class with no outgoing edges is closed
    let mut assigned = vec![false; k];
    for i in 0..k {
        if assigned[i] {
            continue;
        }
        let class: Vec<usize> = (0..k)
            .filter(|&j| reach[i * k + j] && reach[j * k + i])
            .collect();
        for &j in &class {
            assigned[j] = true;
        }
        if class.len() == k {
            continue;
        }
        let closed = class.iter().all(|&a| {
            (0..k).all(|b| class.contains(&b) || q.get(a, b) <= threshold)
        });
        if closed {
            return IrreducibilityCheck { irreducible: false, witness: Some(class) };
        }
    }
    unreachable!("a reducible graph always has a closed class");
}
