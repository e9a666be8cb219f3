//! Seeded Monte Carlo simulation of the PIFS and empirical statistics that
//! cross-check the exact cylinder values.
//!
//! Every trajectory draws from its own counter-based stream keyed by
//! `(master_seed, trajectory_index)`, so ensembles are reproducible no
//! matter how the work is scheduled; merging statistics is commutative.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::pifs::{OutcomeString, Pifs};
use crate::quantum::DensityMatrix;
use crate::rng::CounterRng;

/// One sampled run: outcome string plus (optionally) the visited states,
/// starting from `ρ_0 = ρ_*`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub outcomes: OutcomeString,
    /// `n + 1` states when recorded: `ρ_0 = ρ_*` and each post-measurement
    /// state.
    pub states: Option<Vec<DensityMatrix>>,
    pub master_seed: u64,
    pub stream_index: u64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }
}

/// One sampling step: inverse-CDF on a single uniform variate, with
/// right-closed intervals and zero-probability branches excluded. Returns
/// the chosen symbol and the normalized post-measurement state.
fn step(p: &Pifs, rho: &DensityMatrix, rng: &mut CounterRng) -> Result<(usize, DensityMatrix)> {
    let k = p.k();
    let threshold = p.zero_prob_threshold();
    let mut branch_mats = Vec::with_capacity(k);
    let mut probs = Vec::with_capacity(k);
    for i in 0..k {
        let m = p.kraus()[i].matmul(rho.matrix());
        let m = m.matmul(&p.kraus()[i].adjoint());
        let prob = m.trace().re.clamp(0.0, 1.0);
        probs.push(if prob > threshold { prob } else { 0.0 });
        branch_mats.push(m);
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::ProbabilityNotNormalized { sum: total });
    }
    let u = rng.next_f64() * total;
    let mut cum = 0.0;
    let mut chosen = None;
    for (i, &prob) in probs.iter().enumerate() {
        if prob == 0.0 {
            continue;
        }
        cum += prob;
        if u <= cum {
            chosen = Some(i);
            break;
        }
    }
    let chosen = chosen.unwrap_or_else(|| {
        // u landed past the accumulated mass by rounding: last live branch
        probs.iter().rposition(|&q| q > 0.0).expect("some branch has mass")
    });
    let next = DensityMatrix::from_evolved(branch_mats.swap_remove(chosen));
    Ok((chosen, next))
}

/// Sample one trajectory of length `n` on stream `(master_seed, index)`.
/// Deterministic per `(master_seed, index, n)`.
pub fn sample_trajectory_indexed(
    p: &Pifs,
    n: usize,
    master_seed: u64,
    index: u64,
    record_states: bool,
) -> Result<Trajectory> {
    assert!(n >= 1);
    let mut rng = CounterRng::stream(master_seed, index);
    let mut state = p.stationary_state();
    let mut outcomes = OutcomeString::empty();
    let mut states = record_states.then(|| {
        let mut v = Vec::with_capacity(n + 1);
        v.push(state.clone());
        v
    });
    for _ in 0..n {
        let (symbol, next) = step(p, &state, &mut rng)?;
        outcomes.push(symbol);
        if let Some(states) = states.as_mut() {
            states.push(next.clone());
        }
        state = next;
    }
    Ok(Trajectory { outcomes, states, master_seed, stream_index: index })
}

/// Sample stream 0 of `seed`.
pub fn sample_trajectory(p: &Pifs, n: usize, seed: u64, record_states: bool) -> Result<Trajectory> {
    sample_trajectory_indexed(p, n, seed, 0, record_states)
}

/// Aggregated prefix counts over an ensemble of independent trajectories.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EmpiricalStats {
    pub sample_count: u64,
    pub prefix_len: usize,
    pub traj_len: usize,
    /// Count of each observed prefix of length `1..=prefix_len`.
    pub cylinder_counts: BTreeMap<OutcomeString, u64>,
    /// Occurrences of each symbol across all sampled steps.
    pub symbol_counts: Vec<u64>,
}

impl EmpiricalStats {
    /// Empirical estimate of `ℙ_*(C_s)`.
    pub fn frequency(&self, s: &OutcomeString) -> f64 {
        let count = self.cylinder_counts.get(s).copied().unwrap_or(0);
        count as f64 / self.sample_count as f64
    }

    /// Binomial standard error `√(p̂(1−p̂)/n)` of the estimate.
    pub fn standard_error(&self, s: &OutcomeString) -> f64 {
        let p = self.frequency(s);
        (p * (1.0 - p) / self.sample_count as f64).sqrt()
    }

    /// Running mean of each symbol over all steps.
    pub fn symbol_frequencies(&self) -> Vec<f64> {
        let total = self.sample_count as f64 * self.traj_len as f64;
        self.symbol_counts.iter().map(|&c| c as f64 / total).collect()
    }

    /// Commutative merge of disjoint sample sets.
    pub fn merge(&mut self, other: &EmpiricalStats) {
        debug_assert_eq!(self.prefix_len, other.prefix_len);
        debug_assert_eq!(self.traj_len, other.traj_len);
        self.sample_count += other.sample_count;
        for (s, c) in &other.cylinder_counts {
            *self.cylinder_counts.entry(s.clone()).or_insert(0) += c;
        }
        if self.symbol_counts.len() < other.symbol_counts.len() {
            self.symbol_counts.resize(other.symbol_counts.len(), 0);
        }
        for (i, c) in other.symbol_counts.iter().enumerate() {
            self.symbol_counts[i] += c;
        }
    }
}

/// Count prefixes of length `≤ prefix_len` over `n_samples` independent
/// trajectories of length `traj_len`, streams `(seed, 0..n_samples)`.
pub fn empirical_cylinder_freq(
    p: &Pifs,
    prefix_len: usize,
    n_samples: u64,
    traj_len: usize,
    seed: u64,
) -> Result<EmpiricalStats> {
    if prefix_len > traj_len {
        return Err(Error::DimensionMismatch { expected: traj_len, found: prefix_len });
    }
    let mut stats = EmpiricalStats {
        sample_count: 0,
        prefix_len,
        traj_len,
        cylinder_counts: BTreeMap::new(),
        symbol_counts: alloc::vec![0; p.k()],
    };
    for index in 0..n_samples {
        let traj = sample_trajectory_indexed(p, traj_len, seed, index, false)?;
        accumulate(&mut stats, &traj);
    }
    Ok(stats)
}

/// Fold a single trajectory into the statistics (used by parallel drivers;
/// merging partial `EmpiricalStats` is commutative).
pub fn accumulate(stats: &mut EmpiricalStats, traj: &Trajectory) {
    stats.sample_count += 1;
    let symbols = traj.outcomes.symbols();
    for l in 1..=stats.prefix_len.min(symbols.len()) {
        let prefix = OutcomeString::new(symbols[..l].to_vec());
        *stats.cylinder_counts.entry(prefix).or_insert(0) += 1;
    }
    for &s in symbols {
        if stats.symbol_counts.len() <= s {
            stats.symbol_counts.resize(s + 1, 0);
        }
        stats.symbol_counts[s] += 1;
    }
}

/// Time average `(1/n)·Σ_t f(outcome_t)` of symbol weights along one
/// trajectory (stream 0 of `seed`).
pub fn birkhoff_average(p: &Pifs, weights: &[f64], traj_len: usize, seed: u64) -> Result<f64> {
    if weights.len() != p.k() {
        return Err(Error::DimensionMismatch { expected: p.k(), found: weights.len() });
    }
    let traj = sample_trajectory(p, traj_len, seed, false)?;
    let sum: f64 = traj.outcomes.symbols().iter().map(|&s| weights[s]).sum();
    Ok(sum / traj_len as f64)
}
