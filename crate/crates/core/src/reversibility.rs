//! Reversibility of the outcome measure: every string is as likely as its
//! reverse.
//!
//! For two-projection PVMs with ranks `(d−1, 1)` this holds exactly; the
//! scan verifies it by exhaustive enumeration, and doubles as a
//! counterexample search for other measurement classes, where no claim is
//! made either way.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::pifs::{OutcomeString, Pifs};
use crate::quantum::DensityMatrix;
use crate::tol::Tolerances;

/// Enumeration guard: `k^n_max` must stay at or below this.
pub const ENUMERATION_GUARD: u128 = 10_000_000;

/// Result of the exhaustive string/reverse comparison.
#[derive(Clone, Debug)]
pub struct ReversibilityScan {
    pub max_discrepancy: f64,
    /// A string attaining the maximum.
    pub worst_string: OutcomeString,
    pub strings_checked: u64,
}

fn digit_reverse(mut idx: usize, k: usize, n: usize) -> usize {
    let mut out = 0;
    for _ in 0..n {
        out = out * k + idx % k;
        idx /= k;
    }
    out
}

/// All `|ℙ_*(C_ι) − ℙ_*(C_reverse(ι))|` over strings of length `1..=n_max`.
///
/// Probabilities per length are filled by a depth-first walk that extends
/// the Kraus product one factor at a time (appending outcome `j` multiplies
/// by `K_j` on the left), so each of the `k^n` strings costs one matrix
/// product; against `ρ_* = I/d` the trace is `‖M‖²_HS/d`.
pub fn reversibility_scan(p: &Pifs, n_max: usize) -> Result<ReversibilityScan> {
    assert!(n_max >= 1);
    let k = p.k();
    let total = (k as u128).pow(n_max as u32);
    if total > ENUMERATION_GUARD {
        return Err(Error::EnumerationTooLarge { total, max: ENUMERATION_GUARD });
    }
    let d = p.dim() as f64;

    let mut max_discrepancy = 0.0f64;
    let mut worst: Vec<usize> = vec![0];
    let mut strings_checked = 0u64;
    for n in 1..=n_max {
        let count = k.pow(n as u32);
        let mut probs = vec![0.0f64; count];
        // stack entries: (depth, radix index of the prefix, product matrix)
        let mut stack = Vec::with_capacity(k * n);
        for j in 0..k {
            stack.push((1usize, j, p.kraus()[j].clone()));
        }
        while let Some((depth, idx, m)) = stack.pop() {
            if depth == n {
                probs[idx] = m.hs_norm_sqr() / d;
                continue;
            }
            let stride = k.pow(depth as u32);
            for j in 0..k {
                stack.push((depth + 1, idx + j * stride, p.kraus()[j].matmul(&m)));
            }
        }

        strings_checked += count as u64;
        for idx in 0..count {
            let rev = digit_reverse(idx, k, n);
            if rev < idx {
                continue;
            }
            let diff = (probs[idx] - probs[rev]).abs();
            if diff > max_discrepancy {
                max_discrepancy = diff;
                let mut symbols = Vec::with_capacity(n);
                let mut rest = idx;
                for _ in 0..n {
                    symbols.push(rest % k);
                    rest /= k;
                }
                worst = symbols;
            }
        }
    }
    Ok(ReversibilityScan {
        max_discrepancy,
        worst_string: OutcomeString::new(worst),
        strings_checked,
    })
}

/// Verification of the two factorization identities behind the
/// reversibility proof.
#[derive(Clone, Copy, Debug)]
pub struct FactCheck {
    pub ok: bool,
    pub max_deviation: f64,
}

/// Checks, for a two-projection instance with `Π_2 = |z⟩⟨z|`:
///
/// * `p_{1^m 2}(ρ_*) = (1/d)·p_{1^m}(Π_2)` for `m = 0..=m_max`, and
/// * the split `p_ι(ρ) = p_{(ι_1..ι_r)}(ρ)·p_{(ι_{r+1}..ι_n)}(Π_2)` at every
///   interior position `r` with `ι_r = 2`, over all strings up to length 6,
///
/// where `Π_2` doubles as the (pure) post-measurement state of outcome 2.
pub fn fact_identities_check(p: &Pifs, m_max: usize, tols: &Tolerances) -> Result<FactCheck> {
    if p.povm().two_proj_view().is_none() {
        return Err(Error::WrongPovmKind { expected: "two-projection rank-(d−1,1) PVM" });
    }
    let d = p.dim() as f64;
    let rho_star = p.stationary_state();
    let pi2_state = DensityMatrix::new(p.povm().element(1).clone(), tols)?;

    let mut max_dev = 0.0f64;
    for m in 0..=m_max {
        let mut s = OutcomeString::repeated(0, m);
        s.push(1);
        let lhs = p.string_prob(&rho_star, &s)?;
        let rhs = p.string_prob(&pi2_state, &OutcomeString::repeated(0, m))? / d;
        max_dev = max_dev.max((lhs - rhs).abs());
    }

    for n in 2..=6usize {
        for idx in 0..2usize.pow(n as u32) {
            let mut rest = idx;
            let mut symbols = Vec::with_capacity(n);
            for _ in 0..n {
                symbols.push(rest % 2);
                rest /= 2;
            }
            let s = OutcomeString::new(symbols.clone());
            let full = p.string_prob(&rho_star, &s)?;
            for r in 0..n - 1 {
                if symbols[r] != 1 {
                    continue;
                }
                let head = p.string_prob(&rho_star, &OutcomeString::new(symbols[..=r].to_vec()))?;
                let tail =
                    p.string_prob(&pi2_state, &OutcomeString::new(symbols[r + 1..].to_vec()))?;
                max_dev = max_dev.max((full - head * tail).abs());
            }
        }
    }
    Ok(FactCheck { ok: max_dev <= tols.tol_rev, max_deviation: max_dev })
}
