//! Accumulated reliability metrics over the iteration trace.
//!
//! For a trace `X^(0..=e)` the accumulated value is `Σ α^(e-k) X^(k)`, which
//! the decoder evaluates incrementally as `acc ← α·acc + X^(k)`. The functions
//! here evaluate the closed form directly and serve diagnostics and tests.

use super::DecodeError;

/// `Σ_k α^(e-k)` over `k = 0..=e`, with `0^0 = 1`.
pub fn weight_total(alpha: f64, exit: usize) -> f64 {
    (0..=exit).map(|k| alpha.powi((exit - k) as i32)).sum()
}

fn weighted_sum(trace: &[Vec<f64>], alpha: f64) -> Result<Vec<f64>, DecodeError> {
    let last = trace.len().checked_sub(1).ok_or(DecodeError::EmptyTrace)?;
    let n = trace[0].len();
    let mut out = vec![0.0; n];
    for (k, values) in trace.iter().enumerate() {
        if values.len() != n {
            return Err(DecodeError::LengthMismatch {
                expected: n,
                got: values.len(),
            });
        }
        // powi(0) is 1 even for alpha = 0
        let w = alpha.powi((last - k) as i32);
        for (o, &v) in out.iter_mut().zip(values) {
            *o += w * v;
        }
    }
    Ok(out)
}

/// Accumulated LLR metric `r`. Decide `ĉ_i = 1` iff `r_i > 0`.
pub fn accumulate_llr(trace: &[Vec<f64>], alpha: f64) -> Result<Vec<f64>, DecodeError> {
    weighted_sum(trace, alpha)
}

/// Accumulated min-sum metric `u`, with `y` itself as the first trace entry.
pub fn accumulate_minsum(trace: &[Vec<f64>], alpha: f64) -> Result<Vec<f64>, DecodeError> {
    weighted_sum(trace, alpha)
}

/// Sign rule shared by the LLR-type metrics: 1 iff strictly positive.
pub fn hard_decision(metric: &[f64]) -> Vec<u8> {
    metric.iter().map(|&v| (v > 0.0) as u8).collect()
}

/// Result of the probability-domain accumulation.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbAccumulation {
    /// The metric `q`.
    pub q: Vec<f64>,
    pub hard_decision: Vec<u8>,
    /// `|q_i - T/2|`, the sorting key for reprocessing.
    pub reliability: Vec<f64>,
    /// `T = Σ α^(e-k)`, the constant that replaces `I_m + 1` for general α.
    pub total_weight: f64,
}

/// Accumulated probability metric `q` built from the probabilities of each
/// bit being 1.
///
/// `q_i` is the weighted sum when the initial hard decision is 1 and
/// `T` minus it otherwise. The final decision flips the initial one when
/// `q_i < T/2`.
pub fn accumulate_prob(trace: &[Vec<f64>], alpha: f64, initial_hd: &[u8]) -> Result<ProbAccumulation, DecodeError> {
    if let Some(&p) = trace.iter().flatten().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(DecodeError::ProbabilityOutOfRange(p));
    }
    let sums = weighted_sum(trace, alpha)?;
    if initial_hd.len() != sums.len() {
        return Err(DecodeError::LengthMismatch {
            expected: sums.len(),
            got: initial_hd.len(),
        });
    }
    let total = weight_total(alpha, trace.len() - 1);
    Ok(finish_prob(&sums, total, initial_hd))
}

pub(crate) fn finish_prob(sums: &[f64], total: f64, initial_hd: &[u8]) -> ProbAccumulation {
    let half = 0.5 * total;
    let mut q = Vec::with_capacity(sums.len());
    let mut hard_decision = Vec::with_capacity(sums.len());
    let mut reliability = Vec::with_capacity(sums.len());
    for (&s, &hd) in sums.iter().zip(initial_hd) {
        let qi = if hd == 1 { s } else { total - s };
        q.push(qi);
        hard_decision.push(if qi < half { 1 - hd } else { hd });
        reliability.push((qi - half).abs());
    }
    ProbAccumulation {
        q,
        hard_decision,
        reliability,
        total_weight: total,
    }
}
