//! Flooding-schedule message-passing decoders with accumulated reliability
//! tracking.
//!
//! All four variants test the tentative hard decision after every iteration
//! (and once on the channel values before any message passing, counted as
//! iteration 0) and stop as soon as every check is satisfied. Alongside the
//! per-iteration outputs each decoder keeps a running accumulation
//! `acc ← α·acc + X^(k)`, where `X^(k)` is the posterior LLR (`bp-llr`),
//! the posterior probability of a 1 (`bp-prob`) or the posterior min-sum
//! reliability (`nms`, `oms`).

mod accumulate;
mod check;

pub use accumulate::{
    accumulate_llr, accumulate_minsum, accumulate_prob, hard_decision, weight_total, ProbAccumulation,
};
pub use check::{check_update_bp, check_update_minsum, MinSumRule, LLR_CAP, PROB_EPS};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::BinaryMatrix;
use check::{atanh_capped, channel_llr};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecodeError {
    #[error("input length {got} does not match expected length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("noise variance must be positive, got {0}")]
    InvalidNoiseVariance(f64),
    #[error("invalid decoder configuration: {0}")]
    InvalidConfig(String),
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("empty iteration trace")]
    EmptyTrace,
}

/// Which message-passing rule to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "bp-llr")]
    BpLlr,
    #[serde(rename = "bp-prob")]
    BpProb,
    #[serde(rename = "nms")]
    MinSumNormalized,
    #[serde(rename = "oms")]
    MinSumOffset,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::BpLlr,
        Variant::BpProb,
        Variant::MinSumNormalized,
        Variant::MinSumOffset,
    ];

    /// Whether the variant reads the noise variance.
    pub fn needs_noise_variance(self) -> bool {
        matches!(self, Variant::BpLlr | Variant::BpProb)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::BpLlr => "bp-llr",
            Variant::BpProb => "bp-prob",
            Variant::MinSumNormalized => "nms",
            Variant::MinSumOffset => "oms",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = DecodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bp-llr" | "bp" => Ok(Variant::BpLlr),
            "bp-prob" => Ok(Variant::BpProb),
            "nms" | "minsum-normalized" => Ok(Variant::MinSumNormalized),
            "oms" | "minsum-offset" => Ok(Variant::MinSumOffset),
            other => Err(DecodeError::InvalidConfig(format!("unknown decoder variant {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub variant: Variant,
    /// `I_m`.
    pub max_iterations: usize,
    /// Weight factor of the accumulated metric.
    pub alpha: f64,
    /// Used by [`Variant::MinSumNormalized`] only.
    pub normalization_factor: f64,
    /// Used by [`Variant::MinSumOffset`] only.
    pub offset: f64,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            variant: Variant::BpLlr,
            max_iterations: 20,
            alpha: 1.0,
            normalization_factor: 0.8,
            offset: 0.15,
        }
    }
}

impl DecoderConfig {
    pub fn new(variant: Variant, max_iterations: usize) -> Self {
        Self {
            variant,
            max_iterations,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), DecodeError> {
        if self.max_iterations < 1 {
            return Err(DecodeError::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(DecodeError::InvalidConfig(format!(
                "alpha must be >= 0, got {}",
                self.alpha
            )));
        }
        match self.variant {
            Variant::MinSumNormalized if !(self.normalization_factor > 0.0 && self.normalization_factor <= 1.0) => {
                Err(DecodeError::InvalidConfig(format!(
                    "normalization factor must lie in (0, 1], got {}",
                    self.normalization_factor
                )))
            }
            Variant::MinSumOffset if !(self.offset >= 0.0 && self.offset.is_finite()) => Err(
                DecodeError::InvalidConfig(format!("offset must be >= 0, got {}", self.offset)),
            ),
            _ => Ok(()),
        }
    }

    fn minsum_rule(&self) -> Option<MinSumRule> {
        match self.variant {
            Variant::MinSumNormalized => Some(MinSumRule::Normalized(self.normalization_factor)),
            Variant::MinSumOffset => Some(MinSumRule::Offset(self.offset)),
            _ => None,
        }
    }
}

/// Channel output for one frame.
#[derive(Clone, Copy, Debug)]
pub struct SoftInput<'a> {
    pub received: &'a [f64],
    /// `σ²`; ignored by the min-sum variants.
    pub noise_variance: f64,
}

impl<'a> SoftInput<'a> {
    pub fn new(received: &'a [f64], noise_variance: f64) -> Self {
        Self {
            received,
            noise_variance,
        }
    }
}

/// Per-frame result of iterative decoding.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeOutcome {
    pub converged: bool,
    /// Message-passing iterations run; 0 when the channel hard decision
    /// already satisfies every check.
    pub iterations_used: usize,
    /// Tentative hard decision of the exit iteration.
    pub tentative: Vec<u8>,
    /// Hard decision `ĉ` of the accumulated metric.
    pub hard_decision: Vec<u8>,
    /// Accumulated metric (`r`, `q` or `u` depending on the variant).
    pub accumulated: Vec<f64>,
    /// Sorting magnitude for reprocessing: `|r|`, `|q - T/2|` or `|u|`.
    pub reliability: Vec<f64>,
    /// Per-iteration outputs `X^(0..=e)`, kept only when requested.
    pub trace: Option<Vec<Vec<f64>>>,
}

/// Flooding decoder bound to one parity-check matrix.
///
/// Holds per-frame scratch; one decode in flight per instance.
pub struct Decoder<'h> {
    h: &'h BinaryMatrix,
    config: DecoderConfig,
    // edges grouped by check: check c owns edges check_start[c]..check_start[c + 1]
    check_start: Vec<usize>,
    edge_var: Vec<usize>,
    // edges grouped by variable, as indices into the check-ordered edge list
    var_start: Vec<usize>,
    var_edges: Vec<usize>,
    c2v: Vec<f64>,
    v2c: Vec<f64>,
    prefix: Vec<f64>,
    channel: Vec<f64>,
    posterior: Vec<f64>,
    acc: Vec<f64>,
    tentative: Vec<u8>,
}

impl<'h> Decoder<'h> {
    pub fn new(h: &'h BinaryMatrix, config: DecoderConfig) -> Result<Self, DecodeError> {
        config.validate()?;
        let mut check_start = Vec::with_capacity(h.rows() + 1);
        let mut edge_var = Vec::with_capacity(h.nnz());
        check_start.push(0);
        for r in 0..h.rows() {
            edge_var.extend_from_slice(h.row(r));
            check_start.push(edge_var.len());
        }
        let mut per_var: Vec<Vec<usize>> = vec![Vec::new(); h.cols()];
        for (e, &v) in edge_var.iter().enumerate() {
            per_var[v].push(e);
        }
        let mut var_start = Vec::with_capacity(h.cols() + 1);
        let mut var_edges = Vec::with_capacity(edge_var.len());
        var_start.push(0);
        for list in per_var {
            var_edges.extend(list);
            var_start.push(var_edges.len());
        }
        let max_row = h.row_degrees().into_iter().max().unwrap_or(0);
        let max_col = h.col_degrees().into_iter().max().unwrap_or(0);
        let edges = edge_var.len();
        let n = h.cols();
        Ok(Self {
            h,
            config,
            check_start,
            edge_var,
            var_start,
            var_edges,
            c2v: vec![0.0; edges],
            v2c: vec![0.0; edges],
            prefix: vec![0.0; max_row.max(max_col) + 1],
            channel: vec![0.0; n],
            posterior: vec![0.0; n],
            acc: vec![0.0; n],
            tentative: vec![0; n],
        })
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.config
    }

    pub fn matrix(&self) -> &'h BinaryMatrix {
        self.h
    }

    pub fn decode(&mut self, input: SoftInput<'_>) -> Result<DecodeOutcome, DecodeError> {
        self.run(input, false)
    }

    /// Like [`decode`](Self::decode) but keeps every per-iteration output.
    pub fn decode_traced(&mut self, input: SoftInput<'_>) -> Result<DecodeOutcome, DecodeError> {
        self.run(input, true)
    }

    fn run(&mut self, input: SoftInput<'_>, keep_trace: bool) -> Result<DecodeOutcome, DecodeError> {
        let n = self.h.cols();
        let y = input.received;
        if y.len() != n {
            return Err(DecodeError::LengthMismatch {
                expected: n,
                got: y.len(),
            });
        }
        let variant = self.config.variant;
        if variant.needs_noise_variance() && !(input.noise_variance > 0.0 && input.noise_variance.is_finite()) {
            return Err(DecodeError::InvalidNoiseVariance(input.noise_variance));
        }
        let alpha = self.config.alpha;
        let sigma2 = input.noise_variance;

        // Iteration 0 holds the channel values. LLR-type messages are passed
        // as ln P(0)/P(1); the reported outputs are negated back so that
        // positive favours 1.
        let prob_domain = variant == Variant::BpProb;
        for (i, &yi) in y.iter().enumerate() {
            self.channel[i] = match variant {
                Variant::BpLlr => -channel_llr(yi, sigma2),
                Variant::BpProb => clamp_prob(1.0 / (1.0 + (-channel_llr(yi, sigma2)).exp())),
                Variant::MinSumNormalized | Variant::MinSumOffset => -yi,
            };
        }
        self.posterior.copy_from_slice(&self.channel);
        let sign = if prob_domain { 1.0 } else { -1.0 };
        for (a, &p) in self.acc.iter_mut().zip(&self.posterior) {
            *a = sign * p;
        }
        let mut total_weight = 1.0;
        let reported = |post: &[f64]| post.iter().map(|&p| sign * p).collect::<Vec<f64>>();
        let mut trace = keep_trace.then(|| vec![reported(&self.posterior)]);
        if prob_domain {
            self.c2v.fill(0.5);
        } else {
            self.c2v.fill(0.0);
        }

        let mut iterations = 0;
        let mut converged = self.tentative_ok(prob_domain);
        while !converged && iterations < self.config.max_iterations {
            iterations += 1;
            if prob_domain {
                self.iterate_prob();
            } else {
                self.iterate_llr();
            }
            for (a, &p) in self.acc.iter_mut().zip(&self.posterior) {
                *a = alpha * *a + sign * p;
            }
            total_weight = alpha * total_weight + 1.0;
            if let Some(t) = trace.as_mut() {
                t.push(reported(&self.posterior));
            }
            converged = self.tentative_ok(prob_domain);
        }

        let (accumulated, hard_decision, reliability) = if prob_domain {
            let initial_hd: Vec<u8> = y.iter().map(|&v| (v > 0.0) as u8).collect();
            let acc = accumulate::finish_prob(&self.acc, total_weight, &initial_hd);
            (acc.q, acc.hard_decision, acc.reliability)
        } else {
            (
                self.acc.clone(),
                hard_decision(&self.acc),
                self.acc.iter().map(|v| v.abs()).collect(),
            )
        };

        Ok(DecodeOutcome {
            converged,
            iterations_used: iterations,
            tentative: self.tentative.clone(),
            hard_decision,
            accumulated,
            reliability,
            trace,
        })
    }

    /// Refreshes the tentative decision from the posterior and tests every
    /// check.
    fn tentative_ok(&mut self, prob_domain: bool) -> bool {
        // zero reliability decides 0 in both orientations
        for (t, &p) in self.tentative.iter_mut().zip(&self.posterior) {
            *t = if prob_domain { p > 0.5 } else { p < 0.0 } as u8;
        }
        self.h.is_codeword(&self.tentative)
    }

    /// One flooding iteration in the LLR domain (sum-product or min-sum).
    fn iterate_llr(&mut self) {
        // variable to check: posterior minus the target check's last message
        for (e, &v) in self.edge_var.iter().enumerate() {
            self.v2c[e] = self.posterior[v] - self.c2v[e];
        }

        let rule = self.config.minsum_rule();
        for c in 0..self.check_start.len() - 1 {
            let (lo, hi) = (self.check_start[c], self.check_start[c + 1]);
            match rule {
                None => bp_check(&self.v2c[lo..hi], &mut self.c2v[lo..hi], &mut self.prefix),
                Some(rule) => minsum_check(&self.v2c[lo..hi], &mut self.c2v[lo..hi], rule),
            }
        }

        for v in 0..self.posterior.len() {
            let edges = &self.var_edges[self.var_start[v]..self.var_start[v + 1]];
            self.posterior[v] = self.channel[v] + edges.iter().map(|&e| self.c2v[e]).sum::<f64>();
        }
    }

    /// One flooding iteration in the probability domain. Messages are the
    /// probabilities of the bit being 1.
    fn iterate_prob(&mut self) {
        // variable to check: channel prior times every other incoming message
        for v in 0..self.posterior.len() {
            let edges = &self.var_edges[self.var_start[v]..self.var_start[v + 1]];
            let prior = self.channel[v];
            let d = edges.len();
            // prefix products of (P1, P0), then sweep from the right
            let mut one = prior;
            let mut zero = 1.0 - prior;
            let mut pre1 = Vec::with_capacity(d);
            let mut pre0 = Vec::with_capacity(d);
            for &e in edges {
                pre1.push(one);
                pre0.push(zero);
                let r = self.c2v[e];
                one *= r;
                zero *= 1.0 - r;
            }
            let (mut suf1, mut suf0) = (1.0, 1.0);
            for (idx, &e) in edges.iter().enumerate().rev() {
                let a = pre1[idx] * suf1;
                let b = pre0[idx] * suf0;
                self.v2c[e] = clamp_prob(a / (a + b));
                let r = self.c2v[e];
                suf1 *= r;
                suf0 *= 1.0 - r;
            }
        }

        for c in 0..self.check_start.len() - 1 {
            let (lo, hi) = (self.check_start[c], self.check_start[c + 1]);
            let incoming = &self.v2c[lo..hi];
            let out = &mut self.c2v[lo..hi];
            // r = (1 - Π(1 - 2q)) / 2 over the other edges
            let mut acc = 1.0;
            for (k, &q) in incoming.iter().enumerate() {
                self.prefix[k] = acc;
                acc *= 1.0 - 2.0 * q;
            }
            let mut suffix = 1.0;
            for k in (0..incoming.len()).rev() {
                out[k] = clamp_prob(0.5 * (1.0 - self.prefix[k] * suffix));
                suffix *= 1.0 - 2.0 * incoming[k];
            }
        }

        for v in 0..self.posterior.len() {
            let edges = &self.var_edges[self.var_start[v]..self.var_start[v + 1]];
            let prior = self.channel[v];
            let (mut one, mut zero) = (prior, 1.0 - prior);
            for &e in edges {
                one *= self.c2v[e];
                zero *= 1.0 - self.c2v[e];
            }
            self.posterior[v] = one / (one + zero);
        }
    }
}

#[inline]
fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_EPS, 1.0 - PROB_EPS)
}

/// Tanh-rule update for every edge of one check, excluding each edge's own
/// input via prefix/suffix products.
fn bp_check(incoming: &[f64], out: &mut [f64], prefix: &mut [f64]) {
    let mut acc = 1.0;
    for (k, &m) in incoming.iter().enumerate() {
        prefix[k] = acc;
        acc *= (0.5 * m).tanh();
    }
    let mut suffix = 1.0;
    for k in (0..incoming.len()).rev() {
        out[k] = atanh_capped(prefix[k] * suffix);
        suffix *= (0.5 * incoming[k]).tanh();
    }
}

/// Min-sum update for every edge of one check using the two smallest
/// magnitudes.
fn minsum_check(incoming: &[f64], out: &mut [f64], rule: MinSumRule) {
    let mut min1 = f64::INFINITY;
    let mut min2 = f64::INFINITY;
    let mut min_idx = 0;
    let mut negative = false;
    for (k, &m) in incoming.iter().enumerate() {
        let a = m.abs();
        negative ^= m < 0.0;
        if a < min1 {
            min2 = min1;
            min1 = a;
            min_idx = k;
        } else if a < min2 {
            min2 = a;
        }
    }
    for (k, (o, &m)) in out.iter_mut().zip(incoming).enumerate() {
        let mag = rule.correct(if k == min_idx { min2 } else { min1 });
        let neg = negative ^ (m < 0.0);
        *o = if !mag.is_finite() {
            // degree-1 check: no extrinsic input, the bit is forced to 0
            LLR_CAP
        } else if mag == 0.0 {
            0.0
        } else if neg {
            -mag
        } else {
            mag
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn repetition3() -> BinaryMatrix {
        BinaryMatrix::from_dense(&[[1, 1, 0], [0, 1, 1]]).unwrap()
    }

    #[test]
    fn noiseless_zero_word_converges_without_iterating() {
        let h = repetition3();
        let y = [-1.0, -1.0, -1.0];
        for variant in Variant::ALL {
            let mut dec = Decoder::new(&h, DecoderConfig::new(variant, 20)).unwrap();
            let out = dec.decode(SoftInput::new(&y, 0.5)).unwrap();
            assert!(out.converged);
            assert_eq!(out.iterations_used, 0);
            assert_eq!(out.tentative, vec![0, 0, 0]);
        }
    }

    #[test]
    fn repetition_code_hand_evaluated() {
        // L0 = (-4, 0.2, -4). Iteration 1: the middle bit hears
        // 2 atanh(tanh(-2) tanh(0)) ... from each side: v2c from the outer
        // bits is -4, so c2v into the middle is -4 from each check and its
        // posterior is 0.2 - 8 = -7.8; the outer bits receive
        // 2 atanh(tanh(0.1)) = 0.2 and stay negative at -3.8.
        let h = repetition3();
        let y = [-2.0, 0.1, -2.0];
        let mut dec = Decoder::new(&h, DecoderConfig::new(Variant::BpLlr, 20)).unwrap();
        let out = dec.decode_traced(SoftInput::new(&y, 1.0)).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations_used, 1);
        assert_eq!(out.tentative, vec![0, 0, 0]);
        let trace = out.trace.unwrap();
        assert_eq!(trace[0], vec![-4.0, 0.2, -4.0]);
        let expected = [-3.8, -7.8, -3.8];
        for (a, b) in trace[1].iter().zip(expected) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        // accumulation with alpha = 1 truncated at the exit iteration
        for (a, b) in out.accumulated.iter().zip([-7.8, -7.6, -7.8]) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn prob_domain_matches_on_repetition_code() {
        let h = repetition3();
        let y = [-2.0, 0.1, -2.0];
        let mut dec = Decoder::new(&h, DecoderConfig::new(Variant::BpProb, 20)).unwrap();
        let out = dec.decode_traced(SoftInput::new(&y, 1.0)).unwrap();
        assert!(out.converged);
        assert_eq!(out.tentative, vec![0, 0, 0]);
        let llr: Vec<f64> = out.trace.unwrap()[1].iter().map(|p| (p / (1.0 - p)).ln()).collect();
        for (a, b) in llr.iter().zip([-3.8, -7.8, -3.8]) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn incremental_accumulation_matches_closed_form() {
        let h = BinaryMatrix::from_dense(&[
            [1, 1, 0, 1, 0, 0],
            [0, 1, 1, 0, 1, 0],
            [1, 0, 0, 0, 1, 1],
            [0, 0, 1, 1, 0, 1],
        ])
        .unwrap();
        let y = [0.3, -0.2, 0.4, -1.1, 0.1, 0.9];
        for variant in Variant::ALL {
            for alpha in [0.0, 0.5, 1.0, 1.3] {
                let cfg = DecoderConfig {
                    alpha,
                    ..DecoderConfig::new(variant, 6)
                };
                let mut dec = Decoder::new(&h, cfg).unwrap();
                let out = dec.decode_traced(SoftInput::new(&y, 0.8)).unwrap();
                let trace = out.trace.clone().unwrap();
                assert_eq!(trace.len(), out.iterations_used + 1);
                if variant == Variant::BpProb {
                    let hd: Vec<u8> = y.iter().map(|&v| (v > 0.0) as u8).collect();
                    let closed = accumulate_prob(&trace, alpha, &hd).unwrap();
                    for (a, b) in closed.q.iter().zip(&out.accumulated) {
                        assert!((a - b).abs() < 1e-9);
                    }
                    assert_eq!(closed.hard_decision, out.hard_decision);
                } else {
                    let closed = accumulate_llr(&trace, alpha).unwrap();
                    for (a, b) in closed.iter().zip(&out.accumulated) {
                        assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()));
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let h = repetition3();
        let mut dec = Decoder::new(&h, DecoderConfig::default()).unwrap();
        assert!(matches!(
            dec.decode(SoftInput::new(&[0.0; 2], 1.0)),
            Err(DecodeError::LengthMismatch { .. })
        ));
        assert!(matches!(
            dec.decode(SoftInput::new(&[0.0; 3], 0.0)),
            Err(DecodeError::InvalidNoiseVariance(_))
        ));
        let mut ms = Decoder::new(&h, DecoderConfig::new(Variant::MinSumOffset, 5)).unwrap();
        assert!(ms.decode(SoftInput::new(&[0.0; 3], 0.0)).is_ok());
        let bad = DecoderConfig {
            normalization_factor: 1.5,
            ..DecoderConfig::new(Variant::MinSumNormalized, 5)
        };
        assert!(Decoder::new(&h, bad).is_err());
        assert!(Decoder::new(&h, DecoderConfig::new(Variant::BpLlr, 0)).is_err());
    }
}
