//! BPSK over AWGN and the frame-level Monte-Carlo engine.
//!
//! Every frame draws its source bits and noise from its own ChaCha stream
//! keyed by `(seed, frame_index)`, and results are folded in frame order, so
//! statistics are bit-identical for any worker count.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decoders::{DecodeError, Decoder, DecoderConfig, SoftInput};
use crate::gf2::{eliminate, BinaryMatrix, Gf2Error, Permutation, SystematicEncoder};
use crate::osd::{osd_decode, rank_by_reliability, OsdConfig, OsdError};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("code rate must lie in (0, 1), got {0}")]
    InvalidRate(f64),
    #[error("code too large for exhaustive search: 2^{0} codewords")]
    CodeTooLarge(usize),
    #[error("invalid simulation configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Osd(#[from] OsdError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// `σ² = 1 / (2 · R · 10^(Eb/N0 / 10))` for unit-energy BPSK.
pub fn sigma2_from_ebn0(ebn0_db: f64, rate: f64) -> Result<f64, SimError> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(SimError::InvalidRate(rate));
    }
    Ok(1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0)))
}

/// `x_i = 2c_i - 1`.
pub fn modulate(codeword: &[u8]) -> Vec<f64> {
    codeword.iter().map(|&c| if c & 1 == 1 { 1.0 } else { -1.0 }).collect()
}

/// Adds independent `N(0, σ²)` noise to every symbol.
pub fn transmit<R: Rng + ?Sized>(x: &[f64], sigma2: f64, rng: &mut R) -> Vec<f64> {
    let sigma = sigma2.sqrt();
    x.iter()
        .map(|&xi| {
            let z: f64 = rng.sample(StandardNormal);
            xi + sigma * z
        })
        .collect()
}

/// Exhaustive maximum-likelihood decoding: the codeword whose BPSK image is
/// closest to `y`. Ties go to the lexicographically smallest codeword.
///
/// Limited to codes with at most 2^20 codewords.
pub fn ml_oracle(h: &BinaryMatrix, y: &[f64]) -> Result<Vec<u8>, SimError> {
    let n = h.cols();
    if y.len() != n {
        return Err(Gf2Error::LengthMismatch {
            expected: n,
            got: y.len(),
        }
        .into());
    }
    let basis = null_space_basis(h);
    let k = basis.len();
    if k > 20 {
        return Err(SimError::CodeTooLarge(k));
    }
    // Gray-code walk over all 2^k codewords; maximise correlation Σ y_i x_i.
    let mut word = vec![0u8; n];
    let mut corr: f64 = -y.iter().sum::<f64>();
    let mut best = (corr, word.clone());
    for step in 1u64..(1u64 << k) {
        let flip = step.trailing_zeros() as usize;
        for &i in &basis[flip] {
            word[i] ^= 1;
            corr += if word[i] == 1 { 2.0 * y[i] } else { -2.0 * y[i] };
        }
        if corr > best.0 || (corr == best.0 && word < best.1) {
            best = (corr, word.clone());
        }
    }
    Ok(best.1)
}

/// Supports of a basis of `{c : Hc = 0}`, one vector per non-pivot column.
fn null_space_basis(h: &BinaryMatrix) -> Vec<Vec<usize>> {
    let res = eliminate(h, &Permutation::identity(h.cols()));
    let rank = res.rank();
    let order = res.combined();
    (rank..h.cols())
        .map(|t| {
            let mut support = vec![order.source(t)];
            support.extend(
                res.reduced_rows()
                    .iter()
                    .enumerate()
                    .filter(|(_, row)| row.get(t))
                    .map(|(r, _)| order.source(r)),
            );
            support
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum SourceMode {
    /// Transmit the all-zero codeword every frame.
    #[default]
    #[serde(rename = "zero")]
    AllZero,
    /// Encode a fresh random message every frame (needs a full-rank `H`).
    #[serde(rename = "random")]
    RandomCodeword,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub ebn0_db: f64,
    /// `K / N`.
    pub code_rate: f64,
    pub seed: u64,
    pub source_mode: SourceMode,
}

impl ChannelConfig {
    pub fn sigma2(&self) -> Result<f64, SimError> {
        sigma2_from_ebn0(self.ebn0_db, self.code_rate)
    }
}

/// Stopping rule for one SNR point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub min_frame_errors: u64,
    pub max_frames: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_frame_errors: 100,
            max_frames: 10_000_000,
        }
    }
}

/// Counters for one SNR point. Derived rates are methods.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimStats {
    pub frames: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    pub iteration_sum: u64,
    pub osd_invocations: u64,
    /// Frames where iterative decoding failed and the cascade output equals
    /// the transmitted codeword.
    pub osd_rescues: u64,
    /// Codeword length, the BER denominator per frame.
    pub bits_per_frame: u64,
}

impl SimStats {
    pub fn fer(&self) -> f64 {
        ratio(self.frame_errors, self.frames)
    }

    pub fn ber(&self) -> f64 {
        ratio(self.bit_errors, self.frames * self.bits_per_frame)
    }

    /// `A_ni`, the mean number of iterations per frame.
    pub fn avg_iterations(&self) -> f64 {
        ratio(self.iteration_sum, self.frames)
    }

    /// Wilson score interval for the FER at normal quantile `z`.
    pub fn fer_interval(&self, z: f64) -> (f64, f64) {
        wilson_interval(self.frame_errors, self.frames, z)
    }

    fn record(&mut self, frame: &FrameResult) {
        self.frames += 1;
        self.frame_errors += u64::from(frame.bit_errors > 0);
        self.bit_errors += frame.bit_errors;
        self.iteration_sum += frame.iterations;
        self.osd_invocations += u64::from(frame.osd_invoked);
        self.osd_rescues += u64::from(frame.osd_invoked && frame.bit_errors == 0);
    }

    /// Adds another point's counters.
    pub fn merge(&mut self, other: &SimStats) {
        self.frames += other.frames;
        self.frame_errors += other.frame_errors;
        self.bit_errors += other.bit_errors;
        self.iteration_sum += other.iteration_sum;
        self.osd_invocations += other.osd_invocations;
        self.osd_rescues += other.osd_rescues;
        self.bits_per_frame = self.bits_per_frame.max(other.bits_per_frame);
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Wilson score interval for `k` successes out of `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// One SNR point of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub ebn0_db: f64,
    pub stats: SimStats,
    pub wall_seconds: f64,
}

/// A full cascade configuration: iterative decoder plus optional OSD.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CascadeConfig {
    pub decoder: DecoderConfig,
    pub osd: Option<OsdConfig>,
}

#[derive(Clone, Copy, Debug, Default)]
struct FrameResult {
    bit_errors: u64,
    iterations: u64,
    osd_invoked: bool,
}

/// Frame source and decoding pipeline shared by all workers of one point.
struct FrameRunner<'h> {
    h: &'h BinaryMatrix,
    cascade: CascadeConfig,
    channel: ChannelConfig,
    sigma2: f64,
    encoder: Option<SystematicEncoder>,
}

impl<'h> FrameRunner<'h> {
    fn run(&self, decoder: &mut Decoder<'h>, frame_index: u64) -> Result<FrameResult, SimError> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.channel.seed);
        rng.set_stream(frame_index);
        let n = self.h.cols();
        let codeword = match &self.encoder {
            None => vec![0u8; n],
            Some(enc) => {
                let msg: Vec<u8> = (0..enc.dimension()).map(|_| rng.gen_range(0..2)).collect();
                enc.encode(&msg)?
            }
        };
        let y = transmit(&modulate(&codeword), self.sigma2, &mut rng);
        let outcome = decoder.decode(SoftInput::new(&y, self.sigma2))?;
        let mut osd_invoked = false;
        let decided: Vec<u8> = match (&self.cascade.osd, outcome.converged) {
            (Some(osd), false) => {
                osd_invoked = true;
                let ordering = rank_by_reliability(&outcome.reliability);
                osd_decode(self.h, &y, &outcome.hard_decision, &ordering, osd)?.codeword
            }
            _ => outcome.tentative,
        };
        let bit_errors = decided.iter().zip(&codeword).filter(|(a, b)| a != b).count() as u64;
        Ok(FrameResult {
            bit_errors,
            iterations: outcome.iterations_used as u64,
            osd_invoked,
        })
    }
}

/// Frames decoded between two evaluations of the stopping rule.
const BATCH: u64 = 256;

/// Simulates one SNR point until `stop` trips.
///
/// Frames are decoded in parallel batches on the current rayon pool and
/// folded in frame order; the rule is checked after every frame, so the
/// counters match a sequential run exactly.
pub fn run_point(
    h: &BinaryMatrix,
    cascade: &CascadeConfig,
    channel: &ChannelConfig,
    stop: &StopRule,
) -> Result<PointResult, SimError> {
    cascade.decoder.validate()?;
    if let Some(osd) = &cascade.osd {
        osd.validate()?;
    }
    if stop.max_frames == 0 {
        return Err(SimError::InvalidConfig("max_frames must be positive".into()));
    }
    let sigma2 = channel.sigma2()?;
    let encoder = match channel.source_mode {
        SourceMode::AllZero => None,
        SourceMode::RandomCodeword => Some(SystematicEncoder::new(h)?),
    };
    let runner = FrameRunner {
        h,
        cascade: *cascade,
        channel: *channel,
        sigma2,
        encoder,
    };
    let start = Instant::now();
    let mut stats = SimStats {
        bits_per_frame: h.cols() as u64,
        ..SimStats::default()
    };
    let mut next = 0u64;
    'outer: while next < stop.max_frames {
        let end = (next + BATCH).min(stop.max_frames);
        let results: Vec<Result<FrameResult, SimError>> = (next..end)
            .into_par_iter()
            .map_init(
                || Decoder::new(h, cascade.decoder).expect("validated above"),
                |decoder, idx| runner.run(decoder, idx),
            )
            .collect();
        for r in results {
            stats.record(&r?);
            if stats.frame_errors >= stop.min_frame_errors {
                break 'outer;
            }
        }
        next = end;
    }
    Ok(PointResult {
        ebn0_db: channel.ebn0_db,
        stats,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Runs [`run_point`] for every Eb/N0 value, in increasing Eb/N0 order.
pub fn run_sweep(
    h: &BinaryMatrix,
    cascade: &CascadeConfig,
    base: &ChannelConfig,
    grid: &[f64],
    stop: &StopRule,
) -> Result<Vec<PointResult>, SimError> {
    let mut grid = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.into_iter()
        .map(|ebn0_db| run_point(h, cascade, &ChannelConfig { ebn0_db, ..*base }, stop))
        .collect()
}
