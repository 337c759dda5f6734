//! Order-p ordered statistics decoding in syndrome form.
//!
//! Given a hard decision `ĉ` with nonzero syndrome `s = Hĉ`, the decoder looks
//! for a low-cost error pattern `ê` with `Hê = s` and returns `ĉ ⊕ ê`:
//!
//! 1. sort the bits by increasing reliability (`λ1`) and give bit `i` the
//!    integer weight `w_i` = its 1-based rank;
//! 2. eliminate `H` in that column order; the first `R` independent columns
//!    form the least reliable basis (LRB), the rest the information set;
//! 3. for every pattern flipping at most `p` information-set bits, the LRB
//!    part follows from the reduced system: `ê_lrb = A·ê_info ⊕ E·s`;
//! 4. keep the `β` candidates of smallest `W_s = Σ w_i` over the support of
//!    `ê`, then choose among them the one of least discrepancy
//!    `D = Σ |y_i|` over the support.

mod enumerate;

pub use enumerate::{candidate_count, enumerate_candidates, CandidateEnumerator, CandidatePattern};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{eliminate, BinaryMatrix, BitRow, EliminationResult, Gf2Error, Permutation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OsdError {
    #[error("length {got} does not match code length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("position {0} is not in the information set")]
    NotInInformationSet(usize),
    #[error("invalid OSD configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// Number of `W_s` survivors handed to the discrepancy test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Beta {
    Count(usize),
    All,
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Beta::Count(n) => write!(f, "{n}"),
            Beta::All => f.write_str("all"),
        }
    }
}

impl FromStr for Beta {
    type Err = OsdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(Beta::All);
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Beta::Count(n)),
            _ => Err(OsdError::InvalidConfig(format!(
                "beta must be a positive count or \"all\", got {s:?}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OsdConfig {
    /// Maximum number of information-set flips `p`.
    pub order: usize,
    pub beta: Beta,
}

impl OsdConfig {
    pub fn new(order: usize, beta: Beta) -> Self {
        Self { order, beta }
    }

    pub fn validate(&self) -> Result<(), OsdError> {
        if self.beta == Beta::Count(0) {
            return Err(OsdError::InvalidConfig("beta must be at least 1".into()));
        }
        Ok(())
    }
}

/// Bits sorted by increasing reliability, with their 1-based ranks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReliabilityOrdering {
    /// `lambda1.source(j)` is the bit holding rank `j + 1`.
    pub lambda1: Permutation,
    /// `weights[i]` is the 1-based rank of bit `i`.
    pub weights: Vec<u32>,
}

/// Stable ascending sort on magnitude; ties keep index order.
pub fn rank_by_reliability(reliability: &[f64]) -> ReliabilityOrdering {
    let mut order: Vec<usize> = (0..reliability.len()).collect();
    order.sort_by(|&a, &b| reliability[a].abs().total_cmp(&reliability[b].abs()));
    let mut weights = vec![0u32; reliability.len()];
    for (j, &i) in order.iter().enumerate() {
        weights[i] = j as u32 + 1;
    }
    ReliabilityOrdering {
        lambda1: Permutation::new(order).expect("sorted indices form a permutation"),
        weights,
    }
}

/// Least reliable basis and the reduced syndrome system.
#[derive(Clone, Debug)]
pub struct LrbStructure {
    elimination: EliminationResult,
    transformed_syndrome: BitRow,
    // reduced-matrix columns of the information positions, index t - rank
    info_columns: Vec<BitRow>,
}

/// Eliminates `H` in reliability order and transforms the syndrome of the
/// hard decision.
pub fn build_lrb(
    h: &BinaryMatrix,
    ordering: &ReliabilityOrdering,
    hard_decision: &[u8],
) -> Result<LrbStructure, OsdError> {
    if ordering.lambda1.len() != h.cols() {
        return Err(OsdError::LengthMismatch {
            expected: h.cols(),
            got: ordering.lambda1.len(),
        });
    }
    let syndrome = h.syndrome(hard_decision)?;
    let elimination = eliminate(h, &ordering.lambda1);
    let transformed = elimination.apply_row_transform(&syndrome)?;
    let rank = elimination.rank();
    let mut info_columns = vec![BitRow::zeros(rank); h.cols() - rank];
    for (r, row) in elimination.reduced_rows().iter().enumerate() {
        for t in row.ones().filter(|&t| t >= rank) {
            info_columns[t - rank].set(r);
        }
    }
    Ok(LrbStructure {
        elimination,
        transformed_syndrome: BitRow::from_bits(&transformed),
        info_columns,
    })
}

impl LrbStructure {
    pub fn rank(&self) -> usize {
        self.elimination.rank()
    }

    pub fn len(&self) -> usize {
        self.elimination.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Size of the information set, `N - R`.
    pub fn info_len(&self) -> usize {
        self.len() - self.rank()
    }

    /// The deferral permutation `λ2`.
    pub fn lambda2(&self) -> &Permutation {
        self.elimination.fixup()
    }

    /// `λ1` then `λ2`: reordered position `t` is original bit `order().source(t)`.
    pub fn order(&self) -> &Permutation {
        self.elimination.combined()
    }

    pub fn elimination(&self) -> &EliminationResult {
        &self.elimination
    }

    /// `E·s`, the right-hand side of the reduced system (length `R`).
    pub fn transformed_syndrome(&self) -> &BitRow {
        &self.transformed_syndrome
    }

    /// Original indices of the LRB, in reordered position order.
    pub fn lrb_indices(&self) -> Vec<usize> {
        (0..self.rank()).map(|t| self.order().source(t)).collect()
    }

    /// Original indices of the information set, in reordered position order.
    pub fn info_indices(&self) -> Vec<usize> {
        (self.rank()..self.len()).map(|t| self.order().source(t)).collect()
    }

    /// Reduced-matrix column of information position `t` (reordered
    /// numbering, `rank <= t < N`).
    pub(crate) fn info_column(&self, t: usize) -> &BitRow {
        &self.info_columns[t - self.rank()]
    }

    /// LRB part of the error pattern that flips exactly `info_support`
    /// (reordered positions) in the information set.
    pub fn dependent_part(&self, info_support: &[usize]) -> Result<BitRow, OsdError> {
        let mut dep = self.transformed_syndrome.clone();
        for &t in info_support {
            if t < self.rank() || t >= self.len() {
                return Err(OsdError::NotInInformationSet(t));
            }
            dep.xor_assign(self.info_column(t));
        }
        Ok(dep)
    }

    /// Maps a reordered pattern (info flips plus LRB part) back to original
    /// bit numbering.
    pub fn error_pattern(&self, info_support: &[usize], dependent_part: &BitRow) -> Vec<u8> {
        let mut e = vec![0u8; self.len()];
        for &t in info_support {
            e[self.order().source(t)] = 1;
        }
        for r in dependent_part.ones() {
            e[self.order().source(r)] = 1;
        }
        e
    }
}

/// `D = Σ |y_i|` over the support of `error_pattern`.
pub fn discrepancy(y: &[f64], error_pattern: &[u8]) -> f64 {
    assert_eq!(y.len(), error_pattern.len(), "discrepancy needs matching lengths");
    y.iter()
        .zip(error_pattern)
        .filter(|(_, &e)| e != 0)
        .map(|(v, _)| v.abs())
        .sum()
}

/// The error pattern chosen by the two-stage selection.
#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    /// `ê` in original numbering.
    pub error_pattern: Vec<u8>,
    pub weight_metric: u64,
    pub discrepancy: f64,
    /// Enumeration index of the winner.
    pub index: u64,
    /// Number of candidates enumerated.
    pub candidates: u64,
}

struct Survivor {
    weight: u64,
    index: u64,
    info_support: Vec<usize>,
    dependent_part: BitRow,
}

impl PartialEq for Survivor {
    fn eq(&self, other: &Self) -> bool {
        (self.weight, self.index) == (other.weight, other.index)
    }
}
impl Eq for Survivor {}
impl PartialOrd for Survivor {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Survivor {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.weight, self.index).cmp(&(other.weight, other.index))
    }
}

/// Runs the candidate stream through the `W_s` filter and the discrepancy
/// test. Ties go to the earlier candidate at both stages.
pub fn select_error_pattern(
    candidates: &mut CandidateEnumerator<'_>,
    y: &[f64],
    lrb: &LrbStructure,
    config: &OsdConfig,
) -> Result<Selection, OsdError> {
    if y.len() != lrb.len() {
        return Err(OsdError::LengthMismatch {
            expected: lrb.len(),
            got: y.len(),
        });
    }
    let order = lrb.order();
    let abs_y: Vec<f64> = (0..lrb.len()).map(|t| y[order.source(t)].abs()).collect();
    let reordered_d = |support: &[usize], dep: &BitRow| -> f64 {
        support.iter().map(|&t| abs_y[t]).sum::<f64>() + dep.ones().map(|r| abs_y[r]).sum::<f64>()
    };

    let mut count = 0u64;
    let best = match config.beta {
        Beta::All => {
            // nothing is pruned: the discrepancy decides over every candidate
            let mut best: Option<(f64, u64, Vec<usize>, BitRow)> = None;
            while candidates.advance() {
                let d = reordered_d(candidates.info_support(), candidates.dependent_part());
                if best.as_ref().is_none_or(|b| d < b.0) {
                    best = Some((
                        d,
                        count,
                        candidates.info_support().to_vec(),
                        candidates.dependent_part().clone(),
                    ));
                }
                count += 1;
            }
            best.map(|(d, idx, support, dep)| {
                let weight = candidates.weight_of(&support, &dep);
                (weight, d, idx, support, dep)
            })
        }
        Beta::Count(beta) => {
            let beta = beta.max(1);
            let mut heap: std::collections::BinaryHeap<Survivor> =
                std::collections::BinaryHeap::with_capacity(beta + 1);
            while candidates.advance() {
                let weight = candidates.weight_metric();
                let admit = heap.len() < beta || heap.peek().is_some_and(|worst| weight < worst.weight);
                if admit {
                    heap.push(Survivor {
                        weight,
                        index: count,
                        info_support: candidates.info_support().to_vec(),
                        dependent_part: candidates.dependent_part().clone(),
                    });
                    if heap.len() > beta {
                        heap.pop();
                    }
                }
                count += 1;
            }
            let mut survivors = heap.into_vec();
            survivors.sort_by_key(|s| s.index);
            let mut best: Option<(u64, f64, u64, Vec<usize>, BitRow)> = None;
            for s in survivors {
                let d = reordered_d(&s.info_support, &s.dependent_part);
                if best.as_ref().is_none_or(|b| d < b.1) {
                    best = Some((s.weight, d, s.index, s.info_support, s.dependent_part));
                }
            }
            best
        }
    };

    let (weight, d, index, support, dep) =
        best.ok_or_else(|| OsdError::InvalidConfig("empty candidate stream".into()))?;
    Ok(Selection {
        error_pattern: lrb.error_pattern(&support, &dep),
        weight_metric: weight,
        discrepancy: d,
        index,
        candidates: count,
    })
}

/// Result of one OSD invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct OsdOutcome {
    /// `ĉ ⊕ ê`; always satisfies every check.
    pub codeword: Vec<u8>,
    pub selection: Selection,
    pub rank: usize,
    /// Order actually used after clamping to the information-set size.
    pub order: usize,
}

/// Full reprocessing of one frame: LRB construction, enumeration, selection
/// and codeword recovery.
pub fn osd_decode(
    h: &BinaryMatrix,
    y: &[f64],
    hard_decision: &[u8],
    ordering: &ReliabilityOrdering,
    config: &OsdConfig,
) -> Result<OsdOutcome, OsdError> {
    config.validate()?;
    let n = h.cols();
    for len in [y.len(), hard_decision.len()] {
        if len != n {
            return Err(OsdError::LengthMismatch { expected: n, got: len });
        }
    }
    let lrb = build_lrb(h, ordering, hard_decision)?;
    let mut effective = *config;
    if effective.order > lrb.info_len() {
        log::warn!(
            "OSD order {} exceeds information-set size {}; clamping",
            effective.order,
            lrb.info_len()
        );
        effective.order = lrb.info_len();
    }
    let mut candidates = enumerate_candidates(&lrb, ordering, &effective);
    let selection = select_error_pattern(&mut candidates, y, &lrb, &effective)?;
    let codeword = hard_decision
        .iter()
        .zip(&selection.error_pattern)
        .map(|(&c, &e)| (c ^ e) & 1)
        .collect();
    Ok(OsdOutcome {
        codeword,
        selection,
        rank: lrb.rank(),
        order: effective.order,
    })
}
