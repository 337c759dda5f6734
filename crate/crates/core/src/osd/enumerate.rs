use crate::gf2::BitRow;

use super::{LrbStructure, OsdConfig, ReliabilityOrdering};

/// `Σ_{l=0}^{p} C(k, l)`, saturating.
pub fn candidate_count(info_len: usize, order: usize) -> u64 {
    let mut total: u64 = 0;
    let mut binom: u64 = 1;
    for l in 0..=order.min(info_len) {
        total = total.saturating_add(binom);
        binom = binom.saturating_mul((info_len - l) as u64) / (l as u64 + 1);
    }
    total
}

/// An owned candidate error pattern in reordered numbering.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidatePattern {
    /// Flipped information-set positions (reordered numbering).
    pub info_support: Vec<usize>,
    /// LRB part `ê_lrb`, length `R`.
    pub dependent_part: BitRow,
    /// `W_s` over the full support.
    pub weight_metric: u64,
    /// Filled in only for candidates that reach the discrepancy test.
    pub discrepancy: Option<f64>,
}

/// Walks every pattern of at most `p` information-set flips, phase by phase.
///
/// Within phase `l` supports come in lexicographic order over the information
/// positions sorted by increasing weight. Each step costs one column XOR:
/// `partial[d]` caches `E·s ⊕` the columns of the first `d + 1` flips.
pub struct CandidateEnumerator<'a> {
    lrb: &'a LrbStructure,
    order: usize,
    // information positions (reordered numbering), least reliable first
    info_sorted: Vec<usize>,
    // weight of the bit at each reordered position
    position_weight: Vec<u64>,
    phase: usize,
    idx: Vec<usize>,
    partial: Vec<BitRow>,
    support: Vec<usize>,
    started: bool,
    done: bool,
}

pub fn enumerate_candidates<'a>(
    lrb: &'a LrbStructure,
    ordering: &ReliabilityOrdering,
    config: &OsdConfig,
) -> CandidateEnumerator<'a> {
    let order = lrb.order();
    let position_weight: Vec<u64> = (0..lrb.len())
        .map(|t| u64::from(ordering.weights[order.source(t)]))
        .collect();
    let mut info_sorted: Vec<usize> = (lrb.rank()..lrb.len()).collect();
    info_sorted.sort_by_key(|&t| position_weight[t]);
    let p = config.order.min(info_sorted.len());
    CandidateEnumerator {
        lrb,
        order: p,
        info_sorted,
        position_weight,
        phase: 0,
        idx: Vec::with_capacity(p),
        partial: vec![lrb.transformed_syndrome().clone(); p],
        support: Vec::with_capacity(p),
        started: false,
        done: false,
    }
}

impl<'a> CandidateEnumerator<'a> {
    /// Moves to the next candidate; false once the stream is exhausted.
    pub fn advance(&mut self) -> bool {
        if self.done {
            return false;
        }
        if !self.started {
            self.started = true;
            return true;
        }
        let k = self.info_sorted.len();
        let l = self.phase;
        // rightmost index that can still move
        let movable = (0..l).rev().find(|&d| self.idx[d] < k - (l - d));
        match movable {
            Some(d) => {
                self.idx[d] += 1;
                for j in d + 1..l {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                self.refresh_from(d);
            }
            None => {
                let next = l + 1;
                if next > self.order {
                    self.done = true;
                    return false;
                }
                self.phase = next;
                self.idx.clear();
                self.idx.extend(0..next);
                self.refresh_from(0);
            }
        }
        true
    }

    fn refresh_from(&mut self, depth: usize) {
        for d in depth..self.phase {
            let t = self.info_sorted[self.idx[d]];
            let (before, rest) = self.partial.split_at_mut(d);
            let base = if d == 0 {
                self.lrb.transformed_syndrome()
            } else {
                &before[d - 1]
            };
            rest[0].copy_from(base);
            rest[0].xor_assign(self.lrb.info_column(t));
        }
        self.support.clear();
        self.support.extend(self.idx.iter().map(|&i| self.info_sorted[i]));
    }

    /// Current phase `l` (number of information-set flips).
    pub fn phase(&self) -> usize {
        self.phase
    }

    pub fn info_support(&self) -> &[usize] {
        &self.support
    }

    pub fn dependent_part(&self) -> &BitRow {
        if self.phase == 0 {
            self.lrb.transformed_syndrome()
        } else {
            &self.partial[self.phase - 1]
        }
    }

    /// `W_s` of the current candidate.
    pub fn weight_metric(&self) -> u64 {
        self.weight_of(self.info_support(), self.dependent_part())
    }

    pub(crate) fn weight_of(&self, support: &[usize], dependent_part: &BitRow) -> u64 {
        support.iter().map(|&t| self.position_weight[t]).sum::<u64>()
            + dependent_part.ones().map(|r| self.position_weight[r]).sum::<u64>()
    }

    pub fn current(&self) -> CandidatePattern {
        CandidatePattern {
            info_support: self.info_support().to_vec(),
            dependent_part: self.dependent_part().clone(),
            weight_metric: self.weight_metric(),
            discrepancy: None,
        }
    }
}

impl Iterator for CandidateEnumerator<'_> {
    type Item = CandidatePattern;

    fn next(&mut self) -> Option<CandidatePattern> {
        self.advance().then(|| self.current())
    }
}
