use super::{eliminate, BinaryMatrix, BitRow, Gf2Error, Permutation};

/// Systematic encoder derived from a full-rank parity-check matrix.
///
/// Message bits are placed on the non-pivot columns of the identity-order
/// elimination; each pivot column then carries one parity bit.
#[derive(Clone, Debug)]
pub struct SystematicEncoder {
    n: usize,
    info_positions: Vec<usize>,
    parity_positions: Vec<usize>,
    // parity_rows[r] over K message bits
    parity_rows: Vec<BitRow>,
}

impl SystematicEncoder {
    pub fn new(h: &BinaryMatrix) -> Result<Self, Gf2Error> {
        let res = eliminate(h, &Permutation::identity(h.cols()));
        if res.rank() < h.rows() {
            return Err(Gf2Error::RankDeficient {
                rank: res.rank(),
                rows: h.rows(),
            });
        }
        let rank = res.rank();
        let n = h.cols();
        let k = n - rank;
        let order = res.combined();
        let parity_positions = (0..rank).map(|t| order.source(t)).collect();
        let info_positions = (rank..n).map(|t| order.source(t)).collect();
        let parity_rows = res
            .reduced_rows()
            .iter()
            .map(|row| {
                let mut p = BitRow::zeros(k);
                for t in rank..n {
                    if row.get(t) {
                        p.set(t - rank);
                    }
                }
                p
            })
            .collect();
        Ok(Self {
            n,
            info_positions,
            parity_positions,
            parity_rows,
        })
    }

    /// Message length `K`.
    pub fn dimension(&self) -> usize {
        self.info_positions.len()
    }

    pub fn length(&self) -> usize {
        self.n
    }

    /// Codeword positions that carry the message bits, in message order.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>, Gf2Error> {
        if message.len() != self.dimension() {
            return Err(Gf2Error::LengthMismatch {
                expected: self.dimension(),
                got: message.len(),
            });
        }
        let packed = BitRow::from_bits(message);
        let mut word = vec![0u8; self.n];
        for (&pos, &bit) in self.info_positions.iter().zip(message) {
            word[pos] = bit & 1;
        }
        for (&pos, row) in self.parity_positions.iter().zip(&self.parity_rows) {
            word[pos] = row.dot(&packed) as u8;
        }
        Ok(word)
    }
}
