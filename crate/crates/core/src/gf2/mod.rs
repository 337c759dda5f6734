//! GF(2) primitives: the sparse parity-check matrix, column permutations,
//! alist I/O, Gaussian elimination and a systematic encoder.
//!
//! Internal indices are 0-based. The alist format stays 1-based on disk.

mod alist;
mod bits;
mod elimination;
mod encoder;
mod matrix;
mod permutation;

pub use alist::{parse_alist, write_alist};
pub use bits::BitRow;
pub use elimination::{eliminate, EliminationResult};
pub use encoder::SystematicEncoder;
pub use matrix::BinaryMatrix;
pub use permutation::Permutation;

use thiserror::Error;

/// Errors raised by the GF(2) layer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("alist line {line}: {msg}")]
    Alist { line: usize, msg: String },
    #[error("vector length {got} does not match expected length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("entry ({row}, {col}) out of bounds for a {rows}x{cols} matrix")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("right-hand side is outside the row space of H (dependent row {row} transforms to 1)")]
    Inconsistent { row: usize },
    #[error("parity-check matrix has rank {rank} < {rows} rows; systematic encoding needs full rank")]
    RankDeficient { rank: usize, rows: usize },
}
