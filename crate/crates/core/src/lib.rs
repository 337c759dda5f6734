//! Iterative LDPC decoding cascaded with a syndrome-form ordered statistics
//! decoder (OSD).
//!
//! The crate is organised bottom-up:
//!
//! - [`gf2`]: sparse parity-check matrices, alist I/O, GF(2) elimination and a
//!   systematic encoder.
//! - [`decoders`]: belief propagation (LLR and probability domain) and the
//!   normalized / offset min-sum decoders, each tracking an accumulated
//!   per-bit reliability metric across iterations.
//! - [`osd`]: order-p OSD over the least reliable basis of `H`, with the
//!   two-stage (integer weight, then discrepancy) candidate selection.
//! - [`channel`]: BPSK over AWGN, the frame-level Monte-Carlo engine and a
//!   brute-force maximum-likelihood oracle for small codes.
//! - [`codes`]: a few code constructors for tests and experiments.

pub mod channel;
pub mod codes;
pub mod decoders;
pub mod gf2;
pub mod osd;

pub use channel::{
    ml_oracle, modulate, run_point, run_sweep, sigma2_from_ebn0, transmit, CascadeConfig, ChannelConfig, PointResult,
    SimError, SimStats, SourceMode, StopRule,
};
pub use decoders::{DecodeError, DecodeOutcome, Decoder, DecoderConfig, SoftInput, Variant};
pub use gf2::{
    eliminate, parse_alist, write_alist, BinaryMatrix, EliminationResult, Gf2Error, Permutation, SystematicEncoder,
};
pub use osd::{
    build_lrb, osd_decode, rank_by_reliability, Beta, LrbStructure, OsdConfig, OsdError, OsdOutcome,
    ReliabilityOrdering,
};
