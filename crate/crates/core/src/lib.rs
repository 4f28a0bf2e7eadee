//! Polar codes with puncturing built from XOR-translated subset codes,
//! and the incremental-redundancy H-ARQ scheme they enable.
//!
//! Indices are 1-based and in natural order: coded bit `i` is
//! `x_i` of `x = u F^{⊗n}`, with no bit reversal anywhere.

pub mod construction;
pub mod crc;
pub mod decoder;
pub mod equivalence;
mod error;
pub mod harq;
pub mod polar;
pub mod sim;

pub use construction::{
    bec_evolve, estimate_bler, puncture_fixed_eps, puncture_frozen_based, puncture_greedy, puncture_symmetric,
    update_eps, Algorithm, BlerEstimate, GreedyOutcome, PatternFile, ZProfile,
};
pub use crc::Crc;
pub use decoder::{scl_decode, DecodeResult, LlrFrame, SclDecoder};
pub use equivalence::{
    check_equivalence_bec, check_equivalence_montecarlo, enumerate_channel_equivalence, EquivalenceReport,
    NoiseCoupling,
};
pub use error::{Error, Result};
pub use harq::{harq_try_decode, make_rv_plan, HarqSession, HarqState, RvPlan, TraceEvent};
pub use polar::{indices, polar_encode, xor_translate, CodeIndex, MotherCode, PuncturePattern, SubsetCode};
pub use sim::{run_bler, run_harq_experiment, BlerPoint, DecoderConfig, Transmission, TrialPolicy};
