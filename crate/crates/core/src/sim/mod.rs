//! BI-AWGN channel, Monte Carlo BLER estimation and curve output.

mod channel;
mod csv;
mod engine;
mod stats;

pub use channel::{awgn_llr, llr_for, mix64, noise_variance, substream, ChannelConfig};
pub use csv::{render_curve, CSV_COLUMNS};
pub use engine::{
    draw_trial, receive, run_bler, run_harq_experiment, simulate_point, DecoderConfig, HarqCurves, Transmission,
    TrialOutcome, TrialPolicy,
};
pub use stats::{snr_at_bler, wilson_interval, BlerPoint, Z95};
