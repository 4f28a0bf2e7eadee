//! Monte Carlo BLER engine.
//!
//! Every trial draws from its own generator keyed by `(seed, point, trial)`:
//! first the payload, then one layer of N standard normals per
//! transmission "occurrence" in mother coordinates. The k-th time a coded
//! bit is sent it uses layer k. Curves that send the same coded bit once
//! therefore see the same noise on it, which is what makes joint decoding
//! of two disjoint redundancy versions bit-identical to decoding the mother
//! code at the same point.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::channel::{llr_for, noise_variance, substream};
use super::stats::BlerPoint;
use crate::decoder::{LlrFrame, SclDecoder};
use crate::error::{Error, Result};
use crate::harq::RvPlan;
use crate::polar::{MotherCode, SubsetCode};

/// When to stop simulating one SNR point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialPolicy {
    pub min_trials: u64,
    pub min_errors: u64,
    pub max_trials: u64,
    /// Trials run between stop checks. Results depend on it only through
    /// where the run stops.
    pub batch: u64,
}

impl Default for TrialPolicy {
    fn default() -> Self {
        TrialPolicy {
            min_trials: 0,
            min_errors: 100,
            max_trials: 1_000_000,
            batch: 1000,
        }
    }
}

impl TrialPolicy {
    /// Exactly `trials` trials regardless of errors.
    pub fn fixed(trials: u64) -> Self {
        TrialPolicy {
            min_trials: trials,
            min_errors: u64::MAX,
            max_trials: trials,
            batch: 1000,
        }
    }

    fn done(&self, trials: u64, errors: u64) -> bool {
        trials >= self.max_trials || (trials >= self.min_trials && errors >= self.min_errors)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderConfig {
    pub list_size: usize,
    pub llr_clip: Option<f64>,
}

impl DecoderConfig {
    pub fn new(list_size: usize) -> Self {
        DecoderConfig {
            list_size,
            llr_clip: None,
        }
    }

    pub fn build(&self, mother: &MotherCode) -> Result<SclDecoder> {
        Ok(SclDecoder::new(mother, self.list_size)?.with_llr_clip(self.llr_clip))
    }
}

/// The coded-bit subsets a receiver gets before it decodes once.
#[derive(Debug, Clone, PartialEq)]
pub struct Transmission {
    subsets: Vec<SubsetCode>,
    layers: usize,
}

impl Transmission {
    pub fn new(subsets: Vec<SubsetCode>) -> Result<Self> {
        let len = subsets
            .first()
            .ok_or_else(|| Error::domain("a transmission needs at least one subset"))?
            .block_len();
        let mut count = vec![0usize; len];
        for s in &subsets {
            if s.block_len() != len {
                return Err(Error::LengthMismatch {
                    expected: len,
                    actual: s.block_len(),
                });
            }
            for i in s.kept() {
                count[i.zero_based()] += 1;
            }
        }
        let layers = count.into_iter().max().unwrap_or(0).max(1);
        Ok(Transmission { subsets, layers })
    }

    pub fn single(subset: SubsetCode) -> Self {
        Transmission {
            subsets: vec![subset],
            layers: 1,
        }
    }

    /// The unpunctured mother code.
    pub fn mother(mother: &MotherCode) -> Self {
        Self::single(SubsetCode::full(mother.len()).expect("mother length is a power of two"))
    }

    pub fn subsets(&self) -> &[SubsetCode] {
        &self.subsets
    }

    /// Total channel uses.
    pub fn channel_bits(&self) -> usize {
        self.subsets.iter().map(SubsetCode::len).sum()
    }

    /// Payload bits per channel use.
    pub fn rate(&self, mother: &MotherCode) -> f64 {
        mother.k() as f64 / self.channel_bits() as f64
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrialOutcome {
    pub error: bool,
    pub undetected: bool,
}

/// Draws the payload and the noise layers of one trial.
pub fn draw_trial<R: Rng>(rng: &mut R, k: usize, len: usize, layers: usize) -> (Vec<u8>, Vec<Vec<f64>>) {
    let payload = (0..k).map(|_| rng.random::<bool>() as u8).collect();
    let noise = (0..layers)
        .map(|_| (0..len).map(|_| rng.sample(StandardNormal)).collect())
        .collect();
    (payload, noise)
}

/// Channel observations of `codeword` for one transmission, in mother
/// coordinates.
pub fn receive(codeword: &[u8], tx: &Transmission, noise: &[Vec<f64>], sigma2: f64) -> LlrFrame {
    let mut frame = LlrFrame::erased(codeword.len());
    let mut occurrence = vec![0usize; codeword.len()];
    for subset in &tx.subsets {
        for i in subset.kept() {
            let j = i.zero_based();
            let layer = occurrence[j];
            occurrence[j] += 1;
            frame.accumulate(j, llr_for(codeword[j], noise[layer][j], sigma2));
        }
    }
    frame
}

fn run_trial(
    mother: &MotherCode,
    tx: &Transmission,
    sigma2: f64,
    seed: u64,
    point: u64,
    trial: u64,
    decoder: &mut SclDecoder,
) -> Result<TrialOutcome> {
    let mut rng = substream(seed, point, trial);
    let (payload, noise) = draw_trial(&mut rng, mother.k(), mother.len(), tx.layers);
    let codeword = mother.encode_payload(&payload)?;
    let frame = receive(&codeword, tx, &noise, sigma2);
    let res = decoder.decode(&frame)?;
    let correct = res.payload == payload;
    Ok(TrialOutcome {
        error: !(res.crc_ok && correct),
        undetected: res.crc_ok && !correct,
    })
}

/// Simulates one Eb/N0 point. `point` selects the random substreams.
pub fn simulate_point(
    mother: &MotherCode,
    tx: &Transmission,
    decoder: &DecoderConfig,
    ebn0_db: f64,
    point: u64,
    policy: &TrialPolicy,
    seed: u64,
) -> Result<BlerPoint> {
    if tx.subsets[0].block_len() != mother.len() {
        return Err(Error::LengthMismatch {
            expected: mother.len(),
            actual: tx.subsets[0].block_len(),
        });
    }
    if policy.batch == 0 || policy.max_trials == 0 {
        return Err(Error::domain("trial policy needs batch >= 1 and max_trials >= 1"));
    }
    let sigma2 = noise_variance(ebn0_db, tx.rate(mother));
    decoder.build(mother)?;
    let (mut trials, mut errors, mut undetected) = (0u64, 0u64, 0u64);
    while !policy.done(trials, errors) {
        let end = (trials + policy.batch).min(policy.max_trials);
        let outcomes: Vec<Result<TrialOutcome>> = (trials..end)
            .into_par_iter()
            .map_init(
                || decoder.build(mother).expect("decoder config validated above"),
                |dec, t| run_trial(mother, tx, sigma2, seed, point, t, dec),
            )
            .collect();
        for o in outcomes {
            let o = o?;
            errors += o.error as u64;
            undetected += o.undetected as u64;
        }
        trials = end;
    }
    Ok(BlerPoint::new(ebn0_db, trials, errors, undetected))
}

/// BLER curve over `sweep`; point `i` uses substream index `i`.
pub fn run_bler(
    mother: &MotherCode,
    tx: &Transmission,
    decoder: &DecoderConfig,
    sweep: &[f64],
    policy: &TrialPolicy,
    seed: u64,
) -> Result<Vec<BlerPoint>> {
    sweep
        .iter()
        .enumerate()
        .map(|(i, &snr)| simulate_point(mother, tx, decoder, snr, i as u64, policy, seed))
        .collect()
}

/// The three curves of a two-version H-ARQ experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct HarqCurves {
    pub rv0: Vec<BlerPoint>,
    pub rv1: Vec<BlerPoint>,
    pub joint: Vec<BlerPoint>,
}

/// RV0 alone, RV1 alone, and both combined, all under the same seed. The
/// joint curve is plotted against the Eb/N0 of the combined transmission
/// (rate `K / (M0 + M1)`).
pub fn run_harq_experiment(
    mother: &MotherCode,
    plan: &RvPlan,
    decoder: &DecoderConfig,
    sweep: &[f64],
    policy: &TrialPolicy,
    seed: u64,
) -> Result<HarqCurves> {
    if plan.num_rvs() < 2 {
        return Err(Error::domain("H-ARQ experiment needs at least two redundancy versions"));
    }
    let rv0 = plan.rv_subset(0)?;
    let rv1 = plan.rv_subset(1)?;
    let joint = Transmission::new(vec![rv0.clone(), rv1.clone()])?;
    Ok(HarqCurves {
        rv0: run_bler(mother, &Transmission::single(rv0), decoder, sweep, policy, seed)?,
        rv1: run_bler(mother, &Transmission::single(rv1), decoder, sweep, policy, seed)?,
        joint: run_bler(mother, &joint, decoder, sweep, policy, seed)?,
    })
}
