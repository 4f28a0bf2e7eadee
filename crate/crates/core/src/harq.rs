//! Redundancy versions built from XOR translates of one subset code, and
//! the receiver-side combining session.
//!
//! RV `k` transmits the mother codeword at `base.kept ⊕ offsets[k]`. The
//! frozen set is never re-optimized per version, so every reception lands
//! in the same mother-code frame and is decoded by the same decoder.

use std::fmt;

use crate::construction::{puncture_symmetric, GreedyOutcome};
use crate::decoder::{DecodeResult, LlrFrame, SclDecoder};
use crate::error::{Error, Result};
use crate::polar::{CodeIndex, MotherCode, SubsetCode};

/// Default number of decode attempts before a session gives up.
pub const DEFAULT_MAX_ATTEMPTS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct RvPlan {
    base: SubsetCode,
    offsets: Vec<CodeIndex>,
    rvs: Vec<SubsetCode>,
}

impl RvPlan {
    /// Builds a plan from an existing base subset. The first offset is
    /// always the identity.
    pub fn new(base: SubsetCode, extra: &[CodeIndex]) -> Result<Self> {
        let len = base.block_len();
        let mut offsets = vec![CodeIndex::new(1, len)?];
        offsets.extend_from_slice(extra);
        let rvs = offsets.iter().map(|&x| base.translate(x)).collect::<Result<Vec<_>>>()?;
        if rvs.iter().any(|r| r.len() != base.len()) {
            return Err(Error::domain("redundancy versions must all have M coded bits"));
        }
        Ok(RvPlan { base, offsets, rvs })
    }

    pub fn base(&self) -> &SubsetCode {
        &self.base
    }

    pub fn offsets(&self) -> &[CodeIndex] {
        &self.offsets
    }

    pub fn num_rvs(&self) -> usize {
        self.rvs.len()
    }

    pub fn rv_subset(&self, rv: usize) -> Result<SubsetCode> {
        self.rv(rv).cloned()
    }

    fn rv(&self, rv: usize) -> Result<&SubsetCode> {
        self.rvs
            .get(rv)
            .ok_or_else(|| Error::domain(format!("RV {rv} out of range (plan has {})", self.rvs.len())))
    }
}

/// Runs the symmetric construction for offset `x` and returns the plan with
/// offsets `[1, x] ++ extra` along with the construction record.
pub fn make_rv_plan(
    mother: &MotherCode,
    m: usize,
    x: CodeIndex,
    extra: &[CodeIndex],
) -> Result<(RvPlan, GreedyOutcome)> {
    let outcome = puncture_symmetric(mother, m, x)?;
    let mut offsets = vec![x];
    offsets.extend_from_slice(extra);
    let plan = RvPlan::new(outcome.pattern.subset_code(), &offsets)?;
    Ok((plan, outcome))
}

/// Mother-codeword bits at RV `rv`'s kept indices, in increasing index order.
pub fn rv_transmit_bits(codeword: &[u8], plan: &RvPlan, rv: usize) -> Result<Vec<u8>> {
    let subset = plan.rv(rv)?;
    if codeword.len() != subset.block_len() {
        return Err(Error::LengthMismatch {
            expected: subset.block_len(),
            actual: codeword.len(),
        });
    }
    Ok(subset.kept().iter().map(|i| codeword[i.zero_based()]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HarqState {
    Idle,
    Waiting,
    Decoded,
    Exhausted,
}

/// One line of the session trace: `rv_idx snr_db decode_attempt crc_ok path_metric`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent {
    pub rv: usize,
    pub snr_db: f64,
    pub attempt: usize,
    pub crc_ok: bool,
    pub path_metric: f64,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {}",
            self.rv, self.snr_db, self.attempt, self.crc_ok as u8, self.path_metric
        )
    }
}

/// Receiver state for one H-ARQ process.
#[derive(Debug, Clone)]
pub struct HarqSession {
    frame: LlrFrame,
    rvs_received: Vec<usize>,
    decode_attempts: usize,
    max_attempts: usize,
    state: HarqState,
    last: Option<DecodeResult>,
}

impl HarqSession {
    pub fn new(len: usize) -> Self {
        Self::with_max_attempts(len, DEFAULT_MAX_ATTEMPTS)
    }

    pub fn with_max_attempts(len: usize, max_attempts: usize) -> Self {
        HarqSession {
            frame: LlrFrame::erased(len),
            rvs_received: Vec::new(),
            decode_attempts: 0,
            max_attempts: max_attempts.max(1),
            state: HarqState::Idle,
            last: None,
        }
    }

    pub fn frame(&self) -> &LlrFrame {
        &self.frame
    }

    pub fn rvs_received(&self) -> &[usize] {
        &self.rvs_received
    }

    pub fn decode_attempts(&self) -> usize {
        self.decode_attempts
    }

    pub fn state(&self) -> HarqState {
        self.state
    }

    pub fn last_result(&self) -> Option<&DecodeResult> {
        self.last.as_ref()
    }

    /// Adds the received LLRs of RV `rv` into the mother-coordinate frame.
    /// Positions seen before are summed.
    pub fn accumulate_rv(&mut self, rv: usize, llrs: &[f64], plan: &RvPlan) -> Result<()> {
        match self.state {
            HarqState::Decoded => return Err(Error::domain("session already decoded")),
            HarqState::Exhausted => return Err(Error::domain("session exhausted its attempts")),
            _ => {}
        }
        let subset = plan.rv(rv)?;
        if llrs.len() != subset.len() {
            return Err(Error::LengthMismatch {
                expected: subset.len(),
                actual: llrs.len(),
            });
        }
        if subset.block_len() != self.frame.len() {
            return Err(Error::LengthMismatch {
                expected: self.frame.len(),
                actual: subset.block_len(),
            });
        }
        for (i, &v) in subset.kept().iter().zip(llrs) {
            self.frame.accumulate(i.zero_based(), v);
        }
        self.rvs_received.push(rv);
        self.state = HarqState::Waiting;
        Ok(())
    }

    /// Decodes the current frame and advances the state machine.
    pub fn try_decode(&mut self, decoder: &mut SclDecoder) -> Result<DecodeResult> {
        match self.state {
            HarqState::Idle => return Err(Error::domain("nothing received yet")),
            HarqState::Decoded => return Err(Error::domain("session already decoded")),
            HarqState::Exhausted => return Err(Error::domain("session exhausted its attempts")),
            HarqState::Waiting => {}
        }
        let res = decoder.decode(&self.frame)?;
        self.decode_attempts += 1;
        self.state = if res.crc_ok {
            HarqState::Decoded
        } else if self.decode_attempts >= self.max_attempts {
            HarqState::Exhausted
        } else {
            HarqState::Waiting
        };
        self.last = Some(res.clone());
        Ok(res)
    }

    /// Trace line for the latest attempt.
    pub fn trace(&self, snr_db: f64) -> Option<TraceEvent> {
        let res = self.last.as_ref()?;
        Some(TraceEvent {
            rv: *self.rvs_received.last()?,
            snr_db,
            attempt: self.decode_attempts,
            crc_ok: res.crc_ok,
            path_metric: res.chosen_path_metric,
        })
    }
}

/// Convenience: decode with a fresh decoder of list size `list_size`.
pub fn harq_try_decode(session: &mut HarqSession, mother: &MotherCode, list_size: usize) -> Result<DecodeResult> {
    let mut dec = SclDecoder::new(mother, list_size)?;
    session.try_decode(&mut dec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::bec_evolve;
    use crate::polar::indices;

    fn setup() -> (MotherCode, RvPlan) {
        let mother = MotherCode::design(3, 2, 0, 0.5).unwrap();
        let x = CodeIndex::new(8, 8).unwrap();
        let (plan, _) = make_rv_plan(&mother, 4, x, &[]).unwrap();
        (mother, plan)
    }

    #[test]
    fn tiny_plan_is_complementary() {
        let (_, plan) = setup();
        let a = plan.rv_subset(0).unwrap();
        let b = plan.rv_subset(1).unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(b.len(), 4);
        let mut all: Vec<usize> = a.kept().iter().chain(b.kept()).map(|i| i.get()).collect();
        all.sort();
        assert_eq!(all, (1..=8).collect::<Vec<_>>());
        assert_eq!(plan.rv_subset(0).unwrap(), *plan.base());
        assert!(plan.rv_subset(2).is_err());
    }

    #[test]
    fn four_versions_share_profile() {
        let mother = MotherCode::design(5, 6, 0, 0.5).unwrap();
        let x = CodeIndex::new(32, 32).unwrap();
        let y = CodeIndex::new(5, 32).unwrap();
        let (plan, _) = make_rv_plan(&mother, 16, x, &[y, y.xor(x)]).unwrap();
        assert_eq!(plan.num_rvs(), 4);
        let reference = bec_evolve(0.5, 32, &plan.rv_subset(0).unwrap().punctured()).unwrap();
        for rv in 1..4 {
            let s = plan.rv_subset(rv).unwrap();
            assert_eq!(s.len(), 16);
            let prof = bec_evolve(0.5, 32, &s.punctured()).unwrap();
            assert!(prof.max_abs_diff(&reference) <= 1e-12);
        }
    }

    #[test]
    fn transmit_bits() {
        let (mother, plan) = setup();
        assert_eq!(rv_transmit_bits(&[0; 8], &plan, 0).unwrap(), vec![0; 4]);
        let cw = mother.encode_payload(&[1, 1]).unwrap();
        let mut both = rv_transmit_bits(&cw, &plan, 0).unwrap();
        both.extend(rv_transmit_bits(&cw, &plan, 1).unwrap());
        let mut sorted_both = both.clone();
        sorted_both.sort();
        let mut sorted_cw = cw.clone();
        sorted_cw.sort();
        assert_eq!(sorted_both, sorted_cw);
        assert!(rv_transmit_bits(&cw, &plan, 5).is_err());
        assert!(rv_transmit_bits(&cw[..4], &plan, 0).is_err());
    }

    #[test]
    fn accumulation_rules() {
        let (_, plan) = setup();
        let mut s = HarqSession::new(8);
        assert_eq!(s.state(), HarqState::Idle);
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [0.5, -1.0, 0.25, 2.0];
        s.accumulate_rv(0, &a, &plan).unwrap();
        s.accumulate_rv(0, &b, &plan).unwrap();
        let kept = plan.rv_subset(0).unwrap();
        for (j, i) in kept.kept().iter().enumerate() {
            assert_eq!(s.frame().values()[i.zero_based()], a[j] + b[j]);
        }
        assert_eq!(s.frame().covered().iter().filter(|&&c| c).count(), 4);
        s.accumulate_rv(1, &a, &plan).unwrap();
        assert!(s.frame().covered().iter().all(|&c| c));
        assert!(s.accumulate_rv(1, &a[..3], &plan).is_err());
        assert_eq!(s.state(), HarqState::Waiting);
    }

    #[test]
    fn state_machine() {
        let mother = MotherCode::design(4, 4, 0, 0.5).unwrap();
        let x = CodeIndex::new(16, 16).unwrap();
        let (plan, _) = make_rv_plan(&mother, 8, x, &[]).unwrap();
        let mut dec = SclDecoder::new(&mother, 4).unwrap();

        // zero LLRs under L = 1 decode to the all-zero message, which fails
        // a CRC with nonzero init
        let crc_mother = MotherCode::design(5, 2, 16, 0.5).unwrap();
        let (crc_plan, _) = make_rv_plan(&crc_mother, 20, CodeIndex::new(32, 32).unwrap(), &[]).unwrap();
        let mut crc_dec = SclDecoder::new(&crc_mother, 1).unwrap();
        let mut s = HarqSession::with_max_attempts(32, 2);
        assert!(s.try_decode(&mut crc_dec).is_err());
        let zeros = vec![0.0; 20];
        s.accumulate_rv(0, &zeros, &crc_plan).unwrap();
        assert!(!s.try_decode(&mut crc_dec).unwrap().crc_ok);
        assert_eq!(s.state(), HarqState::Waiting);
        s.accumulate_rv(1, &zeros, &crc_plan).unwrap();
        assert!(!s.try_decode(&mut crc_dec).unwrap().crc_ok);
        assert_eq!(s.state(), HarqState::Exhausted);
        assert!(s.accumulate_rv(0, &zeros, &crc_plan).is_err());
        assert_eq!(s.rvs_received(), &[0, 1]);

        // noiseless RV0 decodes and the state becomes absorbing
        let payload = [1u8, 0, 1, 1];
        let cw = mother.encode_payload(&payload).unwrap();
        let llr: Vec<f64> = rv_transmit_bits(&cw, &plan, 0)
            .unwrap()
            .iter()
            .map(|&b| if b == 0 { 20.0 } else { -20.0 })
            .collect();
        let mut s = HarqSession::new(16);
        s.accumulate_rv(0, &llr, &plan).unwrap();
        let r = s.try_decode(&mut dec).unwrap();
        assert!(r.crc_ok);
        assert_eq!(r.payload, payload);
        assert_eq!(s.state(), HarqState::Decoded);
        assert!(s.accumulate_rv(1, &llr, &plan).is_err());
        assert!(s.try_decode(&mut dec).is_err());
        let t = s.trace(3.5).unwrap();
        assert_eq!(t.to_string(), "0 3.5 1 1 0");
    }

    #[test]
    fn plan_rejects_identity_offset() {
        let mother = MotherCode::design(3, 2, 0, 0.5).unwrap();
        assert!(make_rv_plan(&mother, 4, CodeIndex::new(1, 8).unwrap(), &[]).is_err());
        let base = SubsetCode::from_kept(8, indices(&[1, 2, 3, 4], 8).unwrap()).unwrap();
        assert_eq!(RvPlan::new(base, &[]).unwrap().num_rvs(), 1);
    }
}
