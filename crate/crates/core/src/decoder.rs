//! LLR-domain successive-cancellation list decoding with CRC-aided path
//! selection.
//!
//! LLRs follow `log P(y|0) / P(y|1)`: positive values favour bit 0. Coded
//! bits that were never received carry an LLR of exactly zero.
//!
//! The decoder uses min-sum check updates and the magnitude-penalty path
//! metric. Per-depth LLR and partial-sum arrays are shared between paths
//! and copied lazily: a path takes a private array only when it writes to
//! a depth, and every write overwrites the whole array, so sharing never
//! needs an actual copy.

use std::cmp::Ordering;

use crate::crc::Crc;
use crate::error::{Error, Result};
use crate::polar::{MotherCode, SubsetCode};

/// Soft values in mother-code coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrFrame {
    values: Vec<f64>,
    covered: Vec<bool>,
}

impl LlrFrame {
    /// Nothing received yet: all zeros, nothing covered.
    pub fn erased(len: usize) -> Self {
        LlrFrame {
            values: vec![0.0; len],
            covered: vec![false; len],
        }
    }

    /// Every position observed.
    pub fn full(values: Vec<f64>) -> Self {
        let covered = vec![true; values.len()];
        LlrFrame { values, covered }
    }

    /// Reception of a subset code: `llrs[j]` belongs to the j-th kept index.
    pub fn from_subset(subset: &SubsetCode, llrs: &[f64]) -> Result<Self> {
        if llrs.len() != subset.len() {
            return Err(Error::LengthMismatch {
                expected: subset.len(),
                actual: llrs.len(),
            });
        }
        let mut frame = LlrFrame::erased(subset.block_len());
        for (&i, &v) in subset.kept().iter().zip(llrs) {
            frame.accumulate(i.zero_based(), v);
        }
        Ok(frame)
    }

    /// Adds an observation at a 0-based position.
    pub fn accumulate(&mut self, pos: usize, llr: f64) {
        self.values[pos] += llr;
        self.covered[pos] = true;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn covered(&self) -> &[bool] {
        &self.covered
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub payload: Vec<u8>,
    pub crc_ok: bool,
    pub chosen_path_metric: f64,
    pub list_size_used: usize,
}

/// Min-sum check update; `sign(0)` counts as +1.
#[inline]
pub fn f_check(a: f64, b: f64) -> f64 {
    let mag = a.abs().min(b.abs());
    if (a < 0.0) != (b < 0.0) {
        -mag
    } else {
        mag
    }
}

#[inline]
pub fn g_check(a: f64, b: f64, u: u8) -> f64 {
    if u & 1 == 0 {
        b + a
    } else {
        b - a
    }
}

#[inline]
pub fn hard_decision(llr: f64) -> u8 {
    (llr < 0.0) as u8
}

/// Adds `|llr|` when `u` disagrees with the hard decision.
#[inline]
pub fn path_metric_update(pm: f64, llr: f64, u: u8) -> f64 {
    if u & 1 != hard_decision(llr) {
        pm + llr.abs()
    } else {
        pm
    }
}

/// Reusable SCL decoder bound to one mother code.
#[derive(Debug, Clone)]
pub struct SclDecoder {
    log2_len: usize,
    frozen: Vec<bool>,
    info_len: usize,
    k: usize,
    crc: Crc,
    list_size: usize,
    llr_clip: Option<f64>,
    // storage per depth; depth 0 is the channel frame itself
    alpha: Vec<Vec<f64>>,
    beta: Vec<Vec<u8>>,
    alpha_ref: Vec<Vec<u32>>,
    beta_ref: Vec<Vec<u32>>,
    alpha_free: Vec<Vec<usize>>,
    beta_free: Vec<Vec<usize>>,
    path_alpha: Vec<Vec<usize>>,
    path_beta: Vec<Vec<usize>>,
    active: Vec<bool>,
    inactive: Vec<usize>,
    metric: Vec<f64>,
    history: Vec<u8>,
    channel: Vec<f64>,
    scratch: [Vec<u8>; 2],
}

struct Candidate {
    pm: f64,
    path: usize,
    bit: u8,
}

impl SclDecoder {
    pub fn new(mother: &MotherCode, list_size: usize) -> Result<Self> {
        if list_size == 0 {
            return Err(Error::domain("list size must be at least 1"));
        }
        let log2_len = mother.log2_len() as usize;
        let len = mother.len();
        let depths = log2_len + 1;
        let mut alpha = vec![Vec::new()];
        let mut beta = vec![Vec::new()];
        for d in 1..depths {
            alpha.push(vec![0.0; list_size * (len >> d)]);
            beta.push(vec![0u8; list_size * (len >> d)]);
        }
        Ok(SclDecoder {
            log2_len,
            frozen: mother.frozen_mask().to_vec(),
            info_len: mother.info_len(),
            k: mother.k(),
            crc: mother.crc(),
            list_size,
            llr_clip: None,
            alpha,
            beta,
            alpha_ref: vec![vec![0; list_size]; depths],
            beta_ref: vec![vec![0; list_size]; depths],
            alpha_free: vec![Vec::new(); depths],
            beta_free: vec![Vec::new(); depths],
            path_alpha: vec![vec![0; depths]; list_size],
            path_beta: vec![vec![0; depths]; list_size],
            active: vec![false; list_size],
            inactive: Vec::new(),
            metric: vec![0.0; list_size],
            history: vec![0; list_size * mother.info_len()],
            channel: vec![0.0; len],
            scratch: [vec![0; len], vec![0; len]],
        })
    }

    /// Saturates channel and intermediate LLRs at `±clip`.
    pub fn with_llr_clip(mut self, clip: Option<f64>) -> Self {
        self.llr_clip = clip.map(f64::abs);
        self
    }

    pub fn list_size(&self) -> usize {
        self.list_size
    }

    pub fn len(&self) -> usize {
        1 << self.log2_len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn reset(&mut self) {
        for d in 0..=self.log2_len {
            self.alpha_ref[d].iter_mut().for_each(|r| *r = 0);
            self.beta_ref[d].iter_mut().for_each(|r| *r = 0);
            self.alpha_free[d] = (1..self.list_size).rev().collect();
            self.beta_free[d] = (1..self.list_size).rev().collect();
            self.alpha_ref[d][0] = 1;
            self.beta_ref[d][0] = 1;
            self.path_alpha[0][d] = 0;
            self.path_beta[0][d] = 0;
        }
        self.active.iter_mut().for_each(|a| *a = false);
        self.active[0] = true;
        self.inactive = (1..self.list_size).rev().collect();
        self.metric[0] = 0.0;
    }

    fn own_alpha(&mut self, path: usize, d: usize) -> usize {
        let s = self.path_alpha[path][d];
        if self.alpha_ref[d][s] == 1 {
            return s;
        }
        self.alpha_ref[d][s] -= 1;
        let fresh = self.alpha_free[d].pop().expect("alpha slot pool exhausted");
        self.alpha_ref[d][fresh] = 1;
        self.path_alpha[path][d] = fresh;
        fresh
    }

    fn own_beta(&mut self, path: usize, d: usize) -> usize {
        let s = self.path_beta[path][d];
        if self.beta_ref[d][s] == 1 {
            return s;
        }
        self.beta_ref[d][s] -= 1;
        let fresh = self.beta_free[d].pop().expect("beta slot pool exhausted");
        self.beta_ref[d][fresh] = 1;
        self.path_beta[path][d] = fresh;
        fresh
    }

    fn clone_path(&mut self, from: usize) -> usize {
        let to = self.inactive.pop().expect("path pool exhausted");
        self.active[to] = true;
        for d in 0..=self.log2_len {
            let a = self.path_alpha[from][d];
            self.path_alpha[to][d] = a;
            self.alpha_ref[d][a] += 1;
            let b = self.path_beta[from][d];
            self.path_beta[to][d] = b;
            self.beta_ref[d][b] += 1;
        }
        self.metric[to] = self.metric[from];
        let w = self.info_len;
        self.history.copy_within(from * w..(from + 1) * w, to * w);
        to
    }

    fn kill_path(&mut self, path: usize) {
        self.active[path] = false;
        self.inactive.push(path);
        for d in 0..=self.log2_len {
            let a = self.path_alpha[path][d];
            self.alpha_ref[d][a] -= 1;
            if self.alpha_ref[d][a] == 0 {
                self.alpha_free[d].push(a);
            }
            let b = self.path_beta[path][d];
            self.beta_ref[d][b] -= 1;
            if self.beta_ref[d][b] == 0 {
                self.beta_free[d].push(b);
            }
        }
    }

    /// Fills `alpha[d]` of `path` from its parent at depth `d - 1`.
    /// `right` selects the g update (the left sibling's codeword is in
    /// `beta[d]`).
    fn update_alpha(&mut self, path: usize, d: usize, right: bool) {
        let len = self.len();
        let s = len >> d;
        let out_slot = self.own_alpha(path, d);
        let clip = self.llr_clip;
        let (upper, lower) = self.alpha.split_at_mut(d);
        let out = &mut lower[0][out_slot * s..(out_slot + 1) * s];
        let parent: &[f64] = if d == 1 {
            &self.channel
        } else {
            let ps = self.path_alpha[path][d - 1];
            &upper[d - 1][ps * 2 * s..(ps + 1) * 2 * s]
        };
        let (a, b) = parent.split_at(s);
        if right {
            let bs = self.path_beta[path][d];
            let left = &self.beta[d][bs * s..(bs + 1) * s];
            for j in 0..s {
                out[j] = g_check(a[j], b[j], left[j]);
            }
            if let Some(c) = clip {
                out.iter_mut().for_each(|v| *v = v.clamp(-c, c));
            }
        } else {
            for j in 0..s {
                out[j] = f_check(a[j], b[j]);
            }
        }
    }

    fn leaf_llr(&self, path: usize) -> f64 {
        let n = self.log2_len;
        self.alpha[n][self.path_alpha[path][n]]
    }

    /// Pushes the decision at `phase` into the partial-sum arrays.
    fn update_beta(&mut self, path: usize, phase: usize, bit: u8) {
        let n = self.log2_len;
        if phase & 1 == 0 {
            let slot = self.own_beta(path, n);
            self.beta[n][slot] = bit;
            return;
        }
        let [cur, next] = &mut self.scratch;
        cur[0] = bit;
        let mut size = 1;
        let mut d = n;
        while d >= 1 && (phase >> (n - d)) & 1 == 1 {
            let bs = self.path_beta[path][d];
            let left = &self.beta[d][bs * size..(bs + 1) * size];
            for j in 0..size {
                next[j] = left[j] ^ cur[j];
                next[j + size] = cur[j];
            }
            std::mem::swap(cur, next);
            size *= 2;
            d -= 1;
        }
        if d >= 1 {
            let slot = self.own_beta(path, d);
            let [cur, _] = &self.scratch;
            self.beta[d][slot * size..(slot + 1) * size].copy_from_slice(&cur[..size]);
        }
    }

    fn history_of(&self, path: usize, upto: usize) -> &[u8] {
        let w = self.info_len;
        &self.history[path * w..path * w + upto]
    }

    fn compare_candidates(&self, a: &Candidate, b: &Candidate, upto: usize) -> Ordering {
        a.pm.total_cmp(&b.pm)
            .then_with(|| self.history_of(a.path, upto).cmp(self.history_of(b.path, upto)))
            .then(a.bit.cmp(&b.bit))
    }

    pub fn decode(&mut self, frame: &LlrFrame) -> Result<DecodeResult> {
        let len = self.len();
        if frame.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                actual: frame.len(),
            });
        }
        self.channel.copy_from_slice(frame.values());
        if let Some(c) = self.llr_clip {
            self.channel.iter_mut().for_each(|v| *v = v.clamp(-c, c));
        }
        self.reset();
        let n = self.log2_len;
        let mut info_idx = 0;
        let mut paths: Vec<usize> = Vec::with_capacity(self.list_size);
        let mut cands: Vec<Candidate> = Vec::with_capacity(2 * self.list_size);

        for phase in 0..len {
            paths.clear();
            paths.extend((0..self.list_size).filter(|&l| self.active[l]));
            let first = if phase == 0 {
                1
            } else {
                n - phase.trailing_zeros() as usize
            };
            for &l in &paths {
                self.update_alpha(l, first, phase != 0);
                for d in first + 1..=n {
                    self.update_alpha(l, d, false);
                }
            }

            if self.frozen[phase] {
                for &l in &paths {
                    let llr = self.leaf_llr(l);
                    self.metric[l] = path_metric_update(self.metric[l], llr, 0);
                    self.update_beta(l, phase, 0);
                }
                continue;
            }

            cands.clear();
            for &l in &paths {
                let llr = self.leaf_llr(l);
                for bit in 0..2u8 {
                    cands.push(Candidate {
                        pm: path_metric_update(self.metric[l], llr, bit),
                        path: l,
                        bit,
                    });
                }
            }
            if cands.len() > self.list_size {
                cands.sort_by(|a, b| self.compare_candidates(a, b, info_idx));
                cands.truncate(self.list_size);
            }
            let mut keep = vec![[None::<f64>; 2]; self.list_size];
            for c in &cands {
                keep[c.path][c.bit as usize] = Some(c.pm);
            }
            for &l in &paths {
                if keep[l] == [None, None] {
                    self.kill_path(l);
                }
            }
            let w = self.info_len;
            for &l in &paths {
                match keep[l] {
                    [None, None] => {}
                    [Some(pm0), Some(pm1)] => {
                        let twin = self.clone_path(l);
                        self.metric[l] = pm0;
                        self.history[l * w + info_idx] = 0;
                        self.update_beta(l, phase, 0);
                        self.metric[twin] = pm1;
                        self.history[twin * w + info_idx] = 1;
                        self.update_beta(twin, phase, 1);
                    }
                    [Some(pm), None] | [None, Some(pm)] => {
                        let bit = keep[l][1].is_some() as u8;
                        self.metric[l] = pm;
                        self.history[l * w + info_idx] = bit;
                        self.update_beta(l, phase, bit);
                    }
                }
            }
            info_idx += 1;
        }

        let mut finals: Vec<Candidate> = (0..self.list_size)
            .filter(|&l| self.active[l])
            .map(|l| Candidate {
                pm: self.metric[l],
                path: l,
                bit: 0,
            })
            .collect();
        let used = finals.len();
        finals.sort_by(|a, b| self.compare_candidates(a, b, self.info_len));
        let chosen = finals
            .iter()
            .find(|c| self.crc.check(self.history_of(c.path, self.info_len)))
            .map(|c| (c, true))
            .unwrap_or((&finals[0], false));
        Ok(DecodeResult {
            payload: self.history_of(chosen.0.path, self.k).to_vec(),
            crc_ok: chosen.1,
            chosen_path_metric: chosen.0.pm,
            list_size_used: used,
        })
    }
}

/// One-shot convenience wrapper around [`SclDecoder`].
pub fn scl_decode(frame: &LlrFrame, mother: &MotherCode, list_size: usize) -> Result<DecodeResult> {
    SclDecoder::new(mother, list_size)?.decode(frame)
}
