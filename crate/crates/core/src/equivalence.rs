//! Checks that XOR-translated subset codes behave identically.
//!
//! Three levels of evidence, from cheapest to strongest:
//! * equal BEC erasure profiles of every bit-channel (exact, any N);
//! * overlapping Monte Carlo BLER intervals under AWGN;
//! * at N ≤ 4, explicit transition tables of the bit-channels and an
//!   output-alphabet bijection that maps one onto the other.

use std::fmt;

use crate::construction::bec_evolve;
use crate::error::{Error, Result};
use crate::polar::{check_block_len, xor_translate, CodeIndex, MotherCode, SubsetCode};
use crate::sim::{simulate_point, BlerPoint, DecoderConfig, Transmission, TrialPolicy};

/// Profiles closer than this count as equal.
pub const PROFILE_TOLERANCE: f64 = 1e-12;

/// Stable 64-bit FNV-1a digest of a sorted index set.
pub fn set_digest(set: &[CodeIndex]) -> u64 {
    let mut sorted: Vec<u32> = set.iter().map(|i| i.get() as u32).collect();
    sorted.sort_unstable();
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in sorted {
        for byte in v.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub block_len: usize,
    pub subset: Vec<CodeIndex>,
    pub x: CodeIndex,
    pub eps: f64,
    pub max_abs_diff: f64,
    pub passed: bool,
}

impl fmt::Display for EquivalenceReport {
    /// `N S_hash x eps max_abs_diff PASS|FAIL`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:016x} {} {} {:e} {}",
            self.block_len,
            set_digest(&self.subset),
            self.x,
            self.eps,
            self.max_abs_diff,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

/// Compares the BEC(`eps`) erasure profiles of subset `s` and `s ⊕ x`
/// (unkept coded bits always erased).
pub fn check_equivalence_bec(s: &[CodeIndex], x: CodeIndex, eps: f64, len: usize) -> Result<EquivalenceReport> {
    let t = xor_translate(s, x, len)?;
    let profile_s = bec_evolve(eps, len, &SubsetCode::from_kept(len, s.to_vec())?.punctured())?;
    let profile_t = bec_evolve(eps, len, &SubsetCode::from_kept(len, t)?.punctured())?;
    let max_abs_diff = profile_s.max_abs_diff(&profile_t);
    Ok(EquivalenceReport {
        block_len: len,
        subset: s.to_vec(),
        x,
        eps,
        max_abs_diff,
        passed: max_abs_diff <= PROFILE_TOLERANCE,
    })
}

/// Whether the two Monte Carlo arms share noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseCoupling {
    Independent,
    Shared,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloEquivalence {
    pub subset: BlerPoint,
    pub translated: BlerPoint,
    /// The 95% Wilson intervals overlap.
    pub equivalent: bool,
}

/// Simulates subset `s` and `s ⊕ x` at one Eb/N0 for exactly `trials`
/// frames each.
#[allow(clippy::too_many_arguments)]
pub fn check_equivalence_montecarlo(
    s: &[CodeIndex],
    x: CodeIndex,
    mother: &MotherCode,
    decoder: &DecoderConfig,
    snr_db: f64,
    trials: u64,
    seed: u64,
    coupling: NoiseCoupling,
) -> Result<MonteCarloEquivalence> {
    if trials == 0 {
        return Err(Error::domain("need at least one trial"));
    }
    let len = mother.len();
    let subset = SubsetCode::from_kept(len, s.to_vec())?;
    let translated = subset.translate(x)?;
    let policy = TrialPolicy::fixed(trials);
    let seed_t = match coupling {
        NoiseCoupling::Shared => seed,
        NoiseCoupling::Independent => crate::sim::mix64(seed ^ 0x005e_ed7a_110f_u64),
    };
    let a = simulate_point(mother, &Transmission::single(subset), decoder, snr_db, 0, &policy, seed)?;
    let b = simulate_point(
        mother,
        &Transmission::single(translated),
        decoder,
        snr_db,
        0,
        &policy,
        seed_t,
    )?;
    let equivalent = a.overlaps(&b);
    Ok(MonteCarloEquivalence {
        subset: a,
        translated: b,
        equivalent,
    })
}

/// Output symbol of BEC / always-erasing leg.
const ERASED: u8 = 2;

/// Transition table of bit-channel `i` (0-based): one `(W(y|0), W(y|1))`
/// row per output `(y_1..y_N, u_1..u_{i})`.
fn bit_channel_table(len: usize, kept: &[bool], eps: f64, i: usize) -> Vec<(f64, f64)> {
    let outputs_y = 3usize.pow(len as u32);
    let prior_bits = 1usize << i;
    let future = len - i - 1;
    let scale = 0.5f64.powi((len - 1) as i32);
    let mut table = vec![(0.0, 0.0); outputs_y * prior_bits];
    let mut u = vec![0u8; len];
    let mut y = vec![0u8; len];
    for prior in 0..prior_bits {
        for ui in 0..2u8 {
            for rest in 0..(1usize << future) {
                for (j, slot) in u.iter_mut().enumerate() {
                    *slot = if j < i {
                        ((prior >> j) & 1) as u8
                    } else if j == i {
                        ui
                    } else {
                        ((rest >> (j - i - 1)) & 1) as u8
                    };
                }
                let mut x = u.clone();
                crate::polar::polar_transform_in_place(&mut x).expect("power of two");
                for code in 0..outputs_y {
                    let mut c = code;
                    for slot in y.iter_mut() {
                        *slot = (c % 3) as u8;
                        c /= 3;
                    }
                    let mut p = scale;
                    for j in 0..len {
                        p *= match (kept[j], y[j]) {
                            (false, ERASED) => 1.0,
                            (false, _) => 0.0,
                            (true, ERASED) => eps,
                            (true, sym) if sym == x[j] => 1.0 - eps,
                            (true, _) => 0.0,
                        };
                        if p == 0.0 {
                            break;
                        }
                    }
                    let row = &mut table[prior * outputs_y + code];
                    if ui == 0 {
                        row.0 += p;
                    } else {
                        row.1 += p;
                    }
                }
            }
        }
    }
    table
}

fn sorted_rows(table: &[(f64, f64)]) -> Vec<(usize, (f64, f64))> {
    let mut rows: Vec<(usize, (f64, f64))> = table.iter().copied().enumerate().collect();
    rows.sort_by(|a, b| a.1 .0.total_cmp(&b.1 .0).then(a.1 .1.total_cmp(&b.1 .1)));
    rows
}

/// Finds a bijection `f` with `W_s(y|u) = W_t(f(y)|u)` by matching the
/// sorted multisets of probability pairs, then checks it row by row.
fn find_bijection(ws: &[(f64, f64)], wt: &[(f64, f64)], tol: f64) -> Option<Vec<usize>> {
    if ws.len() != wt.len() {
        return None;
    }
    let rs = sorted_rows(ws);
    let rt = sorted_rows(wt);
    let mut map = vec![usize::MAX; ws.len()];
    for ((ys, _), (yt, _)) in rs.iter().zip(&rt) {
        map[*ys] = *yt;
    }
    let ok = ws.iter().enumerate().all(|(y, &(a0, a1))| {
        let (b0, b1) = wt[map[y]];
        (a0 - b0).abs() <= tol && (a1 - b1).abs() <= tol
    });
    ok.then_some(map)
}

/// Exhaustive channel-equivalence check at `N ∈ {2, 4}`: for every
/// bit-channel, an output bijection between the channels of subset `s`
/// and `s ⊕ x` exists.
pub fn enumerate_channel_equivalence(len: usize, s: &[CodeIndex], x: CodeIndex, eps: f64) -> Result<bool> {
    check_block_len(len)?;
    if len > 4 {
        return Err(Error::Unsupported(format!(
            "exhaustive equivalence needs N <= 4, got {len}"
        )));
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidEpsilon(eps));
    }
    let t = xor_translate(s, x, len)?;
    let mask = |set: &[CodeIndex]| {
        let mut m = vec![false; len];
        for i in set {
            m[i.zero_based()] = true;
        }
        m
    };
    let (ms, mt) = (mask(s), mask(&t));
    Ok((0..len).all(|i| {
        let ws = bit_channel_table(len, &ms, eps, i);
        let wt = bit_channel_table(len, &mt, eps, i);
        find_bijection(&ws, &wt, 1e-12).is_some()
    }))
}
