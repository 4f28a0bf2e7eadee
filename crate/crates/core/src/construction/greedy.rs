//! Greedy puncturing: the adaptive-ε construction, its symmetric variant
//! for H-ARQ, and two baselines (fixed ε, frozen-channel targeting).

use rayon::prelude::*;

use super::density::{bec_evolve, estimate_bler, leaf_probabilities, IncrementalScorer, ScoreBuffers};
use crate::error::{Error, Result};
use crate::polar::{CodeIndex, MotherCode, PuncturePattern};

/// Decrement applied to ε by [`update_eps`].
pub const EPS_STEP: f64 = 0.001;
/// Smallest ε [`update_eps`] will return.
pub const EPS_FLOOR: f64 = 0.001;

/// Candidate scores within this relative distance of the best count as tied,
/// and ties go to the lowest index.
pub const TIE_REL_TOL: f64 = 1e-12;

/// Result of [`update_eps`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsUpdate {
    pub eps: f64,
    /// True when the floor was reached and the estimate still exceeds the target.
    pub saturated: bool,
}

fn snap(eps: f64) -> f64 {
    (eps * 1e9).round() / 1e9
}

/// Lowers ε in steps of [`EPS_STEP`] until the union bound of `pattern`
/// drops to `target` or below.
pub fn update_eps(pattern: &PuncturePattern, eps: f64, target: f64, mother: &MotherCode) -> Result<EpsUpdate> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidEpsilon(eps));
    }
    let mut eps = eps;
    let mut estimate = estimate_bler(pattern, eps, mother)?.value;
    while estimate > target {
        let next = snap(eps - EPS_STEP);
        if next < EPS_FLOOR {
            eps = EPS_FLOOR;
            estimate = estimate_bler(pattern, eps, mother)?.value;
            return Ok(EpsUpdate {
                eps,
                saturated: estimate > target,
            });
        }
        eps = next;
        estimate = estimate_bler(pattern, eps, mother)?.value;
    }
    Ok(EpsUpdate { eps, saturated: false })
}

/// A finished greedy run.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyOutcome {
    pub pattern: PuncturePattern,
    /// Design ε the run started from.
    pub eps_initial: f64,
    /// ε after the last update (equal to `eps_initial` for fixed-ε runs).
    pub eps_final: f64,
    /// Union bound of the unpunctured code at `eps_initial`.
    pub target_bler: f64,
    /// Whether any ε update hit the floor without meeting the target.
    pub saturated: bool,
}

#[derive(Debug, Clone, Copy)]
enum EpsPolicy {
    Adaptive,
    Fixed(f64),
}

fn check_subset_len(mother: &MotherCode, m: usize) -> Result<()> {
    if m < mother.info_len() || m > mother.len() {
        return Err(Error::domain(format!(
            "subset length M = {m} outside [{}, {}]",
            mother.info_len(),
            mother.len()
        )));
    }
    Ok(())
}

/// Index of the smallest score; near-ties go to the earliest entry.
fn argmin_lowest(scores: &[(usize, f64)]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &(idx, s) in scores {
        match best {
            None => best = Some((idx, s)),
            Some((_, b)) => {
                if s < b - TIE_REL_TOL * b.abs() {
                    best = Some((idx, s));
                }
            }
        }
    }
    best.map(|(i, _)| i)
}

fn run_greedy(mother: &MotherCode, m: usize, policy: EpsPolicy, offset: Option<CodeIndex>) -> Result<GreedyOutcome> {
    check_subset_len(mother, m)?;
    let len = mother.len();
    let eps_initial = match policy {
        EpsPolicy::Adaptive => mother.design_eps(),
        EpsPolicy::Fixed(e) => e,
    };
    if !(eps_initial > 0.0 && eps_initial <= 1.0) {
        return Err(Error::InvalidEpsilon(eps_initial));
    }
    let info_mask: Vec<bool> = mother.frozen_mask().iter().map(|f| !f).collect();
    let mut pattern = PuncturePattern::empty(len)?;
    let target = estimate_bler(&pattern, eps_initial, mother)?.value;
    let mut eps = eps_initial;
    let mut saturated = false;
    // punctured, plus (for the symmetric variant) P ⊕ x
    let mut blocked = vec![false; len];
    let shift = offset.map(|x| x.zero_based());

    for _ in 0..(len - m) {
        let scorer = IncrementalScorer::new(leaf_probabilities(eps, &pattern.mask()), &info_mask);
        let candidates: Vec<usize> = (0..len).filter(|&l| !blocked[l]).collect();
        let scores: Vec<(usize, f64)> = candidates
            .par_iter()
            .map_init(ScoreBuffers::default, |buf, &l| (l, scorer.score_with(l, buf)))
            .collect();
        let chosen = argmin_lowest(&scores).ok_or_else(|| Error::domain("no admissible puncturing candidate left"))?;
        pattern.push(CodeIndex::from_zero_based(chosen));
        blocked[chosen] = true;
        if let Some(s) = shift {
            blocked[chosen ^ s] = true;
        }
        if let EpsPolicy::Adaptive = policy {
            let upd = update_eps(&pattern, eps, target, mother)?;
            eps = upd.eps;
            saturated |= upd.saturated;
        }
    }
    Ok(GreedyOutcome {
        pattern,
        eps_initial,
        eps_final: eps,
        target_bler: target,
        saturated,
    })
}

/// Adaptive greedy construction: puncture the coded bit whose removal
/// least increases the union bound, then lower ε until the bound is back
/// at its starting value.
pub fn puncture_greedy(mother: &MotherCode, m: usize) -> Result<GreedyOutcome> {
    run_greedy(mother, m, EpsPolicy::Adaptive, None)
}

/// Symmetric greedy construction: like [`puncture_greedy`] but a candidate
/// is skipped when it lies in `P` or `P ⊕ x`, so `P` and `P ⊕ x` stay
/// disjoint after every step.
pub fn puncture_symmetric(mother: &MotherCode, m: usize, x: CodeIndex) -> Result<GreedyOutcome> {
    let len = mother.len();
    if x.get() > len {
        return Err(Error::IndexOutOfRange { index: x.get(), len });
    }
    if x.get() == 1 {
        return Err(Error::domain(
            "offset x = 1 is the identity; symmetric construction needs x > 1",
        ));
    }
    if 2 * m < len {
        return Err(Error::domain(format!(
            "M = {m} below N/2 = {}: P and P ⊕ x cannot be disjoint",
            len / 2
        )));
    }
    run_greedy(mother, m, EpsPolicy::Adaptive, Some(x))
}

/// Baseline: greedy selection with ε held at `eps` (the design ε when
/// `None`) for the whole run.
pub fn puncture_fixed_eps(mother: &MotherCode, m: usize, eps: Option<f64>) -> Result<GreedyOutcome> {
    run_greedy(mother, m, EpsPolicy::Fixed(eps.unwrap_or(mother.design_eps())), None)
}

/// Baseline: drive the `N - M` least reliable frozen bit-channels to zero
/// capacity.
///
/// In the natural-order transform, puncturing a set of coded bits that is
/// closed under taking bitwise sub-indices erases exactly the bit-channels
/// with the same indices. The least reliable channels form such a set (z is
/// strictly decreasing along the sub-index order), so each target channel
/// `i` is paired with coded bit `i`. The result is checked by density
/// evolution and rejected if any target is not fully erased.
pub fn puncture_frozen_based(mother: &MotherCode, m: usize) -> Result<GreedyOutcome> {
    check_subset_len(mother, m)?;
    let len = mother.len();
    let count = len - m;
    let frozen: Vec<usize> = (0..len).filter(|&p| mother.frozen_mask()[p]).collect();
    if count > frozen.len() {
        return Err(Error::domain(format!(
            "{count} punctures requested but only {} frozen channels",
            frozen.len()
        )));
    }
    let eps = mother.design_eps();
    let profile = bec_evolve(eps, len, &PuncturePattern::empty(len)?)?;
    let z = profile.z();
    let mut order = frozen;
    order.sort_by(|&a, &b| z[b].total_cmp(&z[a]).then(a.cmp(&b)));
    let targets: Vec<CodeIndex> = order[..count].iter().map(|&p| CodeIndex::from_zero_based(p)).collect();
    let pattern = PuncturePattern::new(len, targets.clone())?;

    let check = bec_evolve(eps, len, &pattern)?;
    if let Some(bad) = targets.iter().find(|&&t| check.at(t) != 1.0) {
        return Err(Error::domain(format!(
            "frozen-channel puncturing failed to erase bit-channel {bad}"
        )));
    }
    let target = estimate_bler(&PuncturePattern::empty(len)?, eps, mother)?.value;
    Ok(GreedyOutcome {
        pattern,
        eps_initial: eps,
        eps_final: eps,
        target_bler: target,
        saturated: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::{indices, xor_translate};

    fn code(n: u32, k: usize, crc: usize, eps: f64) -> MotherCode {
        MotherCode::design(n, k, crc, eps).unwrap()
    }

    #[test]
    fn full_length_means_no_punctures() {
        let c = code(3, 2, 0, 0.5);
        assert!(puncture_greedy(&c, 8).unwrap().pattern.is_empty());
        assert!(puncture_fixed_eps(&c, 8, None).unwrap().pattern.is_empty());
        assert!(puncture_frozen_based(&c, 8).unwrap().pattern.is_empty());
    }

    #[test]
    fn subset_length_range_checked() {
        let c = code(3, 2, 0, 0.5);
        assert!(puncture_greedy(&c, 1).is_err());
        assert!(puncture_greedy(&c, 9).is_err());
        assert!(puncture_fixed_eps(&c, 1, None).is_err());
    }

    #[test]
    fn first_step_matches_brute_force() {
        let c = code(3, 2, 0, 0.5);
        let mut best = (0usize, f64::INFINITY);
        for l in 1..=8 {
            let p = PuncturePattern::from_values(8, &[l]).unwrap();
            let s = estimate_bler(&p, 0.5, &c).unwrap().value;
            if best.1.is_infinite() || s < best.1 - TIE_REL_TOL * best.1.abs() {
                best = (l, s);
            }
        }
        let out = puncture_greedy(&c, 7).unwrap();
        assert_eq!(out.pattern.indices()[0].get(), best.0);
    }

    #[test]
    fn update_eps_examples() {
        let c = code(1, 1, 0, 0.5);
        let p = PuncturePattern::from_values(2, &[1]).unwrap();
        // already below target: unchanged
        let same = update_eps(&p, 0.5, 1.0, &c).unwrap();
        assert_eq!(
            same,
            EpsUpdate {
                eps: 0.5,
                saturated: false
            }
        );
        // z[2] = ε once leaf 1 is erased
        let upd = update_eps(&p, 0.5, 0.25, &c).unwrap();
        assert!((upd.eps - 0.25).abs() <= EPS_STEP + 1e-12);
        assert!(upd.eps <= 0.25 + 1e-12);
        assert!(!upd.saturated);
        let sat = update_eps(&p, 0.5, 0.0, &c).unwrap();
        assert_eq!(sat.eps, EPS_FLOOR);
        assert!(sat.saturated);
        assert!(update_eps(&p, 0.0, 0.1, &c).is_err());
    }

    #[test]
    fn symmetric_rejects_bad_parameters() {
        let c = code(3, 2, 0, 0.5);
        let one = CodeIndex::new(1, 8).unwrap();
        let eight = CodeIndex::new(8, 8).unwrap();
        assert!(puncture_symmetric(&c, 4, one).is_err());
        assert!(puncture_symmetric(&c, 3, eight).is_err());
    }

    #[test]
    fn symmetric_half_length_partitions_block() {
        let c = code(3, 2, 0, 0.5);
        let x = CodeIndex::new(8, 8).unwrap();
        let out = puncture_symmetric(&c, 4, x).unwrap();
        assert_eq!(out.pattern.len(), 4);
        let p = out.pattern.indices().to_vec();
        let q = xor_translate(&p, x, 8).unwrap();
        let mut all: Vec<usize> = p.iter().chain(q.iter()).map(|i| i.get()).collect();
        all.sort();
        assert_eq!(all, (1..=8).collect::<Vec<_>>());
    }

    #[test]
    fn adaptive_run_meets_target() {
        let c = code(6, 16, 0, 0.5);
        let out = puncture_greedy(&c, 40).unwrap();
        assert!(!out.saturated);
        let est = estimate_bler(&out.pattern, out.eps_final, &c).unwrap().value;
        assert!(est <= out.target_bler);
        assert!(out.eps_final < out.eps_initial);
    }

    #[test]
    fn frozen_baseline_erases_targets() {
        let c = code(1, 1, 0, 0.5);
        let out = puncture_frozen_based(&c, 1).unwrap();
        assert_eq!(out.pattern.indices(), &indices(&[1], 2).unwrap()[..]);

        let c = code(8, 64, 16, 0.5);
        let out = puncture_frozen_based(&c, 150).unwrap();
        let prof = bec_evolve(0.5, 256, &out.pattern).unwrap();
        for &t in out.pattern.indices() {
            assert!(c.is_frozen(t));
            assert_eq!(prof.at(t), 1.0);
        }
        assert!(puncture_frozen_based(&c, 80 - 1).is_err());
    }
}
