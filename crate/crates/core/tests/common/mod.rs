//! Reference implementations shared by integration tests. Nothing here
//! calls into the library.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn min_sum(a: f64, b: f64) -> f64 {
    a.signum() * b.signum() * a.abs().min(b.abs())
}

/// Textbook recursive SC over natural-order `F^{⊗n}`: returns (u, x).
pub fn sc(llr: &[f64], frozen: &[bool]) -> (Vec<u8>, Vec<u8>) {
    if llr.len() == 1 {
        let u = if frozen[0] { 0 } else { (llr[0] < 0.0) as u8 };
        return (vec![u], vec![u]);
    }
    let h = llr.len() / 2;
    let upper: Vec<f64> = (0..h).map(|j| min_sum(llr[j], llr[j + h])).collect();
    let (mut u, x1) = sc(&upper, &frozen[..h]);
    let lower: Vec<f64> = (0..h)
        .map(|j| llr[j + h] + if x1[j] == 0 { llr[j] } else { -llr[j] })
        .collect();
    let (u2, x2) = sc(&lower, &frozen[h..]);
    u.extend(u2);
    let mut x: Vec<u8> = x1.iter().zip(&x2).map(|(a, b)| a ^ b).collect();
    x.extend(x2);
    (u, x)
}

/// `x = u G` with `G[i][j] = 1` iff `j` is a bitwise sub-index of `i`.
pub fn encode_by_matrix(u: &[u8]) -> Vec<u8> {
    let n = u.len();
    (0..n)
        .map(|j| (0..n).filter(|&i| i & j == j).fold(0, |acc, i| acc ^ u[i]))
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_bits(rng: &mut ChaCha8Rng, k: usize) -> Vec<u8> {
    (0..k).map(|_| rng.random::<bool>() as u8).collect()
}

/// BPSK over AWGN with noise standard deviation `sigma`; LLR `2y/σ²`.
pub fn noisy_llrs(rng: &mut ChaCha8Rng, cw: &[u8], sigma: f64) -> Vec<f64> {
    cw.iter()
        .map(|&b| {
            let n: f64 = rng.sample(StandardNormal);
            2.0 * (1.0 - 2.0 * b as f64 + sigma * n) / (sigma * sigma)
        })
        .collect()
}
