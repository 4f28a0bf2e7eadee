//! Index arithmetic, the polar transform, and the mother/subset code objects.
//!
//! All indices exposed by this module are 1-based, matching the usual
//! notation for coded bits and bit-channels. The transform is the
//! natural-order one, `x = u · F^{⊗n}` with `F = [1 0; 1 1]`, with no
//! bit-reversal permutation anywhere.

use std::fmt;

use crate::construction::bec_evolve;
use crate::crc::Crc;
use crate::error::{Error, Result};

/// A 1-based coded-bit or bit-channel index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CodeIndex(u32);

impl CodeIndex {
    /// Validates `value ∈ [1, len]`.
    pub fn new(value: usize, len: usize) -> Result<Self> {
        if value == 0 || value > len {
            return Err(Error::IndexOutOfRange { index: value, len });
        }
        Ok(CodeIndex(value as u32))
    }

    /// Builds an index from a 0-based position.
    pub fn from_zero_based(pos: usize) -> Self {
        CodeIndex(pos as u32 + 1)
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }

    pub fn zero_based(self) -> usize {
        self.0 as usize - 1
    }

    /// `self ⊕ x` on 1-based indices: `((self-1) XOR (x-1)) + 1`.
    pub fn xor(self, x: CodeIndex) -> CodeIndex {
        CodeIndex(((self.0 - 1) ^ (x.0 - 1)) + 1)
    }
}

impl fmt::Display for CodeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub(crate) fn check_block_len(len: usize) -> Result<u32> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros())
}

/// Converts raw 1-based values into validated indices.
pub fn indices(values: &[usize], len: usize) -> Result<Vec<CodeIndex>> {
    values.iter().map(|&v| CodeIndex::new(v, len)).collect()
}

/// Maps every element `e` of `set` to `e ⊕ x`. Element order is preserved.
pub fn xor_translate(set: &[CodeIndex], x: CodeIndex, len: usize) -> Result<Vec<CodeIndex>> {
    check_block_len(len)?;
    if x.get() > len {
        return Err(Error::IndexOutOfRange { index: x.get(), len });
    }
    set.iter()
        .map(|&e| {
            if e.get() > len {
                Err(Error::IndexOutOfRange { index: e.get(), len })
            } else {
                Ok(e.xor(x))
            }
        })
        .collect()
}

/// In-place natural-order polar transform on 0/1 bits.
pub fn polar_transform_in_place(bits: &mut [u8]) -> Result<()> {
    let len = bits.len();
    check_block_len(len)?;
    let mut half = 1;
    while half < len {
        for block in bits.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= *b;
            }
        }
        half *= 2;
    }
    Ok(())
}

/// `x = u · F^{⊗n}`. The transform is its own inverse.
pub fn polar_encode(u: &[u8]) -> Result<Vec<u8>> {
    let mut x = u.to_vec();
    polar_transform_in_place(&mut x)?;
    Ok(x)
}

/// An `(N, K)` polar code with `K + crc_len` non-frozen bit-channels.
#[derive(Debug, Clone, PartialEq)]
pub struct MotherCode {
    log2_len: u32,
    k: usize,
    crc: Crc,
    design_eps: f64,
    non_frozen: Vec<CodeIndex>,
    frozen: Vec<bool>,
}

impl MotherCode {
    /// Picks the `K + crc_len` bit-channels with the smallest BEC(eps)
    /// erasure probability (ties to the lower index).
    pub fn design(n: u32, k: usize, crc_len: usize, eps: f64) -> Result<Self> {
        Self::design_with_crc(n, k, Crc::for_len(crc_len)?, eps)
    }

    pub fn design_with_crc(n: u32, k: usize, crc: Crc, eps: f64) -> Result<Self> {
        if n == 0 || n > 24 {
            return Err(Error::domain(format!("log2 block length {n} outside [1, 24]")));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidEpsilon(eps));
        }
        let len = 1usize << n;
        let info = k + crc.len();
        if info >= len {
            return Err(Error::domain(format!("K + crc_len = {info} must be below N = {len}")));
        }
        let profile = bec_evolve(eps, len, &PuncturePattern::empty(len)?)?;
        let mut order: Vec<usize> = (0..len).collect();
        order.sort_by(|&a, &b| profile.z()[a].total_cmp(&profile.z()[b]).then(a.cmp(&b)));
        let mut chosen: Vec<usize> = order[..info].to_vec();
        chosen.sort_unstable();
        let non_frozen = chosen.into_iter().map(CodeIndex::from_zero_based).collect();
        Self::from_parts(n, k, crc, eps, non_frozen)
    }

    /// Rebuilds a code from an explicit non-frozen set (e.g. read from disk).
    pub fn from_parts(n: u32, k: usize, crc: Crc, design_eps: f64, mut non_frozen: Vec<CodeIndex>) -> Result<Self> {
        if n == 0 || n > 24 {
            return Err(Error::domain(format!("log2 block length {n} outside [1, 24]")));
        }
        let len = 1usize << n;
        if non_frozen.len() != k + crc.len() {
            return Err(Error::LengthMismatch {
                expected: k + crc.len(),
                actual: non_frozen.len(),
            });
        }
        non_frozen.sort_unstable();
        let mut frozen = vec![true; len];
        for &i in &non_frozen {
            if i.get() > len {
                return Err(Error::IndexOutOfRange { index: i.get(), len });
            }
            if !frozen[i.zero_based()] {
                return Err(Error::DuplicateIndex(i.get()));
            }
            frozen[i.zero_based()] = false;
        }
        Ok(MotherCode {
            log2_len: n,
            k,
            crc,
            design_eps,
            non_frozen,
            frozen,
        })
    }

    pub fn log2_len(&self) -> u32 {
        self.log2_len
    }

    /// Block length `N`.
    pub fn len(&self) -> usize {
        1 << self.log2_len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Payload bits `K`.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn crc(&self) -> Crc {
        self.crc
    }

    pub fn crc_len(&self) -> usize {
        self.crc.len()
    }

    /// `K + crc_len`.
    pub fn info_len(&self) -> usize {
        self.non_frozen.len()
    }

    pub fn design_eps(&self) -> f64 {
        self.design_eps
    }

    /// Non-frozen bit-channels in increasing order.
    pub fn non_frozen(&self) -> &[CodeIndex] {
        &self.non_frozen
    }

    /// Frozen flags by 0-based position.
    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    pub fn is_frozen(&self, i: CodeIndex) -> bool {
        self.frozen[i.zero_based()]
    }

    /// Places `payload ‖ crc(payload)` on the non-frozen channels in
    /// increasing index order; frozen channels carry 0.
    pub fn assemble_message(&self, payload: &[u8]) -> Result<Vec<u8>> {
        if payload.len() != self.k {
            return Err(Error::LengthMismatch {
                expected: self.k,
                actual: payload.len(),
            });
        }
        let crc = self.crc.compute(payload);
        let mut u = vec![0u8; self.len()];
        for (&pos, &bit) in self.non_frozen.iter().zip(payload.iter().chain(crc.iter())) {
            u[pos.zero_based()] = bit & 1;
        }
        Ok(u)
    }

    /// The `K + crc_len` bits sitting on the non-frozen channels of `u`.
    pub fn extract_message(&self, u: &[u8]) -> Result<Vec<u8>> {
        if u.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: u.len(),
            });
        }
        Ok(self.non_frozen.iter().map(|i| u[i.zero_based()]).collect())
    }

    /// The first `K` non-frozen bits of `u`.
    pub fn extract_payload(&self, u: &[u8]) -> Result<Vec<u8>> {
        let mut msg = self.extract_message(u)?;
        msg.truncate(self.k);
        Ok(msg)
    }

    /// Payload → codeword.
    pub fn encode_payload(&self, payload: &[u8]) -> Result<Vec<u8>> {
        let mut u = self.assemble_message(payload)?;
        polar_transform_in_place(&mut u)?;
        Ok(u)
    }
}

/// Ordered set of distinct punctured coded-bit indices over a block of `len`.
///
/// The order is the selection order of the greedy constructions, so the
/// first `j` entries are the pattern after `j` steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuncturePattern {
    len: usize,
    indices: Vec<CodeIndex>,
}

impl PuncturePattern {
    pub fn new(len: usize, indices: Vec<CodeIndex>) -> Result<Self> {
        check_block_len(len)?;
        if indices.len() > len {
            return Err(Error::domain(format!(
                "{} punctures exceed block length {len}",
                indices.len()
            )));
        }
        let mut seen = vec![false; len];
        for &i in &indices {
            if i.get() > len {
                return Err(Error::IndexOutOfRange { index: i.get(), len });
            }
            if std::mem::replace(&mut seen[i.zero_based()], true) {
                return Err(Error::DuplicateIndex(i.get()));
            }
        }
        Ok(PuncturePattern { len, indices })
    }

    pub fn empty(len: usize) -> Result<Self> {
        Self::new(len, Vec::new())
    }

    pub fn from_values(len: usize, values: &[usize]) -> Result<Self> {
        Self::new(len, indices(values, len)?)
    }

    /// Block length `N` of the mother code.
    pub fn block_len(&self) -> usize {
        self.len
    }

    /// Number of punctured bits, `N - M`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Subset length `M`.
    pub fn kept_len(&self) -> usize {
        self.len - self.indices.len()
    }

    pub fn indices(&self) -> &[CodeIndex] {
        &self.indices
    }

    /// Pattern after the first `j` selections.
    pub fn prefix(&self, j: usize) -> PuncturePattern {
        PuncturePattern {
            len: self.len,
            indices: self.indices[..j.min(self.indices.len())].to_vec(),
        }
    }

    /// Punctured flags by 0-based position.
    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.len];
        for &i in &self.indices {
            mask[i.zero_based()] = true;
        }
        mask
    }

    pub fn contains(&self, i: CodeIndex) -> bool {
        self.indices.contains(&i)
    }

    pub(crate) fn push(&mut self, i: CodeIndex) {
        debug_assert!(!self.contains(i));
        self.indices.push(i);
    }

    /// `P ⊕ x`, keeping selection order.
    pub fn translate(&self, x: CodeIndex) -> Result<PuncturePattern> {
        Ok(PuncturePattern {
            len: self.len,
            indices: xor_translate(&self.indices, x, self.len)?,
        })
    }

    pub fn subset_code(&self) -> SubsetCode {
        let mask = self.mask();
        let kept = (0..self.len)
            .filter(|&p| !mask[p])
            .map(CodeIndex::from_zero_based)
            .collect();
        SubsetCode { len: self.len, kept }
    }
}

/// The `M` coded bits of a mother code that are actually transmitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetCode {
    len: usize,
    kept: Vec<CodeIndex>,
}

impl SubsetCode {
    /// Builds a subset from its kept indices (any order; stored sorted).
    pub fn from_kept(len: usize, mut kept: Vec<CodeIndex>) -> Result<Self> {
        kept.sort_unstable();
        // validates range and distinctness
        PuncturePattern::new(len, kept.clone())?;
        Ok(SubsetCode { len, kept })
    }

    /// The whole mother code, nothing punctured.
    pub fn full(len: usize) -> Result<Self> {
        check_block_len(len)?;
        Ok(SubsetCode {
            len,
            kept: (0..len).map(CodeIndex::from_zero_based).collect(),
        })
    }

    pub fn block_len(&self) -> usize {
        self.len
    }

    /// Kept indices in increasing order.
    pub fn kept(&self) -> &[CodeIndex] {
        &self.kept
    }

    /// `M`.
    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }

    /// Complement as a pattern (increasing index order).
    pub fn punctured(&self) -> PuncturePattern {
        let mut mask = vec![false; self.len];
        for &i in &self.kept {
            mask[i.zero_based()] = true;
        }
        let indices = (0..self.len)
            .filter(|&p| !mask[p])
            .map(CodeIndex::from_zero_based)
            .collect();
        PuncturePattern { len: self.len, indices }
    }

    /// `S ⊕ x`.
    pub fn translate(&self, x: CodeIndex) -> Result<SubsetCode> {
        SubsetCode::from_kept(self.len, xor_translate(&self.kept, x, self.len)?)
    }
}
