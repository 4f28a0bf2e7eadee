//! Text format for puncturing patterns.
//!
//! ```text
//! N M K crc_len eps_initial eps_final
//! p_1
//! p_2
//! ...
//! ```
//!
//! Indices are 1-based and listed in selection order. Blank lines and lines
//! starting with `#` are ignored when reading.

use std::fmt::Write as _;

use super::greedy::GreedyOutcome;
use crate::error::{Error, Result};
use crate::polar::{CodeIndex, MotherCode, PuncturePattern};

#[derive(Debug, Clone, PartialEq)]
pub struct PatternFile {
    pub block_len: usize,
    pub subset_len: usize,
    pub k: usize,
    pub crc_len: usize,
    pub eps_initial: f64,
    pub eps_final: f64,
    pub pattern: PuncturePattern,
}

impl PatternFile {
    pub fn from_outcome(mother: &MotherCode, outcome: &GreedyOutcome) -> Self {
        PatternFile {
            block_len: mother.len(),
            subset_len: outcome.pattern.kept_len(),
            k: mother.k(),
            crc_len: mother.crc_len(),
            eps_initial: outcome.eps_initial,
            eps_final: outcome.eps_final,
            pattern: outcome.pattern.clone(),
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "{} {} {} {} {} {}\n",
            self.block_len, self.subset_len, self.k, self.crc_len, self.eps_initial, self.eps_final
        );
        for i in self.pattern.indices() {
            let _ = writeln!(out, "{i}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("missing header line".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(Error::Parse(format!("header needs 6 fields, got {}", fields.len())));
        }
        let int = |s: &str| s.parse::<usize>().map_err(|e| Error::Parse(format!("{s:?}: {e}")));
        let real = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}")));
        let block_len = int(fields[0])?;
        let subset_len = int(fields[1])?;
        let k = int(fields[2])?;
        let crc_len = int(fields[3])?;
        let eps_initial = real(fields[4])?;
        let eps_final = real(fields[5])?;
        if subset_len > block_len {
            return Err(Error::Parse(format!("M = {subset_len} exceeds N = {block_len}")));
        }
        let idx = lines
            .map(|l| int(l).and_then(|v| CodeIndex::new(v, block_len)))
            .collect::<Result<Vec<_>>>()?;
        if idx.len() != block_len - subset_len {
            return Err(Error::Parse(format!(
                "expected {} indices, found {}",
                block_len - subset_len,
                idx.len()
            )));
        }
        let pattern = PuncturePattern::new(block_len, idx)?;
        Ok(PatternFile {
            block_len,
            subset_len,
            k,
            crc_len,
            eps_initial,
            eps_final,
            pattern,
        })
    }
}
