//! Fixed-length binary strings indexed by position.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

/// A binary string of fixed length. Positions are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString { bits }
    }

    /// The all-zero string of length `n`.
    pub fn zeros(n: usize) -> Self {
        BitString { bits: vec![false; n] }
    }

    /// A uniformly random string of length `n`.
    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        BitString { bits: (0..n).map(|_| rng.random()).collect() }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Bit at position `p`. Panics if out of range.
    pub fn bit(&self, p: usize) -> bool {
        self.bits[p]
    }

    pub fn set(&mut self, p: usize, value: bool) {
        self.bits[p] = value;
    }

    pub fn toggle(&mut self, p: usize) {
        self.bits[p] = !self.bits[p];
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

/// Number of positions where `a` and `b` differ.
pub fn hamming(a: &BitString, b: &BitString) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    Ok(a.bits.iter().zip(&b.bits).filter(|(x, y)| x != y).count())
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => {
                    return Err(Error::parse(format!(
                        "invalid character {c:?} at offset {i} in bit string"
                    )))
                }
            }
        }
        Ok(BitString { bits })
    }
}
