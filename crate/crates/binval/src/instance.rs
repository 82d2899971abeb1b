//! Problem instances: a hidden optimum string together with a hidden
//! assignment of positions to weight ranks, and the match masks produced by
//! querying them.

use std::fmt;
use std::str::FromStr;

use num::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::bitstring::BitString;
use crate::error::{Error, Result};

/// Which weight ranks a query matched. Rank `r` (0-based) carries weight
/// `2^r`, so the mask determines the fitness value and vice versa.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatchMask {
    matched: Vec<bool>,
}

impl MatchMask {
    pub fn new(matched: Vec<bool>) -> Self {
        MatchMask { matched }
    }

    pub fn n(&self) -> usize {
        self.matched.len()
    }

    /// Whether rank `r` is matched. Panics if out of range.
    pub fn is_matched(&self, r: usize) -> bool {
        self.matched[r]
    }

    pub fn matched(&self) -> &[bool] {
        &self.matched
    }

    pub fn count_matched(&self) -> usize {
        self.matched.iter().filter(|&&b| b).count()
    }

    pub fn all_matched(&self) -> bool {
        self.matched.iter().all(|&b| b)
    }

    /// Number of ranks on which two masks disagree.
    pub fn distance(&self, other: &MatchMask) -> Result<usize> {
        if self.n() != other.n() {
            return Err(Error::LengthMismatch { left: self.n(), right: other.n() });
        }
        Ok(self.matched.iter().zip(&other.matched).filter(|(a, b)| a != b).count())
    }

    /// The fitness value `sum of 2^r over matched ranks r`, exact.
    pub fn fitness(&self) -> BigUint {
        let mut v = BigUint::from(0u32);
        for (r, &m) in self.matched.iter().enumerate() {
            if m {
                v.set_bit(r as u64, true);
            }
        }
        v
    }

    /// Inverse of [`fitness`](Self::fitness) for a known length.
    pub fn from_fitness(value: &BigUint, n: usize) -> Result<Self> {
        if value.bits() > n as u64 {
            return Err(Error::Domain(format!(
                "fitness needs {} ranks but the mask has {n}",
                value.bits()
            )));
        }
        Ok(MatchMask { matched: (0..n).map(|r| value.bit(r as u64)).collect() })
    }
}

impl fmt::Display for MatchMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &m in &self.matched {
            f.write_str(if m { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for MatchMask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits: BitString = s.parse()?;
        Ok(MatchMask { matched: bits.bits().to_vec() })
    }
}

/// A hidden optimum plus a hidden rank assignment.
///
/// `rank_of_position[p]` is the 0-based weight rank attached to position `p`;
/// the assignment is a permutation of `0..n`. A query scores
/// `sum of 2^(rank_of_position[p])` over positions where it agrees with the
/// optimum, reported here directly as a [`MatchMask`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    optimum: BitString,
    rank_of_position: Vec<usize>,
}

impl ProblemInstance {
    pub fn new(optimum: BitString, rank_of_position: Vec<usize>) -> Result<Self> {
        let n = optimum.len();
        if rank_of_position.len() != n {
            return Err(Error::LengthMismatch { left: n, right: rank_of_position.len() });
        }
        let mut seen = vec![false; n];
        for &r in &rank_of_position {
            if r >= n || seen[r] {
                return Err(Error::Domain(format!(
                    "rank assignment is not a permutation of 0..{n}"
                )));
            }
            seen[r] = true;
        }
        Ok(ProblemInstance { optimum, rank_of_position })
    }

    /// Uniformly random optimum and rank assignment.
    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        let optimum = BitString::random(n, rng);
        let mut ranks: Vec<usize> = (0..n).collect();
        ranks.shuffle(rng);
        ProblemInstance { optimum, rank_of_position: ranks }
    }

    pub fn n(&self) -> usize {
        self.optimum.len()
    }

    pub fn optimum(&self) -> &BitString {
        &self.optimum
    }

    pub fn rank_of_position(&self) -> &[usize] {
        &self.rank_of_position
    }

    /// Evaluate a query: rank `rank_of_position[p]` is matched iff the query
    /// agrees with the optimum at position `p`.
    pub fn evaluate(&self, query: &BitString) -> Result<MatchMask> {
        let n = self.n();
        if query.len() != n {
            return Err(Error::LengthMismatch { left: n, right: query.len() });
        }
        let mut matched = vec![false; n];
        for p in 0..n {
            matched[self.rank_of_position[p]] = query.bit(p) == self.optimum.bit(p);
        }
        Ok(MatchMask::new(matched))
    }

    /// Serialize as `n;optimum_bits;rank_list` with 1-based ranks.
    pub fn to_line(&self) -> String {
        let ranks: Vec<String> =
            self.rank_of_position.iter().map(|&r| (r + 1).to_string()).collect();
        format!("{};{};{}", self.n(), self.optimum, ranks.join(","))
    }

    /// Parse the [`to_line`](Self::to_line) format.
    pub fn from_line(line: &str) -> Result<Self> {
        let parts: Vec<&str> = line.trim_end().split(';').collect();
        if parts.len() != 3 {
            return Err(Error::parse(format!(
                "expected 3 fields separated by ';', found {}",
                parts.len()
            )));
        }
        let n: usize = parts[0]
            .parse()
            .map_err(|_| Error::parse(format!("invalid length field {:?}", parts[0])))?;
        let optimum: BitString = parts[1].parse()?;
        if optimum.len() != n {
            return Err(Error::parse(format!(
                "optimum has {} bits, expected {n}",
                optimum.len()
            )));
        }
        let mut ranks = Vec::with_capacity(n);
        if !parts[2].is_empty() {
            for piece in parts[2].split(',') {
                let r: usize = piece.parse().map_err(|_| {
                    Error::parse(format!("invalid rank entry {piece:?}"))
                })?;
                if r == 0 {
                    return Err(Error::parse("ranks are 1-based; found 0".to_string()));
                }
                ranks.push(r - 1);
            }
        }
        ProblemInstance::new(optimum, ranks).map_err(|e| match e {
            Error::Parse { .. } => e,
            other => Error::parse(other.to_string()),
        })
    }
}
