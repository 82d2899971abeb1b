//! Explicit weight vectors and decoding of weighted fitness values.
//!
//! The default weights are the powers of two, in which case the fitness is a
//! binary encoding of the match mask. Any vector whose entries at least
//! double from one rank to the next supports the same decoding, because every
//! weight strictly exceeds the sum of all smaller ones.

use crate::error::{Error, Result};
use crate::instance::MatchMask;

/// Positive weights with `w[r+1] >= 2*w[r]`, rank `r` 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    w: Vec<f64>,
}

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidWeights("empty weight vector".to_string()));
        }
        for (r, &x) in w.iter().enumerate() {
            if !x.is_finite() || x <= 0.0 {
                return Err(Error::InvalidWeights(format!(
                    "weight {x} at rank {r} is not positive and finite"
                )));
            }
        }
        for r in 0..w.len() - 1 {
            if w[r + 1] < 2.0 * w[r] {
                return Err(Error::InvalidWeights(format!(
                    "weight at rank {} is {} < twice the previous weight {}",
                    r + 1,
                    w[r + 1],
                    w[r]
                )));
            }
        }
        Ok(WeightVector { w })
    }

    /// The canonical weights `1, 2, 4, ..., 2^(n-1)`.
    pub fn powers_of_two(n: usize) -> Result<Self> {
        if n == 0 || n > f64::MAX_EXP as usize {
            return Err(Error::InvalidWeights(format!(
                "cannot build {n} doubling weights in f64"
            )));
        }
        Ok(WeightVector { w: (0..n).map(|r| (r as f64).exp2()).collect() })
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    /// Weighted fitness of a mask: the sum of weights over matched ranks.
    pub fn fitness_of(&self, mask: &MatchMask) -> Result<f64> {
        if mask.n() != self.len() {
            return Err(Error::LengthMismatch { left: self.len(), right: mask.n() });
        }
        // Ascending ranks so small weights accumulate before large ones.
        Ok(self
            .w
            .iter()
            .zip(mask.matched())
            .filter(|(_, &m)| m)
            .map(|(&x, _)| x)
            .sum())
    }
}

/// Recover the match mask from a weighted fitness by scanning ranks in
/// descending order and taking every weight that still fits.
///
/// Correct for any [`WeightVector`] because each weight exceeds the sum of
/// all smaller ones. The comparison tolerance absorbs accumulation error in
/// fitness values computed in floating point.
pub fn greedy_decode(weights: &WeightVector, fitness: f64) -> Result<MatchMask> {
    if !fitness.is_finite() || fitness < 0.0 {
        return Err(Error::Domain(format!("fitness {fitness} is not finite and nonnegative")));
    }
    let n = weights.len();
    let tol = 1e-9 * weights.as_slice()[n - 1];
    let mut rest = fitness;
    let mut matched = vec![false; n];
    for r in (0..n).rev() {
        let w = weights.as_slice()[r];
        if rest >= w - tol {
            matched[r] = true;
            rest -= w;
        }
    }
    if rest.abs() > tol {
        return Err(Error::InconsistentFitness { fitness, residual: rest });
    }
    Ok(MatchMask::new(matched))
}
