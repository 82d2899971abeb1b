//! Exhaustive certification of the table at tiny sizes.
//!
//! A belief state is the set of (optimum, rank assignment) pairs consistent
//! with the responses seen so far, always uniform over its members. The
//! optimal cost of a state minimizes over every possible next query: a query
//! partitions the state by the mask it would receive, each non-terminal part
//! recurses, and parts are weighted by their share of the state. This
//! searches all adaptive strategies, so it is an independent ground truth
//! for the table recursion - at exponential cost, hence the hard size cap.
//!
//! States that differ only by relabeling positions or by flipping reference
//! bits have equal cost, so the memo is keyed by a canonical form: the
//! lexicographically smallest encoding over all position permutations
//! composed with bit flips.

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use num::{BigInt, BigRational, One, Zero};

use crate::error::{Error, Result};

/// Positions and ranks both fit in two bits per slot up to this size; the
/// search is only tractable this far anyway.
const ENCODING_MAX_N: usize = 4;

/// Caps for the exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleLimits {
    /// Largest instance size to accept; at most 4.
    pub max_n: usize,
    /// Wall-clock budget for one evaluation, if any.
    pub time_budget: Option<Duration>,
}

impl Default for OracleLimits {
    fn default() -> Self {
        // Size 3 finishes instantly; size 4 is opt-in because the state
        // space is orders of magnitude larger.
        OracleLimits { max_n: 3, time_budget: None }
    }
}

/// One consistent pair, packed: bit `p` of the low nibble is the optimum at
/// position `p`; bits `4 + 2p` hold the rank at position `p`.
type Inst = u16;

fn encode(n: usize, optimum: u16, rank_of_pos: &[usize]) -> Inst {
    debug_assert!(n <= ENCODING_MAX_N);
    let mut v = optimum;
    for (p, &r) in rank_of_pos.iter().enumerate() {
        v |= (r as u16) << (4 + 2 * p);
    }
    v
}

fn optimum_bit(inst: Inst, p: usize) -> bool {
    inst >> p & 1 == 1
}

fn rank_at(inst: Inst, p: usize) -> usize {
    (inst >> (4 + 2 * p) & 3) as usize
}

/// Mask the instance would return for query `y` (one bit per position).
fn mask_of(inst: Inst, n: usize, y: u16) -> u16 {
    let mut m = 0u16;
    for p in 0..n {
        if (y >> p & 1 == 1) == optimum_bit(inst, p) {
            m |= 1 << rank_at(inst, p);
        }
    }
    m
}

fn all_perms(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    permute(&mut current, 0, &mut out);
    out
}

fn permute(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, out);
        v.swap(k, i);
    }
}

/// Smallest encoding of the state over position relabelings and reference
/// bit flips. Ranks travel with their position; a flip at a target position
/// toggles the optimum bit landing there.
fn canonical(set: &[Inst], n: usize, perms: &[Vec<usize>]) -> Vec<Inst> {
    let mut best: Option<Vec<Inst>> = None;
    let mut buf = Vec::with_capacity(set.len());
    for sigma in perms {
        for flips in 0..1u16 << n {
            buf.clear();
            for &inst in set {
                let mut optimum = 0u16;
                let mut ranks = [0usize; ENCODING_MAX_N];
                for (p, &q) in sigma.iter().enumerate().take(n) {
                    let bit = optimum_bit(inst, p) ^ (flips >> q & 1 == 1);
                    if bit {
                        optimum |= 1 << q;
                    }
                    ranks[q] = rank_at(inst, p);
                }
                buf.push(encode(n, optimum, &ranks[..n]));
            }
            buf.sort_unstable();
            if best.as_ref().is_none_or(|b| &buf < b) {
                best = Some(buf.clone());
            }
        }
    }
    best.expect("at least the identity relabeling")
}

fn ratio(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn search(
    set: &[Inst],
    n: usize,
    perms: &[Vec<usize>],
    memo: &mut Option<HashMap<Vec<Inst>, BigRational>>,
    deadline: Option<Instant>,
    full: u16,
) -> Result<BigRational> {
    debug_assert!(!set.is_empty());
    if let Some(d) = deadline {
        if Instant::now() >= d {
            return Err(Error::ResourceLimit(
                "exhaustive search exceeded its time budget".to_string(),
            ));
        }
    }
    // A lone candidate is solved by querying its optimum.
    if set.len() == 1 {
        return Ok(BigRational::one());
    }
    let key = memo.as_ref().map(|_| canonical(set, n, perms));
    if let (Some(memo), Some(key)) = (memo.as_ref(), key.as_ref()) {
        if let Some(v) = memo.get(key) {
            return Ok(v.clone());
        }
    }

    let mut best: Option<BigRational> = None;
    for y in 0..1u16 << n {
        let mut parts: BTreeMap<u16, Vec<Inst>> = BTreeMap::new();
        for &inst in set {
            parts.entry(mask_of(inst, n, y)).or_default().push(inst);
        }
        // A query that cannot change the state teaches nothing; skip it
        // unless it terminates the whole state.
        if parts.len() == 1 && !parts.contains_key(&full) {
            continue;
        }
        let mut value = BigRational::one();
        for (mask, part) in &parts {
            if *mask == full {
                continue;
            }
            value += search(part, n, perms, memo, deadline, full)?
                * ratio(part.len(), set.len());
        }
        if best.as_ref().is_none_or(|b| &value < b) {
            best = Some(value);
        }
    }
    let value = best.expect("distinct candidates are separable by some query");
    if let (Some(memo), Some(key)) = (memo.as_mut(), key) {
        memo.insert(key, value.clone());
    }
    Ok(value)
}

/// The uniform belief state over every (optimum, rank assignment) pair, or
/// the state conditioned on one observed response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeliefState {
    n: usize,
    instances: Vec<Inst>,
}

impl BeliefState {
    /// The state after an opening query left exactly `d` ranks mismatched.
    ///
    /// By symmetry the opening query and the mismatched rank set can be
    /// fixed: the query is all-zero and the mismatched ranks are the `d`
    /// smallest, which pins the optimum for each rank assignment.
    pub fn after_first_query(n: usize, d: usize) -> Result<BeliefState> {
        if n == 0 || n > ENCODING_MAX_N {
            return Err(Error::Domain(format!(
                "exhaustive search supports sizes 1..={ENCODING_MAX_N}, got {n}"
            )));
        }
        if d > n {
            return Err(Error::Domain(format!("distance {d} exceeds size {n}")));
        }
        let mut instances: Vec<Inst> = all_perms(n)
            .into_iter()
            .map(|ranks| {
                let mut optimum = 0u16;
                for (p, &r) in ranks.iter().enumerate() {
                    if r < d {
                        optimum |= 1 << p;
                    }
                }
                encode(n, optimum, &ranks)
            })
            .collect();
        instances.sort_unstable();
        Ok(BeliefState { n, instances })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of consistent candidate pairs.
    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// Expected queries to finish from this state under the best adaptive
    /// strategy, exactly.
    pub fn optimal_value(&self, limits: &OracleLimits) -> Result<BigRational> {
        self.value_with(limits, true)
    }

    fn value_with(&self, limits: &OracleLimits, use_memo: bool) -> Result<BigRational> {
        if self.n > limits.max_n {
            return Err(Error::ResourceLimit(format!(
                "size {} exceeds the configured oracle cap {}",
                self.n, limits.max_n
            )));
        }
        let deadline = limits.time_budget.map(|b| Instant::now() + b);
        let perms = all_perms(self.n);
        let mut memo = if use_memo { Some(HashMap::new()) } else { None };
        search(&self.instances, self.n, &perms, &mut memo, deadline, (1 << self.n) - 1)
    }
}

/// `E(n, d)` certified by exhaustive play: the cost of the belief state an
/// opening query leaves at distance `d`. Distance 0 costs nothing further.
pub fn conditional_e(n: usize, d: usize, limits: &OracleLimits) -> Result<BigRational> {
    if n == 0 || d > n {
        return Err(Error::Domain(format!("no state at (n, d) = ({n}, {d})")));
    }
    if d == 0 {
        return Ok(BigRational::zero());
    }
    BeliefState::after_first_query(n, d)?.optimal_value(limits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn e(n: usize, d: usize) -> BigRational {
        conditional_e(n, d, &OracleLimits::default()).unwrap()
    }

    #[test]
    fn trivial_states() {
        assert_eq!(e(1, 0), rat(0, 1));
        assert_eq!(e(1, 1), rat(1, 1));
        assert_eq!(e(2, 2), rat(1, 1));
        assert_eq!(e(3, 3), rat(1, 1));
    }

    #[test]
    fn two_positions_need_three_halves() {
        assert_eq!(e(2, 1), rat(3, 2));
    }

    #[test]
    fn three_positions_row() {
        assert_eq!(e(3, 1), rat(2, 1));
        assert_eq!(e(3, 2), rat(2, 1));
    }

    #[test]
    fn state_sizes_are_factorials() {
        for n in 1..=4 {
            for d in 0..=n {
                let s = BeliefState::after_first_query(n, d).unwrap();
                assert_eq!(s.len(), (1..=n).product::<usize>());
            }
        }
    }

    #[test]
    fn memo_is_sound() {
        for d in 1..=2 {
            let s = BeliefState::after_first_query(2, d).unwrap();
            let with = s.value_with(&OracleLimits::default(), true).unwrap();
            let without = s.value_with(&OracleLimits::default(), false).unwrap();
            assert_eq!(with, without, "d = {d}");
        }
        let s = BeliefState::after_first_query(3, 1).unwrap();
        let with = s.value_with(&OracleLimits::default(), true).unwrap();
        let without = s.value_with(&OracleLimits::default(), false).unwrap();
        assert_eq!(with, without);
    }

    #[test]
    fn limits_are_enforced() {
        assert!(matches!(
            conditional_e(4, 1, &OracleLimits::default()),
            Err(Error::ResourceLimit(_))
        ));
        assert!(conditional_e(5, 1, &OracleLimits { max_n: 5, time_budget: None }).is_err());
        let strangled = OracleLimits { max_n: 3, time_budget: Some(Duration::ZERO) };
        assert!(matches!(conditional_e(3, 1, &strangled), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn canonical_form_identifies_symmetric_states() {
        let perms = all_perms(2);
        // One candidate: optimum 01, identity ranks. Its mirror under
        // swapping positions and flipping both bits must canonicalize
        // identically.
        let a = vec![encode(2, 0b01, &[0, 1])];
        let b = vec![encode(2, 0b10, &[1, 0])];
        assert_eq!(canonical(&a, 2, &perms), canonical(&b, 2, &perms));
    }
}
