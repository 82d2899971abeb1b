//! The optimal strategy run forward as a query-counting process.
//!
//! A run starts from a uniformly random query. Each later query is composed
//! block-wise from independent subproblem nodes: a node owns a set of
//! positions, a reference bit per position, and the set of weight ranks
//! attached to those positions (which ranks, not which rank sits where). A
//! node with every rank matched is done; a node with every rank mismatched
//! flips its whole block once; any other node flips a block of the size the
//! table prescribes and splits into the flipped and kept halves, whose rank
//! sets are read off the response because exactly the flipped positions
//! toggle their ranks. All nodes contribute to the same query per round, so
//! a run costs as many queries as its deepest node chain.
//!
//! Randomness is split into independent ChaCha streams keyed by
//! `(seed, stream index)`: stream 0 draws the first query, stream 1 seeds
//! the root node, and each child takes the next index in creation order.
//! One run is therefore a pure function of `(instance, table, seed)`, and
//! the Monte Carlo aggregation sums plain integers, so sequential and
//! parallel execution produce identical statistics.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bitstring::BitString;
use crate::error::{Error, Result};
use crate::instance::{MatchMask, ProblemInstance};
use crate::par;
use crate::table::ComplexityTable;

/// Every query of one run, in order, with the mask each received.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryLog {
    pub queries: Vec<(BitString, MatchMask)>,
    /// Mismatch count of the first query.
    pub initial_distance: usize,
}

impl QueryLog {
    /// Total queries spent, the first one included.
    pub fn total(&self) -> usize {
        self.queries.len()
    }
}

/// Aggregates for runs that started at one initial distance.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceStats {
    pub count: u64,
    pub mean: f64,
    /// Standard error of the mean; `None` below two runs.
    pub std_error: Option<f64>,
}

/// Aggregates over a whole experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunStatistics {
    pub n: usize,
    pub runs: u64,
    pub mean: f64,
    pub std_error: Option<f64>,
    /// Keyed by initial distance; only observed distances appear.
    pub by_distance: BTreeMap<usize, DistanceStats>,
}

fn mix64(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^= x >> 31;
    x
}

/// Seed for an independent substream of `base`.
fn derive_seed(base: u64, stream: u64) -> u64 {
    mix64(base.wrapping_add(mix64(stream.wrapping_add(0x9e37_79b9_7f4a_7c15))))
}

fn fresh_rng(seed: u64, counter: &mut u64) -> ChaCha8Rng {
    let rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, *counter));
    *counter += 1;
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NodeState {
    Active,
    FlipAll,
    Done,
}

struct Node {
    positions: Vec<usize>,
    /// Reference bit per owned position.
    bits: Vec<bool>,
    /// Ranks attached to the owned positions, as an unordered set.
    ranks: Vec<usize>,
    mismatches: usize,
    state: NodeState,
    rng: ChaCha8Rng,
}

fn spawn(
    positions: Vec<usize>,
    bits: Vec<bool>,
    ranks: Vec<usize>,
    mismatches: usize,
    seed: u64,
    counter: &mut u64,
) -> Node {
    debug_assert_eq!(positions.len(), bits.len());
    debug_assert_eq!(positions.len(), ranks.len());
    debug_assert!(mismatches <= ranks.len());
    let state = if mismatches == 0 {
        NodeState::Done
    } else if mismatches == ranks.len() {
        NodeState::FlipAll
    } else {
        NodeState::Active
    };
    Node { positions, bits, ranks, mismatches, state, rng: fresh_rng(seed, counter) }
}

/// Play one full run against `instance`, reading splits from `table`.
pub fn solve(instance: &ProblemInstance, table: &ComplexityTable, seed: u64) -> Result<QueryLog> {
    let n = instance.n();
    if n == 0 {
        return Err(Error::Domain("cannot solve an empty instance".to_string()));
    }
    if table.n_max() < n {
        return Err(Error::TableIncomplete(format!(
            "instance size {n} exceeds the table range {}",
            table.n_max()
        )));
    }

    let mut counter = 0u64;
    let mut first_rng = fresh_rng(seed, &mut counter);
    let first = BitString::random(n, &mut first_rng);
    let mut prev_mask = instance.evaluate(&first)?;
    let initial_distance = n - prev_mask.count_matched();
    let mut queries = vec![(first.clone(), prev_mask.clone())];
    if prev_mask.all_matched() {
        return Ok(QueryLog { queries, initial_distance });
    }

    let mut nodes = vec![spawn(
        (0..n).collect(),
        first.bits().to_vec(),
        (0..n).collect(),
        initial_distance,
        seed,
        &mut counter,
    )];

    let mut rounds = 0usize;
    loop {
        rounds += 1;
        debug_assert!(rounds <= n + 2, "run exceeded the worst-case round count");

        // Compose this round's query from every node's block.
        let mut bits = vec![false; n];
        let mut flips: Vec<Vec<usize>> = Vec::with_capacity(nodes.len());
        for node in &mut nodes {
            let flipped: Vec<usize> = match node.state {
                NodeState::Done => Vec::new(),
                NodeState::FlipAll => (0..node.positions.len()).collect(),
                NodeState::Active => {
                    let s = table.optimal_split(node.positions.len(), node.mismatches)?;
                    let mut chosen =
                        rand::seq::index::sample(&mut node.rng, node.positions.len(), s)
                            .into_vec();
                    chosen.sort_unstable();
                    chosen
                }
            };
            for (i, &p) in node.positions.iter().enumerate() {
                bits[p] = node.bits[i];
            }
            for &i in &flipped {
                bits[node.positions[i]] = !node.bits[i];
            }
            flips.push(flipped);
        }

        let query = BitString::new(bits);
        let mask = instance.evaluate(&query)?;
        queries.push((query, mask.clone()));
        if mask.all_matched() {
            return Ok(QueryLog { queries, initial_distance });
        }

        // Advance each node from the ranks that toggled.
        let mut next_nodes = Vec::with_capacity(nodes.len() + 2);
        for (mut node, flipped) in nodes.into_iter().zip(flips) {
            match node.state {
                NodeState::Done => {
                    debug_assert!(node.ranks.iter().all(|&r| mask.is_matched(r)));
                    next_nodes.push(node);
                }
                NodeState::FlipAll => {
                    // Every rank was mismatched, so one block flip fixes the
                    // whole node.
                    debug_assert!(node
                        .ranks
                        .iter()
                        .all(|&r| mask.is_matched(r) != prev_mask.is_matched(r)));
                    for b in &mut node.bits {
                        *b = !*b;
                    }
                    node.mismatches = 0;
                    node.state = NodeState::Done;
                    next_nodes.push(node);
                }
                NodeState::Active => {
                    let Node { positions, bits, ranks, .. } = node;
                    // A rank toggles exactly when its position was flipped,
                    // so the flipped block owns the toggled ranks.
                    let (toggled, kept_ranks): (Vec<usize>, Vec<usize>) = ranks
                        .iter()
                        .copied()
                        .partition(|&r| mask.is_matched(r) != prev_mask.is_matched(r));
                    debug_assert_eq!(toggled.len(), flipped.len());

                    let mut in_flip = vec![false; positions.len()];
                    for &i in &flipped {
                        in_flip[i] = true;
                    }
                    let mut a_pos = Vec::with_capacity(flipped.len());
                    let mut a_bits = Vec::with_capacity(flipped.len());
                    let mut b_pos = Vec::with_capacity(positions.len() - flipped.len());
                    let mut b_bits = Vec::with_capacity(positions.len() - flipped.len());
                    for (i, &p) in positions.iter().enumerate() {
                        if in_flip[i] {
                            a_pos.push(p);
                            a_bits.push(!bits[i]);
                        } else {
                            b_pos.push(p);
                            b_bits.push(bits[i]);
                        }
                    }
                    let a_mis = toggled.iter().filter(|&&r| !mask.is_matched(r)).count();
                    let b_mis = kept_ranks.iter().filter(|&&r| !mask.is_matched(r)).count();
                    next_nodes.push(spawn(a_pos, a_bits, toggled, a_mis, seed, &mut counter));
                    next_nodes.push(spawn(b_pos, b_bits, kept_ranks, b_mis, seed, &mut counter));
                }
            }
        }
        nodes = next_nodes;
        prev_mask = mask;
        debug_assert_eq!(
            nodes.iter().map(|nd| nd.mismatches).sum::<usize>(),
            n - prev_mask.count_matched()
        );
    }
}

/// The instance and full log of run `run_index` of the experiment
/// `(n, seed)`. [`monte_carlo`] plays exactly these runs.
pub fn run_one(
    n: usize,
    table: &ComplexityTable,
    seed: u64,
    run_index: u64,
) -> Result<(ProblemInstance, QueryLog)> {
    let run_seed = derive_seed(seed, run_index);
    let mut instance_rng = ChaCha8Rng::seed_from_u64(derive_seed(run_seed, 0));
    let instance = ProblemInstance::random(n, &mut instance_rng);
    let log = solve(&instance, table, derive_seed(run_seed, 1))?;
    Ok((instance, log))
}

#[derive(Clone, Copy, Default)]
struct Acc {
    count: u64,
    sum: u64,
    sum_sq: u64,
}

impl Acc {
    fn push(&mut self, v: u64) {
        self.count += 1;
        self.sum += v;
        self.sum_sq += v * v;
    }

    fn merge(&mut self, other: &Acc) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    fn stats(&self) -> (f64, Option<f64>) {
        // Totals are small integers, so the f64 casts below are exact for
        // any realistic run count.
        let count = self.count as f64;
        let mean = self.sum as f64 / count;
        if self.count < 2 {
            return (mean, None);
        }
        let var = (self.sum_sq as f64 / count - mean * mean) * count / (count - 1.0);
        (mean, Some((var.max(0.0) / count).sqrt()))
    }
}

/// Play `runs` independent runs against uniformly random instances of size
/// `n` and aggregate query counts, overall and by initial distance.
pub fn monte_carlo(
    n: usize,
    runs: u64,
    table: &ComplexityTable,
    seed: u64,
) -> Result<RunStatistics> {
    if n == 0 || runs == 0 {
        return Err(Error::Domain(format!("need n >= 1 and runs >= 1, got ({n}, {runs})")));
    }
    if table.n_max() < n {
        return Err(Error::TableIncomplete(format!(
            "instance size {n} exceeds the table range {}",
            table.n_max()
        )));
    }

    let by_d = par::fold_range(
        0..usize::try_from(runs).map_err(|_| Error::Domain("runs exceeds usize".to_string()))?,
        || vec![Acc::default(); n + 1],
        |mut acc, i| {
            let (_, log) = run_one(n, table, seed, i as u64).expect("table covers n");
            acc[log.initial_distance].push(log.total() as u64);
            acc
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(&b) {
                x.merge(y);
            }
            a
        },
    );

    let mut total = Acc::default();
    for acc in &by_d {
        total.merge(acc);
    }
    debug_assert_eq!(total.count, runs);
    let (mean, std_error) = total.stats();
    let by_distance = by_d
        .iter()
        .enumerate()
        .filter(|(_, acc)| acc.count > 0)
        .map(|(d, acc)| {
            let (mean, std_error) = acc.stats();
            (d, DistanceStats { count: acc.count, mean, std_error })
        })
        .collect();
    Ok(RunStatistics { n, runs, mean, std_error, by_distance })
}

/// Whether a log is a faithful, complete run against `instance`: every
/// recorded mask re-evaluates, the first query's distance matches, and the
/// final query hits the optimum.
pub fn replay_check(log: &QueryLog, instance: &ProblemInstance) -> bool {
    if log.queries.is_empty() {
        return false;
    }
    for (query, mask) in &log.queries {
        match instance.evaluate(query) {
            Ok(m) if m == *mask => {}
            _ => return false,
        }
    }
    let first = &log.queries[0].1;
    if log.initial_distance != instance.n() - first.count_matched() {
        return false;
    }
    log.queries.last().expect("nonempty").1.all_matched()
}
