//! Query complexity of rank-weighted match counting.
//!
//! The hidden objective assigns each position of a binary string a distinct
//! weight rank (rank `r` carries weight `2^r`) and scores a query by the
//! weighted count of positions agreeing with a hidden optimum. Because the
//! weights at least double, a score is equivalent to the full set of matched
//! ranks - a [`MatchMask`] - and the number of matched ranks tells a
//! searcher exactly how far a query is from the optimum, but not which
//! positions are wrong.
//!
//! This crate:
//!
//! - computes the expected-query table `E(n, d)` of the optimal adaptive
//!   strategy, in exact rational or `f64` arithmetic, together with the
//!   minimizing block splits and expected totals over random instances
//!   ([`table`]);
//! - plays the induced strategy against concrete instances as a seeded,
//!   reproducible process and aggregates query counts ([`solver`]);
//! - evaluates and cross-checks the analytic bounds around the table
//!   ([`bounds`]);
//! - certifies tiny table rows against an exhaustive search over all
//!   adaptive strategies ([`oracle`]).
//!
//! With the default `parallel` feature, table construction and Monte Carlo
//! aggregation run on rayon; results are identical with the feature off.
//!
//! ```
//! use binval::table::{compute_table, TableMode};
//!
//! let table = compute_table(8, TableMode::Exact)?;
//! // Expected queries to finish from distance 4, as an exact rational.
//! assert_eq!(table.e_exact(8, 4)?.to_string(), "229/70");
//! // The first probe of an 8-bit search is best answered by splitting 4/4.
//! assert_eq!(table.optimal_split(8, 4)?, 4);
//! # Ok::<(), binval::Error>(())
//! ```

pub mod bitstring;
pub mod bounds;
mod error;
mod hexfloat;
pub mod instance;
mod numeric;
pub mod oracle;
mod par;
pub mod solver;
pub mod table;
pub mod weights;

pub use bitstring::{hamming, BitString};
pub use error::{Error, Result};
pub use instance::{MatchMask, ProblemInstance};
pub use oracle::{conditional_e, BeliefState, OracleLimits};
pub use solver::{monte_carlo, replay_check, run_one, solve, QueryLog, RunStatistics};
pub use table::{
    compute_table, compute_table_capped, split_weight, ComplexityTable, SplitWeight, TableMode,
    TableValue,
};
pub use weights::{greedy_decode, WeightVector};
