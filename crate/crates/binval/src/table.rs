//! The expected-query table `E(n, d)` and its induced optimal splits.
//!
//! `E(n, d)` is the expected number of further queries an optimal strategy
//! needs on a subproblem of `n` positions when the reference query disagrees
//! with the optimum on exactly `d` of them. The recursion behind the table:
//! flipping a block of `s` positions splits the subproblem into the flipped
//! block (size `s`, `s - t` mismatches left when `t` of the flips were
//! wrong-to-right... read: `t` previously mismatched positions land in the
//! block) and the kept block (size `n - s`, `d - t` mismatches), where `t`
//! is hypergeometric. The two halves are solved by interleaved queries, so a
//! cell costs one query plus the weighted average of the worse half:
//!
//! ```text
//! E(n, 0) = 0,   E(n, n) = 1,
//! E(n, d) = 1 + min over 0 < s < n of
//!           sum over t of max(E(s, s - t), E(n - s, d - t)) * w(n, d, s, t)
//! w(n, d, s, t) = C(s, t) * C(n - s, d - t) / C(n, d)
//! ```
//!
//! Tables carry exact rationals or `f64` cells; both modes fix the iteration
//! order and the tie rule, so rebuilding a table is fully deterministic and
//! the sequential and parallel backends agree bit for bit.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use num::{BigInt, BigRational, BigUint, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::hexfloat;
use crate::numeric::{big_ratio_to_f64, BinomialTable};
use crate::par;

/// Largest `n` accepted by [`compute_table`] in exact mode.
pub const DEFAULT_EXACT_CAP: usize = 24;
/// Largest `n` accepted by [`compute_table`] in `f64` mode.
pub const DEFAULT_FLOAT_CAP: usize = 128;
/// A float-mode candidate split must beat the incumbent by more than this to
/// replace it, so near-ties resolve to the smallest split deterministically.
pub const FLOAT_TIE_EPS: f64 = 1e-12;

/// Arithmetic used for table cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableMode {
    /// Exact rationals; costs grow quickly with `n`.
    Exact,
    /// Double precision throughout.
    Float64,
}

impl TableMode {
    pub fn as_token(self) -> &'static str {
        match self {
            TableMode::Exact => "exact",
            TableMode::Float64 => "f64",
        }
    }
}

impl FromStr for TableMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(TableMode::Exact),
            "f64" => Ok(TableMode::Float64),
            other => Err(Error::parse(format!("unknown table mode {other:?}"))),
        }
    }
}

/// A table cell in the arithmetic of its table.
#[derive(Debug, Clone, PartialEq)]
pub enum TableValue {
    Exact(BigRational),
    Float(f64),
}

impl TableValue {
    /// The cell as `f64`, converting exact values with one rounding.
    pub fn as_f64(&self) -> f64 {
        match self {
            TableValue::Exact(r) => big_ratio_to_f64(r.numer(), r.denom()),
            TableValue::Float(x) => *x,
        }
    }
}

/// The probability `w(n, d, s, t)` that a flipped block of size `s` captures
/// exactly `t` of the `d` mismatches, as an exact (unreduced) fraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitWeight {
    pub numerator: BigUint,
    pub denominator: BigUint,
}

impl SplitWeight {
    pub fn as_ratio(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.numerator.clone()),
            BigInt::from(self.denominator.clone()),
        )
    }

    pub fn as_f64(&self) -> f64 {
        big_ratio_to_f64(&BigInt::from(self.numerator.clone()), &BigInt::from(self.denominator.clone()))
    }
}

/// `w(n, d, s, t)` for `0 < s < n`, `0 <= d <= n` and `t` in the feasible
/// range `max(0, s + d - n) <= t <= min(s, d)`.
pub fn split_weight(n: usize, d: usize, s: usize, t: usize) -> Result<SplitWeight> {
    if n == 0 || d > n || s == 0 || s >= n {
        return Err(Error::Domain(format!("no split weight for n={n}, d={d}, s={s}")));
    }
    if t > s.min(d) || t < (s + d).saturating_sub(n) {
        return Err(Error::Domain(format!(
            "t={t} outside the feasible overlap range for n={n}, d={d}, s={s}"
        )));
    }
    let binom = BinomialTable::new(n);
    Ok(SplitWeight {
        numerator: binom.c(s, t) * binom.c(n - s, d - t),
        denominator: binom.c(n, d).clone(),
    })
}

// Cell arithmetic shared by the exact and f64 builds.
trait EScalar: Clone + PartialOrd + Send + Sync {
    fn zero_cell() -> Self;
    fn weight(binom: &BinomialTable, n: usize, d: usize, s: usize, t: usize) -> Self;
    fn mul_add(acc: &mut Self, value: &Self, weight: Self);
    fn plus_one(self) -> Self;
    /// Whether a candidate split value displaces the incumbent; ties keep
    /// the incumbent (the smaller split).
    fn improves(candidate: &Self, incumbent: &Self) -> bool;
}

impl EScalar for f64 {
    fn zero_cell() -> Self {
        0.0
    }

    fn weight(binom: &BinomialTable, n: usize, d: usize, s: usize, t: usize) -> Self {
        binom.cf(s, t) * binom.cf(n - s, d - t) / binom.cf(n, d)
    }

    fn mul_add(acc: &mut Self, value: &Self, weight: Self) {
        *acc += value * weight;
    }

    fn plus_one(self) -> Self {
        self + 1.0
    }

    fn improves(candidate: &Self, incumbent: &Self) -> bool {
        *candidate < incumbent - FLOAT_TIE_EPS
    }
}

impl EScalar for BigRational {
    fn zero_cell() -> Self {
        BigRational::zero()
    }

    fn weight(binom: &BinomialTable, n: usize, d: usize, s: usize, t: usize) -> Self {
        BigRational::new(
            BigInt::from(binom.c(s, t) * binom.c(n - s, d - t)),
            BigInt::from(binom.c(n, d).clone()),
        )
    }

    fn mul_add(acc: &mut Self, value: &Self, weight: Self) {
        *acc += value * &weight;
    }

    fn plus_one(self) -> Self {
        self + BigRational::one()
    }

    fn improves(candidate: &Self, incumbent: &Self) -> bool {
        candidate < incumbent
    }
}

// Row-major triangular layout: row n holds d = 0..=n.
fn e_offset(n: usize) -> usize {
    (n - 1) * (n + 2) / 2
}

fn eidx(n: usize, d: usize) -> usize {
    e_offset(n) + d
}

fn e_len(n_max: usize) -> usize {
    e_offset(n_max + 1)
}

// Split layout: row n (n >= 2) holds d = 1..=n-1.
fn s_offset(n: usize) -> usize {
    (n - 1) * (n - 2) / 2
}

fn sidx(n: usize, d: usize) -> usize {
    s_offset(n) + d - 1
}

fn s_len(n_max: usize) -> usize {
    s_offset(n_max + 1)
}

fn cell<S: EScalar>(e: &[S], binom: &BinomialTable, n: usize, d: usize) -> (S, u32) {
    debug_assert!(n >= 2 && d >= 1 && d < n);
    let mut best: Option<(S, u32)> = None;
    for s in 1..n {
        let mut acc = S::zero_cell();
        let t_lo = (s + d).saturating_sub(n);
        let t_hi = s.min(d);
        for t in t_lo..=t_hi {
            let a = &e[eidx(s, s - t)];
            let b = &e[eidx(n - s, d - t)];
            let worse = if a >= b { a } else { b };
            S::mul_add(&mut acc, worse, S::weight(binom, n, d, s, t));
        }
        match &best {
            Some((incumbent, _)) if !S::improves(&acc, incumbent) => {}
            _ => best = Some((acc, s as u32)),
        }
    }
    let (value, s) = best.expect("n >= 2 has at least one split");
    (S::plus_one(value), s)
}

fn build<S: EScalar>(n_max: usize, binom: &BinomialTable) -> (Vec<S>, Vec<u32>) {
    let mut e: Vec<S> = Vec::with_capacity(e_len(n_max));
    let mut split: Vec<u32> = Vec::with_capacity(s_len(n_max));
    for n in 1..=n_max {
        e.push(S::zero_cell());
        // Interior cells of row n read only rows below n, so they are
        // independent of each other.
        let inner = par::map_range(1..n, |d| cell(&e, binom, n, d));
        for (value, s) in inner {
            e.push(value);
            split.push(s);
        }
        e.push(S::plus_one(S::zero_cell()));
    }
    debug_assert_eq!(e.len(), e_len(n_max));
    debug_assert_eq!(split.len(), s_len(n_max));
    (e, split)
}

/// The table `E(n, d)` for all `1 <= n <= n_max`, with the minimizing split
/// of every interior cell.
#[derive(Debug, Clone)]
pub struct ComplexityTable {
    mode: TableMode,
    n_max: usize,
    e_float: Vec<f64>,
    e_exact: Option<Vec<BigRational>>,
    split: Vec<u32>,
    binom: BinomialTable,
}

/// Build a table under the default size caps ([`DEFAULT_EXACT_CAP`],
/// [`DEFAULT_FLOAT_CAP`]).
pub fn compute_table(n_max: usize, mode: TableMode) -> Result<ComplexityTable> {
    let cap = match mode {
        TableMode::Exact => DEFAULT_EXACT_CAP,
        TableMode::Float64 => DEFAULT_FLOAT_CAP,
    };
    compute_table_capped(n_max, mode, cap)
}

/// Build a table with an explicit size cap. Exact-mode cost grows roughly
/// with the fourth power of the cap; `f64` mode stays cheap well past the
/// default.
pub fn compute_table_capped(n_max: usize, mode: TableMode, cap: usize) -> Result<ComplexityTable> {
    if n_max == 0 {
        return Err(Error::Domain("a table needs n_max >= 1".to_string()));
    }
    if n_max > cap {
        return Err(Error::ResourceLimit(format!(
            "n_max = {n_max} exceeds the cap {cap} for {} mode",
            mode.as_token()
        )));
    }
    let binom = BinomialTable::new(n_max);
    let (e_float, e_exact, split) = match mode {
        TableMode::Float64 => {
            let (e, split) = build::<f64>(n_max, &binom);
            (e, None, split)
        }
        TableMode::Exact => {
            let (e, split) = build::<BigRational>(n_max, &binom);
            let mirror = e.iter().map(|r| big_ratio_to_f64(r.numer(), r.denom())).collect();
            (mirror, Some(e), split)
        }
    };
    Ok(ComplexityTable { mode, n_max, e_float, e_exact, split, binom })
}

impl ComplexityTable {
    pub fn mode(&self) -> TableMode {
        self.mode
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    fn check_cell(&self, n: usize, d: usize) -> Result<()> {
        if n == 0 || n > self.n_max {
            return Err(Error::TableIncomplete(format!(
                "n = {n} outside the computed range 1..={}",
                self.n_max
            )));
        }
        if d > n {
            return Err(Error::Domain(format!("d = {d} exceeds n = {n}")));
        }
        Ok(())
    }

    /// `E(n, d)` as `f64`; in exact mode this is the rounded exact value.
    pub fn e_f64(&self, n: usize, d: usize) -> Result<f64> {
        self.check_cell(n, d)?;
        Ok(self.e_float[eidx(n, d)])
    }

    /// `E(n, d)` as an exact rational. Fails on `f64`-mode tables.
    pub fn e_exact(&self, n: usize, d: usize) -> Result<&BigRational> {
        self.check_cell(n, d)?;
        match &self.e_exact {
            Some(e) => Ok(&e[eidx(n, d)]),
            None => Err(Error::Domain("table holds f64 cells only".to_string())),
        }
    }

    /// `E(n, d)` in the table's own arithmetic.
    pub fn value(&self, n: usize, d: usize) -> Result<TableValue> {
        self.check_cell(n, d)?;
        Ok(match &self.e_exact {
            Some(e) => TableValue::Exact(e[eidx(n, d)].clone()),
            None => TableValue::Float(self.e_float[eidx(n, d)]),
        })
    }

    /// The split minimizing the cell `(n, d)`; defined for `0 < d < n`.
    pub fn optimal_split(&self, n: usize, d: usize) -> Result<usize> {
        self.check_cell(n, d)?;
        if d == 0 || d == n {
            return Err(Error::Domain(format!(
                "no split at (n, d) = ({n}, {d}): distance 0 is solved and distance n is one flip-all query"
            )));
        }
        Ok(self.split[sidx(n, d)] as usize)
    }

    /// The value `1 + sum_t max(...) * w(n, d, s, t)` of one candidate
    /// split, recomputed from stored cells in the table's arithmetic.
    pub fn e_of_split(&self, n: usize, d: usize, s: usize) -> Result<TableValue> {
        self.check_cell(n, d)?;
        if d == 0 || d == n {
            return Err(Error::Domain(format!("no split at (n, d) = ({n}, {d})")));
        }
        if s == 0 || s >= n {
            return Err(Error::Domain(format!("split s = {s} outside 1..{n}")));
        }
        let t_lo = (s + d).saturating_sub(n);
        let t_hi = s.min(d);
        Ok(match &self.e_exact {
            Some(e) => {
                let mut acc = BigRational::zero();
                for t in t_lo..=t_hi {
                    let a = &e[eidx(s, s - t)];
                    let b = &e[eidx(n - s, d - t)];
                    let worse = if a >= b { a } else { b };
                    EScalar::mul_add(
                        &mut acc,
                        worse,
                        <BigRational as EScalar>::weight(&self.binom, n, d, s, t),
                    );
                }
                TableValue::Exact(acc.plus_one())
            }
            None => {
                let e = &self.e_float;
                let mut acc = 0.0;
                for t in t_lo..=t_hi {
                    let worse = e[eidx(s, s - t)].max(e[eidx(n - s, d - t)]);
                    acc += worse * <f64 as EScalar>::weight(&self.binom, n, d, s, t);
                }
                TableValue::Float(acc + 1.0)
            }
        })
    }

    /// Expected total queries against a uniformly random instance of size
    /// `n`: one for the first query plus the average of `E(n, d)` over the
    /// binomial distribution of the initial distance `d`. Exact mode only.
    pub fn bbc_exact(&self, n: usize) -> Result<BigRational> {
        self.check_cell(n, 0)?;
        let e = match &self.e_exact {
            Some(e) => e,
            None => return Err(Error::Domain("table holds f64 cells only".to_string())),
        };
        let mut acc = BigRational::zero();
        for d in 0..=n {
            acc += &e[eidx(n, d)] * BigRational::from(BigInt::from(self.binom.c(n, d).clone()));
        }
        let denom = BigInt::from(BigUint::one() << n);
        Ok(BigRational::one() + acc / BigRational::from(denom))
    }

    /// [`bbc_exact`](Self::bbc_exact) in `f64`; available in both modes.
    pub fn bbc_f64(&self, n: usize) -> Result<f64> {
        self.check_cell(n, 0)?;
        let mut acc = 0.0;
        for d in 0..=n {
            acc += self.e_float[eidx(n, d)] * self.binom.cf(n, d);
        }
        Ok(1.0 + acc / (n as f64).exp2())
    }

    /// Write the table in the `binval-etable v1` text format.
    pub fn save(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "binval-etable v1 {} {}", self.mode.as_token(), self.n_max)?;
        for n in 1..=self.n_max {
            for d in 0..=n {
                let value = match &self.e_exact {
                    Some(e) => {
                        let r = &e[eidx(n, d)];
                        format!("{}/{}", r.numer(), r.denom())
                    }
                    None => hexfloat::format_hex(self.e_float[eidx(n, d)]),
                };
                if d > 0 && d < n {
                    writeln!(w, "{n} {d} {value} {}", self.split[sidx(n, d)])?;
                } else {
                    writeln!(w, "{n} {d} {value}")?;
                }
            }
        }
        Ok(())
    }

    pub fn save_to_path(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.save(&mut w)?;
        Ok(w.flush()?)
    }

    /// Read a table written by [`save`](Self::save), verifying that every
    /// cell up to the declared `n_max` is present exactly once.
    pub fn load(r: impl BufRead) -> Result<ComplexityTable> {
        let mut lines = r.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse("empty table file").at_line(1))?;
        let header = header?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 4 || head[0] != "binval-etable" || head[1] != "v1" {
            return Err(Error::parse("expected header `binval-etable v1 <mode> <n_max>`")
                .at_line(1));
        }
        let mode: TableMode = head[2].parse().map_err(|e: Error| e.at_line(1))?;
        let n_max: usize = head[3]
            .parse()
            .ok()
            .filter(|&v| v >= 1)
            .ok_or_else(|| Error::parse(format!("invalid n_max {:?}", head[3])).at_line(1))?;

        let mut e_exact: Vec<Option<BigRational>> = vec![None; e_len(n_max)];
        let mut e_float: Vec<Option<f64>> = vec![None; e_len(n_max)];
        let mut split: Vec<Option<u32>> = vec![None; s_len(n_max)];

        for (i, line) in lines {
            let lineno = i + 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let fail = |msg: String| Error::parse(msg).at_line(lineno);
            if toks.len() < 3 {
                return Err(fail(format!("expected `n d value [split]`, got {line:?}")));
            }
            let n: usize = toks[0].parse().map_err(|_| fail(format!("bad n {:?}", toks[0])))?;
            let d: usize = toks[1].parse().map_err(|_| fail(format!("bad d {:?}", toks[1])))?;
            if n == 0 || n > n_max || d > n {
                return Err(fail(format!("cell ({n}, {d}) outside the declared table")));
            }
            let interior = d > 0 && d < n;
            if toks.len() != if interior { 4 } else { 3 } {
                return Err(fail(format!("wrong field count for cell ({n}, {d})")));
            }
            if e_float[eidx(n, d)].is_some() {
                return Err(fail(format!("duplicate cell ({n}, {d})")));
            }
            match mode {
                TableMode::Exact => {
                    let (num, den) = toks[2]
                        .split_once('/')
                        .ok_or_else(|| fail(format!("expected num/den, got {:?}", toks[2])))?;
                    let num: BigInt =
                        num.parse().map_err(|_| fail(format!("bad numerator {num:?}")))?;
                    let den: BigInt =
                        den.parse().map_err(|_| fail(format!("bad denominator {den:?}")))?;
                    if !den.is_positive() || num.is_negative() {
                        return Err(fail(format!("non-canonical rational {:?}", toks[2])));
                    }
                    let r = BigRational::new(num, den);
                    e_float[eidx(n, d)] = Some(big_ratio_to_f64(r.numer(), r.denom()));
                    e_exact[eidx(n, d)] = Some(r);
                }
                TableMode::Float64 => {
                    let v = hexfloat::parse_hex(toks[2])
                        .ok_or_else(|| fail(format!("bad hex float {:?}", toks[2])))?;
                    e_float[eidx(n, d)] = Some(v);
                }
            }
            if interior {
                let s: usize =
                    toks[3].parse().map_err(|_| fail(format!("bad split {:?}", toks[3])))?;
                if s == 0 || s >= n {
                    return Err(fail(format!("split {s} outside 1..{n}")));
                }
                split[sidx(n, d)] = Some(s as u32);
            }
        }

        for n in 1..=n_max {
            for d in 0..=n {
                if e_float[eidx(n, d)].is_none() {
                    return Err(Error::parse(format!(
                        "table truncated: cell ({n}, {d}) missing for declared n_max {n_max}"
                    )));
                }
                if d > 0 && d < n && split[sidx(n, d)].is_none() {
                    return Err(Error::parse(format!("split missing for cell ({n}, {d})")));
                }
            }
        }

        Ok(ComplexityTable {
            mode,
            n_max,
            e_float: e_float.into_iter().map(Option::unwrap).collect(),
            e_exact: match mode {
                TableMode::Exact => Some(e_exact.into_iter().map(Option::unwrap).collect()),
                TableMode::Float64 => None,
            },
            split: split.into_iter().map(|s| s.unwrap_or(0)).collect(),
            binom: BinomialTable::new(n_max),
        })
    }

    pub fn load_from_path(path: impl AsRef<Path>) -> Result<ComplexityTable> {
        ComplexityTable::load(BufReader::new(File::open(path)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn exact(n: usize) -> ComplexityTable {
        compute_table(n, TableMode::Exact).unwrap()
    }

    #[test]
    fn smallest_rows_match_hand_computation() {
        let t = exact(4);
        let rows: [(usize, &[(i64, i64)]); 4] = [
            (1, &[(0, 1), (1, 1)]),
            (2, &[(0, 1), (3, 2), (1, 1)]),
            (3, &[(0, 1), (2, 1), (2, 1), (1, 1)]),
            (4, &[(0, 1), (5, 2), (13, 6), (5, 2), (1, 1)]),
        ];
        for (n, row) in rows {
            for (d, &(p, q)) in row.iter().enumerate() {
                assert_eq!(t.e_exact(n, d).unwrap(), &rat(p, q), "E({n}, {d})");
            }
        }
    }

    #[test]
    fn small_optimal_splits() {
        let t = exact(4);
        assert_eq!(t.optimal_split(2, 1).unwrap(), 1);
        assert_eq!(t.optimal_split(3, 1).unwrap(), 1);
        assert_eq!(t.optimal_split(3, 2).unwrap(), 2);
        assert_eq!(t.optimal_split(4, 1).unwrap(), 1);
        assert_eq!(t.optimal_split(4, 2).unwrap(), 2);
        assert_eq!(t.optimal_split(4, 3).unwrap(), 2);
    }

    #[test]
    fn split_values_bracket_the_optimum() {
        let t = exact(3);
        // At (3, 1) the two candidate splits differ: flipping one position
        // wins over flipping two.
        assert_eq!(t.e_of_split(3, 1, 1).unwrap(), TableValue::Exact(rat(2, 1)));
        assert_eq!(t.e_of_split(3, 1, 2).unwrap(), TableValue::Exact(rat(7, 3)));
        assert_eq!(t.e_exact(3, 1).unwrap(), &rat(2, 1));
        // The mirrored cell prefers the mirrored split.
        assert_eq!(t.e_of_split(3, 2, 2).unwrap(), TableValue::Exact(rat(2, 1)));
    }

    #[test]
    fn every_split_value_at_least_the_cell() {
        let t = exact(9);
        for n in 2..=9 {
            for d in 1..n {
                let cell = t.e_exact(n, d).unwrap();
                for s in 1..n {
                    match t.e_of_split(n, d, s).unwrap() {
                        TableValue::Exact(v) => assert!(&v >= cell, "({n},{d},{s})"),
                        _ => unreachable!(),
                    }
                }
                let s = t.optimal_split(n, d).unwrap();
                assert_eq!(t.e_of_split(n, d, s).unwrap(), TableValue::Exact(cell.clone()));
            }
        }
    }

    #[test]
    fn interior_cells_are_symmetric_in_d() {
        let t = exact(16);
        for n in 2..=16 {
            for d in 1..n {
                assert_eq!(
                    t.e_exact(n, d).unwrap(),
                    t.e_exact(n, n - d).unwrap(),
                    "E({n}, {d}) vs E({n}, {})",
                    n - d
                );
            }
        }
    }

    #[test]
    fn split_weights_sum_to_one() {
        for (n, d, s) in [(5usize, 2usize, 2usize), (9, 4, 3), (12, 6, 6), (7, 7, 3), (8, 1, 4)] {
            let mut acc = BigRational::zero();
            for t in (s + d).saturating_sub(n)..=s.min(d) {
                acc += split_weight(n, d, s, t).unwrap().as_ratio();
            }
            assert!(acc.is_one(), "weights at ({n}, {d}, {s}) sum to {acc}");
        }
        assert!(split_weight(5, 2, 0, 0).is_err());
        assert!(split_weight(5, 2, 5, 1).is_err());
        assert!(split_weight(5, 2, 2, 3).is_err());
    }

    #[test]
    fn bbc_small_fixtures() {
        let t = exact(4);
        assert_eq!(t.bbc_exact(1).unwrap(), rat(3, 2));
        assert_eq!(t.bbc_exact(2).unwrap(), rat(2, 1));
        assert_eq!(t.bbc_exact(3).unwrap(), rat(21, 8));
        assert_eq!(t.bbc_exact(4).unwrap(), rat(25, 8));
        let f = t.bbc_f64(4).unwrap();
        assert!((f - 3.125).abs() < 1e-15);
    }

    #[test]
    fn float_and_exact_modes_agree() {
        let ex = exact(16);
        let fl = compute_table(16, TableMode::Float64).unwrap();
        for n in 1..=16 {
            for d in 0..=n {
                let a = ex.e_f64(n, d).unwrap();
                let b = fl.e_f64(n, d).unwrap();
                assert!((a - b).abs() < 1e-9, "({n}, {d}): {a} vs {b}");
                if d > 0 && d < n {
                    assert_eq!(
                        ex.optimal_split(n, d).unwrap(),
                        fl.optimal_split(n, d).unwrap(),
                        "split ({n}, {d})"
                    );
                }
            }
        }
    }

    #[test]
    fn mode_queries_fail_cleanly() {
        let fl = compute_table(4, TableMode::Float64).unwrap();
        assert!(fl.e_exact(3, 1).is_err());
        assert!(fl.bbc_exact(3).is_err());
        assert!(fl.bbc_f64(4).is_ok());
        assert!(fl.e_f64(5, 0).is_err());
        assert!(fl.e_f64(4, 5).is_err());
        assert!(fl.optimal_split(4, 0).is_err());
        assert!(fl.optimal_split(4, 4).is_err());
    }

    #[test]
    fn caps_are_enforced() {
        assert!(compute_table(0, TableMode::Exact).is_err());
        assert!(compute_table(DEFAULT_EXACT_CAP + 1, TableMode::Exact).is_err());
        assert!(compute_table_capped(25, TableMode::Exact, 25).is_ok());
        assert!(compute_table(DEFAULT_FLOAT_CAP + 1, TableMode::Float64).is_err());
    }

    #[test]
    fn save_load_round_trip_exact() {
        let t = exact(8);
        let mut buf = Vec::new();
        t.save(&mut buf).unwrap();
        let back = ComplexityTable::load(&buf[..]).unwrap();
        assert_eq!(back.mode(), TableMode::Exact);
        assert_eq!(back.n_max(), 8);
        for n in 1..=8 {
            for d in 0..=n {
                assert_eq!(back.e_exact(n, d).unwrap(), t.e_exact(n, d).unwrap());
                if d > 0 && d < n {
                    assert_eq!(
                        back.optimal_split(n, d).unwrap(),
                        t.optimal_split(n, d).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn save_load_round_trip_float_is_bit_exact() {
        let t = compute_table(24, TableMode::Float64).unwrap();
        let mut buf = Vec::new();
        t.save(&mut buf).unwrap();
        let back = ComplexityTable::load(&buf[..]).unwrap();
        for n in 1..=24 {
            for d in 0..=n {
                assert_eq!(
                    back.e_f64(n, d).unwrap().to_bits(),
                    t.e_f64(n, d).unwrap().to_bits(),
                    "({n}, {d})"
                );
            }
        }
    }

    #[test]
    fn load_rejects_truncation_and_damage() {
        let t = exact(4);
        let mut buf = Vec::new();
        t.save(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();

        // Dropping the last line leaves a declared cell missing.
        let truncated: String = text.lines().take(text.lines().count() - 1).fold(
            String::new(),
            |mut acc, l| {
                acc.push_str(l);
                acc.push('\n');
                acc
            },
        );
        match ComplexityTable::load(truncated.as_bytes()) {
            Err(Error::Parse { msg, .. }) => assert!(msg.contains("truncated"), "{msg}"),
            other => panic!("expected truncation error, got {other:?}"),
        }

        let damaged = text.replace("13/6", "13/0");
        assert!(ComplexityTable::load(damaged.as_bytes()).is_err());

        let bad_header = text.replace("binval-etable v1", "binval-etable v2");
        assert!(ComplexityTable::load(bad_header.as_bytes()).is_err());

        let duplicated = format!("{text}2 1 3/2 1\n");
        assert!(ComplexityTable::load(duplicated.as_bytes()).is_err());
    }

    #[test]
    fn values_stay_within_elementary_bounds() {
        // 0 <= E(n, d) <= n, E(n, 0) = 0, E(n, n) = 1, and one query never
        // suffices for 0 < d < n when n > 1.
        let t = compute_table(32, TableMode::Float64).unwrap();
        for n in 1..=32 {
            assert_eq!(t.e_f64(n, 0).unwrap(), 0.0);
            assert_eq!(t.e_f64(n, n).unwrap(), 1.0);
            for d in 1..n {
                let v = t.e_f64(n, d).unwrap();
                assert!(v >= 1.5 - 1e-12 && v <= n as f64, "E({n}, {d}) = {v}");
            }
        }
    }
}
