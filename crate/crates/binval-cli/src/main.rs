//! `binval` — command-line front end for the complexity toolkit.
//!
//! Subcommands: `table`, `bbc`, `bounds`, `simulate`, `oracle`, `plot`,
//! `selftest`.  Every command is deterministic given its flags (and seed);
//! reals print with 12 significant digits, exact values as reduced rationals.
//! The env var `BINVAL_TABLE_CACHE` can name a directory where computed
//! tables are stored and reused between invocations.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use binval::bounds::{
    psi, psi_forward_drop, report, tail, xi, BBC_LOWER_GAP, BBC_UPPER_GAP, LOG_TAIL_TOTAL,
    XI_FIXED_POINT,
};
use binval::{
    compute_table, conditional_e, hamming, monte_carlo, replay_check, run_one, solve,
    BitString, ComplexityTable, OracleLimits, ProblemInstance, TableMode,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num::rational::BigRational;
use num::{BigInt, One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "binval",
    version,
    about = "Exact query-complexity tables, bounds, and a seeded solver for \
             permutation-hidden binary-weight search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the expected-query table and write it out.
    Table(TableArgs),
    /// Print the average query count over uniform instances of one size.
    Bbc(BbcArgs),
    /// Print the bound envelope for one size.
    Bounds(BoundsArgs),
    /// Run the seeded solver repeatedly and report query statistics.
    Simulate(SimulateArgs),
    /// Compare the exhaustive small-size search against the table.
    Oracle(OracleArgs),
    /// Emit the average-count curve with its brackets as a data file.
    Plot(PlotArgs),
    /// Run a quick internal consistency sweep; non-zero exit on any failure.
    Selftest,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Arbitrary-precision rationals (cost grows steeply with size).
    Exact,
    /// Double-precision floats (cheap far beyond the exact cap).
    F64,
}

impl From<ModeArg> for TableMode {
    fn from(m: ModeArg) -> TableMode {
        match m {
            ModeArg::Exact => TableMode::Exact,
            ModeArg::F64 => TableMode::Float64,
        }
    }
}

#[derive(Args)]
struct TableArgs {
    /// Largest size to tabulate.
    #[arg(long)]
    n_max: usize,
    /// Arithmetic mode; default: exact up to 24, f64 above.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct BbcArgs {
    /// Instance size.
    #[arg(long)]
    n: usize,
    /// Arithmetic mode; default: exact up to 24, f64 above.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Load the table from this file instead of computing it.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct BoundsArgs {
    /// Instance size.
    #[arg(long)]
    n: usize,
    /// Table file for the observed-gap comparison (optional).
    #[arg(long)]
    table: Option<PathBuf>,
    /// Also print machine-readable `key=value` lines.
    #[arg(long)]
    machine: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Instance size.
    #[arg(long)]
    n: usize,
    /// Number of independent runs.
    #[arg(long)]
    runs: u64,
    /// Base seed; run i derives its own stream from it.
    #[arg(long)]
    seed: u64,
    /// Load the table from this file instead of computing it.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Write one query log per run into this directory.
    #[arg(long)]
    emit_logs: Option<PathBuf>,
    /// Worker threads (0 = all cores, the default here).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
struct OracleArgs {
    /// Instance size (at most 4; 4 explores a much larger state space).
    #[arg(long)]
    n: usize,
    /// Abort the search after this many seconds.
    #[arg(long)]
    budget_secs: Option<u64>,
}

#[derive(Args)]
struct PlotArgs {
    /// First size (inclusive).
    #[arg(long)]
    n_from: usize,
    /// Last size (inclusive).
    #[arg(long)]
    n_to: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Arithmetic mode; default: exact up to 24, f64 above.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Load the table from this file instead of computing it.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Table(a) => run_with_threads(a.threads, || cmd_table(&a)),
        Command::Bbc(a) => run_with_threads(a.threads, || cmd_bbc(&a)),
        Command::Bounds(a) => cmd_bounds(&a),
        Command::Simulate(a) => run_with_threads(a.threads, || cmd_simulate(&a)),
        Command::Oracle(a) => cmd_oracle(&a),
        Command::Plot(a) => run_with_threads(a.threads, || cmd_plot(&a)),
        Command::Selftest => cmd_selftest(),
    }
}

/// Runs `f` inside a dedicated thread pool of the requested width (0 = all
/// cores).  Without the `parallel` feature the closure runs as-is.
fn run_with_threads<T: Send>(threads: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .context("building the worker pool")?;
        pool.install(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}

/// Plain-decimal formatting with 12 significant digits.
fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000000".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).clamp(0, 17) as usize;
    format!("{x:.decimals$}")
}

fn ceil_log2(n: usize) -> u32 {
    if n.is_power_of_two() {
        n.ilog2()
    } else {
        n.ilog2() + 1
    }
}

fn auto_mode(n: usize) -> TableMode {
    if n <= 24 {
        TableMode::Exact
    } else {
        TableMode::Float64
    }
}

/// Loads, reuses, or computes a table covering sizes up to `n`.
///
/// Priority: an explicit `--table` file (validated against the forced mode
/// and the needed coverage), then a `BINVAL_TABLE_CACHE` hit, then a fresh
/// computation (cached afterwards when the cache directory is set).
fn obtain_table(n: usize, forced: Option<ModeArg>, path: Option<&Path>) -> Result<ComplexityTable> {
    if let Some(p) = path {
        let t = ComplexityTable::load_from_path(p)
            .with_context(|| format!("loading table from {}", p.display()))?;
        if let Some(f) = forced {
            if t.mode() != TableMode::from(f) {
                bail!(
                    "table file {} holds {} values but --mode asked for {}",
                    p.display(),
                    t.mode().as_token(),
                    TableMode::from(f).as_token()
                );
            }
        }
        if t.n_max() < n {
            bail!("table file {} covers n <= {}, need {n}", p.display(), t.n_max());
        }
        return Ok(t);
    }
    let mode = forced.map(TableMode::from).unwrap_or_else(|| auto_mode(n));
    if let Ok(dir) = std::env::var("BINVAL_TABLE_CACHE") {
        let file = Path::new(&dir).join(format!("etable-{}-n{n}.txt", mode.as_token()));
        if file.exists() {
            match ComplexityTable::load_from_path(&file) {
                Ok(t) if t.mode() == mode && t.n_max() >= n => return Ok(t),
                Ok(_) => {} // wrong shape for this request: recompute and overwrite
                Err(e) => eprintln!("ignoring damaged cache {}: {e}", file.display()),
            }
        }
        let t = compute_table(n, mode)?;
        fs::create_dir_all(&dir)
            .with_context(|| format!("creating cache directory {dir}"))?;
        t.save_to_path(&file)
            .with_context(|| format!("writing cached table {}", file.display()))?;
        return Ok(t);
    }
    Ok(compute_table(n, mode)?)
}

fn cmd_table(args: &TableArgs) -> Result<()> {
    let mode = args.mode.map(TableMode::from).unwrap_or_else(|| auto_mode(args.n_max));
    let table = compute_table(args.n_max, mode)?;
    match &args.out {
        Some(path) => {
            table.save_to_path(path)?;
            eprintln!(
                "wrote {} table for n <= {} to {}",
                mode.as_token(),
                args.n_max,
                path.display()
            );
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            table.save(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn cmd_bbc(args: &BbcArgs) -> Result<()> {
    let table = obtain_table(args.n, args.mode, args.table.as_deref())?;
    if table.mode() == TableMode::Exact {
        println!("{}", table.bbc_exact(args.n)?);
    } else {
        println!("{}", sig12(table.bbc_f64(args.n)?));
    }
    Ok(())
}

fn cmd_bounds(args: &BoundsArgs) -> Result<()> {
    let r = report(args.n)?;
    println!("{r}");
    let observed = match &args.table {
        Some(path) => {
            let t = ComplexityTable::load_from_path(path)?;
            if t.n_max() < args.n {
                bail!("table file covers n <= {}, need {}", t.n_max(), args.n);
            }
            let mut max_gap = f64::NEG_INFINITY;
            for d in 1..args.n {
                max_gap = max_gap.max(t.e_f64(args.n, d)? - r.log2n);
            }
            println!("observed max gap     = {}", sig12(max_gap));
            let inside = r.log2n + max_gap <= r.upper_const + 1e-9
                && r.log2n + max_gap >= r.lower_sixth - 1e-9;
            println!("within envelope      = {}", if inside { "yes" } else { "NO" });
            Some(max_gap)
        }
        None => None,
    };
    if args.machine {
        println!("n={}", r.n);
        println!("log2n={}", sig12(r.log2n));
        println!("upper_phi={}", sig12(r.upper_phi));
        println!("upper_const={}", sig12(r.upper_const));
        println!("lower_xi={}", sig12(r.lower_xi));
        println!("lower_sixth={}", sig12(r.lower_sixth));
        println!("bbc_lower={}", sig12(r.bbc_lower));
        println!("bbc_upper={}", sig12(r.bbc_upper));
        println!("prior_upper={}", sig12(r.prior_upper));
        if let Some(g) = observed {
            println!("observed_gap={}", sig12(g));
        }
    }
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let table = obtain_table(args.n, None, args.table.as_deref())?;
    let stats = monte_carlo(args.n, args.runs, &table, args.seed)?;
    println!("size {}, {} runs, seed {}", args.n, args.runs, args.seed);
    match stats.std_error {
        Some(se) => println!("mean queries = {} (se {})", sig12(stats.mean), sig12(se)),
        None => println!("mean queries = {}", sig12(stats.mean)),
    }
    println!("table average = {}", sig12(table.bbc_f64(args.n)?));
    println!("{:>4} {:>10} {:>16} {:>14} {:>16} {:>12}", "d", "count", "mean", "se", "1+E(n,d)", "diff");
    for (&d, ds) in &stats.by_distance {
        let reference = 1.0 + table.e_f64(args.n, d)?;
        let se = ds.std_error.map(sig12).unwrap_or_else(|| "-".to_string());
        println!(
            "{:>4} {:>10} {:>16} {:>14} {:>16} {:>12}",
            d,
            ds.count,
            sig12(ds.mean),
            se,
            sig12(reference),
            format!("{:+.6}", ds.mean - reference),
        );
    }
    if let Some(dir) = &args.emit_logs {
        if args.runs > 10_000 {
            bail!("refusing to write more than 10000 log files; lower --runs or drop --emit-logs");
        }
        fs::create_dir_all(dir)
            .with_context(|| format!("creating log directory {}", dir.display()))?;
        for i in 0..args.runs {
            let (_, log) = run_one(args.n, &table, args.seed, i)?;
            let path = dir.join(format!("run-{i:06}.log"));
            let mut w = BufWriter::new(fs::File::create(&path)?);
            for (bits, mask) in &log.queries {
                writeln!(w, "{bits}\t{mask}")?;
            }
            w.flush()?;
        }
        eprintln!("wrote {} query logs to {}", args.runs, dir.display());
    }
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> Result<()> {
    if args.n == 0 || args.n > 4 {
        bail!("the exhaustive search handles sizes 1 through 4, got {}", args.n);
    }
    let limits = OracleLimits {
        max_n: 4,
        time_budget: args.budget_secs.map(Duration::from_secs),
    };
    let table = compute_table(args.n, TableMode::Exact)?;
    println!("exhaustive search vs table, size {}", args.n);
    println!("{:>4} {:>12} {:>12}   verdict", "d", "search", "table");
    let mut mismatches = 0usize;
    for d in 0..=args.n {
        let found = conditional_e(args.n, d, &limits)?;
        let stored = table.e_exact(args.n, d)?;
        let ok = &found == stored;
        if !ok {
            mismatches += 1;
        }
        println!(
            "{:>4} {:>12} {:>12}   {}",
            d,
            found.to_string(),
            stored.to_string(),
            if ok {
                "match".to_string()
            } else {
                format!("MISMATCH ({})", if &found > stored { "search exceeds table" } else { "table exceeds search" })
            }
        );
    }
    if mismatches == 0 {
        println!("all distances match");
    } else {
        println!(
            "{mismatches} distance(s) deviate: the recursion treats each split's halves \
             as independent subproblems scored by the larger expectation, and that model \
             is not tight for every belief state"
        );
    }
    Ok(())
}

fn cmd_plot(args: &PlotArgs) -> Result<()> {
    if args.n_from > args.n_to && args.table.is_none() {
        // Empty range: header only, no table needed.
        return write_plot(&mut plot_sink(args)?, None, args);
    }
    let table = obtain_table(args.n_to.max(1), args.mode, args.table.as_deref())?;
    write_plot(&mut plot_sink(args)?, Some(&table), args)
}

fn plot_sink(args: &PlotArgs) -> Result<Box<dyn Write>> {
    Ok(match &args.out {
        Some(path) => Box::new(BufWriter::new(
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn write_plot(w: &mut impl Write, table: Option<&ComplexityTable>, args: &PlotArgs) -> Result<()> {
    writeln!(w, "n bbc lower upper ceil")?;
    if args.n_from > args.n_to {
        w.flush()?;
        return Ok(());
    }
    let table = table.expect("non-empty range needs a table");
    if table.n_max() < args.n_to {
        bail!(
            "table covers n <= {}, missing n in [{}, {}]",
            table.n_max(),
            table.n_max() + 1,
            args.n_to
        );
    }
    for n in args.n_from..=args.n_to {
        let log2n = (n as f64).log2();
        writeln!(
            w,
            "{n} {} {} {} {}",
            sig12(table.bbc_f64(n)?),
            sig12(log2n + BBC_LOWER_GAP),
            sig12(log2n + BBC_UPPER_GAP),
            sig12(f64::from(ceil_log2(n) + 2)),
        )?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_selftest() -> Result<()> {
    let mut failed = 0usize;
    let mut check = |name: &str, outcome: Result<()>| match outcome {
        Ok(()) => println!("ok - {name}"),
        Err(e) => {
            failed += 1;
            println!("FAILED - {name}: {e:#}");
        }
    };
    let rat = |p: i64, q: i64| BigRational::new(BigInt::from(p), BigInt::from(q));

    let exact = compute_table(12, TableMode::Exact)?;
    let float = compute_table(12, TableMode::Float64)?;

    check("exact table fixtures", {
        (|| {
            anyhow::ensure!(exact.e_exact(2, 1)? == &rat(3, 2), "E(2,1)");
            anyhow::ensure!(exact.e_exact(4, 2)? == &rat(13, 6), "E(4,2)");
            anyhow::ensure!(exact.bbc_exact(4)? == rat(25, 8), "bbc(4)");
            Ok(())
        })()
    });
    check("float table mirrors the exact one", {
        (|| {
            for n in 1..=12usize {
                for d in 0..=n {
                    let diff = (float.e_f64(n, d)? - exact.e_f64(n, d)?).abs();
                    anyhow::ensure!(diff < 1e-12, "drift {diff:e} at ({n}, {d})");
                }
            }
            Ok(())
        })()
    });
    check("split weights normalize", {
        (|| {
            let mut total = BigRational::zero();
            for t in 0..=5usize {
                total += binval::split_weight(12, 5, 6, t)?.as_ratio();
            }
            anyhow::ensure!(total.is_one(), "sum {total}");
            Ok(())
        })()
    });
    check("tables survive a file round trip", {
        (|| {
            let path = std::env::temp_dir().join(format!("binval-selftest-{}.txt", std::process::id()));
            float.save_to_path(&path)?;
            let back = ComplexityTable::load_from_path(&path)?;
            let _ = fs::remove_file(&path);
            for n in 1..=12usize {
                for d in 0..=n {
                    anyhow::ensure!(
                        back.e_f64(n, d)?.to_bits() == float.e_f64(n, d)?.to_bits(),
                        "bit drift at ({n}, {d})"
                    );
                }
            }
            Ok(())
        })()
    });
    check("exhaustive search agrees at tiny sizes", {
        (|| {
            let limits = OracleLimits::default();
            for n in 1..=2usize {
                for d in 0..=n {
                    let found = conditional_e(n, d, &limits)?;
                    anyhow::ensure!(&found == exact.e_exact(n, d)?, "({n}, {d})");
                }
            }
            Ok(())
        })()
    });
    check("series constants", {
        (|| {
            anyhow::ensure!((tail(0) - LOG_TAIL_TOTAL).abs() < 1e-10, "tail(0)");
            anyhow::ensure!((xi(5)? - XI_FIXED_POINT).abs() < 1e-12, "xi(5)");
            Ok(())
        })()
    });
    check("difference identity", {
        (|| {
            let direct = psi(9, 3, 0.5)? - psi(9, 4, 0.5)?;
            let rearranged = psi_forward_drop(9, 3, 0.5)?;
            anyhow::ensure!((direct - rearranged).abs() < 1e-12, "{direct} vs {rearranged}");
            Ok(())
        })()
    });
    check("solver replay", {
        (|| {
            let mut rng = ChaCha8Rng::seed_from_u64(41);
            let inst = ProblemInstance::random(10, &mut rng);
            let log = solve(&inst, &float, 42)?;
            anyhow::ensure!(replay_check(&log, &inst), "replay rejected the log");
            anyhow::ensure!(log.total() <= 12, "{} queries", log.total());
            Ok(())
        })()
    });
    check("simulator mean at size 4", {
        (|| {
            // Exact lockstep average for size 4 is 3.25 (one opening probe
            // plus 36/16 expected follow-up rounds).
            let stats = monte_carlo(4, 4000, &float, 7)?;
            anyhow::ensure!((stats.mean - 3.25).abs() <= 0.1, "mean {}", stats.mean);
            Ok(())
        })()
    });
    check("distance bijection", {
        (|| {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            for i in 0..500usize {
                let n = 1 + i % 12;
                let inst = ProblemInstance::random(n, &mut rng);
                let x = BitString::random(n, &mut rng);
                let y = BitString::random(n, &mut rng);
                let lhs = inst.evaluate(&x)?.distance(&inst.evaluate(&y)?)?;
                anyhow::ensure!(lhs == hamming(&x, &y)?, "triple {i}");
            }
            Ok(())
        })()
    });

    if failed > 0 {
        bail!("{failed} selftest check(s) failed");
    }
    println!("selftest: 10 checks passed");
    Ok(())
}
