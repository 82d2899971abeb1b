//! Shared exact-arithmetic helpers: binomial coefficients and conversion of
//! large rationals to `f64`.

use num::bigint::Sign;
use num::{BigInt, BigUint, One, Signed, ToPrimitive, Zero};

/// Pascal triangle up to a fixed `n`, kept both exactly and as an `f64`
/// mirror converted entry by entry.
#[derive(Debug, Clone)]
pub(crate) struct BinomialTable {
    n_max: usize,
    big: Vec<BigUint>,
    float: Vec<f64>,
}

fn tri_idx(n: usize, k: usize) -> usize {
    n * (n + 1) / 2 + k
}

impl BinomialTable {
    pub(crate) fn new(n_max: usize) -> Self {
        let mut big = Vec::with_capacity(tri_idx(n_max + 1, 0));
        for n in 0..=n_max {
            for k in 0..=n {
                let v = if k == 0 || k == n {
                    BigUint::one()
                } else {
                    &big[tri_idx(n - 1, k - 1)] + &big[tri_idx(n - 1, k)]
                };
                big.push(v);
            }
        }
        let float = big.iter().map(|v| v.to_f64().unwrap_or(f64::INFINITY)).collect();
        BinomialTable { n_max, big, float }
    }

    /// `C(n, k)` exactly. Panics if `n > n_max` or `k > n`.
    pub(crate) fn c(&self, n: usize, k: usize) -> &BigUint {
        assert!(n <= self.n_max && k <= n, "C({n},{k}) outside table");
        &self.big[tri_idx(n, k)]
    }

    /// `C(n, k)` rounded to `f64`.
    pub(crate) fn cf(&self, n: usize, k: usize) -> f64 {
        assert!(n <= self.n_max && k <= n, "C({n},{k}) outside table");
        self.float[tri_idx(n, k)]
    }
}

/// `C(2^t, 2^(t-1))` for `t >= 1`, built from its prime factorization.
///
/// The exponent of a prime `p` in `C(2m, m)` is the number of indices `j`
/// with `floor(2m/p^j) - 2*floor(m/p^j) == 1`, so each prime contributes a
/// factor of at most `2m`; multiplying the contributions with a product tree
/// keeps the cost quasi-linear in the output size. This reaches `t` in the
/// twenties in well under a second, far beyond what row-by-row Pascal
/// addition can do.
pub(crate) fn central_binomial_pow2(t: u32) -> BigUint {
    assert!((1..=25).contains(&t), "central binomial requested for t = {t}");
    let m: u64 = 1 << (t - 1);
    let two_m = 2 * m;
    let mut factors: Vec<BigUint> = Vec::new();
    for p in primes_up_to(two_m) {
        let mut e = 0u32;
        let mut pj = p;
        loop {
            e += (two_m / pj - 2 * (m / pj)) as u32;
            match pj.checked_mul(p) {
                Some(next) if next <= two_m => pj = next,
                _ => break,
            }
        }
        if e > 0 {
            // p^e <= 2m, so it fits in u64.
            factors.push(BigUint::from(p.pow(e)));
        }
    }
    product_tree(&factors)
}

fn primes_up_to(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if sieve[p] {
            out.push(p as u64);
            let mut q = p * p;
            while q <= n {
                sieve[q] = false;
                q += p;
            }
        }
    }
    out
}

fn product_tree(v: &[BigUint]) -> BigUint {
    match v.len() {
        0 => BigUint::one(),
        1 => v[0].clone(),
        n => product_tree(&v[..n / 2]) * product_tree(&v[n / 2..]),
    }
}

/// `num / den` rounded to `f64`, correct to within about one ulp for
/// arbitrarily large operands. Requires `den > 0`.
///
/// Shifts the numerator so the integer quotient carries 64 significant bits,
/// divides exactly, and lets the final 64-to-53-bit conversion round.
pub(crate) fn big_ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    assert!(den.is_positive(), "denominator must be positive");
    if num.is_zero() {
        return 0.0;
    }
    let negative = num.sign() == Sign::Minus;
    let n = num.magnitude();
    let d = den.magnitude();
    let shift = 64 + d.bits() as i64 - n.bits() as i64;
    let (q, exp) = if shift >= 0 {
        ((n << shift as u64) / d, -shift)
    } else {
        (n / (d << (-shift) as u64), -shift)
    };
    let v = q.to_f64().expect("64-bit quotient") * (exp as f64).exp2();
    if negative {
        -v
    } else {
        v
    }
}
