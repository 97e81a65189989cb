//! Exact Clopper–Pearson intervals.
//!
//! Endpoints live on the grid `a / 2^GRID_BITS` and are rounded outward:
//! the lower endpoint is the largest grid point whose upper binomial tail is
//! at most `α/2`, the upper endpoint the smallest grid point whose lower tail
//! is at most `α/2`. A floating-point search proposes the grid point and the
//! comparison that accepts it is exact integer arithmetic.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::combinatorics::{rat, BigRat};
use crate::error::{Error, Result};

pub const GRID_BITS: u32 = 20;
const GRID: u64 = 1 << GRID_BITS;

/// `Σ_{i in range} binom(n, i) a^i b^{n-i}` with `a + b = 2^GRID_BITS`,
/// i.e. `2^{GRID_BITS·n} · P(X in range)` for `X ~ Bin(n, a / 2^GRID_BITS)`.
fn scaled_tail(n: u64, a: u64, lower: bool, k: u64) -> BigUint {
    let b = GRID - a;
    // lower: i in 0..k ; upper: i in k..=n
    let mut sum = BigUint::zero();
    if lower {
        if k == 0 {
            return sum;
        }
        if b == 0 {
            return sum;
        }
        let mut term = BigUint::from(b).pow(n as u32);
        for i in 0..k {
            sum += &term;
            if i + 1 < k {
                term = term * (n - i) * a / ((i + 1) * b);
            }
        }
    } else {
        if k > n || a == 0 {
            return sum;
        }
        let mut term = BigUint::from(a).pow(n as u32);
        let mut i = n;
        loop {
            sum += &term;
            if i == k {
                break;
            }
            term = term * i * b / ((n - i + 1) * a);
            i -= 1;
        }
    }
    sum
}

/// Whether `P(X in tail) <= alpha / 2` at `p = a / 2^GRID_BITS`.
fn tail_small(n: u64, a: u64, lower: bool, k: u64, alpha: &BigRat) -> bool {
    let tail = BigInt::from(scaled_tail(n, a, lower, k));
    let total = BigInt::from(BigUint::one() << (GRID_BITS as u64 * n));
    // tail / total <= alpha / 2  <=>  2 · tail · den <= num · total
    BigInt::from(2) * tail * alpha.denom() <= alpha.numer() * total
}

fn ln_tail(n: u64, p: f64, lower: bool, k: u64) -> f64 {
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let range: Box<dyn Iterator<Item = u64>> = if lower {
        Box::new(0..k)
    } else {
        Box::new(k..=n)
    };
    let mut ln_binom = 0.0f64;
    let mut terms = Vec::new();
    let mut next = 0u64;
    for i in range {
        while next < i {
            ln_binom += ((n - next) as f64).ln() - ((next + 1) as f64).ln();
            next += 1;
        }
        terms.push(ln_binom + i as f64 * lp + (n - i) as f64 * lq);
    }
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Largest grid point `a` in `lo..=hi` with `ok(a)`, given `ok` monotone
/// decreasing in `a` and `ok(lo)`.
fn last_true(mut lo: u64, hi: u64, guess: u64, ok: impl Fn(u64) -> bool) -> u64 {
    // Gallop outward from the floating-point guess, then bisect.
    let mut g = guess.clamp(lo, hi);
    if ok(g) {
        lo = g;
        let mut step = 1;
        let top = loop {
            let probe = (lo + step).min(hi);
            if probe == lo {
                return lo;
            }
            if !ok(probe) {
                break probe - 1;
            }
            lo = probe;
            if probe == hi {
                return hi;
            }
            step *= 2;
        };
        bisect(lo, top, ok)
    } else {
        let mut step = 1;
        loop {
            let probe = g.saturating_sub(step).max(lo);
            if ok(probe) {
                return bisect(probe, g - 1, ok);
            }
            g = probe;
            step *= 2;
        }
    }
}

fn bisect(mut lo: u64, mut hi: u64, ok: impl Fn(u64) -> bool) -> u64 {
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

fn float_root(n: u64, k: u64, lower: bool, alpha: f64) -> u64 {
    // Root of ln P(tail) = ln(alpha/2) in p, on the grid.
    let target = (alpha / 2.0).ln();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let v = ln_tail(n, mid, lower, k);
        // Upper tail grows with p, lower tail shrinks.
        if (v <= target) != lower {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo * GRID as f64) as u64
}

/// Clopper–Pearson interval for `successes` out of `trials` at confidence
/// `level`, as exact rationals on the `2^-GRID_BITS` grid.
pub fn clopper_pearson(successes: u64, trials: u64, level: &BigRat) -> Result<(BigRat, BigRat)> {
    if trials == 0 || successes > trials {
        return Err(Error::invalid(format!(
            "need 0 <= successes <= trials, trials >= 1; got {successes}/{trials}"
        )));
    }
    if !level.is_positive() || *level >= BigRat::one() {
        return Err(Error::invalid(format!(
            "confidence level {level} outside (0, 1)"
        )));
    }
    let alpha = BigRat::one() - level;
    let alpha_f = alpha.to_f64().unwrap_or(0.0);
    let grid = |a: u64| rat(a as i64, GRID as i64);
    let lower = if successes == 0 {
        BigRat::zero()
    } else {
        let ok = |a: u64| tail_small(trials, a, false, successes, &alpha);
        let guess = float_root(trials, successes, false, alpha_f);
        grid(last_true(0, GRID - 1, guess, ok))
    };
    let upper = if successes == trials {
        BigRat::one()
    } else {
        // Smallest a with P(X <= k) small, searched as the largest c = GRID - a.
        let ok = |c: u64| tail_small(trials, GRID - c, true, successes + 1, &alpha);
        let guess = GRID - float_root(trials, successes + 1, true, alpha_f).min(GRID);
        let c = last_true(0, GRID - 1, guess, ok);
        grid(GRID - c)
    };
    Ok((lower, upper))
}
