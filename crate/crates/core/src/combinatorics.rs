//! Exact integer and rational combinatorics.
//!
//! Everything here is arbitrary precision. Densities and bounds elsewhere in
//! the crate are built from these pieces, so nothing in this module rounds.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision non-negative integer.
pub type BigNat = BigUint;
/// Exact rational in lowest terms with a positive denominator.
pub type BigRat = BigRational;

pub fn nat(v: u64) -> BigNat {
    BigNat::from(v)
}

pub fn rat(num: i64, den: i64) -> BigRat {
    BigRat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_from_nat(v: &BigNat) -> BigRat {
    BigRat::from_integer(BigInt::from(v.clone()))
}

/// `base^exp` for a signed exponent.
pub fn rat_pow(base: &BigNat, exp: i64) -> BigRat {
    let mag = base.pow(exp.unsigned_abs() as u32);
    if exp >= 0 {
        rat_from_nat(&mag)
    } else {
        BigRat::new(BigInt::one(), BigInt::from(mag))
    }
}

/// `base^exp` where the exponent is an exact rational that must be integral.
pub fn rat_pow_rat(base: &BigNat, exp: &BigRat) -> BigRat {
    assert!(exp.is_integer(), "non-integral exponent {exp}");
    let e = exp.to_integer().to_i64().expect("exponent out of range");
    rat_pow(base, e)
}

/// Ceiling of `a / b` for naturals, `b > 0`.
pub fn ceil_div(a: &BigNat, b: &BigNat) -> BigNat {
    let (quo, rem) = a.div_rem(b);
    if rem.is_zero() {
        quo
    } else {
        quo + 1u32
    }
}

/// Clamp a rational into `[0, 1]`.
pub fn clamp_unit(x: &BigRat) -> BigRat {
    if x.is_negative() {
        BigRat::zero()
    } else if *x > BigRat::one() {
        BigRat::one()
    } else {
        x.clone()
    }
}

/// Parse `"p/q"`, an integer, or a plain decimal such as `"0.99"` into an
/// exact rational.
pub fn parse_rat(s: &str) -> Result<BigRat> {
    let s = s.trim();
    let bad = || Error::invalid(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRat::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    let den = BigInt::from(10u32).pow(frac_part.len() as u32);
    let value = BigRat::new(num, den);
    Ok(if neg { -value } else { value })
}

/// Standard binomial coefficient; zero outside `0 <= k <= n`.
pub fn binom(n: u64, k: i64) -> BigNat {
    if k < 0 || k as u64 > n {
        return BigNat::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigNat::one();
    for i in 0..k {
        acc *= n - i;
        let (quo, rem) = acc.div_rem(&BigNat::from(i + 1));
        debug_assert!(rem.is_zero());
        acc = quo;
    }
    acc
}

/// Binomial coefficient with a big top argument. The smaller of `k` and
/// `n - k` must stay below `limit` multiplications.
pub fn binom_big(n: &BigNat, k: &BigNat, limit: u64) -> Result<BigNat> {
    if k > n {
        return Ok(BigNat::zero());
    }
    let other = n - k;
    let small = if *k < other { k.clone() } else { other };
    let steps = small
        .to_u64()
        .filter(|&s| s <= limit)
        .ok_or_else(|| Error::SizeLimit {
            what: "binomial coefficient factors".into(),
            count: small.clone(),
            guard: limit,
        })?;
    let mut acc = BigNat::one();
    for i in 0..steps {
        acc *= n - i;
        acc /= i + 1;
    }
    Ok(acc)
}

/// Gaussian binomial coefficient `[a choose b]_base`, the number of
/// `b`-dimensional subspaces of a space of dimension `a` over a field with
/// `base` elements. Zero when `b < 0` or `b > a`.
///
/// # Panics
///
/// Panics if an intermediate division leaves a remainder, which would mean
/// the running product is no longer a q-binomial.
pub fn qbinom(a: i64, b: i64, base: &BigNat) -> Result<BigNat> {
    if *base < nat(2) {
        return Err(Error::invalid(format!(
            "q-binomial base must be >= 2, got {base}"
        )));
    }
    if b < 0 || a < 0 || b > a {
        return Ok(BigNat::zero());
    }
    let b = b.min(a - b);
    let offset = (a - b) as u32;
    // After step j the accumulator equals [a - b + j choose j]_base.
    let mut acc = BigNat::one();
    for j in 1..=b as u32 {
        acc *= base.pow(offset + j) - 1u32;
        let den = base.pow(j) - 1u32;
        let (quo, rem) = acc.div_rem(&den);
        assert!(
            rem.is_zero(),
            "inexact q-binomial step [{a} {b}]_{base} at j={j}"
        );
        acc = quo;
    }
    Ok(acc)
}

/// `∏_{j=0}^{count-1} (base^top - base^j)`: the number of ordered
/// linearly independent `count`-tuples in a space of dimension `top`.
pub fn falling_qproduct(base: &BigNat, top: u32, count: u32) -> BigNat {
    let full = base.pow(top);
    (0..count).fold(BigNat::one(), |acc, j| {
        let p = base.pow(j);
        if p > full {
            BigNat::zero()
        } else {
            acc * (&full - p)
        }
    })
}

/// A closed interval `[lo, hi]` of rationals known to contain some real.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: BigRat,
    pub hi: BigRat,
}

impl Enclosure {
    pub fn new(lo: BigRat, hi: BigRat) -> Self {
        assert!(lo <= hi, "empty enclosure");
        Enclosure { lo, hi }
    }

    pub fn width(&self) -> BigRat {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRat) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    /// `[lo - eps, hi + eps]`.
    pub fn widen(&self, eps: &BigRat) -> Enclosure {
        Enclosure::new(&self.lo - eps, &self.hi + eps)
    }

    pub fn contains_enclosure(&self, inner: &Enclosure) -> bool {
        self.lo <= inner.lo && inner.hi <= self.hi
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Enclosure of `π(q) = ∏_{i>=1} q^i / (q^i - 1)` of width at most `width`.
///
/// The product is truncated after `N` factors. Every omitted factor is
/// `1/(1 - q^{-i}) <= exp(2 q^{-i})`, so the tail lies in `[1, exp(x)]` with
/// `x = 4 q^{-N-1}`, and `exp(x) <= 1/(1 - x)` for `0 <= x < 1`.
pub fn euler_pi(q: &BigNat, width: &BigRat) -> Result<Enclosure> {
    if *q < nat(2) {
        return Err(Error::invalid(format!("π(q) needs q >= 2, got {q}")));
    }
    if !width.is_positive() {
        return Err(Error::invalid("enclosure width must be positive"));
    }
    let qr = rat_from_nat(q);
    let mut partial = BigRat::one();
    let mut q_pow = BigRat::one();
    let half = rat(1, 2);
    loop {
        q_pow *= &qr;
        partial *= &q_pow / (&q_pow - BigRat::one());
        // x = 4 q^{-N-1}
        let x = rat(4, 1) / (&q_pow * &qr);
        if x > half {
            continue;
        }
        let hi = &partial / (BigRat::one() - &x);
        if &hi - &partial <= *width {
            return Ok(Enclosure::new(partial, hi));
        }
    }
}

/// A weak composition of `r` into exactly `t` parts, each at most `cap`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    pub parts: Vec<u32>,
    pub cap: u32,
}

impl Composition {
    pub fn total(&self) -> u64 {
        self.parts.iter().map(|&p| p as u64).sum()
    }
}

/// Lazily enumerates `{u in N_0^t : sum u = r, u_i <= cap}` in lexicographic
/// order. Memory stays `O(t)`.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Option<Vec<u32>>,
    cap: u32,
}

/// Stream of the bounded compositions of `r` into `t` parts.
pub fn compositions(r: u32, t: u32, cap: u32) -> Compositions {
    assert!(t >= 1, "compositions need at least one part");
    let mut parts = vec![0u32; t as usize];
    let current = if (r as u64) > (t as u64) * (cap as u64) {
        None
    } else {
        fill_smallest(&mut parts, r, cap);
        Some(parts)
    };
    Compositions { current, cap }
}

/// Lexicographically smallest filling of `parts` with the given sum: the mass
/// is pushed as far right as the cap allows.
fn fill_smallest(parts: &mut [u32], mut sum: u32, cap: u32) {
    for slot in parts.iter_mut().rev() {
        let take = sum.min(cap);
        *slot = take;
        sum -= take;
    }
    debug_assert_eq!(sum, 0);
}

impl Iterator for Compositions {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        let parts = self.current.take()?;
        let out = Composition {
            parts: parts.clone(),
            cap: self.cap,
        };
        let mut next = parts;
        // Find the rightmost slot that can grow while something remains to
        // its right to borrow from.
        let mut suffix: u32 = 0;
        let mut advanced = false;
        for i in (0..next.len()).rev() {
            if suffix > 0 && next[i] < self.cap {
                next[i] += 1;
                fill_smallest(&mut next[i + 1..], suffix - 1, self.cap);
                advanced = true;
                break;
            }
            suffix += next[i];
        }
        if advanced {
            self.current = Some(next);
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Counts subspaces by summing `base^(free entries)` over RREF pivot
    /// profiles, independent of the product formula.
    fn rref_count(a: u32, b: u32, base: u64) -> u64 {
        let mut total = 0u64;
        for mask in 0u32..(1 << a) {
            if mask.count_ones() != b {
                continue;
            }
            let pivots: Vec<u32> = (0..a).filter(|i| mask & (1 << i) != 0).collect();
            let free: u32 = pivots
                .iter()
                .enumerate()
                .map(|(row, &p)| (a - 1 - p) - (b - 1 - row as u32))
                .sum();
            total += base.pow(free);
        }
        total
    }

    fn pascal(n: usize, k: usize) -> u64 {
        let mut row = vec![1u64];
        for _ in 0..n {
            let mut next = vec![1u64; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            row = next;
        }
        row[k]
    }

    #[test]
    fn qbinom_examples() {
        assert_eq!(qbinom(4, 2, &nat(2)).unwrap(), nat(35));
        assert_eq!(rref_count(4, 2, 2), 35);
        assert_eq!(qbinom(3, 1, &nat(2)).unwrap(), nat(7));
        assert_eq!(qbinom(2, -1, &nat(3)).unwrap(), nat(0));
        assert_eq!(qbinom(2, 3, &nat(3)).unwrap(), nat(0));
        for a in 0..6 {
            assert_eq!(qbinom(a, 0, &nat(5)).unwrap(), nat(1));
        }
    }

    #[test]
    fn one_dimensional_binary_subspaces() {
        // Nonzero vectors of F_2^3, each spans its own line.
        let lines = (1u32..8).count() as u64;
        assert_eq!(qbinom(3, 1, &nat(2)).unwrap(), nat(lines));
    }

    #[test]
    fn qbinom_matches_rref_profiles() {
        for base in [2u64, 3, 4, 5] {
            for a in 0..7u32 {
                for b in 0..=a {
                    assert_eq!(
                        qbinom(a as i64, b as i64, &nat(base)).unwrap(),
                        nat(rref_count(a, b, base)),
                        "[{a} {b}]_{base}"
                    );
                }
            }
        }
    }

    #[test]
    fn qbinom_rejects_small_base() {
        assert!(matches!(
            qbinom(3, 1, &nat(1)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn binom_examples() {
        assert_eq!(binom(4, 1), nat(4));
        assert_eq!(binom(7, 7), nat(1));
        assert_eq!(binom(10, 5), nat(pascal(10, 5)));
        assert_eq!(binom(10, 5), nat(252));
        assert_eq!(binom(3, -1), nat(0));
        assert_eq!(binom(3, 4), nat(0));
        for n in 0..30 {
            for k in 0..=n {
                assert_eq!(binom(n as u64, k as i64), nat(pascal(n, k)));
            }
        }
    }

    #[test]
    fn binom_big_agrees() {
        assert_eq!(binom_big(&nat(40), &nat(17), 100).unwrap(), binom(40, 17));
        assert_eq!(binom_big(&nat(4), &nat(9), 100).unwrap(), nat(0));
        assert!(binom_big(&nat(1 << 40), &nat(1 << 20), 1000).is_err());
    }

    #[test]
    fn euler_pi_two() {
        let enc = euler_pi(&nat(2), &rat(1, 1000)).unwrap();
        assert!(enc.width() <= rat(1, 1000));
        assert!(enc.contains(&parse_rat("3.4627").unwrap()));
        // Float oracle: 1 / prod (1 - 2^-i), 60 factors.
        let approx: f64 = 1.0 / (1..=60).map(|i| 1.0 - 0.5f64.powi(i)).product::<f64>();
        assert!((approx - 3.462746619).abs() < 1e-8);
        assert!(enc.lo.to_f64().unwrap() <= approx + 1e-12);
        assert!(enc.hi.to_f64().unwrap() >= approx - 1e-12);
    }

    #[test]
    fn euler_pi_properties() {
        for q in [2u64, 3, 5, 7, 101] {
            let enc = euler_pi(&nat(q), &rat(1, 10_000)).unwrap();
            assert!(enc.lo > BigRat::one());
            let tighter = euler_pi(&nat(q), &rat(1, 10_000_000)).unwrap();
            assert!(enc.contains_enclosure(&tighter), "nesting fails at q={q}");
        }
        let big = euler_pi(&nat(101), &rat(1, 1000)).unwrap();
        assert!(big.hi < rat(102, 100));
        let mut prev_hi = None;
        for q in [2u64, 3, 5, 11, 31, 101] {
            let enc = euler_pi(&nat(q), &rat(1, 1000)).unwrap();
            if let Some(p) = prev_hi {
                assert!(enc.hi < p);
            }
            prev_hi = Some(enc.hi);
        }
        assert!(euler_pi(&nat(2), &BigRat::zero()).is_err());
        assert!(euler_pi(&nat(1), &rat(1, 2)).is_err());
    }

    #[test]
    fn qbinom_approaches_pi_enclosure() {
        // [2n choose n]_q / q^{n^2} -> π(q) with n = 12.
        for q in [2u64, 3, 5] {
            let base = nat(q);
            let value =
                rat_from_nat(&qbinom(24, 12, &base).unwrap()) / rat_from_nat(&base.pow(144));
            let enc = euler_pi(&base, &rat(1, 1_000_000))
                .unwrap()
                .widen(&rat(1, 100));
            assert!(enc.contains(&value), "q={q}");
        }
    }

    #[test]
    fn composition_examples() {
        let got: Vec<Vec<u32>> = compositions(2, 2, 1).map(|c| c.parts).collect();
        assert_eq!(got, vec![vec![1, 1]]);
        let got: Vec<Vec<u32>> = compositions(1, 2, 2).map(|c| c.parts).collect();
        assert_eq!(got, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(compositions(3, 3, 2).count(), 7);
        assert_eq!(compositions(7, 3, 2).count(), 0);
        assert_eq!(compositions(0, 4, 0).count(), 1);
    }

    #[test]
    fn composition_brute_force() {
        for t in 1..=4u32 {
            for cap in 0..=3u32 {
                let mut by_sum = vec![Vec::new(); (t * cap + 1) as usize];
                let size = (cap + 1).pow(t);
                for code in 0..size {
                    let mut parts = Vec::new();
                    let mut c = code;
                    for _ in 0..t {
                        parts.push(c % (cap + 1));
                        c /= cap + 1;
                    }
                    parts.reverse();
                    let s: u32 = parts.iter().sum();
                    by_sum[s as usize].push(parts);
                }
                let mut total = 0;
                for (r, expected) in by_sum.iter_mut().enumerate() {
                    expected.sort();
                    let got: Vec<Vec<u32>> =
                        compositions(r as u32, t, cap).map(|c| c.parts).collect();
                    assert_eq!(&got, expected, "r={r} t={t} cap={cap}");
                    total += got.len();
                }
                assert_eq!(total as u32, size);
            }
        }
    }

    #[test]
    fn parse_rat_forms() {
        assert_eq!(parse_rat("0.99").unwrap(), rat(99, 100));
        assert_eq!(parse_rat("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rat("-2").unwrap(), rat(-2, 1));
        assert_eq!(parse_rat(".5").unwrap(), rat(1, 2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("abc").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn qbinom_symmetry(a in 0i64..12, b in 0i64..12, q in 2u64..9) {
                prop_assume!(b <= a);
                let base = nat(q);
                prop_assert_eq!(qbinom(a, b, &base).unwrap(), qbinom(a, a - b, &base).unwrap());
            }

            #[test]
            fn qbinom_pascal(a in 1i64..12, b in 1i64..12, q in 2u64..9) {
                prop_assume!(b <= a);
                let base = nat(q);
                let lhs = qbinom(a, b, &base).unwrap();
                let rhs = qbinom(a - 1, b - 1, &base).unwrap()
                    + base.pow(b as u32) * qbinom(a - 1, b, &base).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
