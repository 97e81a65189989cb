//! Hamming, rank and sum-rank metrics on `F_{q^m}^n`: weights, minimum
//! distances, exact ball volumes and their leading-order growth.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::combinatorics::{
    binom, compositions, falling_qproduct, nat, qbinom, rat, rat_from_nat, BigNat, BigRat,
};
use crate::config::Guards;
use crate::error::{Error, Result};
use crate::field::{is_prime, prime_power, Codeword, FieldTower, SubspaceBasis};
use crate::linalg::{self, FieldOps, PrimeField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Hamming,
    Rank,
    /// `t` blocks of `η = n / t` coordinates each.
    SumRank {
        t: usize,
    },
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Hamming => "hamming",
            Metric::Rank => "rank",
            Metric::SumRank { .. } => "sumrank",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::SumRank { t } => write!(f, "sumrank(t={t})"),
            other => f.write_str(other.name()),
        }
    }
}

/// The parameter that tends to infinity in an asymptotic statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Growing {
    Q,
    N,
    Ell,
    S,
}

impl Growing {
    pub const ALL: [Growing; 4] = [Growing::Q, Growing::N, Growing::Ell, Growing::S];

    pub fn name(&self) -> &'static str {
        match self {
            Growing::Q => "q",
            Growing::N => "n",
            Growing::Ell => "ell",
            Growing::S => "s",
        }
    }
}

impl fmt::Display for Growing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Growing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q" => Ok(Growing::Q),
            "n" => Ok(Growing::N),
            "ell" | "l" => Ok(Growing::Ell),
            "s" => Ok(Growing::S),
            other => Err(Error::invalid(format!(
                "unknown growing parameter {other:?} (expected q, n, ell or s)"
            ))),
        }
    }
}

/// `F_{q^m}^n` with `m = ℓ s` and one of the three metrics.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AmbientSpace {
    pub q: u64,
    pub ell: usize,
    pub s: usize,
    pub n: usize,
    pub metric: Metric,
}

impl AmbientSpace {
    pub fn new(q: u64, ell: usize, s: usize, n: usize, metric: Metric) -> Result<Self> {
        if prime_power(q).is_none() {
            return Err(Error::invalid(format!("q = {q} is not a prime power")));
        }
        if ell == 0 || s == 0 || n == 0 {
            return Err(Error::invalid("ℓ, s and n must be positive"));
        }
        if let Metric::SumRank { t } = metric {
            if t == 0 || !n.is_multiple_of(t) {
                return Err(Error::invalid(format!(
                    "t = {t} must be positive and divide n = {n}"
                )));
            }
        }
        Ok(AmbientSpace {
            q,
            ell,
            s,
            n,
            metric,
        })
    }

    pub fn hamming(q: u64, ell: usize, s: usize, n: usize) -> Result<Self> {
        Self::new(q, ell, s, n, Metric::Hamming)
    }

    pub fn rank(q: u64, ell: usize, s: usize, n: usize) -> Result<Self> {
        Self::new(q, ell, s, n, Metric::Rank)
    }

    pub fn sum_rank(q: u64, ell: usize, s: usize, n: usize, t: usize) -> Result<Self> {
        Self::new(q, ell, s, n, Metric::SumRank { t })
    }

    pub fn m(&self) -> usize {
        self.ell * self.s
    }

    /// Number of blocks; 1 for rank, `n` for Hamming.
    pub fn t(&self) -> usize {
        match self.metric {
            Metric::Hamming => self.n,
            Metric::Rank => 1,
            Metric::SumRank { t } => t,
        }
    }

    /// Block length `n / t`.
    pub fn eta(&self) -> usize {
        self.n / self.t()
    }

    pub fn diameter(&self) -> usize {
        match self.metric {
            Metric::Hamming => self.n,
            Metric::Rank => self.n.min(self.m()),
            Metric::SumRank { t } => t * self.m().min(self.eta()),
        }
    }

    pub fn q_nat(&self) -> BigNat {
        nat(self.q)
    }

    /// `q^{mn}`.
    pub fn size(&self) -> BigNat {
        self.q_nat().pow((self.m() * self.n) as u32)
    }

    /// `q^{mn}` when it fits the space guard.
    pub fn size_within(&self, guard: u64) -> Result<u64> {
        let size = self.size();
        u64::try_from(&size)
            .ok()
            .filter(|&s| s <= guard)
            .ok_or(Error::SizeLimit {
                what: format!("vectors in F_{}^{}", self.q, self.m() * self.n),
                count: size,
                guard,
            })
    }

    /// The prime `q`, or an error if `q` is a proper prime power.
    pub fn prime(&self) -> Result<u32> {
        if is_prime(self.q) && self.q < 1 << 32 {
            Ok(self.q as u32)
        } else {
            Err(Error::invalid(format!(
                "q = {} must be a prime for explicit vectors and sampling",
                self.q
            )))
        }
    }

    pub fn tower(&self) -> Result<FieldTower> {
        FieldTower::build(self.prime()? as u64, self.ell, self.s)
    }

    /// The same space with another metric.
    pub fn with_metric(&self, metric: Metric) -> Result<Self> {
        Self::new(self.q, self.ell, self.s, self.n, metric)
    }

    fn block_weight(&self, block: &[Vec<u32>]) -> usize {
        match self.metric {
            Metric::Hamming => block.iter().filter(|c| c.iter().any(|&d| d != 0)).count(),
            Metric::Rank | Metric::SumRank { .. } => {
                let f = PrimeField::new(self.q as u32);
                linalg::rank(&f, block)
            }
        }
    }

    /// Weight of a vector given as `n` columns of `m` base-`q` digits.
    fn weight_of_columns(&self, cols: &[Vec<u32>]) -> usize {
        match self.metric {
            Metric::Hamming => self.block_weight(cols),
            _ => cols.chunks(self.eta()).map(|b| self.block_weight(b)).sum(),
        }
    }

    /// Hamming: nonzero coordinates. Rank: `F_q`-rank of the expansion.
    /// Sum-rank: sum of block ranks.
    ///
    /// # Panics
    ///
    /// Panics if `q` is not prime.
    pub fn weight(&self, x: &Codeword) -> usize {
        let p = self.prime().expect("weights need a prime q") as u64;
        let m = self.m();
        let cols: Vec<Vec<u32>> = x
            .coords
            .iter()
            .map(|&c| {
                let mut c = c;
                (0..m)
                    .map(|_| {
                        let d = (c % p) as u32;
                        c /= p;
                        d
                    })
                    .collect()
            })
            .collect();
        self.weight_of_columns(&cols)
    }

    /// Weight of the vector with packed index `idx` (see [`FieldTower::pack`]).
    pub fn weight_of_index(&self, idx: u64) -> usize {
        let p = self.q;
        let m = self.m();
        let mut rest = idx;
        let cols: Vec<Vec<u32>> = (0..self.n)
            .map(|_| {
                (0..m)
                    .map(|_| {
                        let d = (rest % p) as u32;
                        rest /= p;
                        d
                    })
                    .collect()
            })
            .collect();
        self.weight_of_columns(&cols)
    }

    pub fn distance(&self, x: &Codeword, y: &Codeword) -> usize {
        let p = self.prime().expect("distances need a prime q") as u64;
        let diff = Codeword::new(
            x.coords
                .iter()
                .zip(&y.coords)
                .map(|(&a, &b)| digit_sub(a, b, p, self.m()))
                .collect(),
        );
        self.weight(&diff)
    }

    /// Weights of all `q^{mn}` vectors by packed index.
    pub fn weight_table(&self, guards: &Guards) -> Result<Vec<u8>> {
        self.prime()?;
        let size = self.size_within(guards.space)?;
        Ok((0..size).map(|i| self.weight_of_index(i) as u8).collect())
    }
}

fn digit_sub(mut a: u64, mut b: u64, p: u64, len: usize) -> u64 {
    if p == 2 {
        return a ^ b;
    }
    let mut out = 0u64;
    let mut scale = 1u64;
    for _ in 0..len {
        let d = (a % p + p - b % p) % p;
        out += d * scale;
        scale *= p;
        a /= p;
        b /= p;
    }
    out
}

/// Digit-wise arithmetic on packed indices of `F_p^{len}`.
#[derive(Debug, Clone, Copy)]
pub struct PackedVectors {
    pub p: u64,
    pub len: usize,
}

impl PackedVectors {
    pub fn for_space(space: &AmbientSpace) -> Result<Self> {
        Ok(PackedVectors {
            p: space.prime()? as u64,
            len: space.m() * space.n,
        })
    }

    pub fn add(&self, mut a: u64, mut b: u64) -> u64 {
        if self.p == 2 {
            return a ^ b;
        }
        let p = self.p;
        let mut out = 0u64;
        let mut scale = 1u64;
        while a > 0 || b > 0 {
            out += ((a % p + b % p) % p) * scale;
            scale *= p;
            a /= p;
            b /= p;
        }
        out
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        digit_sub(a, b, self.p, self.len)
    }
}

/// A code handed to [`min_distance`].
#[derive(Debug, Clone, Copy)]
pub enum CodeRef<'a> {
    Set(&'a [Codeword]),
    /// An `F_{q^ℓ}`-linear code given by a basis of its flattened form.
    Linear {
        basis: &'a SubspaceBasis,
        tower: &'a FieldTower,
    },
}

/// Every vector of `F_Q^k` whose first nonzero entry is 1.
pub fn projective_points(k: usize, order: u64) -> Vec<Vec<u32>> {
    let q = order as u32;
    let mut out = Vec::new();
    for lead in 0..k {
        let tail = k - lead - 1;
        let count = order.pow(tail as u32);
        for mut code in 0..count {
            let mut v = vec![0u32; k];
            v[lead] = 1;
            for slot in v.iter_mut().skip(lead + 1) {
                *slot = (code % q as u64) as u32;
                code /= q as u64;
            }
            out.push(v);
        }
    }
    out
}

/// Minimum distance of a code with at least two codewords.
pub fn min_distance(space: &AmbientSpace, code: CodeRef<'_>) -> Result<usize> {
    match code {
        CodeRef::Set(words) => {
            if words.len() < 2 {
                return Err(Error::invalid(
                    "minimum distance needs at least two codewords",
                ));
            }
            let mut best = usize::MAX;
            for (i, x) in words.iter().enumerate() {
                for y in &words[i + 1..] {
                    best = best.min(space.distance(x, y));
                }
            }
            Ok(best)
        }
        CodeRef::Linear { basis, tower } => {
            if basis.dim() == 0 {
                return Err(Error::invalid("minimum distance needs a nonzero code"));
            }
            let f = tower.subfield();
            let best = projective_points(basis.dim(), f.order())
                .iter()
                .map(|c| space.weight(&tower.unflatten(&basis.combine(f, c))))
                .min()
                .unwrap_or(usize::MAX);
            Ok(best)
        }
    }
}

/// Per-block term `[η, u]_q ∏_{j<u} (q^m - q^j)`: vectors of one block with
/// rank exactly `u`.
fn rank_shell(q: &BigNat, m: usize, cols: usize, u: usize) -> BigNat {
    qbinom(cols as i64, u as i64, q).expect("q >= 2") * falling_qproduct(q, m as u32, u as u32)
}

/// Number of vectors within distance `r` of the origin. Radii beyond the
/// diameter give `q^{mn}`.
pub fn ball_volume(space: &AmbientSpace, r: usize) -> BigNat {
    let r = r.min(space.diameter());
    let q = space.q_nat();
    let m = space.m();
    match space.metric {
        Metric::Hamming => {
            let unit = q.pow(m as u32) - 1u32;
            (0..=r)
                .map(|i| binom(space.n as u64, i as i64) * unit.pow(i as u32))
                .sum()
        }
        Metric::Rank => (0..=r).map(|i| rank_shell(&q, m, space.n, i)).sum(),
        Metric::SumRank { t } => {
            let eta = space.eta();
            let cap = m.min(eta);
            let shells: Vec<BigNat> = (0..=cap).map(|u| rank_shell(&q, m, eta, u)).collect();
            let mut total = BigNat::zero();
            for h in 0..=r {
                for comp in compositions(h as u32, t as u32, cap as u32) {
                    total += comp
                        .parts
                        .iter()
                        .fold(BigNat::one(), |acc, &u| acc * &shells[u as usize]);
                }
            }
            total
        }
    }
}

/// Ball volume by walking every vector of the space.
pub fn ball_volume_oracle(space: &AmbientSpace, r: usize, guards: &Guards) -> Result<BigNat> {
    let table = space.weight_table(guards)?;
    Ok(nat(
        table.iter().filter(|&&w| w as usize <= r).count() as u64
    ))
}

/// `value ∼ coefficient · X^{poly_degree} · q^{slope·X + intercept}` as the
/// growing parameter `X` tends to infinity. When `q` itself grows the slope
/// is zero and the power of `q` is the intercept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthProfile {
    pub growing: Growing,
    pub coefficient: BigRat,
    pub poly_degree: u32,
    pub slope: BigRat,
    pub intercept: BigRat,
}

impl GrowthProfile {
    /// Exponent of `q` at a value of the growing parameter.
    pub fn exponent_at(&self, x: i64) -> BigRat {
        &self.slope * rat(x, 1) + &self.intercept
    }

    /// The power of `q` when `q` grows.
    pub fn exponent(&self) -> BigRat {
        self.intercept.clone()
    }
}

/// Leading term of `ball_volume(space, r)` as one parameter of `space`
/// grows with the others fixed.
pub fn volume_growth(space: &AmbientSpace, r: usize, growing: Growing) -> Result<GrowthProfile> {
    let q = space.q_nat();
    let (m, n, ell, s) = (space.m(), space.n, space.ell, space.s);
    let profile =
        |coefficient: BigRat, poly_degree: u32, slope: BigRat, intercept: BigRat| GrowthProfile {
            growing,
            coefficient,
            poly_degree,
            slope,
            intercept,
        };
    let int = |v: usize| rat(v as i64, 1);
    match (space.metric, growing) {
        (Metric::Hamming, g) => {
            let r = r.min(n);
            Ok(match g {
                Growing::Q => profile(rat_from_nat(&binom(n as u64, r as i64)), 0, BigRat::zero(), int(r * m)),
                Growing::Ell => profile(rat_from_nat(&binom(n as u64, r as i64)), 0, int(r * s), BigRat::zero()),
                Growing::S => profile(rat_from_nat(&binom(n as u64, r as i64)), 0, int(r * ell), BigRat::zero()),
                Growing::N => {
                    // binom(n, r) (q^m - 1)^r with r fixed and n growing.
                    let unit = q.pow(m as u32) - 1u32;
                    let fact: BigNat = (1..=r as u64).map(nat).product();
                    let coefficient = rat_from_nat(&unit.pow(r as u32)) / rat_from_nat(&fact);
                    profile(coefficient, r as u32, BigRat::zero(), BigRat::zero())
                }
            })
        }
        (Metric::Rank, g) => Ok(match g {
            Growing::Q => {
                let r = r.min(n.min(m));
                profile(BigRat::one(), 0, BigRat::zero(), int(r * (m + n - r)))
            }
            Growing::Ell | Growing::S => {
                let r = r.min(n);
                let coefficient = rat_from_nat(&qbinom(n as i64, r as i64, &q)?);
                let slope = if g == Growing::Ell { int(r * s) } else { int(r * ell) };
                profile(coefficient, 0, slope, BigRat::zero())
            }
            Growing::N => {
                let r = r.min(m);
                let coefficient = rat_from_nat(&qbinom(m as i64, r as i64, &q)?);
                profile(coefficient, 0, int(r), BigRat::zero())
            }
        }),
        (Metric::SumRank { t }, Growing::Q) => {
            let r = r.min(space.diameter());
            let eta = space.eta();
            let z = r % t;
            let exponent = int(r * (m + eta)) - rat((r * r - z * z) as i64, t as i64) - int(z);
            Ok(profile(
                rat_from_nat(&binom(t as u64, z as i64)),
                0,
                BigRat::zero(),
                exponent,
            ))
        }
        (Metric::SumRank { .. }, g) => Err(Error::NotImplemented(format!(
            "sum-rank growth profile for growing {g}; supported pairs: hamming/{{q,n,ell,s}}, rank/{{q,n,ell,s}}, sumrank/q"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sp(q: u64, ell: usize, s: usize, n: usize, metric: Metric) -> AmbientSpace {
        AmbientSpace::new(q, ell, s, n, metric).unwrap()
    }

    #[test]
    fn validation() {
        assert!(AmbientSpace::hamming(6, 1, 1, 2).is_err());
        assert!(AmbientSpace::sum_rank(2, 1, 1, 5, 2).is_err());
        assert!(AmbientSpace::rank(4, 1, 2, 2).is_ok());
        assert!(AmbientSpace::rank(4, 1, 2, 2).unwrap().prime().is_err());
    }

    #[test]
    fn weight_examples() {
        let g = 2u64; // x, a generator of F_4^*
        let h = sp(2, 1, 2, 3, Metric::Hamming);
        assert_eq!(h.weight(&Codeword::new(vec![0, 1, g])), 2);
        assert_eq!(h.weight(&Codeword::zero(3)), 0);
        let r = sp(2, 1, 2, 2, Metric::Rank);
        assert_eq!(r.weight(&Codeword::new(vec![1, g])), 2);
        assert_eq!(r.weight(&Codeword::new(vec![g, g])), 1);
        assert_eq!(r.weight(&Codeword::zero(2)), 0);
        let sr = sp(2, 1, 2, 2, Metric::SumRank { t: 2 });
        let ham = sp(2, 1, 2, 2, Metric::Hamming);
        for idx in 0..16 {
            assert_eq!(sr.weight_of_index(idx), ham.weight_of_index(idx));
        }
    }

    #[test]
    fn min_distance_examples() {
        let h = sp(2, 1, 2, 2, Metric::Hamming);
        let t = h.tower().unwrap();
        let v = Codeword::new(vec![3, 0]);
        assert_eq!(
            min_distance(&h, CodeRef::Set(&[Codeword::zero(2), v.clone()])).unwrap(),
            h.weight(&v)
        );
        // F_2-span of the flattening of (1, 1).
        let f = t.subfield();
        let basis = SubspaceBasis::from_rows(f, vec![t.flatten(&Codeword::new(vec![1, 1]))], 4);
        assert_eq!(
            min_distance(
                &h,
                CodeRef::Linear {
                    basis: &basis,
                    tower: &t
                }
            )
            .unwrap(),
            2
        );
        let all: Vec<Codeword> = (0..16).map(|i| t.unpack(i, 2)).collect();
        for metric in [Metric::Hamming, Metric::Rank, Metric::SumRank { t: 2 }] {
            let s = h.with_metric(metric).unwrap();
            assert_eq!(min_distance(&s, CodeRef::Set(&all)).unwrap(), 1);
        }
        assert!(min_distance(&h, CodeRef::Set(&all[..1])).is_err());
    }

    #[test]
    fn linear_min_distance_matches_pairwise() {
        // Projective representatives against all pairs of the expanded code.
        let space = sp(2, 1, 2, 2, Metric::Rank);
        let t = space.tower().unwrap();
        let f = t.subfield();
        for basis in crate::field::Subspaces::new(2, 4, 2) {
            let words: Vec<Codeword> = (0..4u32)
                .map(|c| t.unflatten(&basis.combine(f, &[c & 1, c >> 1])))
                .collect();
            assert_eq!(
                min_distance(
                    &space,
                    CodeRef::Linear {
                        basis: &basis,
                        tower: &t
                    }
                )
                .unwrap(),
                min_distance(&space, CodeRef::Set(&words)).unwrap()
            );
        }
    }

    #[test]
    fn projective_point_count() {
        for (k, q) in [(1usize, 2u64), (3, 2), (2, 3), (3, 4)] {
            let pts = projective_points(k, q);
            assert_eq!(pts.len() as u64, (q.pow(k as u32) - 1) / (q - 1));
        }
    }

    #[test]
    fn volume_examples() {
        for metric in [Metric::Hamming, Metric::Rank, Metric::SumRank { t: 2 }] {
            assert_eq!(ball_volume(&sp(2, 1, 2, 2, metric), 0), nat(1));
        }
        assert_eq!(ball_volume(&sp(2, 1, 1, 3, Metric::Hamming), 1), nat(4));
        assert_eq!(ball_volume(&sp(2, 1, 2, 2, Metric::Rank), 1), nat(10));
        assert_eq!(
            ball_volume(&sp(2, 1, 2, 2, Metric::SumRank { t: 2 }), 1),
            nat(7)
        );
        assert_eq!(ball_volume(&sp(2, 1, 2, 2, Metric::Rank), 9), nat(16));
    }

    #[test]
    fn volume_matches_oracle() {
        let guards = Guards::default();
        let spaces = [
            sp(2, 1, 1, 4, Metric::Hamming),
            sp(2, 1, 2, 2, Metric::Rank),
            sp(2, 1, 2, 4, Metric::SumRank { t: 2 }),
            sp(3, 1, 2, 2, Metric::SumRank { t: 2 }),
            sp(3, 2, 1, 3, Metric::Rank),
            sp(2, 2, 2, 3, Metric::Hamming),
        ];
        for space in &spaces {
            for r in 0..=space.diameter() + 1 {
                assert_eq!(
                    ball_volume(space, r),
                    ball_volume_oracle(space, r, &guards).unwrap(),
                    "{space:?} r={r}"
                );
            }
            assert_eq!(
                ball_volume_oracle(space, space.diameter(), &guards).unwrap(),
                space.size()
            );
        }
        let big = sp(3, 1, 4, 4, Metric::Rank);
        assert!(matches!(
            ball_volume_oracle(&big, 1, &guards),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn volume_strictly_increasing() {
        for metric in [
            Metric::Hamming,
            Metric::Rank,
            Metric::SumRank { t: 2 },
            Metric::SumRank { t: 3 },
        ] {
            let space = sp(5, 2, 2, 6, metric);
            for r in 0..space.diameter() {
                assert!(ball_volume(&space, r) < ball_volume(&space, r + 1));
            }
        }
    }

    #[test]
    fn reductions() {
        for q in [2u64, 3, 4, 7] {
            for (ell, s, n) in [(1usize, 3usize, 4usize), (2, 1, 3), (1, 2, 5)] {
                let rank = sp(q, ell, s, n, Metric::Rank);
                let sr1 = sp(q, ell, s, n, Metric::SumRank { t: 1 });
                let ham = sp(q, ell, s, n, Metric::Hamming);
                let sr_eta1 = sp(q, ell, s, n, Metric::SumRank { t: n });
                for r in 0..=n + 1 {
                    assert_eq!(ball_volume(&sr1, r), ball_volume(&rank, r));
                    assert_eq!(ball_volume(&sr_eta1, r), ball_volume(&ham, r));
                }
            }
        }
    }

    #[test]
    fn metric_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for space in [
            sp(2, 1, 2, 4, Metric::Hamming),
            sp(3, 1, 2, 3, Metric::Rank),
            sp(2, 1, 3, 4, Metric::SumRank { t: 2 }),
        ] {
            let t = space.tower().unwrap();
            let size = space.size_within(u64::MAX).unwrap();
            for _ in 0..10_000 {
                let [x, y, z] = [0; 3].map(|_| t.unpack(rng.gen_range(0..size), space.n));
                let dxy = space.distance(&x, &y);
                assert_eq!(dxy, space.distance(&y, &x));
                assert!(space.distance(&x, &z) <= dxy + space.distance(&y, &z));
                assert_eq!(dxy == 0, x == y);
                assert_eq!(space.distance(&t.add(&x, &z), &t.add(&y, &z)), dxy);
            }
        }
    }

    #[test]
    fn growth_examples() {
        let h = volume_growth(&sp(2, 1, 3, 4, Metric::Hamming), 1, Growing::Q).unwrap();
        assert_eq!(
            (h.coefficient.clone(), h.exponent()),
            (rat(4, 1), rat(3, 1))
        );
        let r = volume_growth(&sp(2, 1, 3, 3, Metric::Rank), 2, Growing::Q).unwrap();
        assert_eq!(
            (r.coefficient.clone(), r.exponent()),
            (rat(1, 1), rat(8, 1))
        );
        let s = volume_growth(&sp(2, 1, 2, 4, Metric::SumRank { t: 2 }), 3, Growing::Q).unwrap();
        assert_eq!(
            (s.coefficient.clone(), s.exponent()),
            (rat(2, 1), rat(7, 1))
        );
        assert!(matches!(
            volume_growth(&sp(2, 1, 2, 4, Metric::SumRank { t: 2 }), 3, Growing::N),
            Err(Error::NotImplemented(_))
        ));
    }

    fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
        (lo..=hi).filter(|&p| is_prime(p)).collect()
    }

    #[test]
    fn growth_converges_in_q() {
        let cases = [
            (Metric::Hamming, 1usize, 3usize, 4usize, 1usize),
            (Metric::Rank, 1, 3, 3, 2),
            (Metric::SumRank { t: 2 }, 1, 2, 4, 3),
        ];
        for (metric, ell, s, n, r) in cases {
            let mut prev: Option<BigRat> = None;
            for q in primes_between(7, 101) {
                let space = sp(q, ell, s, n, metric);
                let g = volume_growth(&space, r, Growing::Q).unwrap();
                let lead =
                    &g.coefficient * crate::combinatorics::rat_pow_rat(&nat(q), &g.exponent());
                let ratio = rat_from_nat(&ball_volume(&space, r)) / lead;
                let dev = (&ratio - BigRat::one()).abs();
                assert!(dev <= rat(32, q as i64), "{metric} q={q}");
                if let Some(p) = &prev {
                    assert!(dev <= *p, "{metric} q={q} not monotone");
                }
                prev = Some(dev);
            }
        }
    }

    #[test]
    fn growth_in_other_parameters() {
        // Exact ratio to the leading term approaches 1 along the parameter.
        let check = |make: &dyn Fn(usize) -> AmbientSpace,
                     r: usize,
                     g: Growing,
                     xs: &[usize],
                     tol: BigRat| {
            let x = *xs.last().unwrap();
            let space = make(x);
            let p = volume_growth(&space, r, g).unwrap();
            let poly = rat(x.pow(p.poly_degree) as i64, 1);
            let lead = &p.coefficient
                * poly
                * crate::combinatorics::rat_pow_rat(&space.q_nat(), &p.exponent_at(x as i64));
            let ratio = rat_from_nat(&ball_volume(&space, r)) / lead;
            assert!((ratio - BigRat::one()).abs() < tol, "{g}");
        };
        check(
            &|ell| sp(2, ell, 1, 3, Metric::Rank),
            2,
            Growing::Ell,
            &[20],
            rat(1, 10_000),
        );
        check(
            &|s| sp(2, 1, s, 3, Metric::Rank),
            2,
            Growing::S,
            &[20],
            rat(1, 10_000),
        );
        check(
            &|n| sp(2, 1, 4, n, Metric::Rank),
            2,
            Growing::N,
            &[30],
            rat(1, 10_000),
        );
        check(
            &|s| sp(3, 1, s, 4, Metric::Hamming),
            2,
            Growing::S,
            &[20],
            rat(1, 1000),
        );
        check(
            &|ell| sp(3, ell, 2, 4, Metric::Hamming),
            2,
            Growing::Ell,
            &[10],
            rat(1, 1000),
        );
        check(
            &|n| sp(2, 1, 2, n, Metric::Hamming),
            2,
            Growing::N,
            &[20_000],
            rat(1, 1000),
        );
    }
}
