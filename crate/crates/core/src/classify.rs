//! Asymptotic dense / sparse classification of code families.
//!
//! The decision procedure compares the growth of the ball volume `v(d-1)`
//! against `q^{ℓ(ns+1-k)}` for `F_{q^ℓ}`-linear families, and `v·S²`
//! against `q^{mn}` for nonlinear ones. The closed-form MDS, MRD and MSRD
//! statements are evaluated alongside as cross-checks.

use std::fmt;
use std::ops::RangeInclusive;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::bounds::{gv_cardinality, max_linear_dimension, singleton_exponent, CodeFamilySpec};
use crate::combinatorics::{binom, nat, qbinom, rat, rat_from_nat, rat_pow, BigNat, BigRat};
use crate::error::{Error, Result};
use crate::metric::{ball_volume, volume_growth, AmbientSpace, Growing, Metric};

/// Which codes of the space are counted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    /// Codes meeting the Singleton-type bound; for linear families whose
    /// `ℓ` does not divide the bound's exponent, the largest dimension
    /// below it.
    Extremal,
    /// Codes of the size guaranteed by the Gilbert–Varshamov bound.
    GilbertVarshamov,
    /// `k = slope·X + intercept` in the growing parameter `X`.
    ExplicitDimension { slope: i64, intercept: i64 },
    /// `S = coefficient · q^{slope·X + intercept}`.
    ExplicitCardinality {
        coefficient: BigRat,
        slope: BigRat,
        intercept: BigRat,
    },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Extremal => "extremal",
            Family::GilbertVarshamov => "gv",
            Family::ExplicitDimension { .. } => "dimension",
            Family::ExplicitCardinality { .. } => "cardinality",
        }
    }
}

/// A sequence of spaces in which one parameter grows and the rest are fixed.
/// The value stored for the growing parameter is ignored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub metric: Metric,
    pub q: u64,
    pub ell: usize,
    pub s: usize,
    pub n: usize,
    pub d: usize,
    pub linear: bool,
    pub family: Family,
    pub growing: Growing,
}

impl Scenario {
    pub fn new(metric: Metric, growing: Growing) -> Self {
        Scenario {
            metric,
            q: 2,
            ell: 1,
            s: 1,
            n: 2,
            d: 2,
            linear: true,
            family: Family::Extremal,
            growing,
        }
    }

    pub fn params(mut self, q: u64, ell: usize, s: usize, n: usize) -> Self {
        self.q = q;
        self.ell = ell;
        self.s = s;
        self.n = n;
        self
    }

    pub fn distance(mut self, d: usize) -> Self {
        self.d = d;
        self
    }

    pub fn nonlinear(mut self) -> Self {
        self.linear = false;
        self
    }

    pub fn family(mut self, family: Family) -> Self {
        self.family = family;
        self
    }

    /// The space at value `x` of the growing parameter.
    pub fn space_at(&self, x: u64) -> Result<AmbientSpace> {
        let (mut q, mut ell, mut s, mut n) = (self.q, self.ell, self.s, self.n);
        let xs =
            usize::try_from(x).map_err(|_| Error::invalid(format!("probe value {x} too large")))?;
        match self.growing {
            Growing::Q => q = x,
            Growing::N => n = xs,
            Growing::Ell => ell = xs,
            Growing::S => s = xs,
        }
        AmbientSpace::new(q, ell, s, n, self.metric)
    }

    /// The concrete space and code family at value `x` of the growing
    /// parameter.
    pub fn code_spec_at(&self, x: u64) -> Result<(AmbientSpace, CodeFamilySpec)> {
        validate(self)?;
        let space = self.space_at(x)?;
        let spec = if self.linear {
            CodeFamilySpec::linear(space.ell, self.dimension_at(&space, x)?, self.d)
        } else {
            let size = probe_cardinality(self, &space, x)?;
            if !size.is_integer() || size.is_negative() {
                return Err(Error::invalid(format!(
                    "cardinality {size} is not a natural number at {x}"
                )));
            }
            CodeFamilySpec::nonlinear(
                size.to_integer().to_biguint().expect("non-negative"),
                self.d,
            )
        };
        Ok((space, spec))
    }

    fn dimension_at(&self, space: &AmbientSpace, x: u64) -> Result<usize> {
        let k = match &self.family {
            Family::Extremal => max_linear_dimension(space, self.d)?.0 as i64,
            Family::ExplicitDimension { slope, intercept } => {
                if self.growing == Growing::Q && *slope != 0 {
                    return Err(Error::invalid(
                        "a dimension growing with q is not supported",
                    ));
                }
                let x = if self.growing == Growing::Q {
                    0
                } else {
                    x as i64
                };
                slope * x + intercept
            }
            Family::GilbertVarshamov => gv_dimension(space, self.d)? as i64,
            Family::ExplicitCardinality { .. } => {
                return Err(Error::invalid(
                    "linear families take a dimension, not a cardinality",
                ));
            }
        };
        let ns = (space.n * space.s) as i64;
        if k < 1 || k > ns {
            return Err(Error::invalid(format!(
                "dimension k = {k} outside 1..={ns} at {} = {x}",
                self.growing
            )));
        }
        Ok(k as usize)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fixed = |g: Growing, v: String| {
            if g == self.growing {
                "∞".to_string()
            } else {
                v
            }
        };
        write!(
            f,
            "{} {} {} codes, q={} ℓ={} s={} n={} d={}, {} → ∞",
            self.metric,
            if self.linear { "linear" } else { "nonlinear" },
            self.family.name(),
            fixed(Growing::Q, self.q.to_string()),
            fixed(Growing::Ell, self.ell.to_string()),
            fixed(Growing::S, self.s.to_string()),
            fixed(Growing::N, self.n.to_string()),
            self.d,
            self.growing
        )
    }
}

/// Smallest `k` with `q^{ℓk} v(d-1) >= q^{mn}`.
pub fn gv_dimension(space: &AmbientSpace, d: usize) -> Result<usize> {
    let v = ball_volume(space, d - 1);
    let base = space.q_nat().pow(space.ell as u32);
    let total = space.size();
    let mut k = 0usize;
    let mut acc = v;
    while acc < total {
        acc *= &base;
        k += 1;
    }
    Ok(k.max(1))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Dense,
    Sparse,
    /// `limsup δ <= upper < 1`.
    NotDense {
        upper: BigRat,
    },
    Unknown {
        reason: String,
    },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Dense => "dense",
            Verdict::Sparse => "sparse",
            Verdict::NotDense { .. } => "not-dense",
            Verdict::Unknown { .. } => "unknown",
        }
    }

    pub fn upper(&self) -> Option<&BigRat> {
        match self {
            Verdict::NotDense { upper } => Some(upper),
            _ => None,
        }
    }

    pub fn same_kind(&self, other: &Verdict) -> bool {
        self.label() == other.label()
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NotDense { upper } => write!(f, "not-dense (upper {upper})"),
            Verdict::Unknown { reason } => write!(f, "unknown ({reason})"),
            other => f.write_str(other.label()),
        }
    }
}

/// `ρ ∼ coefficient · X^{poly_degree} · q^{left - right}` at one point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapPoint {
    /// Value of the growing parameter; `None` when `q` grows.
    pub x: Option<u64>,
    pub left: BigRat,
    pub right: BigRat,
    pub coefficient: BigRat,
    pub poly_degree: i64,
}

impl GapPoint {
    pub fn gap(&self) -> BigRat {
        &self.left - &self.right
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// One point per residue of the growing parameter modulo the period.
    pub points: Vec<GapPoint>,
    /// Change of the exponent gap over one period, per residue.
    pub per_period: Vec<BigRat>,
    /// Limiting (worst-case) value of `ρ` in the bounded case.
    pub constant: Option<BigRat>,
}

/// Closed-form statement evaluated for comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossCheck {
    pub theorem: &'static str,
    pub verdict: Verdict,
    pub agrees: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub verdict: Verdict,
    pub witness: Witness,
    pub source: &'static str,
    pub cross_check: Option<CrossCheck>,
}

fn unknown(reason: impl Into<String>, source: &'static str) -> Classification {
    Classification {
        verdict: Verdict::Unknown {
            reason: reason.into(),
        },
        witness: Witness {
            points: Vec::new(),
            per_period: Vec::new(),
            constant: None,
        },
        source,
        cross_check: None,
    }
}

fn int(v: usize) -> BigRat {
    rat(v as i64, 1)
}

/// The comparison quantity at `x` in exponent form, with `None` signalling
/// a missing growth profile.
fn gap_point(sc: &Scenario, x: u64) -> Result<Option<GapPoint>> {
    let space = sc.space_at(x)?;
    let at = if sc.growing == Growing::Q {
        None
    } else {
        Some(x)
    };
    let xi = x as i64;
    if sc.linear && sc.family == Family::GilbertVarshamov {
        return Ok(Some(GapPoint {
            x: at,
            left: BigRat::zero(),
            right: int(space.ell),
            coefficient: BigRat::one(),
            poly_degree: 0,
        }));
    }
    let profile = match volume_growth(&space, sc.d - 1, sc.growing) {
        Ok(p) => p,
        Err(Error::NotImplemented(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let ev = profile.exponent_at(xi);
    let poly = profile.poly_degree as i64;
    let point = if sc.linear {
        let k = sc.dimension_at(&space, x)?;
        GapPoint {
            x: at,
            left: ev,
            right: int(space.ell * (space.n * space.s + 1 - k)),
            coefficient: profile.coefficient,
            poly_degree: poly,
        }
    } else {
        let mn = int(space.m() * space.n);
        match &sc.family {
            Family::GilbertVarshamov => GapPoint {
                x: at,
                left: mn,
                right: ev,
                coefficient: BigRat::one() / &profile.coefficient,
                poly_degree: -poly,
            },
            Family::Extremal => {
                let e = int(singleton_exponent(&space, sc.d)?);
                GapPoint {
                    x: at,
                    left: ev + int(2) * e,
                    right: mn,
                    coefficient: profile.coefficient,
                    poly_degree: poly,
                }
            }
            Family::ExplicitCardinality {
                coefficient,
                slope,
                intercept,
            } => {
                if sc.growing == Growing::Q && !slope.is_zero() {
                    return Err(Error::invalid(
                        "a cardinality exponent growing with q is not supported",
                    ));
                }
                let x = if sc.growing == Growing::Q { 0 } else { xi };
                let e = slope * rat(x, 1) + intercept;
                GapPoint {
                    x: at,
                    left: ev + int(2) * e,
                    right: mn,
                    coefficient: profile.coefficient * coefficient * coefficient,
                    poly_degree: poly,
                }
            }
            Family::ExplicitDimension { .. } => {
                return Err(Error::invalid(
                    "nonlinear families take a cardinality, not a dimension",
                ));
            }
        }
    };
    Ok(Some(point))
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Trend {
    Zero,
    Infinite,
    Bounded(BigRat),
}

fn upper_from(constant: &BigRat, linear: bool) -> BigRat {
    let c = if linear {
        constant.clone()
    } else {
        constant / int(2)
    };
    BigRat::one() / (BigRat::one() + c)
}

fn validate(sc: &Scenario) -> Result<()> {
    if sc.d == 0 {
        return Err(Error::invalid("distance d must be at least 1"));
    }
    if sc.growing != Growing::Q && prime_power_check(sc.q).is_err() {
        return Err(Error::invalid(format!("q = {} is not a prime power", sc.q)));
    }
    if let (true, Family::ExplicitCardinality { .. }) = (sc.linear, &sc.family) {
        return Err(Error::invalid(
            "linear families take a dimension, not a cardinality",
        ));
    }
    if let (false, Family::ExplicitDimension { .. }) = (sc.linear, &sc.family) {
        return Err(Error::invalid(
            "nonlinear families take a cardinality, not a dimension",
        ));
    }
    if let Family::ExplicitCardinality { coefficient, .. } = &sc.family {
        if !coefficient.is_positive() {
            return Err(Error::invalid("cardinality coefficient must be positive"));
        }
    }
    Ok(())
}

fn prime_power_check(q: u64) -> Result<()> {
    AmbientSpace::new(q, 1, 1, 1, Metric::Hamming).map(|_| ())
}

fn sequence_start(sc: &Scenario) -> u64 {
    let t = match sc.metric {
        Metric::SumRank { t } => t,
        _ => 1,
    };
    (2 * (sc.n + sc.ell * sc.s + sc.d + t) + 8) as u64
}

/// Decide the family by the exact comparison of growth exponents.
pub fn classify(sc: &Scenario) -> Result<Classification> {
    validate(sc)?;
    let mut result = generic(sc)?;
    if let Some(theorem) = specialized(sc)? {
        let agrees = match (&result.verdict, &theorem.verdict) {
            (Verdict::NotDense { upper: g }, Verdict::NotDense { upper: t }) => g <= t,
            (a, b) => a.same_kind(b),
        };
        result.cross_check = Some(CrossCheck {
            theorem: theorem.name,
            verdict: theorem.verdict,
            agrees,
            note: theorem.note,
        });
    }
    Ok(result)
}

fn generic(sc: &Scenario) -> Result<Classification> {
    let source = match (sc.linear, &sc.family) {
        (true, Family::GilbertVarshamov) => "gv-idealized",
        (true, _) => "sublinear-limit",
        (false, _) => "nonlinear-limit",
    };
    if sc.d == 1 {
        return Ok(Classification {
            verdict: Verdict::Dense,
            witness: Witness {
                points: Vec::new(),
                per_period: Vec::new(),
                constant: None,
            },
            source: "trivial-distance",
            cross_check: None,
        });
    }
    if matches!(sc.metric, Metric::SumRank { .. }) && sc.growing != Growing::Q {
        return Ok(unknown(
            format!("no sum-rank growth profile with growing {}", sc.growing),
            source,
        ));
    }
    if sc.growing == Growing::Q {
        let Some(point) = gap_point(sc, 2)? else {
            return Ok(unknown(
                format!("no growth profile for {} with growing q", sc.metric),
                source,
            ));
        };
        let gap = point.gap();
        let (verdict, constant) = if gap.is_negative() {
            (Verdict::Dense, None)
        } else if gap.is_positive() {
            (Verdict::Sparse, None)
        } else {
            let c = point.coefficient.clone();
            (
                Verdict::NotDense {
                    upper: upper_from(&c, sc.linear),
                },
                Some(c),
            )
        };
        return Ok(Classification {
            verdict,
            witness: Witness {
                points: vec![point],
                per_period: vec![BigRat::zero()],
                constant,
            },
            source,
            cross_check: None,
        });
    }

    let period = match sc.growing {
        Growing::N | Growing::S => sc.ell as u64,
        _ => 1,
    };
    let start = sequence_start(sc);
    let q = nat(sc.q);
    let mut points = Vec::new();
    let mut per_period = Vec::new();
    let mut trends = Vec::new();
    for r in 0..period {
        let mut seq = Vec::with_capacity(4);
        for j in 0..4 {
            match gap_point(sc, start + r + j * period)? {
                Some(p) => seq.push(p),
                None => {
                    return Ok(unknown(
                        format!(
                            "no growth profile for {} with growing {}",
                            sc.metric, sc.growing
                        ),
                        source,
                    ))
                }
            }
        }
        let gaps: Vec<BigRat> = seq.iter().map(GapPoint::gap).collect();
        let diffs: Vec<BigRat> = gaps.windows(2).map(|w| &w[1] - &w[0]).collect();
        let second = &diffs[1] - &diffs[0];
        if second != &diffs[2] - &diffs[1] {
            return Ok(unknown(
                "exponent gap is not eventually polynomial of degree <= 2",
                source,
            ));
        }
        let first = seq[0].clone();
        let trend = if second.is_positive() {
            Trend::Infinite
        } else if second.is_negative() {
            Trend::Zero
        } else if diffs[0].is_positive() {
            Trend::Infinite
        } else if diffs[0].is_negative() {
            Trend::Zero
        } else if first.poly_degree > 0 {
            Trend::Infinite
        } else if first.poly_degree < 0 {
            Trend::Zero
        } else {
            let gap = first.gap();
            if !gap.is_integer() {
                return Ok(unknown(
                    "bounded ratio with a fractional power of q",
                    source,
                ));
            }
            let e = gap.to_integer().to_i64().expect("small exponent");
            Trend::Bounded(&first.coefficient * rat_pow(&q, e))
        };
        per_period.push(diffs[0].clone());
        points.push(first);
        trends.push(trend);
    }

    let (verdict, constant) = if trends.iter().all(|t| *t == Trend::Zero) {
        (Verdict::Dense, None)
    } else if trends.iter().all(|t| *t == Trend::Infinite) {
        (Verdict::Sparse, None)
    } else if trends.contains(&Trend::Zero) {
        (
            Verdict::Unknown {
                reason: "ratio tends to zero on some residues only".into(),
            },
            None,
        )
    } else {
        let worst = trends
            .iter()
            .filter_map(|t| match t {
                Trend::Bounded(c) => Some(c.clone()),
                _ => None,
            })
            .min()
            .expect("a bounded residue");
        (
            Verdict::NotDense {
                upper: upper_from(&worst, sc.linear),
            },
            Some(worst),
        )
    };
    Ok(Classification {
        verdict,
        witness: Witness {
            points,
            per_period,
            constant,
        },
        source,
        cross_check: None,
    })
}

/// A closed-form statement applied to a scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremCheck {
    pub name: &'static str,
    pub verdict: Verdict,
    pub note: Option<String>,
}

fn check(name: &'static str, verdict: Verdict) -> Option<TheoremCheck> {
    Some(TheoremCheck {
        name,
        verdict,
        note: None,
    })
}

fn threshold(value: &BigRat, ell: usize, equal_upper: BigRat) -> Verdict {
    let ell = int(ell);
    if *value < ell {
        Verdict::Dense
    } else if *value > ell {
        Verdict::Sparse
    } else {
        Verdict::NotDense { upper: equal_upper }
    }
}

/// The MDS, MRD or MSRD closed form that covers the scenario, if any.
pub fn specialized(sc: &Scenario) -> Result<Option<TheoremCheck>> {
    if sc.family != Family::Extremal || sc.d < 2 && sc.metric != Metric::Hamming {
        return Ok(None);
    }
    let (q, ell, s, n, d) = (sc.q, sc.ell, sc.s, sc.n, sc.d);
    let m = ell * s;
    let qn = nat(q);
    Ok(match (sc.metric, sc.linear, sc.growing) {
        (Metric::Hamming, false, Growing::Q) if 2 <= d && d <= n => {
            check("mds-nonlinear", Verdict::Sparse)
        }
        (Metric::Hamming, false, Growing::N) if d >= 2 => check("mds-nonlinear", Verdict::Sparse),
        (Metric::Hamming, true, Growing::Q | Growing::Ell) if 1 <= d && d <= n => {
            check("mds-dense", Verdict::Dense)
        }
        (Metric::Hamming, true, Growing::N) if d >= 2 => check("mds-length", Verdict::Sparse),
        (Metric::Hamming, true, Growing::S) if n >= 2 && 2 <= d && d <= n => {
            let c = rat_from_nat(&binom(n as u64, d as i64 - 1)) * rat_pow(&qn, -(ell as i64));
            check(
                "mds-degree",
                Verdict::NotDense {
                    upper: upper_from(&c, true),
                },
            )
        }
        (Metric::Rank, false, Growing::Q) if d <= n.min(m) => {
            check("mrd-nonlinear", Verdict::Sparse)
        }
        (Metric::Rank, false, Growing::N) if d <= m => check("mrd-nonlinear", Verdict::Sparse),
        (Metric::Rank, true, Growing::Q) if d <= n.min(m) => {
            let half = rat(1, 2);
            if n <= m {
                let p = int((d - 1) * (n - d + 1));
                check("mrd-field", threshold(&p, ell, half))
            } else {
                let nd = (n * (d - 1)) as i64;
                let r = nd - ell as i64 * Integer::div_ceil(&nd, &(ell as i64));
                let value = int((d - 1) * (m - d + 1)) + rat(r, 1);
                Some(TheoremCheck {
                    name: "mrd-quasi-field",
                    verdict: threshold(&value, ell, half),
                    note: Some(format!(
                        "quasi remainder r = {r} (rank convention: r <= 0, added to the threshold value)"
                    )),
                })
            }
        }
        (Metric::Rank, true, Growing::Ell) if n >= 3 && d <= n => {
            check("mrd-dense", Verdict::Dense)
        }
        (Metric::Rank, true, Growing::S) if n >= 3 && d <= n => {
            let qe = rat_pow(&qn, ell as i64);
            let qb = rat_from_nat(&qbinom(n as i64, d as i64 - 1, &qn)?);
            check(
                "mrd-degree",
                Verdict::NotDense {
                    upper: &qe / (&qe + qb),
                },
            )
        }
        (Metric::Rank, true, Growing::N) if d <= m => {
            let qb = rat_from_nat(&qbinom(m as i64, d as i64 - 1, &qn)?);
            let c = qb * rat_pow(&qn, -2 * ell as i64);
            check(
                "mrd-length",
                Verdict::NotDense {
                    upper: upper_from(&c, true),
                },
            )
        }
        (Metric::SumRank { t }, linear, Growing::Q) if n % t == 0 && d <= t * m.min(n / t) => {
            let eta = n / t;
            if !linear {
                return Ok(check("msrd-nonlinear", Verdict::Sparse));
            }
            let theta = msrd_theta(m, eta, t, d)?;
            let z = (d - 1) % t;
            let upper = BigRat::one() / (BigRat::one() + rat_from_nat(&binom(t as u64, z as i64)));
            if eta <= m {
                check("msrd-field", threshold(&theta, ell, upper))
            } else {
                let ed = (eta * (d - 1)) as i64;
                let r = ell as i64 * Integer::div_ceil(&ed, &(ell as i64)) - ed;
                Some(TheoremCheck {
                    name: "msrd-quasi-field",
                    verdict: threshold(&(theta - rat(r, 1)), ell, upper),
                    note: Some(format!(
                        "quasi remainder r = {r} (sum-rank convention: r >= 0, subtracted from θ; opposite sign to the rank convention)"
                    )),
                })
            }
        }
        _ => None,
    })
}

/// `θ = (d-1)(min(m, η) - (d-1)/t) + z̃²/t - z̃` with `z̃ = (d-1) mod t`.
pub fn msrd_theta(m: usize, eta: usize, t: usize, d: usize) -> Result<BigRat> {
    if t == 0 || m == 0 || eta == 0 {
        return Err(Error::invalid("m, η and t must be positive"));
    }
    let top = t * m.min(eta);
    if d < 2 || d > top {
        return Err(Error::invalid(format!("d = {d} outside 2..={top}")));
    }
    let z = ((d - 1) % t) as i64;
    let (dm, t) = ((d - 1) as i64, t as i64);
    Ok(rat(dm, 1) * (rat(m.min(eta) as i64, 1) - rat(dm, t)) + rat(z * z, t) - rat(z, 1))
}

/// The `F_q`-linear threshold test: `(d-1)(n-d+1) < t` gives dense,
/// `t + t²/4 < (d-1)(n-d+1)` gives sparse.
pub fn fq_linear_threshold(t: usize, n: usize, d: usize) -> Option<Verdict> {
    if d < 2 || d > n {
        return None;
    }
    let p = ((d - 1) * (n - d + 1)) as u64;
    let t = t as u64;
    if p < t {
        Some(Verdict::Dense)
    } else if 4 * t + t * t < 4 * p {
        Some(Verdict::Sparse)
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionClass {
    Dense,
    Sparse,
    Unclassified,
}

impl RegionClass {
    pub fn label(&self) -> &'static str {
        match self {
            RegionClass::Dense => "dense",
            RegionClass::Sparse => "sparse",
            RegionClass::Unclassified => "unclassified",
        }
    }
}

/// Region of the `(t, η)` plane: dense when `η < 2/√t`, sparse when
/// `η > (t+2)²/(4t)`.
pub fn eta_region(t: usize, eta: usize) -> RegionClass {
    let (t, eta) = (t as u64, eta as u64);
    if eta * eta * t < 4 {
        RegionClass::Dense
    } else if (t + 2) * (t + 2) < 4 * t * eta {
        RegionClass::Sparse
    } else {
        RegionClass::Unclassified
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionCell {
    pub t: usize,
    pub eta: usize,
    pub region: RegionClass,
    /// Joint verdict of `classify` over every `2 <= d <= n` with `m = η`,
    /// `ℓ = 1` and `q` growing.
    pub classified: RegionClass,
}

fn joint_verdict(t: usize, eta: usize, m: usize) -> Result<RegionClass> {
    let n = t * eta;
    let mut dense = true;
    let mut sparse = true;
    for d in 2..=n {
        let sc = Scenario::new(Metric::SumRank { t }, Growing::Q)
            .params(2, 1, m, n)
            .distance(d);
        match classify(&sc)?.verdict {
            Verdict::Dense => sparse = false,
            Verdict::Sparse => dense = false,
            _ => {
                dense = false;
                sparse = false;
            }
        }
    }
    Ok(if dense {
        RegionClass::Dense
    } else if sparse {
        RegionClass::Sparse
    } else {
        RegionClass::Unclassified
    })
}

/// The region grid with `m = η`, in row-major order over `t` then `η`.
pub fn msrd_eta_region(
    ts: RangeInclusive<usize>,
    etas: RangeInclusive<usize>,
) -> Result<Vec<RegionCell>> {
    if *ts.start() == 0 || *etas.start() == 0 {
        return Err(Error::invalid("t and η start at 1"));
    }
    let cells: Vec<(usize, usize)> = ts.flat_map(|t| etas.clone().map(move |e| (t, e))).collect();
    cells
        .into_par_iter()
        .map(|(t, eta)| {
            Ok(RegionCell {
                t,
                eta,
                region: eta_region(t, eta),
                classified: joint_verdict(t, eta, eta)?,
            })
        })
        .collect()
}

/// One row of the sum-rank example table, expanded over concrete parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub eta: String,
    pub t: String,
    pub d: usize,
    pub expected: &'static str,
    /// `(η, t, m, verdict)` for every instance checked.
    pub instances: Vec<(usize, usize, usize, Verdict)>,
}

impl TableRow {
    pub fn pass(&self) -> bool {
        self.instances
            .iter()
            .all(|(.., v)| v.label() == self.expected)
    }
}

/// The sum-rank example table (`ℓ = 1`, `q → ∞`, `m >= η`), checking open
/// ranges up to `t_max` and `eta_max` with `m ∈ {η, η+1}`.
pub fn table1(t_max: usize, eta_max: usize) -> Result<Vec<TableRow>> {
    if t_max < 10 || eta_max < 3 {
        return Err(Error::invalid("table needs t_max >= 10 and eta_max >= 3"));
    }
    let row = |eta: String,
               t: String,
               d: usize,
               expected: &'static str,
               cells: Vec<(usize, usize)>|
     -> Result<TableRow> {
        let mut instances = Vec::new();
        for (e, tt) in cells {
            for m in [e, e + 1] {
                let sc = Scenario::new(Metric::SumRank { t: tt }, Growing::Q)
                    .params(2, 1, m, e * tt)
                    .distance(d);
                instances.push((e, tt, m, classify(&sc)?.verdict));
            }
        }
        Ok(TableRow {
            eta,
            t,
            d,
            expected,
            instances,
        })
    };
    Ok(vec![
        row("1".into(), "10".into(), 5, "dense", vec![(1, 10)])?,
        row(
            "2".into(),
            ">=1".into(),
            2,
            "not-dense",
            (1..=t_max).map(|t| (2, t)).collect(),
        )?,
        row(
            ">=2".into(),
            "10".into(),
            5,
            "sparse",
            (2..=eta_max).map(|e| (e, 10)).collect(),
        )?,
        row(
            "3".into(),
            ">=1".into(),
            3,
            "sparse",
            (1..=t_max).map(|t| (3, t)).collect(),
        )?,
    ])
}

/// Exact `ρ` at each probe value: `v(d-1) q^{-ℓ(ns+1-k)}` for linear
/// families, `v(d-1) S² / q^{mn}` for nonlinear ones.
pub fn ratio_probe(sc: &Scenario, probes: &[u64]) -> Result<Vec<(u64, BigRat)>> {
    validate(sc)?;
    probes
        .iter()
        .map(|&x| {
            let space = sc.space_at(x)?;
            let v = rat_from_nat(&ball_volume(&space, sc.d - 1));
            let q = space.q_nat();
            let rho = if sc.linear {
                let k = sc.dimension_at(&space, x)?;
                v * rat_pow(&q, -((space.ell * (space.n * space.s + 1 - k)) as i64))
            } else {
                let s = probe_cardinality(sc, &space, x)?;
                v * &s * &s / rat_from_nat(&space.size())
            };
            Ok((x, rho))
        })
        .collect()
}

fn probe_cardinality(sc: &Scenario, space: &AmbientSpace, x: u64) -> Result<BigRat> {
    let q = space.q_nat();
    Ok(match &sc.family {
        Family::Extremal => rat_from_nat(&q.pow(singleton_exponent(space, sc.d)? as u32)),
        Family::GilbertVarshamov => rat_from_nat(&gv_cardinality(space, sc.d)?),
        Family::ExplicitCardinality {
            coefficient,
            slope,
            intercept,
        } => {
            let x = if sc.growing == Growing::Q {
                0
            } else {
                x as i64
            };
            let e = slope * rat(x, 1) + intercept;
            if !e.is_integer() {
                return Err(Error::invalid(format!(
                    "cardinality exponent {e} is not an integer at {x}"
                )));
            }
            coefficient * rat_pow(&q, e.to_integer().to_i64().expect("small exponent"))
        }
        Family::ExplicitDimension { .. } => unreachable!("validated"),
    })
}

/// `[n, k]_q` as a rational, for callers comparing closed forms.
pub fn qbinom_rat(n: usize, k: usize, q: &BigNat) -> Result<BigRat> {
    Ok(rat_from_nat(&qbinom(n as i64, k as i64, q)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(
        metric: Metric,
        growing: Growing,
        q: u64,
        ell: usize,
        s: usize,
        n: usize,
        d: usize,
    ) -> Scenario {
        Scenario::new(metric, growing)
            .params(q, ell, s, n)
            .distance(d)
    }

    fn verdict(s: &Scenario) -> Verdict {
        classify(s).unwrap().verdict
    }

    #[test]
    fn documented_verdicts() {
        assert_eq!(
            verdict(&sc(Metric::Hamming, Growing::Q, 2, 1, 2, 4, 2)),
            Verdict::Dense
        );
        assert_eq!(
            verdict(&sc(Metric::Rank, Growing::Q, 2, 1, 4, 4, 3)),
            Verdict::Sparse
        );
        assert_eq!(
            verdict(&sc(Metric::Rank, Growing::Q, 2, 2, 2, 3, 2)),
            Verdict::NotDense { upper: rat(1, 2) }
        );
        assert_eq!(
            verdict(&sc(Metric::Hamming, Growing::Q, 2, 1, 1, 3, 2).nonlinear()),
            Verdict::Sparse
        );
        assert_eq!(
            verdict(&sc(Metric::Rank, Growing::Q, 2, 1, 3, 3, 2).nonlinear()),
            Verdict::Sparse
        );
        assert_eq!(
            verdict(&sc(Metric::Hamming, Growing::S, 2, 1, 1, 4, 2)),
            Verdict::NotDense { upper: rat(1, 3) }
        );
        assert_eq!(
            verdict(&sc(Metric::Rank, Growing::S, 2, 1, 1, 3, 2)),
            Verdict::NotDense { upper: rat(2, 9) }
        );
        assert_eq!(
            verdict(&sc(Metric::Rank, Growing::Ell, 2, 1, 1, 3, 2)),
            Verdict::Dense
        );
        assert_eq!(
            verdict(&sc(Metric::Hamming, Growing::N, 2, 1, 1, 3, 2)),
            Verdict::Sparse
        );
        for g in [Growing::Q, Growing::N] {
            let s = sc(Metric::Hamming, g, 3, 1, 1, 4, 3)
                .nonlinear()
                .family(Family::GilbertVarshamov);
            assert_eq!(verdict(&s), Verdict::Sparse);
        }
        for g in [Growing::Q, Growing::Ell] {
            let s = sc(Metric::Rank, g, 3, 1, 2, 4, 2).family(Family::GilbertVarshamov);
            assert_eq!(verdict(&s), Verdict::Dense);
        }
    }

    #[test]
    fn table_rows() {
        let msrd = |eta: usize, t: usize, d: usize| {
            verdict(&sc(
                Metric::SumRank { t },
                Growing::Q,
                2,
                1,
                eta,
                eta * t,
                d,
            ))
        };
        assert_eq!(msrd(1, 10, 5), Verdict::Dense);
        assert_eq!(msrd(2, 10, 5), Verdict::Sparse);
        for t in 1..=6 {
            assert_eq!(msrd(3, t, 3), Verdict::Sparse);
            assert_eq!(
                msrd(2, t, 2),
                Verdict::NotDense {
                    upper: rat(1, 1 + t as i64)
                }
            );
        }
        for row in table1(10, 4).unwrap() {
            assert!(row.pass(), "{row:?}");
        }
    }

    #[test]
    fn theta_examples() {
        assert_eq!(msrd_theta(2, 2, 2, 4).unwrap(), rat(1, 1));
        // η = 1: d - 1 < t, so z̃ = d - 1 and θ vanishes.
        for t in 2..6 {
            for d in 2..=t {
                assert_eq!(msrd_theta(5, 1, t, d).unwrap(), rat(0, 1));
            }
        }
        assert!(msrd_theta(5, 1, 3, 4).is_err());
        for t in 2..6 {
            for (m, eta) in [(1usize, 3usize), (4, 2), (3, 3)] {
                assert_eq!(
                    msrd_theta(m, eta, t, 2).unwrap(),
                    rat(m.min(eta) as i64 - 1, 1)
                );
            }
        }
        assert!(msrd_theta(2, 2, 2, 5).is_err());
        assert!(msrd_theta(2, 2, 2, 1).is_err());
    }

    #[test]
    fn theta_matches_generic_gap() {
        // θ - ℓ is the exponent gap at growing q whenever η <= m.
        for t in 1..=4 {
            for eta in 1..=3 {
                for m in eta..=eta + 2 {
                    for d in 2..=t * eta {
                        let s = sc(Metric::SumRank { t }, Growing::Q, 2, 1, m, t * eta, d);
                        let gap = classify(&s).unwrap().witness.points[0].gap();
                        assert_eq!(
                            gap,
                            msrd_theta(m, eta, t, d).unwrap() - rat(1, 1),
                            "t={t} eta={eta} m={m} d={d}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn region_examples() {
        assert_eq!(eta_region(1, 1), RegionClass::Dense);
        assert_eq!(eta_region(4, 3), RegionClass::Sparse);
        assert_eq!(eta_region(4, 2), RegionClass::Unclassified);
    }

    #[test]
    fn region_classes_are_sound() {
        for cell in msrd_eta_region(1..=10, 1..=4).unwrap() {
            if cell.region != RegionClass::Unclassified {
                assert_eq!(cell.region, cell.classified, "{cell:?}");
            }
        }
    }

    #[test]
    fn sum_rank_other_growth_is_unknown() {
        for g in [Growing::N, Growing::Ell, Growing::S] {
            let v = verdict(&sc(Metric::SumRank { t: 2 }, g, 2, 1, 2, 4, 2));
            assert_eq!(v.label(), "unknown");
        }
    }

    #[test]
    fn trivial_distance_is_dense() {
        for g in Growing::ALL {
            assert_eq!(verdict(&sc(Metric::Rank, g, 2, 1, 2, 3, 1)), Verdict::Dense);
        }
    }

    #[test]
    fn mrd_length_bound_is_dominated() {
        for (ell, s, d) in [(1usize, 3usize, 2usize), (2, 2, 3), (3, 1, 2), (2, 3, 4)] {
            let c = classify(&sc(Metric::Rank, Growing::N, 2, ell, s, 4, d)).unwrap();
            let cc = c.cross_check.clone().unwrap();
            assert!(cc.agrees, "{c:?}");
            let m = ell * s;
            let closed_form = BigRat::one()
                / (BigRat::one()
                    + qbinom_rat(m, d - 1, &nat(2)).unwrap() * rat_pow(&nat(2), -2 * ell as i64));
            assert_eq!(cc.verdict.upper(), Some(&closed_form));
            // Worst residue: ρ = [m, d-1]_q q^{-ℓ-ρmax}, ρmax = ℓ - gcd(d-1, ℓ).
            let rmax = ell - (d - 1).gcd(&ell);
            let c_exact =
                qbinom_rat(m, d - 1, &nat(2)).unwrap() * rat_pow(&nat(2), -((ell + rmax) as i64));
            assert_eq!(c.witness.constant, Some(c_exact));
        }
    }

    #[test]
    fn linear_thresholds_implied() {
        for t in 1..=5 {
            for eta in 1..=3 {
                let n = t * eta;
                for d in 2..=n {
                    if let Some(expected) = fq_linear_threshold(t, n, d) {
                        assert_eq!(
                            verdict(&sc(Metric::SumRank { t }, Growing::Q, 2, 1, eta, n, d)),
                            expected
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn probes_follow_verdicts() {
        // Dense: ρ decreasing to below 1/100.
        let dense = sc(Metric::Hamming, Growing::Q, 2, 1, 2, 4, 2);
        let primes = [2u64, 3, 5, 7, 11, 101, 503];
        let rho = ratio_probe(&dense, &primes).unwrap();
        assert!(rho.windows(2).all(|w| w[1].1 < w[0].1));
        assert!(rho.last().unwrap().1 < rat(1, 100));
        // Sparse: 1/ρ decreasing to below 1/100.
        let sparse = sc(Metric::Rank, Growing::Q, 2, 1, 4, 4, 3);
        let rho = ratio_probe(&sparse, &primes[..5]).unwrap();
        assert!(rho.windows(2).all(|w| w[1].1 > w[0].1));
        assert!(BigRat::one() / &rho.last().unwrap().1 < rat(1, 100));
        // Bounded: ρ near the limiting constant.
        let nd = sc(Metric::Hamming, Growing::S, 2, 1, 1, 4, 2);
        let c = classify(&nd).unwrap().witness.constant.unwrap();
        let (_, last) = ratio_probe(&nd, &[4, 8, 16]).unwrap().pop().unwrap();
        assert!((&last - &c).abs() < &c / rat(10, 1));
    }

    #[test]
    fn explicit_families() {
        // Half-rate codes in the Hamming metric as n grows: ρ grows like
        // q^{ℓ(ns/2)} against a polynomial volume, so sparse.
        let half =
            sc(Metric::Hamming, Growing::N, 2, 1, 1, 4, 3).family(Family::ExplicitDimension {
                slope: 1,
                intercept: -2,
            });
        assert_eq!(verdict(&half), Verdict::Sparse);
        let tiny =
            sc(Metric::Hamming, Growing::N, 2, 1, 1, 4, 3).family(Family::ExplicitDimension {
                slope: 0,
                intercept: 1,
            });
        assert_eq!(verdict(&tiny), Verdict::Dense);
        let card = sc(Metric::Hamming, Growing::Q, 2, 1, 1, 4, 2)
            .nonlinear()
            .family(Family::ExplicitCardinality {
                coefficient: rat(1, 1),
                slope: rat(0, 1),
                intercept: rat(1, 1),
            });
        assert_eq!(verdict(&card), Verdict::Dense);
        assert!(
            classify(&sc(Metric::Hamming, Growing::Q, 2, 1, 1, 4, 2).family(
                Family::ExplicitDimension {
                    slope: 1,
                    intercept: 0
                }
            ))
            .is_err()
        );
    }
}
