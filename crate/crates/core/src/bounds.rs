//! Finite-parameter bounds: Singleton-type maxima, quasi-extremal
//! dimensions, the Gilbert–Varshamov cardinality and exact density brackets.

use num_traits::{One, Zero};

use crate::combinatorics::{
    binom_big, ceil_div, clamp_unit, nat, qbinom, rat, rat_from_nat, BigNat, BigRat,
};
use crate::error::{Error, Result};
use crate::metric::{ball_volume, AmbientSpace};

/// Cardinality of a nonlinear code or `F_{q^ℓ}`-dimension of a linear one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeSize {
    Cardinality(BigNat),
    Dimension(usize),
}

/// What is being counted: codes of a given size (and linearity) whose minimum
/// distance is at least `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeFamilySpec {
    /// 0 for nonlinear codes, otherwise the degree `ℓ` of the field
    /// `F_{q^ℓ}` over which codes are linear.
    pub linearity: usize,
    pub size: CodeSize,
    pub d: usize,
}

impl CodeFamilySpec {
    pub fn nonlinear(cardinality: BigNat, d: usize) -> Self {
        CodeFamilySpec {
            linearity: 0,
            size: CodeSize::Cardinality(cardinality),
            d,
        }
    }

    pub fn linear(ell: usize, k: usize, d: usize) -> Self {
        CodeFamilySpec {
            linearity: ell,
            size: CodeSize::Dimension(k),
            d,
        }
    }

    pub fn is_linear(&self) -> bool {
        self.linearity > 0
    }

    /// The space graded by this family's linearity degree, after checking
    /// every precondition on sizes and distance.
    pub fn resolve(&self, space: &AmbientSpace) -> Result<AmbientSpace> {
        check_distance(space, self.d, space.diameter() + 1)?;
        match (&self.size, self.linearity) {
            (CodeSize::Cardinality(s), 0) => {
                if *s < nat(2) || *s > space.size() {
                    return Err(Error::invalid(format!(
                        "cardinality {s} outside 2..=q^(mn)"
                    )));
                }
                Ok(space.clone())
            }
            (CodeSize::Dimension(k), ell) if ell > 0 => {
                let m = space.m();
                if !m.is_multiple_of(ell) {
                    return Err(Error::invalid(format!(
                        "linearity degree {ell} does not divide m = {m}"
                    )));
                }
                let graded = AmbientSpace::new(space.q, ell, m / ell, space.n, space.metric)?;
                let ns = graded.n * graded.s;
                if *k == 0 || *k > ns {
                    return Err(Error::invalid(format!(
                        "dimension k = {k} outside 1..={ns}"
                    )));
                }
                Ok(graded)
            }
            _ => Err(Error::invalid(
                "nonlinear families take a cardinality, linear ones a dimension",
            )),
        }
    }
}

fn check_distance(space: &AmbientSpace, d: usize, max: usize) -> Result<()> {
    if d == 0 || d > max {
        return Err(Error::invalid(format!(
            "distance d = {d} outside 1..={max} for diameter {}",
            space.diameter()
        )));
    }
    Ok(())
}

/// Exponent `E` of the Singleton-type bound `|C| <= q^E`:
/// `max(m, η) (t min(m, η) - d + 1)`, which specialises to `m (n - d + 1)`
/// for Hamming and `max(n, m) (min(n, m) - d + 1)` for rank.
pub fn singleton_exponent(space: &AmbientSpace, d: usize) -> Result<usize> {
    check_distance(space, d, space.diameter())?;
    let (m, eta, t) = (space.m(), space.eta(), space.t());
    Ok(m.max(eta) * (t * m.min(eta) - d + 1))
}

/// Largest possible size of a code with minimum distance `d`.
pub fn singleton_max(space: &AmbientSpace, d: usize) -> Result<BigNat> {
    Ok(space.q_nat().pow(singleton_exponent(space, d)? as u32))
}

/// Largest `k` with `ℓ k <= E`, and whether `ℓ k` reaches `E` exactly.
pub fn max_linear_dimension(space: &AmbientSpace, d: usize) -> Result<(usize, bool)> {
    let e = singleton_exponent(space, d)?;
    let k = e / space.ell;
    Ok((k, k * space.ell == e))
}

/// `⌈q^{mn} / v(d-1)⌉`, the size guaranteed by the Gilbert–Varshamov bound.
pub fn gv_cardinality(space: &AmbientSpace, d: usize) -> Result<BigNat> {
    check_distance(space, d, space.diameter() + 1)?;
    Ok(ceil_div(&space.size(), &ball_volume(space, d - 1)))
}

/// Exact bounds on a density, with the unclamped values kept alongside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityBracket {
    pub lower: BigRat,
    pub upper: BigRat,
    pub raw_lower: BigRat,
    pub raw_upper: BigRat,
}

impl DensityBracket {
    pub fn from_raw(raw_lower: BigRat, raw_upper: BigRat) -> Self {
        DensityBracket {
            lower: clamp_unit(&raw_lower),
            upper: clamp_unit(&raw_upper),
            raw_lower,
            raw_upper,
        }
    }

    pub fn trivial() -> Self {
        Self::from_raw(BigRat::one(), BigRat::one())
    }

    pub fn contains(&self, x: &BigRat) -> bool {
        self.lower <= *x && *x <= self.upper
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonlinearBoundTerms {
    pub beta0: BigRat,
    pub beta1: BigRat,
    pub theta: BigRat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SublinearBoundTerms {
    pub theta_bar: BigRat,
}

struct Nonlinear {
    total: BigRat,
    s: BigRat,
    v: BigNat,
    terms: NonlinearBoundTerms,
}

fn nonlinear_parts(space: &AmbientSpace, cardinality: &BigNat, d: usize) -> Result<Nonlinear> {
    let total = space.size();
    if total < nat(4) {
        return Err(Error::invalid(format!(
            "nonlinear brackets need an ambient space with q^(mn) >= 4 elements, got {total}"
        )));
    }
    if *cardinality < nat(2) || *cardinality > total {
        return Err(Error::invalid(format!(
            "cardinality {cardinality} outside 2..={total}"
        )));
    }
    check_distance(space, d, space.diameter() + 1)?;
    let v = ball_volume(space, d - 1);
    let nr = rat_from_nat(&total);
    let vr = rat_from_nat(&v);
    let s = rat_from_nat(cardinality);
    let one = BigRat::one();
    let two = rat(2, 1);
    let three = rat(3, 1);
    let beta0 = rat(1, 2) * &nr * (&vr - &one) - &two * &vr + &three;
    let beta1 = &two * &vr - rat(4, 1);
    let theta = &one
        + &beta1 * (&s - &two) / (&nr - &two)
        + &beta0 * (&s - &two) * (&s - &three) / ((&nr - &two) * (&nr - &three));
    Ok(Nonlinear {
        total: nr,
        s,
        v,
        terms: NonlinearBoundTerms {
            beta0,
            beta1,
            theta,
        },
    })
}

/// Bracket on the density of `S`-element codes with minimum distance at
/// least `d`, treating `F_{q^m}^n` as an unstructured alphabet of size `q^m`.
pub fn nonlinear_bracket(
    space: &AmbientSpace,
    cardinality: &BigNat,
    d: usize,
) -> Result<(DensityBracket, NonlinearBoundTerms)> {
    let parts = nonlinear_parts(space, cardinality, d)?;
    if parts.v.is_one() {
        return Ok((DensityBracket::trivial(), parts.terms));
    }
    let one = BigRat::one();
    let pairs = (rat_from_nat(&parts.v) - &one) * &parts.s * (&parts.s - &one)
        / (rat(2, 1) * (&parts.total - &one));
    let bracket = DensityBracket::from_raw(&one - &pairs, &one - &pairs / &parts.terms.theta);
    Ok((bracket, parts.terms))
}

struct Sublinear {
    ratio_v: BigRat,
    a: BigRat,
    total: BigRat,
    terms: SublinearBoundTerms,
}

fn sublinear_parts(space: &AmbientSpace, k: usize, d: usize) -> Result<Sublinear> {
    let ns = space.n * space.s;
    if k == 0 || k > ns {
        return Err(Error::invalid(format!(
            "dimension k = {k} outside 1..={ns}"
        )));
    }
    check_distance(space, d, space.diameter() + 1)?;
    let base = space.q_nat().pow(space.ell as u32);
    let v = rat_from_nat(&ball_volume(space, d - 1));
    let one = BigRat::one();
    let ratio_v = (v - &one) / (rat_from_nat(&base) - &one);
    let (ns, k) = (ns as i64, k as i64);
    let a = rat_from_nat(&qbinom(ns - 1, k - 1, &base)?);
    let b = rat_from_nat(&qbinom(ns - 2, k - 2, &base)?);
    let total = rat_from_nat(&qbinom(ns, k, &base)?);
    let theta_bar = &one + (&ratio_v - &one) * &b / &a;
    Ok(Sublinear {
        ratio_v,
        a,
        total,
        terms: SublinearBoundTerms { theta_bar },
    })
}

/// Bracket on the density of `k`-dimensional `F_{q^ℓ}`-linear codes with
/// minimum distance at least `d` (`ℓ` is the space's `ell`).
pub fn sublinear_bracket(
    space: &AmbientSpace,
    k: usize,
    d: usize,
) -> Result<(DensityBracket, SublinearBoundTerms)> {
    let parts = sublinear_parts(space, k, d)?;
    if parts.ratio_v.is_zero() {
        return Ok((DensityBracket::trivial(), parts.terms));
    }
    let one = BigRat::one();
    let bad = &parts.ratio_v * &parts.a / &parts.total;
    let bracket = DensityBracket::from_raw(&one - &bad, &one - &bad / &parts.terms.theta_bar);
    Ok((bracket, parts.terms))
}

/// Bracket for any family spec.
pub fn density_bracket(space: &AmbientSpace, spec: &CodeFamilySpec) -> Result<DensityBracket> {
    let graded = spec.resolve(space)?;
    match &spec.size {
        CodeSize::Cardinality(s) => Ok(nonlinear_bracket(&graded, s, spec.d)?.0),
        CodeSize::Dimension(k) => Ok(sublinear_bracket(&graded, *k, spec.d)?.0),
    }
}

/// Bounds `[lower, upper]` on the number of codes in the family with
/// minimum distance at most `d - 1`, together with the total number of codes.
pub fn bad_code_count_brackets(
    space: &AmbientSpace,
    spec: &CodeFamilySpec,
    factor_limit: u64,
) -> Result<(BigRat, BigRat, BigNat)> {
    let graded = spec.resolve(space)?;
    match &spec.size {
        CodeSize::Cardinality(s) => {
            let parts = nonlinear_parts(&graded, s, spec.d)?;
            let total = graded.size();
            let codes = binom_big(&total, s, factor_limit)?;
            if parts.v.is_one() {
                return Ok((BigRat::zero(), BigRat::zero(), codes));
            }
            let containing = binom_big(&(&total - 2u32), &(s - 2u32), factor_limit)?;
            let upper = rat(1, 2)
                * &parts.total
                * (rat_from_nat(&parts.v) - BigRat::one())
                * rat_from_nat(&containing);
            let lower = &upper / &parts.terms.theta;
            Ok((lower, upper, codes))
        }
        CodeSize::Dimension(k) => {
            let parts = sublinear_parts(&graded, *k, spec.d)?;
            let codes = parts
                .total
                .to_integer()
                .to_biguint()
                .expect("positive count");
            if parts.ratio_v.is_zero() {
                return Ok((BigRat::zero(), BigRat::zero(), codes));
            }
            let upper = &parts.ratio_v * &parts.a;
            let lower = &upper / &parts.terms.theta_bar;
            Ok((lower, upper, codes))
        }
    }
}
