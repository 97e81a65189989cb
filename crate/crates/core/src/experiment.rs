//! Exhaustive and Monte Carlo densities, and verification reports.

use std::fmt;

use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::bounds::{density_bracket, CodeFamilySpec, CodeSize, DensityBracket};
use crate::classify::{ratio_probe, Scenario};
use crate::combinatorics::{binom_big, nat, qbinom, rat, BigRat};
use crate::config::Guards;
use crate::error::{Error, Result};
use crate::field::{
    enumerate_subspaces, sample_indices, sample_subspace, FieldTower, SubspaceBasis,
};
use crate::metric::{
    ball_volume, ball_volume_oracle, min_distance, projective_points, AmbientSpace, CodeRef,
    Metric, PackedVectors,
};

/// Exact rational as a `"p/q"` string (`"p"` for integers).
pub fn rat_string(x: &BigRat) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Weight lookup for a space: a table when the space is small enough,
/// direct computation otherwise.
struct Weights<'a> {
    space: &'a AmbientSpace,
    table: Option<Vec<u8>>,
}

impl<'a> Weights<'a> {
    fn new(space: &'a AmbientSpace, guards: &Guards) -> Result<Self> {
        space.prime()?;
        let table = space.weight_table(guards).ok();
        Ok(Weights { space, table })
    }

    fn of(&self, idx: u64) -> usize {
        match &self.table {
            Some(t) => t[idx as usize] as usize,
            None => self.space.weight_of_index(idx),
        }
    }
}

fn linear_min_weight(
    weights: &Weights<'_>,
    pv: &PackedVectors,
    tower: &FieldTower,
    basis: &SubspaceBasis,
    points: &[Vec<u32>],
) -> usize {
    let f = tower.subfield();
    let k = basis.dim();
    let order = tower.subfield_order() as usize;
    // scaled[i][c] = packed index of c · row_i
    let scaled: Vec<Vec<u64>> = (0..k)
        .map(|i| {
            (0..order as u32)
                .map(|c| {
                    let mut coeffs = vec![0u32; k];
                    coeffs[i] = c;
                    tower.pack(&tower.unflatten(&basis.combine(f, &coeffs)))
                })
                .collect()
        })
        .collect();
    points
        .iter()
        .map(|c| {
            let idx = c
                .iter()
                .zip(&scaled)
                .fold(0, |acc, (&ci, row)| pv.add(acc, row[ci as usize]));
            weights.of(idx)
        })
        .min()
        .unwrap_or(usize::MAX)
}

fn subset_min_distance(weights: &Weights<'_>, pv: &PackedVectors, code: &[u64]) -> usize {
    let mut best = usize::MAX;
    for (i, &x) in code.iter().enumerate() {
        for &y in &code[i + 1..] {
            best = best.min(weights.of(pv.sub(x, y)));
        }
    }
    best
}

/// Visit every `size`-subset of `0..total` in lexicographic order.
fn for_each_subset(total: u64, size: usize, mut visit: impl FnMut(&[u64])) {
    if size as u64 > total {
        return;
    }
    let mut idx: Vec<u64> = (0..size as u64).collect();
    loop {
        visit(&idx);
        let mut i = size;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < total - (size - i) as u64 {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Number of codes in the family with each minimum distance, by full
/// enumeration, indexed `0..=diameter`, plus the number of codes.
pub fn min_distance_histogram(
    space: &AmbientSpace,
    spec: &CodeFamilySpec,
    guards: &Guards,
) -> Result<(Vec<u64>, u64)> {
    let graded = spec.resolve(space)?;
    let weights = Weights::new(&graded, guards)?;
    let mut hist = vec![0u64; graded.diameter() + 1];
    match &spec.size {
        CodeSize::Cardinality(s) => {
            let total = graded.size_within(guards.space)?;
            let count = binom_big(&nat(total), s, guards.enumeration)?;
            if count > nat(guards.enumeration) {
                return Err(Error::SizeLimit {
                    what: format!("{s}-subsets of a {total}-element space"),
                    count,
                    guard: guards.enumeration,
                });
            }
            let pv = PackedVectors::for_space(&graded)?;
            let size = s.to_usize().expect("guarded");
            for_each_subset(total, size, |code| {
                hist[subset_min_distance(&weights, &pv, code)] += 1;
            });
            Ok((hist, count.to_u64().expect("guarded")))
        }
        CodeSize::Dimension(k) => {
            let tower = graded.tower()?;
            let pv = PackedVectors::for_space(&graded)?;
            let points = projective_points(*k, tower.subfield_order());
            let counts: Vec<usize> = enumerate_subspaces(*k, &tower, graded.n, guards)?
                .par_bridge()
                .map(|basis| linear_min_weight(&weights, &pv, &tower, &basis, &points))
                .collect();
            for w in &counts {
                hist[*w] += 1;
            }
            Ok((hist, counts.len() as u64))
        }
    }
}

/// Exact density of the family by enumerating every code.
pub fn exact_density(
    space: &AmbientSpace,
    spec: &CodeFamilySpec,
    guards: &Guards,
) -> Result<BigRat> {
    spec.resolve(space)?;
    if spec.d == 1 {
        return Ok(rat(1, 1));
    }
    let (hist, total) = min_distance_histogram(space, spec, guards)?;
    Ok(density_from_histogram(&hist, total, spec.d))
}

fn density_from_histogram(hist: &[u64], total: u64, d: usize) -> BigRat {
    let good: u64 = hist.iter().skip(d).sum();
    BigRat::new(good.into(), total.into())
}

/// Monte Carlo density estimate with an exact Clopper–Pearson interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleReport {
    pub trials: u64,
    pub successes: u64,
    pub point_estimate: BigRat,
    pub ci_lower: BigRat,
    pub ci_upper: BigRat,
    pub confidence_level: BigRat,
    pub seed: u64,
    pub worker_streams: usize,
}

impl SampleReport {
    /// JSON with sorted keys and rationals as strings. The number of worker
    /// streams does not influence any drawn value and is left out.
    pub fn to_json(&self) -> Value {
        json!({
            "trials": self.trials,
            "successes": self.successes,
            "point_estimate": rat_string(&self.point_estimate),
            "ci_lower": rat_string(&self.ci_lower),
            "ci_upper": rat_string(&self.ci_upper),
            "confidence_level": rat_string(&self.confidence_level),
            "seed": self.seed,
        })
    }
}

/// The generator for trial `index`: keyed by the seed, one stream per trial.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Estimate the density from `trials` uniformly drawn codes, split into
/// `streams` contiguous blocks evaluated in parallel.
pub fn estimate_density(
    space: &AmbientSpace,
    spec: &CodeFamilySpec,
    trials: u64,
    seed: u64,
    level: &BigRat,
    streams: usize,
    guards: &Guards,
) -> Result<SampleReport> {
    if trials == 0 || streams == 0 {
        return Err(Error::invalid("trials and streams must be positive"));
    }
    let graded = spec.resolve(space)?;
    let weights = Weights::new(&graded, guards)?;
    let d = spec.d;
    let trial: Box<dyn Fn(u64) -> Result<bool> + Sync> = match &spec.size {
        CodeSize::Cardinality(s) => {
            let total = graded.size_within(guards.space)?;
            let size = s
                .to_u64()
                .filter(|&v| v >= 2 && v <= total)
                .ok_or_else(|| Error::invalid(format!("cardinality {s} outside 2..={total}")))?;
            let pv = PackedVectors::for_space(&graded)?;
            let weights = &weights;
            Box::new(move |i| {
                let code = sample_indices(&mut trial_rng(seed, i), size, total);
                Ok(subset_min_distance(weights, &pv, &code) >= d)
            })
        }
        CodeSize::Dimension(k) => {
            let tower = graded.tower()?;
            let pv = PackedVectors::for_space(&graded)?;
            let points = projective_points(*k, tower.subfield_order());
            let (k, n) = (*k, graded.n);
            let weights = &weights;
            Box::new(move |i| {
                let basis = sample_subspace(&mut trial_rng(seed, i), k, &tower, n)?;
                Ok(linear_min_weight(weights, &pv, &tower, &basis, &points) >= d)
            })
        }
    };
    let w = streams as u64;
    let successes = (0..w)
        .into_par_iter()
        .map(|b| {
            let (start, end) = (b * trials / w, (b + 1) * trials / w);
            let mut hits = 0u64;
            for i in start..end {
                hits += u64::from(trial(i)?);
            }
            Ok(hits)
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum();
    let (ci_lower, ci_upper) = crate::stats::clopper_pearson(successes, trials, level)?;
    Ok(SampleReport {
        trials,
        successes,
        point_estimate: BigRat::new(successes.into(), trials.into()),
        ci_lower,
        ci_upper,
        confidence_level: level.clone(),
        seed,
        worker_streams: streams,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subject {
    Bracket,
    Classification,
    Volume,
    Reduction,
}

impl Subject {
    pub fn name(&self) -> &'static str {
        match self {
            Subject::Bracket => "bracket",
            Subject::Classification => "classification",
            Subject::Volume => "volume",
            Subject::Reduction => "reduction",
        }
    }
}

/// The compared values behind a verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Check {
    Contains {
        lower: BigRat,
        value: BigRat,
        upper: BigRat,
    },
    Equal {
        left: String,
        right: String,
    },
}

impl Check {
    pub fn holds(&self) -> bool {
        match self {
            Check::Contains {
                lower,
                value,
                upper,
            } => lower <= value && value <= upper,
            Check::Equal { left, right } => left == right,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub subject: Subject,
    pub label: String,
    pub pass: bool,
    pub check: Check,
}

impl Verdict {
    pub fn new(subject: Subject, label: impl Into<String>, check: Check) -> Self {
        Verdict {
            subject,
            label: label.into(),
            pass: check.holds(),
            check,
        }
    }

    pub fn equal(
        subject: Subject,
        label: impl Into<String>,
        left: impl fmt::Display,
        right: impl fmt::Display,
    ) -> Self {
        Self::new(
            subject,
            label,
            Check::Equal {
                left: left.to_string(),
                right: right.to_string(),
            },
        )
    }

    pub fn to_json(&self) -> Value {
        let details = match &self.check {
            Check::Contains {
                lower,
                value,
                upper,
            } => json!({
                "lower": rat_string(lower),
                "value": rat_string(value),
                "upper": rat_string(upper),
            }),
            Check::Equal { left, right } => json!({ "left": left, "right": right }),
        };
        json!({
            "subject": self.subject.name(),
            "label": self.label,
            "pass": self.pass,
            "details": details,
        })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.pass { "PASS" } else { "FAIL" };
        match &self.check {
            Check::Contains {
                lower,
                value,
                upper,
            } => write!(
                f,
                "[{mark}] {} {}: {} <= {} <= {}",
                self.subject.name(),
                self.label,
                rat_string(lower),
                rat_string(value),
                rat_string(upper)
            ),
            Check::Equal { left, right } => {
                write!(
                    f,
                    "[{mark}] {} {}: {left} == {right}",
                    self.subject.name(),
                    self.label
                )
            }
        }
    }
}

fn spec_label(space: &AmbientSpace, spec: &CodeFamilySpec) -> String {
    let size = match &spec.size {
        CodeSize::Cardinality(s) => format!("S={s}"),
        CodeSize::Dimension(k) => format!("ℓ={} k={k}", spec.linearity),
    };
    format!(
        "{} q={} m={} n={} {size} d={}",
        space.metric,
        space.q,
        space.m(),
        space.n,
        spec.d
    )
}

/// Whether the exact density lies inside the computed bracket.
pub fn verify_bracket(
    space: &AmbientSpace,
    spec: &CodeFamilySpec,
    guards: &Guards,
) -> Result<Verdict> {
    let density = exact_density(space, spec, guards)?;
    let bracket = density_bracket(space, spec)?;
    Ok(bracket_verdict(space, spec, &bracket, density))
}

fn bracket_verdict(
    space: &AmbientSpace,
    spec: &CodeFamilySpec,
    bracket: &DensityBracket,
    value: BigRat,
) -> Verdict {
    Verdict::new(
        Subject::Bracket,
        spec_label(space, spec),
        Check::Contains {
            lower: bracket.lower.clone(),
            value,
            upper: bracket.upper.clone(),
        },
    )
}

/// Bracket verdicts for every `d` of one family size, sharing a single
/// enumeration.
pub fn verify_brackets_all_d(
    space: &AmbientSpace,
    size: CodeSize,
    linearity: usize,
    guards: &Guards,
) -> Result<Vec<Verdict>> {
    let base = CodeFamilySpec {
        linearity,
        size,
        d: 1,
    };
    let (hist, total) = min_distance_histogram(space, &base, guards)?;
    let diameter = base.resolve(space)?.diameter();
    (1..=diameter)
        .map(|d| {
            let spec = CodeFamilySpec { d, ..base.clone() };
            let bracket = density_bracket(space, &spec)?;
            let density = if d == 1 {
                rat(1, 1)
            } else {
                density_from_histogram(&hist, total, d)
            };
            Ok(bracket_verdict(space, &spec, &bracket, density))
        })
        .collect()
}

/// One row of a convergence table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceRow {
    pub probe: u64,
    pub rho: BigRat,
    pub bracket: DensityBracket,
}

/// Exact `ρ` and the finite density bracket at each probe value.
pub fn convergence_experiment(sc: &Scenario, probes: &[u64]) -> Result<Vec<ConvergenceRow>> {
    let rhos = ratio_probe(sc, probes)?;
    rhos.into_iter()
        .map(|(probe, rho)| {
            let (space, spec) = sc.code_spec_at(probe)?;
            Ok(ConvergenceRow {
                probe,
                rho,
                bracket: density_bracket(&space, &spec)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grid {
    /// Small enough to run in seconds.
    Micro,
    /// The full desk-scale grid.
    Desk,
}

fn metrics_for(n: usize) -> Vec<Metric> {
    let mut out = vec![Metric::Hamming, Metric::Rank];
    out.extend(
        (1..=n)
            .filter(|t| n.is_multiple_of(*t))
            .map(|t| Metric::SumRank { t }),
    );
    out
}

/// Closed-form ball volumes against brute force, every radius, for
/// spaces of at most `guards.space` vectors.
pub fn verify_volumes(grid: Grid, guards: &Guards) -> Result<Vec<Verdict>> {
    let (qs, max_m, max_n): (&[u64], usize, usize) = match grid {
        Grid::Micro => (&[2], 2, 3),
        Grid::Desk => (&[2, 3], 4, 4),
    };
    let mut out = Vec::new();
    for &q in qs {
        for m in 1..=max_m {
            for n in 1..=max_n {
                for metric in metrics_for(n) {
                    if let Metric::SumRank { t } = metric {
                        if ![1, 2, 4].contains(&t) {
                            continue;
                        }
                    }
                    let space = AmbientSpace::new(q, 1, m, n, metric)?;
                    if space.size() > nat(guards.space) {
                        continue;
                    }
                    let radii = 0..=space.diameter();
                    let closed: Vec<String> = radii
                        .clone()
                        .map(|r| ball_volume(&space, r).to_string())
                        .collect();
                    let brute = radii
                        .map(|r| ball_volume_oracle(&space, r, guards).map(|v| v.to_string()))
                        .collect::<Result<Vec<_>>>()?;
                    out.push(Verdict::equal(
                        Subject::Volume,
                        format!("{metric} q={q} m={m} n={n}"),
                        closed.join(","),
                        brute.join(","),
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// Sum-rank with one block against rank, and with blocks of length one
/// against Hamming: volumes, weights of every vector, and minimum distances
/// of every 3-word code in the smallest spaces.
pub fn verify_reductions(grid: Grid, guards: &Guards) -> Result<Vec<Verdict>> {
    let limit = 1u64 << 12;
    let (qs, max_m, max_n): (&[u64], usize, usize) = match grid {
        Grid::Micro => (&[2], 2, 2),
        Grid::Desk => (&[2, 3], 3, 4),
    };
    let mut out = Vec::new();
    for &q in qs {
        for m in 1..=max_m {
            for n in 1..=max_n {
                for (t, other) in [(1, Metric::Rank), (n, Metric::Hamming)] {
                    let sr = AmbientSpace::new(q, 1, m, n, Metric::SumRank { t })?;
                    if sr.size() > nat(limit) {
                        continue;
                    }
                    let reference = sr.with_metric(other)?;
                    let label = format!("sumrank(t={t}) vs {other} q={q} m={m} n={n}");
                    let vols = |s: &AmbientSpace| {
                        (0..=s.diameter())
                            .map(|r| ball_volume(s, r).to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    };
                    out.push(Verdict::equal(
                        Subject::Reduction,
                        format!("{label} volumes"),
                        vols(&sr),
                        vols(&reference),
                    ));
                    let wa = sr.weight_table(guards)?;
                    let wb = reference.weight_table(guards)?;
                    let mismatches = wa.iter().zip(&wb).filter(|(a, b)| a != b).count();
                    out.push(Verdict::equal(
                        Subject::Reduction,
                        format!("{label} weights"),
                        mismatches,
                        0,
                    ));
                    let size = wa.len() as u64;
                    if size <= 64 {
                        let tower = sr.tower()?;
                        let mut bad = 0u64;
                        let mut first_error = None;
                        for_each_subset(size, 3, |code| {
                            let words: Vec<_> = code.iter().map(|&i| tower.unpack(i, n)).collect();
                            match (
                                min_distance(&sr, CodeRef::Set(&words)),
                                min_distance(&reference, CodeRef::Set(&words)),
                            ) {
                                (Ok(a), Ok(b)) => bad += u64::from(a != b),
                                (Err(e), _) | (_, Err(e)) => {
                                    first_error = first_error.take().or(Some(e))
                                }
                            }
                        });
                        if let Some(e) = first_error {
                            return Err(e);
                        }
                        out.push(Verdict::equal(
                            Subject::Reduction,
                            format!("{label} min distances"),
                            bad,
                            0,
                        ));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Exhaustive densities against the density brackets.
pub fn verify_bracket_grid(grid: Grid, guards: &Guards) -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    let (qs, ns): (&[u64], &[usize]) = match grid {
        Grid::Micro => (&[2], &[2]),
        Grid::Desk => (&[2, 3], &[2, 3]),
    };
    for &q in qs {
        for &n in ns {
            for size in 2u64..=4 {
                let space = AmbientSpace::new(q, 1, 1, n, Metric::Hamming)?;
                if nat(size) > space.size() {
                    continue;
                }
                out.extend(verify_brackets_all_d(
                    &space,
                    CodeSize::Cardinality(nat(size)),
                    0,
                    guards,
                )?);
            }
        }
    }
    let (ells, ss, ns): (&[usize], &[usize], &[usize]) = match grid {
        Grid::Micro => (&[1], &[1, 2], &[1, 2]),
        Grid::Desk => (&[1, 2], &[1, 2], &[1, 2, 3]),
    };
    for &ell in ells {
        for &s in ss {
            for &n in ns {
                for metric in metrics_for(n) {
                    if matches!(metric, Metric::SumRank { t: 1 }) {
                        continue;
                    }
                    let space = AmbientSpace::new(2, ell, s, n, metric)?;
                    for k in 1..=n * s {
                        let codes = qbinom((n * s) as i64, k as i64, &nat(1 << ell))?;
                        if codes > nat(100_000) {
                            continue;
                        }
                        out.extend(verify_brackets_all_d(
                            &space,
                            CodeSize::Dimension(k),
                            ell,
                            guards,
                        )?);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Volume, reduction and bracket suites together.
pub fn verify_suite(grid: Grid, guards: &Guards) -> Result<Vec<Verdict>> {
    let mut out = verify_volumes(grid, guards)?;
    out.extend(verify_reductions(grid, guards)?);
    out.extend(verify_bracket_grid(grid, guards)?);
    Ok(out)
}

/// Whether every verdict passed.
pub fn all_pass(verdicts: &[Verdict]) -> bool {
    verdicts.iter().all(|v| v.pass)
}
