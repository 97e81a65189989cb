//! The `code-density` command line.
//!
//! Every document carries the tool version, the resolved configuration and
//! the seed (when one is used). Rationals are printed as `p/q` strings unless
//! `--approx DIGITS` asks for rounded decimals.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::bounds::{
    density_bracket, gv_cardinality, max_linear_dimension, nonlinear_bracket, singleton_exponent,
    singleton_max, sublinear_bracket, CodeFamilySpec, CodeSize,
};
use crate::classify::{classify, msrd_eta_region, table1, Classification, Family, Scenario};
use crate::combinatorics::{parse_rat, qbinom, BigNat, BigRat};
use crate::config::Guards;
use crate::error::{Error, Result};
use crate::experiment::{
    all_pass, convergence_experiment, estimate_density, exact_density, rat_string, verify_suite,
    Check, Grid, Verdict,
};
use crate::metric::{ball_volume, ball_volume_oracle, AmbientSpace, Growing, Metric};

/// Seed used by `estimate` when none is given.
pub const DEFAULT_SEED: u64 = 20_240_611;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "code-density",
    version,
    about = "Densities, bounds and asymptotic classification of Hamming, rank and sum-rank codes"
)]
pub struct Cli {
    /// Output format (tables default to csv, estimate to json, the rest to text).
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Print rationals as decimals rounded to this many digits.
    #[arg(long, global = true, value_name = "DIGITS")]
    approx: Option<usize>,
    /// Write the document here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum MetricArg {
    Hamming,
    Rank,
    Sumrank,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum GrowingArg {
    Q,
    N,
    Ell,
    S,
}

impl From<GrowingArg> for Growing {
    fn from(g: GrowingArg) -> Self {
        match g {
            GrowingArg::Q => Growing::Q,
            GrowingArg::N => Growing::N,
            GrowingArg::Ell => Growing::Ell,
            GrowingArg::S => Growing::S,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum FamilyArg {
    Mds,
    Mrd,
    Msrd,
    Gv,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BoundKind {
    Singleton,
    Gv,
    DensityBracket,
    Kstar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum GridArg {
    Desk,
    Micro,
}

fn metric_of(metric: MetricArg, t: Option<usize>) -> Result<Metric> {
    Ok(match metric {
        MetricArg::Hamming => Metric::Hamming,
        MetricArg::Rank => Metric::Rank,
        MetricArg::Sumrank => Metric::SumRank {
            t: t.ok_or_else(|| Error::invalid("--t is required for the sum-rank metric"))?,
        },
    })
}

/// The ambient space `F_{q^m}^n` with `m = ℓ s`.
#[derive(Debug, Args, Serialize)]
struct SpaceArgs {
    #[arg(long, value_enum)]
    metric: MetricArg,
    #[arg(long)]
    q: u64,
    #[arg(long, default_value_t = 1)]
    ell: usize,
    #[arg(long, default_value_t = 1)]
    s: usize,
    #[arg(long)]
    n: usize,
    /// Number of sum-rank blocks.
    #[arg(long)]
    t: Option<usize>,
}

impl SpaceArgs {
    fn space(&self) -> Result<AmbientSpace> {
        AmbientSpace::new(
            self.q,
            self.ell,
            self.s,
            self.n,
            metric_of(self.metric, self.t)?,
        )
    }
}

/// A code family: `--S` for nonlinear codes, `--k` for `F_{q^ℓ}`-linear ones.
#[derive(Debug, Args, Serialize)]
struct CodeArgs {
    /// Cardinality of nonlinear codes.
    #[arg(long = "S", value_name = "S", conflicts_with = "k")]
    size: Option<String>,
    /// Dimension over `F_{q^ℓ}` of linear codes.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    d: usize,
}

impl CodeArgs {
    fn spec(&self, space: &AmbientSpace) -> Result<CodeFamilySpec> {
        match (&self.size, self.k) {
            (Some(s), None) => Ok(CodeFamilySpec::nonlinear(parse_nat(s)?, self.d)),
            (None, Some(k)) => Ok(CodeFamilySpec::linear(space.ell, k, self.d)),
            _ => Err(Error::invalid("exactly one of --S and --k is required")),
        }
    }
}

fn parse_nat(s: &str) -> Result<BigNat> {
    BigNat::from_str(s.trim()).map_err(|_| Error::invalid(format!("not a natural number: {s:?}")))
}

/// A growing family of codes.
#[derive(Debug, Args, Serialize)]
struct ScenarioArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, value_enum)]
    growing: GrowingArg,
    /// Metric for `gv` and `custom` families.
    #[arg(long, value_enum)]
    metric: Option<MetricArg>,
    #[arg(long, default_value_t = 2)]
    q: u64,
    #[arg(long, default_value_t = 1)]
    ell: usize,
    #[arg(long)]
    s: Option<usize>,
    /// Extension degree `m = ℓ s`, as an alternative to `--s`.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Sum-rank block length, with `n = η t`.
    #[arg(long)]
    eta: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    d: usize,
    /// Count all codes of the family's cardinality instead of linear ones.
    #[arg(long)]
    nonlinear: bool,
    /// Custom families: `k = slope·X + intercept`, or
    /// `S = coefficient·q^{slope·X + intercept}` with `--nonlinear`.
    #[arg(long, allow_hyphen_values = true)]
    slope: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    intercept: Option<String>,
    #[arg(long)]
    coefficient: Option<String>,
}

impl ScenarioArgs {
    fn scenario(&self) -> Result<Scenario> {
        let growing = Growing::from(self.growing);
        let metric = match self.family {
            FamilyArg::Mds => Metric::Hamming,
            FamilyArg::Mrd => Metric::Rank,
            FamilyArg::Msrd => metric_of(MetricArg::Sumrank, self.t)?,
            FamilyArg::Gv | FamilyArg::Custom => metric_of(
                self.metric.ok_or_else(|| {
                    Error::invalid("--metric is required for gv and custom families")
                })?,
                self.t,
            )?,
        };
        let s = match (self.s, self.m) {
            (Some(s), Some(m)) if s * self.ell != m => {
                return Err(Error::invalid(format!(
                    "m = {m} differs from ℓ s = {}",
                    s * self.ell
                )));
            }
            (Some(s), _) => s,
            (None, Some(m)) if self.ell > 0 && m % self.ell == 0 => m / self.ell,
            (None, Some(m)) if growing == Growing::Ell => m,
            (None, Some(m)) => {
                return Err(Error::invalid(format!(
                    "ℓ = {} does not divide m = {m}",
                    self.ell
                )))
            }
            (None, None) => 1,
        };
        let from_blocks = self.eta.zip(self.t).map(|(e, t)| e * t);
        let n = match (self.n, from_blocks) {
            (Some(n), Some(b)) if n != b => {
                return Err(Error::invalid(format!("n = {n} differs from η t = {b}")))
            }
            (Some(n), _) => n,
            (None, Some(b)) => b,
            (None, None) if growing == Growing::N => 1,
            (None, None) => return Err(Error::invalid("give --n, or --eta and --t")),
        };
        let mut sc = Scenario::new(metric, growing)
            .params(self.q, self.ell, s, n)
            .distance(self.d);
        if self.nonlinear {
            sc = sc.nonlinear();
        }
        let rat_arg = |v: &Option<String>, name: &str| -> Result<BigRat> {
            v.as_deref().map(parse_rat).unwrap_or_else(|| {
                Err(Error::invalid(format!(
                    "--{name} is required for custom families"
                )))
            })
        };
        let family = match self.family {
            FamilyArg::Mds | FamilyArg::Mrd | FamilyArg::Msrd => Family::Extremal,
            FamilyArg::Gv => Family::GilbertVarshamov,
            FamilyArg::Custom if self.nonlinear => Family::ExplicitCardinality {
                coefficient: self
                    .coefficient
                    .as_deref()
                    .map(parse_rat)
                    .transpose()?
                    .unwrap_or_else(|| BigRat::from_integer(1.into())),
                slope: rat_arg(&self.slope, "slope")?,
                intercept: rat_arg(&self.intercept, "intercept")?,
            },
            FamilyArg::Custom => {
                let int = |v: BigRat, name: &str| -> Result<i64> {
                    if !v.is_integer() {
                        return Err(Error::invalid(format!(
                            "--{name} must be an integer for linear families"
                        )));
                    }
                    i64::try_from(v.to_integer())
                        .map_err(|_| Error::invalid(format!("--{name} out of range")))
                };
                Family::ExplicitDimension {
                    slope: int(rat_arg(&self.slope, "slope")?, "slope")?,
                    intercept: int(rat_arg(&self.intercept, "intercept")?, "intercept")?,
                }
            }
        };
        Ok(sc.family(family))
    }
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Gaussian binomial coefficient [A choose B]_Q.
    Qbinom {
        #[arg(allow_hyphen_values = true)]
        a: i64,
        #[arg(allow_hyphen_values = true)]
        b: i64,
        q: String,
    },
    /// Exact ball volume.
    Volume {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        radius: usize,
        /// Cross-check against brute-force enumeration.
        #[arg(long)]
        oracle: bool,
    },
    /// Singleton, Gilbert–Varshamov, k* and density-bracket bounds.
    Bound {
        #[arg(long, value_enum)]
        kind: BoundKind,
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long = "S", value_name = "S", conflicts_with = "k")]
        size: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        d: usize,
    },
    /// Asymptotic verdict for a growing family.
    Classify {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Dense / sparse regions of the (t, η) plane for sum-rank codes.
    Region {
        #[arg(long, default_value_t = 10)]
        t_max: usize,
        #[arg(long, default_value_t = 4)]
        eta_max: usize,
    },
    /// The sum-rank example table.
    Table1 {
        #[arg(long, default_value_t = 10)]
        t_max: usize,
        #[arg(long, default_value_t = 3)]
        eta_max: usize,
    },
    /// Monte Carlo density estimate with a Clopper–Pearson interval.
    Estimate {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Parallel worker streams; the result does not depend on it.
        #[arg(long, default_value_t = 1)]
        #[serde(skip)]
        streams: usize,
        #[arg(long, default_value = "99/100")]
        level: String,
    },
    /// Exact density by enumerating every code.
    Exact {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        code: CodeArgs,
    },
    /// Exact ratio and finite bracket along a growing family.
    Probe {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        probes: Vec<u64>,
    },
    /// Volume, reduction and bracket verification suites.
    Verify {
        #[arg(long, value_enum, default_value = "micro")]
        grid: GridArg,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Qbinom { .. } => "qbinom",
            Command::Volume { .. } => "volume",
            Command::Bound { .. } => "bound",
            Command::Classify { .. } => "classify",
            Command::Region { .. } => "region",
            Command::Table1 { .. } => "table1",
            Command::Estimate { .. } => "estimate",
            Command::Exact { .. } => "exact",
            Command::Probe { .. } => "probe",
            Command::Verify { .. } => "verify",
        }
    }
}

/// How rationals are printed.
#[derive(Debug, Clone, Copy)]
struct Render {
    approx: Option<usize>,
}

impl Render {
    fn rat(&self, x: &BigRat) -> String {
        match self.approx {
            None => rat_string(x),
            Some(digits) => decimal(x, digits),
        }
    }

    fn nat(&self, x: &BigNat) -> String {
        x.to_string()
    }
}

/// `x` rounded half away from zero to `digits` decimals.
pub fn decimal(x: &BigRat, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = x.abs() * BigRat::from_integer(scale.clone());
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let rounded = if r * 2 >= *scaled.denom() { q + 1 } else { q };
    let (int, frac) = rounded.div_rem(&scale);
    let sign = if x.is_negative() && !rounded_is_zero(&int, &frac) {
        "-"
    } else {
        ""
    };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{:0>width$}", frac.to_string(), width = digits)
    }
}

fn rounded_is_zero(int: &BigInt, frac: &BigInt) -> bool {
    int.is_zero() && frac.is_zero()
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

struct Output {
    result: Value,
    text: String,
    table: Option<Table>,
    seed: Option<u64>,
    failed: bool,
}

impl Output {
    fn simple(result: Value, text: String) -> Self {
        Output {
            result,
            text,
            table: None,
            seed: None,
            failed: false,
        }
    }
}

fn space_json(space: &AmbientSpace) -> Value {
    json!({
        "metric": space.metric.name(),
        "q": space.q,
        "ell": space.ell,
        "s": space.s,
        "m": space.m(),
        "n": space.n,
        "t": space.t(),
        "eta": space.eta(),
    })
}

fn execute(command: &Command, r: Render, guards: &Guards) -> Result<Output> {
    match command {
        Command::Qbinom { a, b, q } => {
            let v = qbinom(*a, *b, &parse_nat(q)?)?;
            Ok(Output::simple(json!({ "value": r.nat(&v) }), r.nat(&v)))
        }
        Command::Volume {
            space,
            radius,
            oracle,
        } => {
            let space = space.space()?;
            let v = ball_volume(&space, *radius);
            let mut result =
                json!({ "space": space_json(&space), "radius": radius, "volume": r.nat(&v) });
            let mut text = r.nat(&v);
            let mut failed = false;
            if *oracle {
                let o = ball_volume_oracle(&space, *radius, guards)?;
                failed = o != v;
                result["oracle"] = json!(r.nat(&o));
                result["agrees"] = json!(!failed);
                text = format!(
                    "{text}\noracle {} ({})",
                    r.nat(&o),
                    if failed { "MISMATCH" } else { "agrees" }
                );
            }
            Ok(Output {
                failed,
                ..Output::simple(result, text)
            })
        }
        Command::Bound {
            kind,
            space,
            size,
            k,
            d,
        } => {
            let space = space.space()?;
            bound(*kind, &space, size.as_deref(), *k, *d, r)
        }
        Command::Classify { scenario } => {
            let sc = scenario.scenario()?;
            let c = classify(&sc)?;
            Ok(Output::simple(
                classification_json(&sc, &c, r),
                classification_text(&sc, &c, r),
            ))
        }
        Command::Region { t_max, eta_max } => {
            let cells = msrd_eta_region(1..=*t_max, 1..=*eta_max)?;
            let rows: Vec<Vec<String>> = cells
                .iter()
                .map(|c| {
                    vec![
                        c.t.to_string(),
                        c.eta.to_string(),
                        c.region.label().into(),
                        c.classified.label().into(),
                    ]
                })
                .collect();
            let result = json!({
                "cells": cells.iter().map(|c| json!({
                    "t": c.t, "eta": c.eta, "verdict": c.region.label(), "classified": c.classified.label(),
                })).collect::<Vec<_>>(),
            });
            Ok(tabular(
                result,
                vec!["t", "eta", "verdict", "classified"],
                rows,
            ))
        }
        Command::Table1 { t_max, eta_max } => {
            let rows = table1(*t_max, *eta_max)?;
            let failed = !rows.iter().all(|row| row.pass());
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|row| {
                    let mut seen: Vec<&str> =
                        row.instances.iter().map(|(.., v)| v.label()).collect();
                    seen.dedup();
                    vec![
                        row.eta.clone(),
                        row.t.clone(),
                        row.d.to_string(),
                        row.expected.into(),
                        seen.join(";"),
                        row.instances.len().to_string(),
                        row.pass().to_string(),
                    ]
                })
                .collect();
            let result = json!({
                "rows": rows.iter().map(|row| json!({
                    "eta": row.eta, "t": row.t, "d": row.d, "expected": row.expected, "pass": row.pass(),
                    "instances": row.instances.iter().map(|(e, t, m, v)| json!({
                        "eta": e, "t": t, "m": m, "verdict": v.label(),
                    })).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            });
            let mut out = tabular(
                result,
                vec!["eta", "t", "d", "expected", "observed", "instances", "pass"],
                cells,
            );
            out.failed = failed;
            Ok(out)
        }
        Command::Estimate {
            space,
            code,
            trials,
            seed,
            streams,
            level,
        } => {
            let space = space.space()?;
            let spec = code.spec(&space)?;
            let level = parse_rat(level)?;
            let rep = estimate_density(&space, &spec, *trials, *seed, &level, *streams, guards)?;
            let mut result = rep.to_json();
            if r.approx.is_some() {
                for (key, x) in [
                    ("point_estimate", &rep.point_estimate),
                    ("ci_lower", &rep.ci_lower),
                    ("ci_upper", &rep.ci_upper),
                ] {
                    result[key] = json!(r.rat(x));
                }
            }
            let text = format!(
                "{}/{} successes, estimate {}, {} interval [{}, {}]",
                rep.successes,
                rep.trials,
                r.rat(&rep.point_estimate),
                r.rat(&rep.confidence_level),
                r.rat(&rep.ci_lower),
                r.rat(&rep.ci_upper)
            );
            Ok(Output {
                seed: Some(*seed),
                ..Output::simple(result, text)
            })
        }
        Command::Exact { space, code } => {
            let space = space.space()?;
            let spec = code.spec(&space)?;
            let x = exact_density(&space, &spec, guards)?;
            Ok(Output::simple(json!({ "density": r.rat(&x) }), r.rat(&x)))
        }
        Command::Probe { scenario, probes } => {
            let sc = scenario.scenario()?;
            let rows = convergence_experiment(&sc, probes)?;
            let cells = rows
                .iter()
                .map(|row| {
                    vec![
                        row.probe.to_string(),
                        r.rat(&row.rho),
                        r.rat(&row.bracket.lower),
                        r.rat(&row.bracket.upper),
                    ]
                })
                .collect();
            let result = json!({
                "scenario": sc.to_string(),
                "rows": rows.iter().map(|row| json!({
                    "probe": row.probe,
                    "rho": r.rat(&row.rho),
                    "lower": r.rat(&row.bracket.lower),
                    "upper": r.rat(&row.bracket.upper),
                })).collect::<Vec<_>>(),
            });
            Ok(tabular(
                result,
                vec!["probe", "rho", "lower", "upper"],
                cells,
            ))
        }
        Command::Verify { grid } => {
            let g = match grid {
                GridArg::Desk => Grid::Desk,
                GridArg::Micro => Grid::Micro,
            };
            let verdicts = verify_suite(g, guards)?;
            Ok(verification(&verdicts, r))
        }
    }
}

fn bound(
    kind: BoundKind,
    space: &AmbientSpace,
    size: Option<&str>,
    k: Option<usize>,
    d: usize,
    r: Render,
) -> Result<Output> {
    let mut result = json!({ "space": space_json(space), "d": d });
    let text = match kind {
        BoundKind::Singleton => {
            let e = singleton_exponent(space, d)?;
            let max = singleton_max(space, d)?;
            result["exponent"] = json!(e);
            result["max_size"] = json!(r.nat(&max));
            format!("|C| <= q^{e} = {}", r.nat(&max))
        }
        BoundKind::Gv => {
            let c = gv_cardinality(space, d)?;
            result["cardinality"] = json!(r.nat(&c));
            format!("some code has |C| >= {}", r.nat(&c))
        }
        BoundKind::Kstar => {
            let (k, exact) = max_linear_dimension(space, d)?;
            result["k"] = json!(k);
            result["meets_singleton"] = json!(exact);
            format!("k* = {k}{}", if exact { "" } else { " (quasi)" })
        }
        BoundKind::DensityBracket => {
            let spec = match (size, k) {
                (Some(s), None) => CodeFamilySpec::nonlinear(parse_nat(s)?, d),
                (None, Some(k)) => CodeFamilySpec::linear(space.ell, k, d),
                _ => {
                    return Err(Error::invalid(
                        "density-bracket needs exactly one of --S and --k",
                    ))
                }
            };
            let b = density_bracket(space, &spec)?;
            result["lower"] = json!(r.rat(&b.lower));
            result["upper"] = json!(r.rat(&b.upper));
            result["raw_lower"] = json!(r.rat(&b.raw_lower));
            result["raw_upper"] = json!(r.rat(&b.raw_upper));
            let terms = match &spec.size {
                CodeSize::Cardinality(s) => {
                    let (_, t) = nonlinear_bracket(space, s, d)?;
                    result["theta"] = json!(r.rat(&t.theta));
                    result["beta0"] = json!(r.rat(&t.beta0));
                    result["beta1"] = json!(r.rat(&t.beta1));
                    format!("Θ = {}", r.rat(&t.theta))
                }
                CodeSize::Dimension(k) => {
                    let (_, t) = sublinear_bracket(space, *k, d)?;
                    result["theta_bar"] = json!(r.rat(&t.theta_bar));
                    format!("Θ̄ = {}", r.rat(&t.theta_bar))
                }
            };
            format!(
                "lower {}\nupper {}\n{terms}",
                r.rat(&b.lower),
                r.rat(&b.upper)
            )
        }
    };
    Ok(Output::simple(result, text))
}

fn verdict_json(v: &crate::classify::Verdict, r: Render) -> Value {
    let mut out = json!({ "label": v.label() });
    match v {
        crate::classify::Verdict::NotDense { upper } => out["upper"] = json!(r.rat(upper)),
        crate::classify::Verdict::Unknown { reason } => out["reason"] = json!(reason),
        _ => {}
    }
    out
}

fn classification_json(sc: &Scenario, c: &Classification, r: Render) -> Value {
    json!({
        "scenario": sc.to_string(),
        "verdict": c.verdict.label(),
        "upper": c.verdict.upper().map(|u| r.rat(u)),
        "source": c.source,
        "witness": {
            "points": c.witness.points.iter().map(|p| json!({
                "x": p.x,
                "left": r.rat(&p.left),
                "right": r.rat(&p.right),
                "gap": r.rat(&p.gap()),
                "coefficient": r.rat(&p.coefficient),
                "poly_degree": p.poly_degree,
            })).collect::<Vec<_>>(),
            "per_period": c.witness.per_period.iter().map(|x| r.rat(x)).collect::<Vec<_>>(),
            "constant": c.witness.constant.as_ref().map(|x| r.rat(x)),
        },
        "cross_check": c.cross_check.as_ref().map(|x| json!({
            "theorem": x.theorem,
            "verdict": verdict_json(&x.verdict, r),
            "agrees": x.agrees,
            "note": x.note,
        })),
    })
}

fn classification_text(sc: &Scenario, c: &Classification, r: Render) -> String {
    let mut lines = vec![format!("{sc}"), format!("verdict: {}", c.verdict.label())];
    match &c.verdict {
        crate::classify::Verdict::NotDense { upper } => {
            lines.push(format!("upper: {}", r.rat(upper)))
        }
        crate::classify::Verdict::Unknown { reason } => lines.push(format!("reason: {reason}")),
        _ => {}
    }
    lines.push(format!("source: {}", c.source));
    for p in &c.witness.points {
        let at = p.x.map(|x| format!("at {x}: ")).unwrap_or_default();
        lines.push(format!(
            "witness: {at}exponents {} vs {}, gap {}, coefficient {}, degree {}",
            r.rat(&p.left),
            r.rat(&p.right),
            r.rat(&p.gap()),
            r.rat(&p.coefficient),
            p.poly_degree
        ));
    }
    if let Some(cst) = &c.witness.constant {
        lines.push(format!("limit constant: {}", r.rat(cst)));
    }
    if let Some(x) = &c.cross_check {
        let mut line = format!(
            "cross-check: {} says {}, {}",
            x.theorem,
            x.verdict.label(),
            if x.agrees { "agrees" } else { "DISAGREES" }
        );
        if let Some(u) = x.verdict.upper() {
            line.push_str(&format!(" (upper {})", r.rat(u)));
        }
        if let Some(note) = &x.note {
            line.push_str(&format!("; {note}"));
        }
        lines.push(line);
    }
    lines.join("\n")
}

fn check_json(check: &Check, r: Render) -> Value {
    match check {
        Check::Contains {
            lower,
            value,
            upper,
        } => json!({
            "lower": r.rat(lower), "value": r.rat(value), "upper": r.rat(upper),
        }),
        Check::Equal { left, right } => json!({ "left": left, "right": right }),
    }
}

fn verification(verdicts: &[Verdict], r: Render) -> Output {
    let failed: Vec<&Verdict> = verdicts.iter().filter(|v| !v.pass).collect();
    let mut summary = Map::new();
    for v in verdicts {
        let e = summary
            .entry(v.subject.name())
            .or_insert_with(|| json!({ "checks": 0, "failed": 0 }));
        e["checks"] = json!(e["checks"].as_u64().unwrap_or(0) + 1);
        if !v.pass {
            e["failed"] = json!(e["failed"].as_u64().unwrap_or(0) + 1);
        }
    }
    let mut text: Vec<String> = failed.iter().map(|v| v.to_string()).collect();
    for (subject, counts) in &summary {
        text.push(format!(
            "{subject}: {} checks, {} failed",
            counts["checks"], counts["failed"]
        ));
    }
    let pass = all_pass(verdicts);
    text.push(if pass {
        "all checks passed".into()
    } else {
        format!("{} checks FAILED", failed.len())
    });
    let rows = verdicts
        .iter()
        .map(|v| {
            vec![
                v.subject.name().to_string(),
                v.label.clone(),
                v.pass.to_string(),
                check_json(&v.check, r).to_string(),
            ]
        })
        .collect();
    let result = json!({
        "pass": pass,
        "summary": summary,
        "verdicts": verdicts.iter().map(|v| json!({
            "subject": v.subject.name(),
            "label": v.label,
            "pass": v.pass,
            "details": check_json(&v.check, r),
        })).collect::<Vec<_>>(),
    });
    Output {
        result,
        text: text.join("\n"),
        table: Some(Table {
            header: vec!["subject", "label", "pass", "details"],
            rows,
        }),
        seed: None,
        failed: !pass,
    }
}

fn tabular(result: Value, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Output {
    Output {
        result,
        text: String::new(),
        table: Some(Table { header, rows }),
        seed: None,
        failed: false,
    }
}

fn csv_of(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::invalid(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::invalid(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("utf-8 input"))
}

fn document(cli: &Cli, guards: &Guards, out: &Output) -> Value {
    let mut config = serde_json::to_value(cli).expect("arguments serialize");
    config["guards"] = json!({ "enumeration": guards.enumeration, "space": guards.space });
    json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": cli.command.name(),
        "config": config,
        "seed": out.seed,
        "result": out.result,
    })
}

fn render(cli: &Cli, guards: &Guards, out: &Output) -> Result<String> {
    let default = match (&cli.command, &out.table) {
        (Command::Estimate { .. }, _) => Format::Json,
        (Command::Verify { .. }, _) => Format::Text,
        (_, Some(_)) => Format::Csv,
        _ => Format::Text,
    };
    Ok(match cli.format.unwrap_or(default) {
        Format::Json => {
            let mut s =
                serde_json::to_string_pretty(&document(cli, guards, out)).expect("json serializes");
            s.push('\n');
            s
        }
        Format::Csv => match &out.table {
            Some(t) => csv_of(&t.header, &t.rows)?,
            None => {
                let rows: Vec<Vec<String>> = out
                    .result
                    .as_object()
                    .map(|m| {
                        m.iter()
                            .map(|(k, v)| {
                                let v = match v {
                                    Value::String(s) => s.clone(),
                                    other => other.to_string(),
                                };
                                vec![k.clone(), v]
                            })
                            .collect()
                    })
                    .unwrap_or_default();
                csv_of(&["key", "value"], &rows)?
            }
        },
        Format::Text => {
            let mut s = if out.text.is_empty() {
                let t = out.table.as_ref().expect("tables carry rows");
                csv_of(&t.header, &t.rows)?
            } else {
                out.text.clone()
            };
            if !s.ends_with('\n') {
                s.push('\n');
            }
            s
        }
    })
}

/// Process exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SizeLimit { .. } => 3,
        Error::InvalidArgument(_) | Error::NotImplemented(_) => 2,
    }
}

/// Parse `args` (including the program name), run the command and write
/// the document to `out` (or `--output`). Returns the exit code: 0 on
/// success, 1 when a verification fails, 2 for invalid arguments, 3 when
/// a guard is exceeded.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let guards = Guards::from_env();
    let r = Render { approx: cli.approx };
    let result =
        execute(&cli.command, r, &guards).and_then(|o| render(&cli, &guards, &o).map(|s| (o, s)));
    match result {
        Ok((o, s)) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, &s).map_err(|e| e.to_string()),
                None => out.write_all(s.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: cannot write output: {e}");
                return 2;
            }
            i32::from(o.failed)
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if exit_code(&e) == 2 {
                let mut cmd = Cli::command();
                cmd.build();
                let usage = cmd
                    .find_subcommand_mut(cli.command.name())
                    .map(|c| c.render_usage().to_string())
                    .unwrap_or_default();
                let _ = writeln!(err, "\n{usage}\n\nFor more information, try '--help'.");
            }
            exit_code(&e)
        }
    }
}
