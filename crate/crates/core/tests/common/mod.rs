#![allow(dead_code)]

use code_density::bounds::CodeFamilySpec;
use code_density::classify::Scenario;
use code_density::combinatorics::nat;
use code_density::metric::{AmbientSpace, Growing, Metric};

/// Every scenario with q = 2, n <= 6, s <= 4, ℓ <= 4, each metric, each
/// growing parameter, each distance and both linearities.
pub fn grid() -> Vec<Scenario> {
    let mut out = Vec::new();
    for n in 1..=6usize {
        for s in 1..=4usize {
            for ell in 1..=4usize {
                let mut metrics = vec![Metric::Hamming, Metric::Rank];
                metrics.extend(
                    (2..=n)
                        .filter(|t| n % t == 0)
                        .map(|t| Metric::SumRank { t }),
                );
                for metric in metrics {
                    let diameter = match metric {
                        Metric::Hamming => n,
                        Metric::Rank => n.min(ell * s),
                        Metric::SumRank { t } => t * (ell * s).min(n / t),
                    };
                    for growing in Growing::ALL {
                        for d in 1..=diameter {
                            for linear in [true, false] {
                                let mut sc = Scenario::new(metric, growing)
                                    .params(2, ell, s, n)
                                    .distance(d);
                                if !linear {
                                    sc = sc.nonlinear();
                                }
                                out.push(sc);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Small cases whose exact density is known by enumeration.
pub fn sampled_cases() -> Vec<(&'static str, AmbientSpace, CodeFamilySpec)> {
    let sp = |q, ell, s, n, metric| AmbientSpace::new(q, ell, s, n, metric).unwrap();
    vec![
        (
            "hamming q=2 n=2 S=2 d=2",
            sp(2, 1, 1, 2, Metric::Hamming),
            CodeFamilySpec::nonlinear(nat(2), 2),
        ),
        (
            "hamming q=2 s=2 n=2 k=1 d=2",
            sp(2, 1, 2, 2, Metric::Hamming),
            CodeFamilySpec::linear(1, 1, 2),
        ),
        (
            "rank q=2 s=2 n=2 k=2 d=2",
            sp(2, 1, 2, 2, Metric::Rank),
            CodeFamilySpec::linear(1, 2, 2),
        ),
        (
            "hamming q=3 n=3 S=3 d=2",
            sp(3, 1, 1, 3, Metric::Hamming),
            CodeFamilySpec::nonlinear(nat(3), 2),
        ),
        (
            "sumrank(t=2) q=2 s=2 n=4 k=2 d=2",
            sp(2, 1, 2, 4, Metric::SumRank { t: 2 }),
            CodeFamilySpec::linear(1, 2, 2),
        ),
    ]
}
