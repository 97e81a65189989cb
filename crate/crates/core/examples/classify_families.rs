use code_density::classify::{classify, Family, Scenario};
use code_density::metric::{Growing, Metric};

fn main() -> code_density::Result<()> {
    let scenarios = [
        Scenario::new(Metric::Hamming, Growing::Q)
            .params(0, 1, 1, 6)
            .distance(3),
        Scenario::new(Metric::Rank, Growing::Q)
            .params(0, 1, 4, 4)
            .distance(2),
        Scenario::new(Metric::Rank, Growing::N)
            .params(2, 1, 3, 0)
            .distance(2),
        Scenario::new(Metric::SumRank { t: 3 }, Growing::Q)
            .params(0, 1, 2, 6)
            .distance(4),
        Scenario::new(Metric::Hamming, Growing::Q)
            .params(0, 1, 1, 5)
            .distance(2)
            .nonlinear(),
        Scenario::new(Metric::Rank, Growing::Q)
            .params(0, 1, 3, 3)
            .distance(2)
            .family(Family::GilbertVarshamov),
    ];
    for sc in &scenarios {
        let c = classify(sc)?;
        let upper = c
            .verdict
            .upper()
            .map(|u| format!(" (limsup <= {u})"))
            .unwrap_or_default();
        println!(
            "{:<9} {:<4} growing {:<3} d={}: {}{upper} via {}",
            sc.metric.name(),
            if sc.linear { "lin" } else { "any" },
            sc.growing.name(),
            sc.d,
            c.verdict.label(),
            c.source
        );
        if let Some(x) = &c.cross_check {
            println!(
                "    cross-check {}: {} agrees={}",
                x.theorem,
                x.verdict.label(),
                x.agrees
            );
        }
    }
    Ok(())
}
