use code_density::classify::Scenario;
use code_density::cli::decimal;
use code_density::experiment::convergence_experiment;
use code_density::metric::{Growing, Metric};

fn main() -> code_density::Result<()> {
    let probes = [2, 3, 5, 7, 11, 101, 1009];
    for sc in [
        Scenario::new(Metric::Hamming, Growing::Q)
            .params(0, 1, 1, 4)
            .distance(3),
        Scenario::new(Metric::Rank, Growing::Q)
            .params(0, 1, 3, 3)
            .distance(2),
    ] {
        println!("{} d={}", sc.metric.name(), sc.d);
        for row in convergence_experiment(&sc, &probes)? {
            println!(
                "  q={:<5} rho={:<24} [{}, {}]",
                row.probe,
                row.rho.to_string(),
                decimal(&row.bracket.lower, 6),
                decimal(&row.bracket.upper, 6)
            );
        }
    }
    Ok(())
}
