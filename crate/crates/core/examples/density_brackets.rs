use code_density::bounds::{density_bracket, CodeFamilySpec};
use code_density::combinatorics::nat;
use code_density::config::Guards;
use code_density::experiment::exact_density;
use code_density::metric::AmbientSpace;

fn main() -> code_density::Result<()> {
    let guards = Guards::default();
    let cases = [
        (
            AmbientSpace::hamming(2, 1, 1, 2)?,
            CodeFamilySpec::nonlinear(nat(2), 2),
        ),
        (
            AmbientSpace::hamming(2, 1, 2, 2)?,
            CodeFamilySpec::linear(1, 1, 2),
        ),
        (
            AmbientSpace::rank(2, 1, 2, 2)?,
            CodeFamilySpec::linear(1, 2, 2),
        ),
        (
            AmbientSpace::sum_rank(2, 1, 2, 4, 2)?,
            CodeFamilySpec::linear(1, 2, 2),
        ),
    ];
    for (space, spec) in &cases {
        let b = density_bracket(space, spec)?;
        let exact = exact_density(space, spec, &guards)?;
        println!(
            "{:>9} n={} d={}: {} <= {} <= {}",
            space.metric.name(),
            space.n,
            spec.d,
            b.lower,
            exact,
            b.upper
        );
    }
    Ok(())
}
