use code_density::bounds::CodeFamilySpec;
use code_density::combinatorics::rat;
use code_density::config::Guards;
use code_density::experiment::{estimate_density, exact_density};
use code_density::metric::AmbientSpace;

fn main() -> code_density::Result<()> {
    let space = AmbientSpace::sum_rank(2, 1, 2, 4, 2)?;
    let spec = CodeFamilySpec::linear(1, 2, 2);
    let guards = Guards::default();
    let exact = exact_density(&space, &spec, &guards)?;
    let streams = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let r = estimate_density(&space, &spec, 20_000, 7, &rat(99, 100), streams, &guards)?;
    println!("exact {exact}");
    println!(
        "{}/{} optimal codes, 99% interval [{}, {}]",
        r.successes, r.trials, r.ci_lower, r.ci_upper
    );
    println!("{}", serde_json::to_string_pretty(&r.to_json()).unwrap());
    Ok(())
}
