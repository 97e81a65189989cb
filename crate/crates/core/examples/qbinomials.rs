//! Gaussian binomials and the Euler product enclosure.
use code_density::cli::decimal;
use code_density::combinatorics::{euler_pi, nat, qbinom, rat};

fn main() -> code_density::Result<()> {
    for q in [2u64, 3, 4] {
        let row: Vec<String> = (0..=5)
            .map(|b| qbinom(5, b, &nat(q)).map(|v| v.to_string()))
            .collect::<Result<_, _>>()?;
        println!("q={q}: [5 choose b]_q = {}", row.join(" "));
    }
    let e = euler_pi(&nat(2), &rat(1, 1_000_000))?;
    println!(
        "pi(2) = prod 2^i/(2^i - 1) in [{}, {}]",
        decimal(&e.lo, 9),
        decimal(&e.hi, 9)
    );
    Ok(())
}
