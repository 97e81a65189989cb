use code_density::config::Guards;
use code_density::experiment::{all_pass, verify_suite, Grid};

fn main() -> code_density::Result<()> {
    let verdicts = verify_suite(Grid::Micro, &Guards::default())?;
    for v in verdicts
        .iter()
        .filter(|v| !v.pass)
        .chain(verdicts.iter().take(5))
    {
        println!("{v}");
    }
    println!(
        "{} checks, all pass: {}",
        verdicts.len(),
        all_pass(&verdicts)
    );
    Ok(())
}
