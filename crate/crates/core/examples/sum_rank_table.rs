use code_density::classify::{msrd_eta_region, table1};

fn main() -> code_density::Result<()> {
    for row in table1(10, 3)? {
        println!(
            "eta={:<8} t={:<8} d={} expected {:<9} {} instances {}",
            row.eta,
            row.t,
            row.d,
            row.expected,
            row.instances.len(),
            if row.pass() { "ok" } else { "MISMATCH" }
        );
    }
    for cell in msrd_eta_region(2..=5, 1..=3)? {
        println!(
            "t={} eta={}: {} / {}",
            cell.t,
            cell.eta,
            cell.region.label(),
            cell.classified.label()
        );
    }
    Ok(())
}
