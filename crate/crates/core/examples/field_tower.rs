use code_density::field::{Codeword, FieldTower};

fn main() -> code_density::Result<()> {
    // F_4 inside F_16
    let tower = FieldTower::build(2, 2, 2)?;
    println!(
        "modulus {:?}, subfield order {}",
        tower.modulus(),
        tower.subfield_order()
    );
    println!("subfield basis {:?}", tower.subfield_basis());
    println!("relative basis {:?}", tower.relative_basis());

    let x = Codeword::new(vec![3, 7, 12]);
    let flat = tower.flatten(&x);
    println!("{:?} -> {:?} -> {:?}", x, flat, tower.unflatten(&flat));
    println!("packed index {}", tower.pack(&x));
    for row in tower.expand_to_prime_field(&x) {
        println!("  {row:?}");
    }
    Ok(())
}
