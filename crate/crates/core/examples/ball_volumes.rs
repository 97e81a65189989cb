use code_density::config::Guards;
use code_density::metric::{ball_volume, ball_volume_oracle, AmbientSpace};

fn main() -> code_density::Result<()> {
    let spaces = [
        AmbientSpace::hamming(2, 1, 2, 4)?,
        AmbientSpace::rank(2, 1, 2, 4)?,
        AmbientSpace::sum_rank(2, 1, 2, 4, 2)?,
    ];
    let guards = Guards::default();
    for space in &spaces {
        print!("{:>9} |", space.metric.name());
        for r in 0..=space.diameter() {
            let v = ball_volume(space, r);
            assert_eq!(v, ball_volume_oracle(space, r, &guards)?);
            print!(" {v}");
        }
        println!("  (of {})", space.size());
    }
    Ok(())
}
