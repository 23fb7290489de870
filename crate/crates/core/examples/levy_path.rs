//! One α-stable Lévy path on [0, 1] with its quadratic variation and
//! biggest jump; writes the path and jumps as CSV into the working directory.
//!
//! `cargo run --release --example levy_path -- [alpha] [p]`

use selfnorm_lab::levy::{biggest_jump, quadratic_variation, simulate_path, LimitSpec};
use selfnorm_lab::RandomSource;

fn main() -> selfnorm_lab::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let alpha = args.first().copied().unwrap_or(1.5);
    let p = args.get(1).copied().unwrap_or(0.5);
    let spec = LimitSpec::unit(alpha, p)?;
    let path = simulate_path(&spec, 0.0, 0.01, 1024, &mut RandomSource::new(5, 0))?;
    let qv = quadratic_variation(&path);
    println!("alpha = {alpha}, p = {p}: {} jumps", path.jumps.len());
    println!("X(1) = {:.5}, [X]_1 = {qv:.5}, J = {:.5}", path.endpoint(), biggest_jump(&path));
    println!("X(1)/sqrt([X]_1) = {:.5}", path.endpoint() / qv.sqrt());
    let mut csv = String::from("time,value\n");
    for (t, v) in path.grid.iter().zip(&path.values) {
        csv.push_str(&format!("{t},{v}\n"));
    }
    std::fs::write("levy_path.csv", csv)?;
    let mut jumps = String::from("time,size\n");
    for j in &path.jumps {
        jumps.push_str(&format!("{},{}\n", j.time, j.size));
    }
    std::fs::write("levy_path.jumps.csv", jumps)?;
    println!("wrote levy_path.csv and levy_path.jumps.csv");
    Ok(())
}
