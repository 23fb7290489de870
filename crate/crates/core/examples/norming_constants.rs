//! Norming constants a_n and b_n for every catalog model.
//!
//! `cargo run --release --example norming_constants`

use selfnorm_lab::models::catalog;
use selfnorm_lab::norming::norming;

fn main() {
    let grid = [10u64, 1_000, 100_000];
    for model in catalog() {
        print!("{:<26}", model.name());
        for &n in &grid {
            match norming(&model, n) {
                Ok(r) => print!(" a_{n}={:<14.6e}", r.a_n),
                Err(e) => print!(" a_{n}=({e})"),
            }
        }
        println!();
    }
}
