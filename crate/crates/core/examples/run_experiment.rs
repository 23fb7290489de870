//! Runs an experiment from an inline config and prints its JSON report.
//!
//! `cargo run --release --example run_experiment`

use selfnorm_lab::experiments::{run_experiment, ConfigFile};

const CONFIG: &str = r#"
[[experiment]]
name = "max_ratios_pareto"
kind = "max_ratios"
model = "pareto_sym:0.8"
n_grid = [100, 1000]
replicates = 5000
seed = 3
"#;

fn main() -> selfnorm_lab::Result<()> {
    let cfg = ConfigFile::parse(CONFIG)?;
    for (i, exp) in cfg.experiment.iter().enumerate() {
        let out = run_experiment(exp, i as u64)?;
        println!("{}", serde_json::to_string_pretty(&out.report)?);
    }
    Ok(())
}
