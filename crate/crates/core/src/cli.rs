//! Command-line front end. Exit status: 0 all checks pass, 1 a statistical
//! check failed, 2 configuration error, 3 hypothesis violation, 4 numerical
//! failure.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::experiments::{run_experiment, ConfigFile, ExperimentReport};
use crate::levy::{simulate_path, LimitSpec, DEFAULT_EPSILON, DEFAULT_GRID};
use crate::models::DistributionModel;
use crate::norming::norming;
use crate::rng::RandomSource;
use crate::stats::EmpiricalSample;

#[derive(Debug, Parser)]
#[command(name = "selfnorm-lab", version, about = "Monte Carlo checks for self-normalized sums")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiments of a config file and write JSON reports.
    Run(RunArgs),
    /// Draw i.i.d. samples from a catalog model as CSV.
    Sample(SampleArgs),
    /// Simulate one limit path as CSV, with a jumps sidecar.
    Path(PathArgs),
    /// Print a_n (and b_n where defined) for a model.
    An(AnArgs),
    /// Render JSON reports as a table.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<u64>>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Report directory.
    #[arg(long, default_value = "reports")]
    pub output: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Also write raw samples as CSV.
    #[arg(long)]
    pub dump: bool,
    /// Run only the named experiments.
    #[arg(long)]
    pub only: Vec<String>,
    /// Override any experiment field, e.g. `--set grid_size=2048`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub model: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output file (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PathArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Path CSV; jumps go to the same name with `.jumps.csv`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnArgs {
    #[arg(long)]
    pub model: String,
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000,100000")]
    pub n: Vec<u64>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    pub files: Vec<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub experiment: String,
    pub report: String,
    pub verdict: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub config_hash: String,
    pub experiments: Vec<ManifestEntry>,
    pub wall_clock_seconds: f64,
    pub seed: Option<u64>,
}

pub fn main() -> i32 {
    run_cli(Cli::parse())
}

pub fn run_cli(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a),
        Command::Sample(a) => cmd_sample(&a).map(|_| 0),
        Command::Path(a) => cmd_path(&a).map(|_| 0),
        Command::An(a) => cmd_an(&a).map(|_| 0),
        Command::Report(a) => cmd_report(&a).map(|_| 0),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn config_hash(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn parse_override(s: &str) -> Result<(String, toml::Value)> {
    let (key, raw) = s
        .split_once('=')
        .ok_or_else(|| Error::config("--set", format!("`{s}` is not KEY=VALUE")))?;
    let key = key.trim().to_string();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    Ok((key, value))
}

/// Applies the command-line overrides to every experiment block.
pub fn apply_overrides(value: &mut toml::Value, args: &RunArgs) -> Result<()> {
    let mut sets: Vec<(String, toml::Value)> = Vec::new();
    if let Some(s) = args.seed {
        sets.push(("seed".into(), toml::Value::Integer(s as i64)));
    }
    if let Some(m) = args.replicates {
        sets.push(("replicates".into(), toml::Value::Integer(m as i64)));
    }
    if let Some(g) = &args.n_grid {
        let arr = g.iter().map(|&n| toml::Value::Integer(n as i64)).collect();
        sets.push(("n_grid".into(), toml::Value::Array(arr)));
    }
    if let Some(e) = args.epsilon {
        sets.push(("epsilon".into(), toml::Value::Float(e)));
    }
    for s in &args.overrides {
        sets.push(parse_override(s)?);
    }
    if sets.is_empty() {
        return Ok(());
    }
    let blocks = value
        .get_mut("experiment")
        .and_then(|v| v.as_array_mut())
        .ok_or_else(|| Error::config("experiment", "missing [[experiment]] blocks"))?;
    for block in blocks {
        let table = block
            .as_table_mut()
            .ok_or_else(|| Error::config("experiment", "blocks must be tables"))?;
        for (k, v) in &sets {
            table.insert(k.clone(), v.clone());
        }
    }
    Ok(())
}

pub fn load_config(path: &Path, args: &RunArgs) -> Result<(ConfigFile, String)> {
    let bytes = fs::read(path)
        .map_err(|e| Error::config("<file>", format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Error::config("<file>", "config is not UTF-8"))?;
    let mut value: toml::Value = text
        .parse::<toml::Table>()
        .map(toml::Value::Table)
        .map_err(|e| Error::config("<file>", e.to_string()))?;
    apply_overrides(&mut value, args)?;
    Ok((ConfigFile::from_value(value)?, config_hash(&bytes)))
}

/// Writes through a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn sample_csv(sample: &EmpiricalSample) -> String {
    let mut s = String::from("x\n");
    for v in sample.values() {
        s.push_str(&format!("{v}\n"));
    }
    s
}

fn file_safe(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect()
}

pub fn cmd_run(args: &RunArgs) -> Result<i32> {
    if let Some(j) = args.jobs {
        // fails only if a global pool already exists, which is fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    let (cfg, hash) = load_config(&args.config, args)?;
    for name in &args.only {
        if !cfg.experiment.iter().any(|e| &e.name == name) {
            return Err(Error::config("--only", format!("no experiment named `{name}`")));
        }
    }
    let start = Instant::now();
    let mut entries = Vec::new();
    let mut all_pass = true;
    for (index, exp) in cfg.experiment.iter().enumerate() {
        if !args.only.is_empty() && !args.only.contains(&exp.name) {
            continue;
        }
        let out = run_experiment(exp, index as u64)?;
        let report_path = match &exp.output {
            Some(p) => args.output.join(p),
            None => args.output.join(format!("{}.json", file_safe(&exp.name))),
        };
        let json = serde_json::to_string_pretty(&out.report)?;
        write_atomic(&report_path, format!("{json}\n").as_bytes())?;
        if args.dump {
            for (k, s) in out.samples.iter().enumerate() {
                let name = format!("{}.{k}.{}.csv", file_safe(&exp.name), file_safe(&s.label));
                write_atomic(&args.output.join(name), sample_csv(s).as_bytes())?;
            }
        }
        print!("{}", render_report(&out.report));
        all_pass &= out.report.verdict.passed();
        entries.push(ManifestEntry {
            experiment: exp.name.clone(),
            report: report_path.display().to_string(),
            verdict: if out.report.verdict.passed() { "pass" } else { "fail" }.into(),
        });
    }
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").into(),
        config_hash: hash,
        experiments: entries,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        seed: args.seed.or_else(|| cfg.experiment.first().map(|e| e.seed)),
    };
    let json = serde_json::to_string_pretty(&manifest)?;
    write_atomic(&args.output.join("manifest.json"), format!("{json}\n").as_bytes())?;
    Ok(if all_pass { 0 } else { 1 })
}

pub fn cmd_sample(args: &SampleArgs) -> Result<()> {
    let model = DistributionModel::lookup(&args.model)?;
    let mut rng = RandomSource::new(args.seed, 0);
    let mut s = String::from("x\n");
    for _ in 0..args.n {
        s.push_str(&format!("{}\n", model.sample(&mut rng)));
    }
    match &args.out {
        Some(p) => write_atomic(p, s.as_bytes()),
        None => {
            std::io::stdout().write_all(s.as_bytes())?;
            Ok(())
        }
    }
}

pub fn jumps_sidecar(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.jumps.csv"))
}

pub fn cmd_path(args: &PathArgs) -> Result<()> {
    let spec = LimitSpec::unit(args.alpha, args.p)?;
    let mut rng = RandomSource::new(args.seed, 0);
    let path = simulate_path(&spec, args.gamma, args.epsilon, args.grid, &mut rng)?;
    let mut s = String::from("time,value\n");
    for (t, v) in path.grid.iter().zip(&path.values) {
        s.push_str(&format!("{t},{v}\n"));
    }
    write_atomic(&args.out, s.as_bytes())?;
    let mut j = String::from("time,size\n");
    for jump in &path.jumps {
        j.push_str(&format!("{},{}\n", jump.time, jump.size));
    }
    write_atomic(&jumps_sidecar(&args.out), j.as_bytes())
}

pub fn cmd_an(args: &AnArgs) -> Result<()> {
    let model = DistributionModel::lookup(&args.model)?;
    println!("{:>12} {:>22} {:>22}", "n", "a_n", "b_n");
    for &n in &args.n {
        match norming(&model, n) {
            Ok(r) => {
                let b = r.b_n.map_or("-".to_string(), |b| format!("{b:.12e}"));
                println!("{n:>12} {:>22.12e} {b:>22}", r.a_n);
            }
            Err(e @ Error::NoCrossing { .. }) => println!("{n:>12} {:>22} ({e})", "-"),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

pub fn render_report(r: &ExperimentReport) -> String {
    let mut s = format!(
        "{} [{:?}] model={} alpha={} M={} verdict={}\n",
        r.experiment,
        r.kind,
        r.model,
        r.alpha,
        r.replicates,
        if r.verdict.passed() { "PASS" } else { "FAIL" }
    );
    for c in &r.checks {
        let d: Vec<String> = c.distances.iter().map(|d| format!("{d:.5}")).collect();
        s.push_str(&format!(
            "  {:<28} n={:?} d=[{}] thr={} {}\n",
            c.label,
            c.n_grid,
            d.join(", "),
            c.threshold,
            if c.verdict.passed() { "pass" } else { "FAIL" }
        ));
    }
    for row in &r.table {
        s.push_str(&format!("  x={:<10} ratio={:.6}\n", row.x, row.ratio));
    }
    for (k, v) in &r.notes {
        s.push_str(&format!("  note {k} = {v}\n"));
    }
    for m in &r.remarks {
        s.push_str(&format!("  {m}\n"));
    }
    s
}

pub fn cmd_report(args: &ReportArgs) -> Result<()> {
    if args.files.is_empty() {
        return Err(Error::config("files", "no report files given"));
    }
    for f in &args.files {
        let text = fs::read_to_string(f)?;
        let r: ExperimentReport = serde_json::from_str(&text)?;
        print!("{}", render_report(&r));
    }
    Ok(())
}
