//! A sweep driven by a JSON run configuration, written as CSV and JSON the
//! same way `cohlab sweep --config` does.
//!
//! ```text
//! cargo run --release --example sweep_export [out-dir]
//! ```

use cohlab::cli::RunConfig;
use cohlab::dynamics::{run_sweep, SweepSpec};

const CONFIG: &str = r#"{
  "initial": {"m3": {"c1": 0.3, "c2": "freeze", "c3": 0.6, "n": 2}},
  "channel": {"kind": "bit_flip"},
  "measures": ["l1", "re", "tr", "d:bures"],
  "grid": 11,
  "seed": 7
}"#;

fn main() -> cohlab::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| std::env::temp_dir().display().to_string());
    let config = RunConfig::from_json(CONFIG)?;
    let mut spec = SweepSpec::new(config.initial, config.channel, config.measures);
    spec.grid = config.grid;
    spec.seed = config.seed.unwrap_or(spec.seed);
    let series = run_sweep(&spec)?;
    let csv = std::path::Path::new(&dir).join("sweep_export.csv");
    let json = csv.with_extension("json");
    std::fs::write(&csv, series.to_csv())?;
    std::fs::write(&json, serde_json::to_string_pretty(&series)?)?;
    print!("{}", series.to_csv());
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}
