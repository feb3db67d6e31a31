//! Command-line front end: `sweep`, `freeze`, `measure` and `verify`.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 sweep written
//! with failed points, 3 some requested measure is not frozen (or a
//! verification check failed).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::channels::{ChannelKind, ChannelSpec};
use crate::coherence::Measure;
use crate::densmat::BlochVector;
use crate::dynamics::{
    evaluate_measures, run_sweep, C2Value, FreezeStatus, GridSpec, M3Descriptor, StateDescriptor, SweepSeries,
    SweepSpec, DEFAULT_PROBES,
};
use crate::error::{Error, Result};
use crate::optim::MinimizerOptions;
use crate::verify::{run_suite, Suite, DEFAULT_SAMPLES, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DEGRADED: i32 = 2;
pub const EXIT_NOT_FROZEN: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "cohlab", version, about = "Coherence freezing under local noise")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evolve a state over a noise grid and write the measure series.
    Sweep(SweepArgs),
    /// Print a freezing verdict per measure; exit 3 unless all are frozen.
    Freeze(FreezeArgs),
    /// Evaluate coherence measures on one state.
    Measure(MeasureArgs),
    /// Run the lemma verification suites.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
struct StateArgs {
    /// M3 triple `c1,c2,c3`; `c2` may be `freeze`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "bloch")]
    m3: Option<String>,
    /// Qubit count for `--m3`.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Single-qubit Bloch vector `n1,n2,n3`.
    #[arg(long, allow_hyphen_values = true)]
    bloch: Option<String>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// JSON run configuration; inline flags are ignored when given.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    state: StateArgs,
    /// Channel kind: bit_flip, bit_phase_flip, phase_flip, depolarizing,
    /// amplitude_damping, phase_damping, rephasing, identity.
    #[arg(long, default_value = "bit_flip")]
    channel: String,
    /// Comma-separated measure selectors.
    #[arg(long, default_value = "l1,re,tr")]
    measures: String,
    /// Point count, or a comma-separated list of noise strengths.
    #[arg(long)]
    grid: Option<String>,
    /// Optimizer seed, decimal or 0x-prefixed hex.
    #[arg(long, value_parser = parse_seed)]
    seed: Option<u64>,
    /// Output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct FreezeArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Channel kind: bit_flip, bit_phase_flip, phase_flip, depolarizing,
    /// amplitude_damping, phase_damping, rephasing, identity.
    #[arg(long, default_value = "bit_flip")]
    channel: String,
    #[arg(long, default_value = "l1,re,tr")]
    measures: String,
    #[arg(long)]
    grid: Option<String>,
    /// Optimizer seed, decimal or 0x-prefixed hex.
    #[arg(long, value_parser = parse_seed)]
    seed: Option<u64>,
    /// Print JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long, default_value = "l1,re,tr")]
    measures: String,
    /// Optimizer seed, decimal or 0x-prefixed hex.
    #[arg(long, value_parser = parse_seed)]
    seed: Option<u64>,
    /// Print JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// all, A1, A2, A3, rephasing, symmetrization, frozen-identity or eigensystem.
    selector: String,
    #[arg(long, value_parser = parse_seed, default_value = "0xF0C05")]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    /// Both files, with `.csv` and `.json` extensions.
    Both,
}

/// Seeds may be decimal or `0x`-prefixed hex.
pub fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    #[serde(default = "default_format")]
    pub format: Format,
}

fn default_format() -> Format {
    Format::Csv
}

/// Sweep configuration file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub initial: StateDescriptor,
    pub channel: ChannelSpec,
    pub measures: Vec<Measure>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub output: Option<OutputSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub probes: Option<usize>,
}

impl RunConfig {
    /// Parses a configuration; errors carry the line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::Config(format!("line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn sweep_spec(&self) -> SweepSpec {
        SweepSpec {
            initial: self.initial.clone(),
            channel: self.channel.clone(),
            measures: self.measures.clone(),
            grid: self.grid.clone(),
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            probes: self.probes.unwrap_or(DEFAULT_PROBES),
        }
    }
}

fn parse_floats(s: &str, what: &str, count: usize) -> Result<Vec<f64>> {
    let v: std::result::Result<Vec<f64>, _> = s.split(',').map(|x| x.trim().parse::<f64>()).collect();
    match v {
        Ok(v) if v.len() == count => Ok(v),
        _ => Err(Error::Config(format!("--{what} expects {count} comma-separated numbers, got {s:?}"))),
    }
}

fn state_from_args(a: &StateArgs) -> Result<StateDescriptor> {
    match (&a.m3, &a.bloch) {
        (Some(m3), None) => {
            let parts: Vec<&str> = m3.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(Error::Config(format!("--m3 expects c1,c2,c3, got {m3:?}")));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Config(format!("bad number {s:?} in --m3")));
            let c2 = if parts[1] == "freeze" { C2Value::Keyword("freeze".into()) } else { C2Value::Value(num(parts[1])?) };
            let d = StateDescriptor::M3(M3Descriptor { c1: num(parts[0])?, c2, c3: num(parts[2])?, n: a.n });
            d.m3()?;
            Ok(d)
        }
        (None, Some(b)) => {
            let v = parse_floats(b, "bloch", 3)?;
            Ok(StateDescriptor::Bloch(BlochVector::new(v[0], v[1], v[2])?))
        }
        _ => Err(Error::Config("give exactly one of --m3 or --bloch".into())),
    }
}

fn parse_measures(s: &str) -> Result<Vec<Measure>> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(str::parse).collect()
}

fn parse_grid(s: Option<&str>) -> Result<GridSpec> {
    match s {
        None => Ok(GridSpec::default()),
        Some(s) if s.contains(',') => Ok(GridSpec::Points(parse_floats(s, "grid", s.split(',').count())?)),
        Some(s) => s
            .trim()
            .parse()
            .map(GridSpec::Count)
            .map_err(|_| Error::Config(format!("--grid expects a count or a list, got {s:?}"))),
    }
}

/// Entry point shared by the binary and the tests. Normal output goes to
/// `out`, diagnostics to standard error.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Freeze(a) => cmd_freeze(a, out),
        Command::Measure(a) => cmd_measure(a, out),
        Command::Verify(a) => cmd_verify(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

fn emit_series(series: &SweepSeries, output: Option<&OutputSpec>, out: &mut dyn Write) -> Result<()> {
    let format = output.map_or(Format::Csv, |o| o.format);
    let json = || serde_json::to_string_pretty(series).map(|s| s + "\n");
    match output.and_then(|o| o.path.as_deref()) {
        None => match format {
            Format::Csv => out.write_all(series.to_csv().as_bytes())?,
            Format::Json => out.write_all(json()?.as_bytes())?,
            Format::Both => {
                out.write_all(series.to_csv().as_bytes())?;
                out.write_all(json()?.as_bytes())?;
            }
        },
        Some(path) => match format {
            Format::Csv => write_file(path, &series.to_csv())?,
            Format::Json => write_file(path, &json()?)?,
            Format::Both => {
                write_file(&path.with_extension("csv"), &series.to_csv())?;
                write_file(&path.with_extension("json"), &json()?)?;
            }
        },
    }
    Ok(())
}

fn report_failures(series: &SweepSeries) {
    for s in &series.series {
        for f in &s.failures {
            eprintln!("warning: {} failed at q = {}: {}", s.measure, f.q, f.message);
        }
    }
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write) -> Result<i32> {
    let (spec, output) = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            let cfg = RunConfig::from_json(&text)
                .map_err(|e| Error::Config(format!("{}: {}", path.display(), e.to_string().trim_start_matches("configuration error: "))))?;
            (cfg.sweep_spec(), cfg.output)
        }
        None => {
            let mut spec = SweepSpec::new(
                state_from_args(&a.state)?,
                ChannelSpec::new(a.channel.parse::<ChannelKind>()?),
                parse_measures(&a.measures)?,
            );
            spec.grid = parse_grid(a.grid.as_deref())?;
            if let Some(seed) = a.seed {
                spec.seed = seed;
            }
            let output = (a.out.is_some() || a.format.is_some())
                .then(|| OutputSpec { path: a.out.clone(), format: a.format.unwrap_or(Format::Csv) });
            (spec, output)
        }
    };
    let series = run_sweep(&spec)?;
    emit_series(&series, output.as_ref(), out)?;
    if series.has_failures() {
        report_failures(&series);
        return Ok(EXIT_DEGRADED);
    }
    Ok(EXIT_OK)
}

fn cmd_freeze(a: FreezeArgs, out: &mut dyn Write) -> Result<i32> {
    let initial = state_from_args(&a.state)?;
    let kind: ChannelKind = a.channel.parse()?;
    let mut spec = SweepSpec::new(initial.clone(), ChannelSpec::new(kind), parse_measures(&a.measures)?);
    spec.grid = parse_grid(a.grid.as_deref())?;
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    let series = run_sweep(&spec)?;

    let rho = initial.density()?;
    let trivial = if crate::coherence::is_incoherent(&rho, 1e-12) {
        Some("incoherent initial state")
    } else {
        let moved = kind.build(1.0, rho.n_qubits())?.apply(&rho)?.matrix().max_abs_diff(rho.matrix())
            .max(kind.build(0.5, rho.n_qubits())?.apply(&rho)?.matrix().max_abs_diff(rho.matrix()));
        (moved <= 1e-12).then_some("initial state invariant under the channel")
    };

    if a.json {
        let rows: Vec<_> = series
            .series
            .iter()
            .map(|s| serde_json::json!({ "measure": s.measure, "initial_value": s.values[0], "verdict": s.verdict }))
            .collect();
        let doc = serde_json::json!({ "channel": kind, "n_qubits": series.n_qubits, "trivial": trivial, "measures": rows });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
    } else {
        writeln!(out, "{:<10} {:<14} {:>22} {:>13} {:>10}", "measure", "verdict", "value(q=0)", "max_deviation", "tolerance")?;
        for s in &series.series {
            let status = match s.verdict.status {
                FreezeStatus::Frozen => "frozen",
                FreezeStatus::NotFrozen => "not frozen",
                FreezeStatus::Indeterminate => "indeterminate",
            };
            writeln!(
                out,
                "{:<10} {:<14} {:>22.16e} {:>13.3e} {:>10.1e}",
                s.measure.as_str(),
                status,
                s.values[0],
                s.verdict.max_deviation,
                s.verdict.tolerance
            )?;
        }
        if let Some(why) = trivial {
            writeln!(out, "trivial: {why}")?;
        }
    }
    report_failures(&series);
    Ok(if series.series.iter().all(|s| s.verdict.frozen) { EXIT_OK } else { EXIT_NOT_FROZEN })
}

fn cmd_measure(a: MeasureArgs, out: &mut dyn Write) -> Result<i32> {
    let initial = state_from_args(&a.state)?;
    let rho = initial.density()?;
    let triple = initial.m3()?;
    let measures = parse_measures(&a.measures)?;
    let opts = MinimizerOptions { seed: a.seed.unwrap_or(DEFAULT_SEED), ..Default::default() };
    let results = evaluate_measures(&rho, triple.as_ref(), &measures, &opts);
    let mut rows = Vec::new();
    for (m, r) in measures.iter().zip(results) {
        rows.push((m, r?));
    }
    if a.json {
        let doc: Vec<_> = rows
            .iter()
            .map(|(m, r)| serde_json::json!({ "measure": m, "value": r.value, "method": r.method }))
            .collect();
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
    } else {
        for (m, r) in rows {
            writeln!(out, "{:<8} {:.16e}", m.as_str(), r.value)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let suite: Suite = a.selector.parse()?;
    let report = run_suite(suite, a.seed, a.samples)?;
    out.write_all(report.table().as_bytes())?;
    if let Some(path) = &a.out {
        write_file(path, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    }
    Ok(if report.pass { EXIT_OK } else { EXIT_NOT_FROZEN })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String) {
        let mut buf = Vec::new();
        let code = run(std::iter::once("cohlab").chain(args.iter().copied()), &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn seeds() {
        assert_eq!(parse_seed("0xF0C05").unwrap(), 0xF0C05);
        assert_eq!(parse_seed("42").unwrap(), 42);
        assert!(parse_seed("0xZZ").is_err());
    }

    #[test]
    fn measure_examples() {
        let (code, out) = run_str(&["measure", "--bloch", "1,0,0", "--measures", "l1,re"]);
        assert_eq!(code, 0);
        let vals: Vec<f64> = out.lines().map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap()).collect();
        assert!((vals[0] - 1.0).abs() < 1e-15 && (vals[1] - 1.0).abs() < 1e-12);

        let (code, out) = run_str(&["measure", "--m3", "0.25,-0.0625,0.25", "--n", "2", "--measures", "l1,tr"]);
        assert_eq!(code, 0);
        let vals: Vec<f64> = out.lines().map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap()).collect();
        assert!((vals[0] - 0.25).abs() < 1e-15 && (vals[1] - 0.125).abs() < 1e-15);

        let (code, out) = run_str(&["measure", "--m3", "0,0,0.9", "--measures", "l1,re,tr", "--json"]);
        assert_eq!(code, 0);
        let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(doc.as_array().unwrap().iter().all(|r| r["value"].as_f64().unwrap().abs() < 1e-12));

        assert_eq!(run_str(&["measure", "--bloch", "1,1,0"]).0, 1);
        assert_eq!(run_str(&["measure", "--m3", "1,1,1"]).0, 1);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_str(&["sweep", "--measures", "l1"]).0, 1);
        assert_eq!(run_str(&["frobnicate"]).0, 1);
        assert_eq!(run_str(&["verify", "bogus"]).0, 1);
        assert_eq!(run_str(&["measure", "--bloch", "0.1,0,0", "--measures", "l2"]).0, 1);
    }

    #[test]
    fn config_errors_carry_lines() {
        let err = RunConfig::from_json("{\n  \"initial\": {\"bloch\": {\"n1\": 0.1, \"n2\": 0, \"n3\": 0}},\n  \"channel\": {\"kind\": \"bit_flap\"}\n}")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 3"), "{err}");
    }
}
