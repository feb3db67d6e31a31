use std::path::Path;
use std::process::{Command, Output};

fn cohlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cohlab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_columns(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn column_spread(rows: &[Vec<f64>], col: usize) -> f64 {
    let first = rows[0][col];
    rows.iter().map(|r| (r[col] - first).abs()).fold(0.0, f64::max)
}

#[test]
fn sweep_of_freezing_triple_gives_constant_columns() {
    let o = cohlab(&["sweep", "--m3", "0.25,freeze,0.25", "--n", "2", "--channel", "bit_flip", "--measures", "l1,re,tr"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_columns(&stdout(&o));
    assert_eq!(header, ["q", "l1", "re", "tr"]);
    assert_eq!(rows.len(), 101);
    for col in 1..4 {
        assert!(column_spread(&rows, col) <= 1e-9);
    }
}

#[test]
fn sweep_of_bloch_vector_with_n2_varies() {
    let o = cohlab(&["sweep", "--bloch", "0.5,0.3,0.2", "--channel", "bit_flip", "--measures", "l1"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_columns(&stdout(&o));
    assert_eq!(header, ["q", "l1"]);
    assert!(column_spread(&rows, 1) > 1e-3);
}

#[test]
fn malformed_config_exits_with_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"initial\": {\"m3\": {\"c1\": 0.25,,}}\n}").unwrap();
    let o = cohlab(&["sweep", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

fn write_config(dir: &Path, out: &Path, format: &str) -> std::path::PathBuf {
    let config = serde_json::json!({
        "initial": {"m3": {"c1": 0.3, "c2": "freeze", "c3": 0.6, "n": 2}},
        "channel": {"kind": "bit_flip"},
        "measures": ["l1", "re", "tr", "d:trace"],
        "grid": 11,
        "output": {"path": out, "format": format},
        "seed": 7
    });
    let path = dir.join("run.json");
    std::fs::write(&path, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    path
}

#[test]
fn config_sweep_writes_csv_with_one_column_per_measure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("series.csv");
    let config = write_config(dir.path(), &out, "csv");
    let o = cohlab(&["sweep", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_columns(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(header, ["q", "l1", "re", "tr", "d:trace"]);
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r.len() == 5));
}

#[test]
fn identical_config_and_seed_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for run in 0..2 {
        let base = dir.path().join(format!("run{run}"));
        let config = write_config(dir.path(), &base, "both");
        let o = cohlab(&["sweep", "--config", config.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let csv = std::fs::read(base.with_extension("csv")).unwrap();
        let json = std::fs::read(base.with_extension("json")).unwrap();
        outputs.push((csv, json));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn freeze_verdicts_and_exit_codes() {
    let o = cohlab(&["freeze", "--m3", "0.25,freeze,0.25", "--n", "2", "--channel", "bit_flip"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("not frozen"));

    let o = cohlab(&["freeze", "--m3", "0.25,freeze,0.25", "--n", "3"]);
    assert_eq!(o.status.code(), Some(3));
    let re_row = stdout(&o).lines().find(|l| l.starts_with("re ")).unwrap().to_owned();
    assert!(re_row.contains("not frozen"));

    let o = cohlab(&["freeze", "--m3", "0,0,0.5", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("trivial"));
}

#[test]
fn bad_flags_exit_with_usage_error() {
    assert_eq!(cohlab(&["freeze", "--m3", "0.25,0.25"]).status.code(), Some(1));
    assert_eq!(cohlab(&["sweep", "--channel", "nonsense", "--bloch", "1,0,0"]).status.code(), Some(1));
    assert_eq!(cohlab(&["measure", "--bloch", "2,0,0"]).status.code(), Some(1));
}

#[test]
fn verify_selectors() {
    let o = cohlab(&["verify", "A3", "--samples", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("A3"));
    assert_eq!(cohlab(&["verify", "bogus"]).status.code(), Some(1));
}

fn measured(args: &[&str]) -> Vec<f64> {
    let o = cohlab(args);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    rows.iter().map(|r| r["value"].as_f64().unwrap()).collect()
}

#[test]
fn measure_examples() {
    let v = measured(&["measure", "--bloch", "1,0,0", "--measures", "l1,re", "--json"]);
    assert!((v[0] - 1.0).abs() < 1e-12 && (v[1] - 1.0).abs() < 1e-12);
    let v = measured(&["measure", "--m3", "0.25,-0.0625,0.25", "--n", "2", "--measures", "l1,tr", "--json"]);
    assert!((v[0] - 0.25).abs() < 1e-12 && (v[1] - 0.125).abs() < 1e-12);
    let v = measured(&["measure", "--m3", "0,0,0.9", "--n", "2", "--measures", "l1,re,tr", "--json"]);
    assert!(v.iter().all(|x| x.abs() < 1e-12));
}

#[test]
fn shipped_schema_lists_every_channel_and_measure() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/docs/run-config.schema.json")).unwrap();
    let schema: serde_json::Value = serde_json::from_str(&text).unwrap();
    let names = |v: &serde_json::Value| -> Vec<String> {
        v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_owned()).collect()
    };
    let kinds = names(&schema["properties"]["channel"]["properties"]["kind"]["enum"]);
    let expected: Vec<String> = cohlab::channels::ChannelKind::ALL.iter().map(|k| k.name().to_owned()).collect();
    assert_eq!(kinds, expected);
    let measures = names(&schema["properties"]["measures"]["items"]["enum"]);
    let expected: Vec<String> = cohlab::coherence::Measure::ALL.iter().map(|m| m.to_string()).collect();
    assert_eq!(measures, expected);
}
