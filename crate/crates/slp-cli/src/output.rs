//! Sweep container and the CSV/JSON emitters.
//!
//! CSV carries the metadata as `#`-prefixed header lines; JSON nests it
//! under a `meta` key. Floats print with 17 significant digits so parsing
//! them back reproduces the exact doubles. Infinities serialize as the
//! string `"inf"`; NaN is allowed only in rows flagged as masked.

use crate::config::{timestamp_unix, tool_version, RunConfig};
use serde_json::{Map, Value};

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::I(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.into())
    }
}

/// A computed table plus the metadata that reproduces it.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub config: RunConfig,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Secondary table some sweeps carry (critical-temp inset points).
    pub inset: Option<(Vec<&'static str>, Vec<Vec<Cell>>)>,
    /// Structured attachments: extra top-level JSON keys, emitted as
    /// comment lines in CSV.
    pub extra: Vec<(&'static str, Value)>,
}

impl Sweep {
    pub fn new(config: RunConfig, columns: Vec<&'static str>) -> Self {
        Sweep { config, columns, rows: Vec::new(), inset: None, extra: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// 17 significant digits, round-trip exact for f64; non-finite values get
/// the fixed spellings "inf", "-inf", "nan".
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

fn fmt_cell(c: &Cell) -> String {
    match c {
        Cell::F(v) => fmt_float(*v),
        Cell::I(v) => v.to_string(),
        Cell::S(s) => s.clone(),
    }
}

pub fn render_csv(sweep: &Sweep) -> String {
    let mut out = String::new();
    out.push_str(&format!("# tool: slp {}\n", tool_version()));
    out.push_str(&format!("# config_hash: {}\n", sweep.config.hash()));
    out.push_str(&format!("# seed: {}\n", sweep.config.seed));
    out.push_str(&format!("# timestamp_unix: {}\n", timestamp_unix()));
    out.push_str(&format!("# config: {}\n", sweep.config.canonical()));
    for (key, value) in &sweep.extra {
        out.push_str(&format!("# {key}: {value}\n"));
    }
    out.push_str(&sweep.columns.join(","));
    out.push('\n');
    for row in &sweep.rows {
        let line: Vec<String> = row.iter().map(fmt_cell).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    if let Some((cols, rows)) = &sweep.inset {
        out.push_str(&format!("# inset: {}\n", cols.join(",")));
        for row in rows {
            let line: Vec<String> = row.iter().map(fmt_cell).collect();
            out.push_str(&format!("# inset: {}\n", line.join(",")));
        }
    }
    out
}

fn cell_json(c: &Cell) -> Value {
    match c {
        Cell::F(v) => {
            if v.is_nan() {
                Value::Null
            } else if v.is_infinite() {
                Value::from(if *v > 0.0 { "inf" } else { "-inf" })
            } else {
                Value::from(*v)
            }
        }
        Cell::I(v) => Value::from(*v),
        Cell::S(s) => Value::from(s.as_str()),
    }
}

pub fn render_json(sweep: &Sweep) -> String {
    let mut meta = Map::new();
    meta.insert("tool".into(), Value::from("slp"));
    meta.insert("version".into(), Value::from(tool_version()));
    meta.insert("config_hash".into(), Value::from(sweep.config.hash()));
    meta.insert("seed".into(), Value::from(sweep.config.seed));
    meta.insert("timestamp_unix".into(), Value::from(timestamp_unix()));
    meta.insert("config".into(), sweep.config.canonical());

    let rows: Vec<Value> = sweep
        .rows
        .iter()
        .map(|r| Value::from(r.iter().map(cell_json).collect::<Vec<_>>()))
        .collect();

    let mut root = Map::new();
    root.insert("meta".into(), Value::Object(meta));
    root.insert(
        "columns".into(),
        Value::from(sweep.columns.iter().map(|c| Value::from(*c)).collect::<Vec<_>>()),
    );
    root.insert("rows".into(), Value::from(rows));
    if let Some((cols, rows)) = &sweep.inset {
        let mut inset = Map::new();
        inset.insert(
            "columns".into(),
            Value::from(cols.iter().map(|c| Value::from(*c)).collect::<Vec<_>>()),
        );
        inset.insert(
            "rows".into(),
            Value::from(
                rows.iter()
                    .map(|r| Value::from(r.iter().map(cell_json).collect::<Vec<_>>()))
                    .collect::<Vec<_>>(),
            ),
        );
        root.insert("inset".into(), Value::Object(inset));
    }
    for (key, value) in &sweep.extra {
        root.insert((*key).into(), value.clone());
    }
    serde_json::to_string_pretty(&Value::Object(root)).expect("serializable") + "\n"
}

/// Numeric view of one column, with NaN for non-numeric cells.
pub fn column_f64(sweep: &Sweep, name: &str) -> Vec<f64> {
    let idx = sweep
        .columns
        .iter()
        .position(|c| *c == name)
        .unwrap_or_else(|| panic!("unknown column {name}"));
    sweep
        .rows
        .iter()
        .map(|r| match &r[idx] {
            Cell::F(v) => *v,
            Cell::I(v) => *v as f64,
            Cell::S(s) if s == "inf" => f64::INFINITY,
            Cell::S(_) => f64::NAN,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_sweep() -> Sweep {
        let cfg = RunConfig::new("spectrum", 1).with_f64("kappa", 2.0);
        let mut s = Sweep::new(cfg, vec!["k", "energy", "label"]);
        s.push(vec![Cell::I(0), Cell::F(-2.8284271247461903), Cell::from("ground")]);
        s.push(vec![Cell::I(1), Cell::F(f64::INFINITY), Cell::from("x")]);
        s.push(vec![Cell::I(2), Cell::F(f64::NAN), Cell::from("masked")]);
        s
    }

    #[test]
    fn csv_round_trips_doubles_and_spells_non_finite() {
        let text = render_csv(&demo_sweep());
        let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data[0], "k,energy,label");
        let first: Vec<&str> = data[1].split(',').collect();
        assert_eq!(first[1].parse::<f64>().unwrap(), -2.8284271247461903);
        assert!(data[2].contains(",inf,"));
        assert!(data[3].contains(",nan,"));
    }

    #[test]
    fn json_mirrors_rows_and_nulls_nan() {
        let text = render_json(&demo_sweep());
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["columns"][1], "energy");
        assert_eq!(v["rows"][0][1].as_f64().unwrap(), -2.8284271247461903);
        assert_eq!(v["rows"][1][1], "inf");
        assert!(v["rows"][2][1].is_null());
        assert_eq!(v["meta"]["config_hash"].as_str().unwrap().len(), 64);
    }

    #[test]
    fn header_is_identical_across_renders_except_timestamp() {
        let a = render_csv(&demo_sweep());
        let b = render_csv(&demo_sweep());
        let strip = |t: &str| -> Vec<String> {
            t.lines()
                .filter(|l| !l.starts_with("# timestamp_unix"))
                .map(|l| l.to_string())
                .collect()
        };
        assert_eq!(strip(&a), strip(&b));
    }
}
