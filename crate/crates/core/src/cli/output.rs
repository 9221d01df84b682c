//! Scenario results and their CSV / JSON serialisations.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Assert,
    Warn,
}

/// One asserted quantity: passes when `|value − reference| <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub severity: Severity,
}

impl Check {
    pub fn within(name: impl Into<String>, value: f64, reference: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            reference,
            tolerance,
            // NaN fails
            pass: (value - reference).abs() <= tolerance,
            severity: Severity::Assert,
        }
    }

    /// `|value| <= limit`.
    pub fn below(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::within(name, value, 0.0, limit)
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::within(name, if ok { 1.0 } else { 0.0 }, 1.0, 0.0)
    }

    pub fn warn(mut self) -> Self {
        self.severity = Severity::Warn;
        self
    }

    pub fn fails(&self, strict: bool) -> bool {
        !self.pass && (strict || self.severity == Severity::Assert)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub scenario: String,
    pub version: String,
    pub seed: u64,
    pub config: BTreeMap<String, String>,
    pub tables: Vec<Table>,
    pub observables: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub wall_clock_s: f64,
}

impl ScenarioResult {
    pub fn new(scenario: &str, config: BTreeMap<String, String>, seed: u64) -> Self {
        ScenarioResult {
            scenario: scenario.into(),
            version: VERSION.into(),
            seed,
            config,
            tables: Vec::new(),
            observables: BTreeMap::new(),
            checks: Vec::new(),
            wall_clock_s: 0.0,
        }
    }

    pub fn observe(&mut self, name: &str, v: f64) {
        self.observables.insert(name.into(), v);
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn passed(&self, strict: bool) -> bool {
        !self.checks.iter().any(|c| c.fails(strict))
    }
}

fn number(v: f64, precision: usize) -> String {
    if v.is_finite() {
        format!("{:.*e}", precision - 1, v)
    } else {
        format!("{v}")
    }
}

fn text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn preamble(res: &ScenarioResult, table: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# ab-solenoid {}", res.version);
    let _ = writeln!(out, "# scenario: {}", res.scenario);
    let _ = writeln!(out, "# table: {table}");
    let _ = writeln!(out, "# seed: {}", res.seed);
    for (k, v) in &res.config {
        let _ = writeln!(out, "# {k} = {v}");
    }
    out
}

/// CSV text for one table, preamble included. Wall-clock time is left out so
/// repeated runs are byte-identical.
pub fn table_csv(res: &ScenarioResult, table: &Table, precision: usize) -> String {
    let mut out = preamble(res, &table.name);
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Num(v) => number(*v, precision),
                Cell::Text(s) => text(s),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn checks_csv(res: &ScenarioResult, precision: usize) -> String {
    let mut t = Table::new(
        "checks",
        &["name", "value", "reference", "tolerance", "pass", "severity"],
    );
    for c in &res.checks {
        t.push(vec![
            c.name.as_str().into(),
            c.value.into(),
            c.reference.into(),
            c.tolerance.into(),
            if c.pass { "true" } else { "false" }.into(),
            match c.severity {
                Severity::Assert => "assert",
                Severity::Warn => "warn",
            }
            .into(),
        ]);
    }
    table_csv(res, &t, precision)
}

pub fn observables_csv(res: &ScenarioResult, precision: usize) -> String {
    let mut t = Table::new("observables", &["name", "value"]);
    for (k, v) in &res.observables {
        t.push(vec![k.as_str().into(), (*v).into()]);
    }
    table_csv(res, &t, precision)
}

/// Writes through a temporary sibling and renames, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// File layout: `<scenario>.csv` holds the first table, `<scenario>_<table>.csv`
/// the rest, plus `<scenario>_observables.csv` and `<scenario>_checks.csv`.
/// JSON mode writes the whole result to `<scenario>.json`.
pub fn write_csv(dir: &Path, res: &ScenarioResult, precision: usize) -> io::Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (i, t) in res.tables.iter().enumerate() {
        let file = if i == 0 {
            format!("{}.csv", res.scenario)
        } else {
            format!("{}_{}.csv", res.scenario, t.name)
        };
        let p = dir.join(file);
        write_atomic(&p, &table_csv(res, t, precision))?;
        written.push(p);
    }
    let p = dir.join(format!("{}_observables.csv", res.scenario));
    write_atomic(&p, &observables_csv(res, precision))?;
    written.push(p);
    let p = dir.join(format!("{}_checks.csv", res.scenario));
    write_atomic(&p, &checks_csv(res, precision))?;
    written.push(p);
    Ok(written)
}

pub fn write_json(dir: &Path, res: &ScenarioResult) -> io::Result<PathBuf> {
    let p = dir.join(format!("{}.json", res.scenario));
    let mut s = serde_json::to_string_pretty(res).map_err(io::Error::other)?;
    s.push('\n');
    write_atomic(&p, &s)?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ScenarioResult {
        let mut cfg = BTreeMap::new();
        cfg.insert("b.key".to_string(), "2".to_string());
        cfg.insert("a.key".to_string(), "1".to_string());
        let mut r = ScenarioResult::new("demo", cfg, 7);
        let mut t = Table::new("main", &["label", "x"]);
        t.push(vec!["a,b".into(), 0.1.into()]);
        t.push(vec!["c".into(), (-2.0).into()]);
        r.tables.push(t);
        r.check(Check::within("close", 1.0, 1.0 + 1e-12, 1e-10));
        r.check(Check::below("nan", f64::NAN, 1.0).warn());
        r
    }

    #[test]
    fn csv_layout() {
        let r = sample();
        let csv = table_csv(&r, &r.tables[0], 17);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], format!("# ab-solenoid {VERSION}"));
        assert_eq!(lines[4], "# a.key = 1");
        assert_eq!(lines[5], "# b.key = 2");
        assert_eq!(lines[6], "label,x");
        assert_eq!(lines[7], "\"a,b\",1.0000000000000001e-1");
        assert_eq!(lines[8], "c,-2.0000000000000000e0");
        assert!(table_csv(&r, &r.tables[0], 6).contains("1.00000e-1"));
    }

    #[test]
    fn checks_and_strictness() {
        let r = sample();
        assert!(r.checks[0].pass && !r.checks[1].pass);
        assert!(r.passed(false));
        assert!(!r.passed(true));
        assert!(checks_csv(&r, 17).contains("nan,NaN,0.0000000000000000e0,1.0000000000000000e0,false,warn"));
    }

    #[test]
    fn json_uses_contract_names() {
        let v = serde_json::to_value(sample()).unwrap();
        for k in [
            "scenario",
            "version",
            "seed",
            "config",
            "tables",
            "observables",
            "checks",
            "wall_clock_s",
        ] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert_eq!(v["tables"][0]["rows"][0][0], "a,b");
        assert_eq!(v["checks"][1]["severity"], "warn");
    }
}
