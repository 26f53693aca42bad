//! Report documents and their two renderings.
//!
//! The JSON form is versioned and byte-stable: field order is fixed by the
//! struct declarations, collections keep insertion order, and nothing time-
//! or host-dependent is written. Numeric cells carry an `origin` tag saying
//! where the number came from, so a report can be audited without rerunning:
//!
//! * `computed_rank`: exact rank of a span matrix over Q(h)
//! * `predicted_census`: root-data census prediction (no shuffle computation)
//! * `fixed_constant`: calibration target fixed by the defining formula
//! * `computed_value`: direct exact evaluation (products, residues, series)

use serde::Serialize;

pub const SCHEMA: &str = "ysh-report/1";

pub const ORIGIN_RANK: &str = "computed_rank";
pub const ORIGIN_CENSUS: &str = "predicted_census";
pub const ORIGIN_CONSTANT: &str = "fixed_constant";
pub const ORIGIN_VALUE: &str = "computed_value";

pub const PASS: &str = "PASS";
pub const FAIL: &str = "FAIL";
pub const NOT_CHECKED: &str = "NOT-CHECKED";

#[derive(Serialize)]
pub struct ReportDocument {
    pub schema: &'static str,
    pub tool: Tool,
    pub command: String,
    pub seed: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quiver: Option<QuiverInfo>,
    pub provenance: Provenance,
    pub checks: Vec<CheckEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tables: Vec<Table>,
    pub outcome: &'static str,
}

#[derive(Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Serialize)]
pub struct QuiverInfo {
    pub path: String,
    /// SHA-256 of the canonical structural form, so the same quiver given as
    /// a Cartan matrix or as an arrow list fingerprints identically.
    pub fingerprint: String,
    pub vertices: Vec<String>,
    pub arrows: Vec<String>,
    pub allow_loops: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
pub struct Provenance {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientation: Option<&'static str>,
    pub notes: Vec<String>,
}

#[derive(Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub outcome: &'static str,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Serialize)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Serialize)]
pub struct Cell {
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub origin: Option<&'static str>,
}

impl Cell {
    /// Label or echoed input; not a numeric result.
    pub fn plain(value: impl Into<String>) -> Cell {
        Cell { value: value.into(), origin: None }
    }

    pub fn rank(value: impl Into<String>) -> Cell {
        Cell { value: value.into(), origin: Some(ORIGIN_RANK) }
    }

    pub fn census(value: impl Into<String>) -> Cell {
        Cell { value: value.into(), origin: Some(ORIGIN_CENSUS) }
    }

    pub fn constant(value: impl Into<String>) -> Cell {
        Cell { value: value.into(), origin: Some(ORIGIN_CONSTANT) }
    }

    pub fn computed(value: impl Into<String>) -> Cell {
        Cell { value: value.into(), origin: Some(ORIGIN_VALUE) }
    }
}

/// Accumulates a report; `finish` decides the overall outcome. NOT-CHECKED
/// entries document scope limits and never affect the outcome.
pub struct ReportBuilder {
    command: String,
    seed: u64,
    quiver: Option<QuiverInfo>,
    convention: Option<String>,
    orientation: Option<&'static str>,
    notes: Vec<String>,
    checks: Vec<CheckEntry>,
    tables: Vec<Table>,
}

impl ReportBuilder {
    pub fn new(command: &str, seed: u64) -> ReportBuilder {
        ReportBuilder {
            command: command.to_string(),
            seed,
            quiver: None,
            convention: None,
            orientation: None,
            notes: Vec::new(),
            checks: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn quiver(&mut self, info: QuiverInfo, orientation: &'static str) {
        self.quiver = Some(info);
        self.orientation = Some(orientation);
    }

    pub fn convention(&mut self, label: String) {
        self.convention = Some(label);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(CheckEntry {
            name: name.into(),
            outcome: if pass { PASS } else { FAIL },
            detail: detail.into(),
        });
    }

    pub fn not_checked(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.checks.push(CheckEntry {
            name: name.into(),
            outcome: NOT_CHECKED,
            detail: detail.into(),
        });
    }

    pub fn table(&mut self, title: impl Into<String>, columns: &[&str], rows: Vec<Vec<Cell>>) {
        self.tables.push(Table {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        });
    }

    pub fn finish(self) -> ReportDocument {
        let failed = self.checks.iter().any(|c| c.outcome == FAIL);
        ReportDocument {
            schema: SCHEMA,
            tool: Tool { name: "ysh", version: env!("CARGO_PKG_VERSION") },
            command: self.command,
            seed: format!("{:#x}", self.seed),
            quiver: self.quiver,
            provenance: Provenance {
                convention: self.convention,
                orientation: self.orientation,
                notes: self.notes,
            },
            checks: self.checks,
            tables: self.tables,
            outcome: if failed { FAIL } else { PASS },
        }
    }
}

pub fn render_json(doc: &ReportDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report serialization is infallible");
    s.push('\n');
    s
}

pub fn render_human(doc: &ReportDocument) -> String {
    let mut s = String::new();
    s.push_str(&format!("{} {} (seed {})\n", doc.tool.name, doc.command, doc.seed));
    if let Some(q) = &doc.quiver {
        s.push_str(&format!(
            "quiver {} [{}] vertices {} arrows {}\n",
            q.path,
            &q.fingerprint[..12],
            q.vertices.join(","),
            if q.arrows.is_empty() { String::from("-") } else { q.arrows.join(",") },
        ));
        for w in &q.warnings {
            s.push_str(&format!("warning: {w}\n"));
        }
    }
    if let Some(c) = &doc.provenance.convention {
        s.push_str(&format!("convention: {c}\n"));
    }
    for n in &doc.provenance.notes {
        s.push_str(&format!("note: {n}\n"));
    }
    for c in &doc.checks {
        if c.detail.is_empty() {
            s.push_str(&format!("{:11} {}\n", c.outcome, c.name));
        } else {
            s.push_str(&format!("{:11} {} ({})\n", c.outcome, c.name, c.detail));
        }
    }
    for t in &doc.tables {
        s.push_str(&format!("table: {}\n", t.title));
        let mut widths: Vec<usize> = t.columns.iter().map(|c| c.len()).collect();
        for row in &t.rows {
            for (i, cell) in row.iter().enumerate() {
                widths[i] = widths[i].max(cell.value.len());
            }
        }
        let header: Vec<String> = t
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{:w$}", c, w = widths[i]))
            .collect();
        s.push_str(&format!("  {}\n", header.join("  ")));
        for row in &t.rows {
            let line: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(i, cell)| format!("{:w$}", cell.value, w = widths[i]))
                .collect();
            s.push_str(&format!("  {}\n", line.join("  ")));
        }
    }
    s.push_str(&format!("outcome: {}\n", doc.outcome));
    s
}
