//! Pipeline reports and their CSV/text emission.
//!
//! Output is a pure function of the report: rows are sorted by `δ`
//! descending and numbers are printed in fixed scientific notation, so a
//! rerun of the same scenario reproduces every byte.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Verdict {
    Pass,
    Inconclusive,
    HypothesisViolated,
    Fail,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::HypothesisViolated => "HYPOTHESIS-VIOLATED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Exit status for a set of verdicts: 0 all PASS, 1 any FAIL, 3 otherwise.
pub fn exit_code(verdicts: impl IntoIterator<Item = Verdict>) -> i32 {
    let worst = verdicts.into_iter().max().unwrap_or(Verdict::Pass);
    match worst {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::HypothesisViolated | Verdict::Inconclusive => 3,
    }
}

/// One smoothing scale of a corner sweep. `None` marks a quantity that the
/// failing step did not produce.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub delta: f64,
    pub eps: f64,
    pub c0_distance: Option<f64>,
    pub negative_part_l1: Option<f64>,
    pub spike_integral: Option<f64>,
    pub adm_mass: Option<f64>,
    pub conformal_mass: Option<f64>,
    pub conformal_mass_direct: Option<f64>,
    pub min_u: Option<f64>,
    pub min_conformal_scalar: Option<f64>,
    pub max_conformal_ricci: Option<f64>,
    pub solver_residual: Option<f64>,
    pub mu: Option<f64>,
    pub status: String,
    pub provenance: String,
}

impl SweepRow {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }

    pub fn mass_discrepancy(&self) -> Option<f64> {
        Some((self.conformal_mass? - self.conformal_mass_direct?).abs())
    }
}

pub const SWEEP_HEADER: [&str; 15] = [
    "delta",
    "eps",
    "c0_distance",
    "negative_part_l1",
    "spike_integral",
    "adm_mass",
    "conformal_mass",
    "conformal_mass_direct",
    "min_u",
    "min_conformal_scalar",
    "max_conformal_ricci",
    "solver_residual",
    "mu",
    "status",
    "provenance",
];

/// A reported number with the operation that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantity {
    pub name: String,
    pub value: f64,
    pub provenance: String,
}

/// A pass/fail condition `value <relation> threshold`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: &'static str,
    pub threshold: f64,
    pub pass: bool,
    /// Hypothesis checks decide HYPOTHESIS-VIOLATED, the rest decide FAIL.
    pub hypothesis: bool,
    pub provenance: String,
}

impl Check {
    pub fn at_most(name: &str, value: f64, threshold: f64, provenance: &str) -> Self {
        Self::new(name, value, "<=", threshold, value <= threshold, provenance)
    }

    pub fn at_least(name: &str, value: f64, threshold: f64, provenance: &str) -> Self {
        Self::new(name, value, ">=", threshold, value >= threshold, provenance)
    }

    fn new(name: &str, value: f64, relation: &'static str, threshold: f64, pass: bool, provenance: &str) -> Self {
        Self {
            name: name.into(),
            value,
            relation,
            threshold,
            pass,
            hypothesis: false,
            provenance: provenance.into(),
        }
    }

    pub fn as_hypothesis(mut self) -> Self {
        self.hypothesis = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub pipeline: String,
    /// Statement being checked, named in the report header.
    pub theorem: String,
    pub verdict: Verdict,
    pub sweep: Vec<SweepRow>,
    pub quantities: Vec<Quantity>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl ScenarioReport {
    pub fn new(name: &str, pipeline: &str, theorem: &str) -> Self {
        Self {
            name: name.into(),
            pipeline: pipeline.into(),
            theorem: theorem.into(),
            verdict: Verdict::Inconclusive,
            sweep: Vec::new(),
            quantities: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn quantity(&mut self, name: &str, value: f64, provenance: &str) {
        self.quantities.push(Quantity {
            name: name.into(),
            value,
            provenance: provenance.into(),
        });
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.quantities.iter().find(|q| q.name == name).map(|q| q.value)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Rows sorted by `δ` descending.
    pub fn sorted_sweep(&self) -> Vec<&SweepRow> {
        let mut rows: Vec<&SweepRow> = self.sweep.iter().collect();
        rows.sort_by(|a, b| b.delta.total_cmp(&a.delta));
        rows
    }
}

/// Fixed-width scientific notation; non-finite values spelled out.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.12e}")
    }
}

fn cell(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>, path: &Path) -> Result<Vec<u8>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e.into_error(),
    })
}

/// The sweep table as CSV bytes.
pub fn sweep_csv(report: &ScenarioReport) -> Result<Vec<u8>> {
    let rows = report.sorted_sweep().into_iter().map(|r| {
        vec![
            format_number(r.delta),
            format_number(r.eps),
            cell(r.c0_distance),
            cell(r.negative_part_l1),
            cell(r.spike_integral),
            cell(r.adm_mass),
            cell(r.conformal_mass),
            cell(r.conformal_mass_direct),
            cell(r.min_u),
            cell(r.min_conformal_scalar),
            cell(r.max_conformal_ricci),
            cell(r.solver_residual),
            cell(r.mu),
            r.status.clone(),
            r.provenance.clone(),
        ]
    });
    csv_bytes(&SWEEP_HEADER, rows, Path::new("<sweep>"))
}

pub const SUMMARY_HEADER: [&str; 7] = ["kind", "name", "value", "relation", "threshold", "result", "provenance"];

/// Quantities and checks as CSV bytes, in insertion order.
pub fn summary_csv(report: &ScenarioReport) -> Result<Vec<u8>> {
    let quantities = report.quantities.iter().map(|q| {
        vec![
            "quantity".into(),
            q.name.clone(),
            format_number(q.value),
            String::new(),
            String::new(),
            String::new(),
            q.provenance.clone(),
        ]
    });
    let checks = report.checks.iter().map(|c| {
        vec![
            if c.hypothesis { "hypothesis" } else { "check" }.into(),
            c.name.clone(),
            format_number(c.value),
            c.relation.into(),
            format_number(c.threshold),
            if c.pass { "pass" } else { "fail" }.into(),
            c.provenance.clone(),
        ]
    });
    let verdict = std::iter::once(vec![
        "verdict".into(),
        report.theorem.clone(),
        String::new(),
        String::new(),
        String::new(),
        report.verdict.label().into(),
        report.pipeline.clone(),
    ]);
    csv_bytes(&SUMMARY_HEADER, quantities.chain(checks).chain(verdict), Path::new("<summary>"))
}

/// Human-readable summary.
pub fn render_text(report: &ScenarioReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario: {}", report.name);
    let _ = writeln!(out, "pipeline: {}", report.pipeline);
    let _ = writeln!(out, "theorem:  {}", report.theorem);
    let _ = writeln!(out, "verdict:  {}", report.verdict);
    if !report.quantities.is_empty() {
        let _ = writeln!(out, "\nquantities");
        for q in &report.quantities {
            let _ = writeln!(out, "  {:<34} {:>20}  [{}]", q.name, format_number(q.value), q.provenance);
        }
    }
    if !report.checks.is_empty() {
        let _ = writeln!(out, "\nchecks");
        for c in &report.checks {
            let _ = writeln!(
                out,
                "  {} {:<40} {} {} {}{}",
                if c.pass { "pass" } else { "FAIL" },
                c.name,
                format_number(c.value),
                c.relation,
                format_number(c.threshold),
                if c.hypothesis { "  (hypothesis)" } else { "" }
            );
        }
    }
    let rows = report.sorted_sweep();
    if !rows.is_empty() {
        let _ = writeln!(out, "\nsweep");
        let _ = writeln!(
            out,
            "  {:>10} {:>20} {:>20} {:>20}  status",
            "delta", "c0_distance", "conformal_mass", "min_conformal_R"
        );
        for r in rows {
            let _ = writeln!(
                out,
                "  {:>10} {:>20} {:>20} {:>20}  {}",
                format!("{:.4e}", r.delta),
                cell(r.c0_distance),
                cell(r.conformal_mass),
                cell(r.min_conformal_scalar),
                r.status
            );
        }
    }
    for n in &report.notes {
        let _ = writeln!(out, "\nnote: {n}");
    }
    out
}

/// Writes `<stem>_sweep.csv`, `<stem>_summary.csv` and `<stem>.txt` into
/// `dir`, creating it if needed. Returns the written paths.
pub fn emit_report(report: &ScenarioReport, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let files = [
        (dir.join(format!("{stem}_sweep.csv")), sweep_csv(report)?),
        (dir.join(format!("{stem}_summary.csv")), summary_csv(report)?),
        (dir.join(format!("{stem}.txt")), render_text(report).into_bytes()),
    ];
    let mut written = Vec::with_capacity(files.len());
    for (path, bytes) in files {
        std::fs::write(&path, bytes).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(delta: f64) -> SweepRow {
        SweepRow {
            delta,
            eps: delta * delta / 100.0,
            c0_distance: Some(delta),
            negative_part_l1: None,
            spike_integral: None,
            adm_mass: Some(1.0),
            conformal_mass: Some(1.0),
            conformal_mass_direct: Some(1.0),
            min_u: Some(1.0),
            min_conformal_scalar: Some(0.0),
            max_conformal_ricci: None,
            solver_residual: None,
            mu: None,
            status: "ok".into(),
            provenance: "test, \"quoted\"".into(),
        }
    }

    #[test]
    fn empty_report_is_header_only() {
        let r = ScenarioReport::new("empty", "none", "nothing");
        let text = String::from_utf8(sweep_csv(&r).unwrap()).unwrap();
        assert_eq!(text, SWEEP_HEADER.join(",") + "\r\n");
    }

    #[test]
    fn rows_sorted_by_delta_descending() {
        let mut r = ScenarioReport::new("s", "p", "t");
        for d in [0.05, 0.2, 0.025, 0.1] {
            r.sweep.push(row(d));
        }
        let text = String::from_utf8(sweep_csv(&r).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        let deltas: Vec<f64> = lines[1..].iter().map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
        assert_eq!(deltas, vec![0.2, 0.1, 0.05, 0.025]);
        // RFC 4180 quoting of the provenance cell
        assert!(lines[1].ends_with("\"test, \"\"quoted\"\"\""));
    }

    #[test]
    fn emission_is_byte_stable() {
        let mut r = ScenarioReport::new("s", "p", "t");
        r.sweep.push(row(0.1));
        r.quantity("m", 1.0, "adm_mass");
        r.checks.push(Check::at_least("m >= 0", 1.0, 0.0, "adm_mass"));
        let dir = tempfile::tempdir().unwrap();
        let a = emit_report(&r, &dir.path().join("a"), "x").unwrap();
        let b = emit_report(&r, &dir.path().join("b"), "x").unwrap();
        for (pa, pb) in a.iter().zip(&b) {
            assert_eq!(std::fs::read(pa).unwrap(), std::fs::read(pb).unwrap());
        }
    }

    #[test]
    fn exit_codes_rank_verdicts() {
        assert_eq!(exit_code([]), 0);
        assert_eq!(exit_code([Verdict::Pass, Verdict::Pass]), 0);
        assert_eq!(exit_code([Verdict::Pass, Verdict::Inconclusive]), 3);
        assert_eq!(exit_code([Verdict::HypothesisViolated, Verdict::Fail]), 1);
    }

    #[test]
    fn numbers_format_stably() {
        assert_eq!(format_number(1.0), "1.000000000000e0");
        assert_eq!(format_number(f64::NAN), "nan");
        assert_eq!(format_number(f64::NEG_INFINITY), "-inf");
    }
}
