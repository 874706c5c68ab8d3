use std::cmp::Ordering;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{CorpusEntry, CorpusError, Instance, Status};
use crate::expr::ClosedForm;
use crate::quad::{integrate, QuadOptions};
use crate::reduce::reduce;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    ExpectedMismatch,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::ExpectedMismatch => "EXPECTED-MISMATCH",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlternativeCheck {
    pub form: String,
    pub value: f64,
    pub discrepancy: f64,
    /// Exact comparison with the reference form, when both are rational
    /// multiples of a power of `√π`.
    pub exact_match: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationRow {
    pub gr_id: String,
    pub variant: Option<String>,
    pub binding: String,
    #[serde(skip)]
    sort_key: Vec<i64>,
    pub status: Status,
    pub integrand: String,
    pub expected_form: String,
    pub corrected_form: Option<String>,
    /// Value of the corrected form if present, else of the expected form.
    pub closed_value: f64,
    /// Value of the expected form.
    pub printed_value: f64,
    pub oracle_value: f64,
    pub oracle_error: f64,
    pub oracle_converged: bool,
    /// `|closed - oracle| / max(1, |closed|)`
    pub rel_discrepancy: f64,
    /// `|printed - oracle| / max(1, |oracle|)`
    pub printed_discrepancy: f64,
    pub engine_form: Option<String>,
    pub engine_value: Option<f64>,
    pub engine_discrepancy: Option<f64>,
    pub engine_exact_match: Option<bool>,
    pub alternatives: Vec<AlternativeCheck>,
    pub verdict: Verdict,
    pub reason: String,
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Summary {
    pub rows: usize,
    pub entries: usize,
    pub pass: usize,
    pub fail: usize,
    pub expected_mismatch: usize,
    /// Entries with at least one expected-mismatch row.
    pub mismatch_entries: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub tolerance: f64,
    pub summary: Summary,
    pub rows: Vec<VerificationRow>,
    pub wall_time_ms: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
    Markdown,
}

fn discrepancy(value: f64, truth: f64, scale: f64) -> f64 {
    (value - truth).abs() / scale.abs().max(1.0)
}

fn exact_eq(a: &ClosedForm, b: &ClosedForm) -> Option<bool> {
    Some(a.exact_value()?.same_value(&b.exact_value()?))
}

/// Checks one instance of an entry against the oracle.
pub fn verify_entry(entry: &CorpusEntry, inst: &Instance, rel_tol: f64) -> Result<VerificationRow, CorpusError> {
    let fail = |message: String| CorpusError::Verification {
        gr_id: entry.label(),
        binding: inst.binding.to_string(),
        message,
    };
    let expected = entry.expected(inst).map_err(fail)?;
    let corrected = entry.corrected(inst).map_err(fail)?;
    let reference = corrected.clone().unwrap_or_else(|| expected.clone());
    let printed_value = expected.eval().map_err(|e| fail(format!("expected form: {e}")))?;
    let closed_value = reference.eval().map_err(|e| fail(format!("corrected form: {e}")))?;
    let oracle = integrate::<f64>(&inst.integrand, &QuadOptions::default()).map_err(|e| fail(e.to_string()))?;

    let rel_discrepancy = discrepancy(closed_value, oracle.value, closed_value);
    let printed_discrepancy = discrepancy(printed_value, oracle.value, oracle.value);

    let mut reasons = Vec::new();
    let (engine_form, engine_value, engine_discrepancy, engine_exact_match) = match reduce(&inst.integrand) {
        Ok(out) => {
            let v = out.primary_form.eval().map_err(|e| fail(format!("engine form: {e}")))?;
            let d = discrepancy(v, oracle.value, v);
            if d > rel_tol {
                reasons.push(format!("engine form disagrees with oracle ({d:.2e})"));
            }
            (Some(out.primary_form.to_string()), Some(v), Some(d), exact_eq(&out.primary_form, &reference))
        }
        Err(e) => {
            if entry.status == Status::Verified {
                reasons.push(format!("no engine reduction: {e}"));
            }
            (None, None, None, None)
        }
    };

    let mut alternatives = Vec::new();
    for t in &entry.alternative_forms {
        let form = t.instantiate(&inst.env).map_err(fail)?;
        let value = form.eval().map_err(|e| fail(format!("alternative form: {e}")))?;
        let d = discrepancy(value, oracle.value, value);
        let exact_match = exact_eq(&form, &reference);
        if d > rel_tol || exact_match == Some(false) {
            reasons.push(format!("alternative {form} disagrees ({d:.2e})"));
        }
        alternatives.push(AlternativeCheck { form: form.to_string(), value, discrepancy: d, exact_match });
    }
    if !oracle.converged {
        reasons.push(format!("oracle did not converge (estimate {:.2e})", oracle.error_estimate));
    }

    let printed_refuted = printed_discrepancy > rel_tol;
    let reference_ok = rel_discrepancy <= rel_tol;
    let checks_ok = reasons.is_empty();
    let (verdict, reason) = match entry.status {
        Status::Verified => {
            if !reference_ok {
                reasons.insert(0, format!("closed form off by {rel_discrepancy:.2e}"));
            }
            if reasons.is_empty() {
                (Verdict::Pass, String::new())
            } else {
                (Verdict::Fail, reasons.join("; "))
            }
        }
        Status::ErratumSuspected => {
            if printed_refuted && checks_ok {
                (Verdict::ExpectedMismatch, format!("printed form refuted ({printed_discrepancy:.2e})"))
            } else if !printed_refuted {
                (Verdict::Fail, "suspected erratum not confirmed: printed form agrees with oracle".into())
            } else {
                (Verdict::Fail, reasons.join("; "))
            }
        }
        Status::Corrected => {
            if printed_refuted && reference_ok && checks_ok {
                (
                    Verdict::ExpectedMismatch,
                    format!("printed form refuted ({printed_discrepancy:.2e}); correction agrees"),
                )
            } else if !printed_refuted {
                (Verdict::Fail, "printed form agrees with oracle; correction unnecessary".into())
            } else if !reference_ok {
                (Verdict::Fail, format!("corrected form off by {rel_discrepancy:.2e}"))
            } else {
                (Verdict::Fail, reasons.join("; "))
            }
        }
    };

    Ok(VerificationRow {
        gr_id: entry.gr_id.clone(),
        variant: entry.variant.clone(),
        binding: inst.binding.to_string(),
        sort_key: inst.binding.values.iter().map(|(_, v)| *v).collect(),
        status: entry.status,
        integrand: inst.integrand.to_string(),
        expected_form: expected.to_string(),
        corrected_form: corrected.map(|c| c.to_string()),
        closed_value,
        printed_value,
        oracle_value: oracle.value,
        oracle_error: oracle.error_estimate,
        oracle_converged: oracle.converged,
        rel_discrepancy,
        printed_discrepancy,
        engine_form,
        engine_value,
        engine_discrepancy,
        engine_exact_match,
        alternatives,
        verdict,
        reason,
        note: entry.note.clone(),
    })
}

fn error_row(entry: &CorpusEntry, inst: Option<&Instance>, message: String) -> VerificationRow {
    VerificationRow {
        gr_id: entry.gr_id.clone(),
        variant: entry.variant.clone(),
        binding: inst.map(|i| i.binding.to_string()).unwrap_or_else(|| "?".into()),
        sort_key: inst.map(|i| i.binding.values.iter().map(|(_, v)| *v).collect()).unwrap_or_default(),
        status: entry.status,
        integrand: inst.map(|i| i.integrand.to_string()).unwrap_or_default(),
        expected_form: String::new(),
        corrected_form: None,
        closed_value: f64::NAN,
        printed_value: f64::NAN,
        oracle_value: f64::NAN,
        oracle_error: f64::NAN,
        oracle_converged: false,
        rel_discrepancy: f64::NAN,
        printed_discrepancy: f64::NAN,
        engine_form: None,
        engine_value: None,
        engine_discrepancy: None,
        engine_exact_match: None,
        alternatives: Vec::new(),
        verdict: Verdict::Fail,
        reason: message,
        note: entry.note.clone(),
    }
}

fn gr_key(id: &str) -> Vec<u64> {
    id.split('.').map(|p| p.parse().unwrap_or(u64::MAX)).collect()
}

fn row_order(a: &VerificationRow, b: &VerificationRow) -> Ordering {
    gr_key(&a.gr_id)
        .cmp(&gr_key(&b.gr_id))
        .then_with(|| a.gr_id.cmp(&b.gr_id))
        .then_with(|| a.variant.cmp(&b.variant))
        .then_with(|| a.sort_key.cmp(&b.sort_key))
        .then_with(|| a.binding.cmp(&b.binding))
}

/// Verifies every instance of every entry on `jobs` worker threads. Row
/// order does not depend on `jobs`.
pub fn run_corpus(entries: &[CorpusEntry], rel_tol: f64, jobs: usize) -> VerificationReport {
    let start = Instant::now();
    let work: Vec<(&CorpusEntry, Option<Instance>, Option<String>)> = entries
        .iter()
        .flat_map(|e| match e.instances() {
            Ok(list) => list.into_iter().map(|i| (e, Some(i), None)).collect::<Vec<_>>(),
            Err(m) => vec![(e, None, Some(m))],
        })
        .collect();
    let check = |(entry, inst, err): &(&CorpusEntry, Option<Instance>, Option<String>)| match (inst, err) {
        (Some(i), _) => verify_entry(entry, i, rel_tol).unwrap_or_else(|e| error_row(entry, Some(i), e.to_string())),
        (None, m) => error_row(entry, None, m.clone().unwrap_or_default()),
    };
    let mut rows: Vec<VerificationRow> = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(pool) => pool.install(|| work.par_iter().map(check).collect()),
        Err(_) => work.iter().map(check).collect(),
    };
    rows.sort_by(row_order);

    let mut summary = Summary { rows: rows.len(), entries: entries.len(), ..Summary::default() };
    for r in &rows {
        match r.verdict {
            Verdict::Pass => summary.pass += 1,
            Verdict::Fail => summary.fail += 1,
            Verdict::ExpectedMismatch => summary.expected_mismatch += 1,
        }
    }
    let mut flagged: Vec<(&str, Option<&str>)> = rows
        .iter()
        .filter(|r| r.verdict == Verdict::ExpectedMismatch)
        .map(|r| (r.gr_id.as_str(), r.variant.as_deref()))
        .collect();
    flagged.dedup();
    summary.mismatch_entries = flagged.len();
    VerificationReport { tolerance: rel_tol, summary, rows, wall_time_ms: start.elapsed().as_millis() }
}

fn id_cell(r: &VerificationRow) -> String {
    match &r.variant {
        Some(v) => format!("{} ({v})", r.gr_id),
        None => r.gr_id.clone(),
    }
}

impl VerificationReport {
    /// Rendering without the wall-clock field, so that repeated runs
    /// compare equal.
    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => self.to_json(false),
            ReportFormat::Markdown => self.to_markdown(),
            ReportFormat::Text => self.to_text(),
        }
    }

    pub fn to_json(&self, with_timing: bool) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if !with_timing {
            if let Some(obj) = v.as_object_mut() {
                obj.remove("wall_time_ms");
            }
        }
        serde_json::to_string_pretty(&v).expect("report serializes") + "\n"
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let s = &self.summary;
        let _ = writeln!(out, "# Corpus verification\n");
        let _ = writeln!(
            out,
            "Tolerance {:.0e}. {} rows from {} entries: {} pass, {} fail, {} expected mismatch in {} entries.\n",
            self.tolerance, s.rows, s.entries, s.pass, s.fail, s.expected_mismatch, s.mismatch_entries
        );
        let _ = writeln!(out, "| entry | binding | status | closed form | closed | oracle | discrepancy | printed discrepancy | verdict | note |");
        let _ = writeln!(out, "|---|---|---|---|---|---|---|---|---|---|");
        for r in &self.rows {
            let form = r.corrected_form.as_deref().unwrap_or(&r.expected_form);
            let mut note = r.reason.clone();
            if r.verdict != Verdict::Pass && !r.note.is_empty() {
                if !note.is_empty() {
                    note.push_str(". ");
                }
                note.push_str(&r.note);
            }
            let _ = writeln!(
                out,
                "| {} | {} | {} | `{}` | {:.15} | {:.15} | {:.2e} | {:.2e} | {} | {} |",
                id_cell(r),
                r.binding,
                r.status,
                form,
                r.closed_value,
                r.oracle_value,
                r.rel_discrepancy,
                r.printed_discrepancy,
                r.verdict.as_str(),
                note.replace('|', "\\|")
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let id_w = self.rows.iter().map(|r| id_cell(r).chars().count()).max().unwrap_or(0);
        let bind_w = self.rows.iter().map(|r| r.binding.chars().count()).max().unwrap_or(0);
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<17} {:<id_w$}  {:<bind_w$}  closed={:.15}  oracle={:.15}  rel={:.2e}  printed={:.2e}",
                r.verdict.as_str(),
                id_cell(r),
                r.binding,
                r.closed_value,
                r.oracle_value,
                r.rel_discrepancy,
                r.printed_discrepancy
            );
            if !r.reason.is_empty() {
                let _ = writeln!(out, "    {}", r.reason);
            }
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "{} rows ({} entries): {} pass, {} fail, {} expected mismatch in {} entries (tolerance {:.0e})",
            s.rows, s.entries, s.pass, s.fail, s.expected_mismatch, s.mismatch_entries, self.tolerance
        );
        out
    }
}
