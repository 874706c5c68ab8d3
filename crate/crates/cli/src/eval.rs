use std::fmt::Write as _;

use serde::Serialize;
use trigbeta::expr::ClosedForm;
use trigbeta::quad::{QuadError, QuadOptions};
use trigbeta::reduce::{AlternativeForm, Derivation, ReduceError};
use trigbeta::{integrate, parse, reduce, Notation, QuadratureResultF64};

use crate::{exit, CliConfig, Format, Outcome};

/// Equivalent forms listed in text output, shortest first.
const SHOWN_ALTERNATIVES: usize = 4;

#[derive(Debug, Serialize)]
struct OracleReport {
    value: f64,
    error_estimate: f64,
    levels_used: u32,
    evaluations: usize,
    converged: bool,
}

impl From<&QuadratureResultF64> for OracleReport {
    fn from(q: &QuadratureResultF64) -> Self {
        OracleReport {
            value: q.value,
            error_estimate: q.error_estimate,
            levels_used: q.levels_used,
            evaluations: q.evaluations,
            converged: q.converged,
        }
    }
}

#[derive(Debug, Serialize)]
struct Alternative {
    form: ClosedForm,
    text: String,
    rules: Vec<String>,
}

#[derive(Debug, Serialize)]
struct EvalReport {
    integrand: String,
    closed_form: Option<ClosedForm>,
    closed_form_text: Option<String>,
    closed_form_latex: Option<String>,
    alternatives: Vec<Alternative>,
    #[serde(skip_serializing_if = "Option::is_none")]
    derivation: Option<Derivation>,
    closed_value: Option<f64>,
    oracle: OracleReport,
    rel_discrepancy: Option<f64>,
    tolerance: f64,
    agree: Option<bool>,
    note: Option<String>,
}

pub fn cmd_eval(cfg: &CliConfig) -> Outcome {
    let ti = match parse(&cfg.input) {
        Ok(ti) => ti,
        Err(e) => {
            return Outcome::usage_error(format!("error: {e}\n  {}\n  {:>w$}\n", cfg.input, "^", w = e.position + 1))
        }
    };
    let (reduced, note) = match reduce(&ti) {
        Ok(out) => (Some(out), None),
        Err(e @ ReduceError::ConstraintViolated { .. }) => (None, Some(e.to_string())),
        Err(e) => return Outcome::usage_error(format!("error: {e}\n")),
    };
    let oracle = match integrate(&ti, &QuadOptions::default()) {
        Ok(q) => q,
        Err(QuadError::Divergent(v)) => {
            return Outcome::usage_error(format!("error: integral diverges: {}\n", v.reason))
        }
        Err(e) => return Outcome::usage_error(format!("error: {e}\n")),
    };

    let mut report = EvalReport {
        integrand: ti.to_string(),
        closed_form: None,
        closed_form_text: None,
        closed_form_latex: None,
        alternatives: Vec::new(),
        derivation: None,
        closed_value: None,
        oracle: OracleReport::from(&oracle),
        rel_discrepancy: None,
        tolerance: cfg.rel_tol,
        agree: None,
        note,
    };
    let code = match reduced {
        None => exit::NO_CLOSED_FORM,
        Some(out) => {
            let value = match out.primary_form.eval() {
                Ok(v) => v,
                Err(e) => return Outcome::usage_error(format!("error: cannot evaluate closed form: {e}\n")),
            };
            let d = (value - oracle.value).abs() / value.abs().max(1.0);
            let agree = d <= cfg.rel_tol;
            report.closed_form_text = Some(out.primary_form.to_string());
            report.closed_form_latex = Some(out.primary_form.render(Notation::Latex));
            report.closed_form = Some(out.primary_form);
            report.alternatives = out.alternative_forms.into_iter().map(alternative).collect();
            report.derivation = cfg.trace.then_some(out.derivation);
            report.closed_value = Some(value);
            report.rel_discrepancy = Some(d);
            report.agree = Some(agree);
            if agree {
                exit::OK
            } else {
                exit::DISAGREE
            }
        }
    };
    let stdout = match cfg.format {
        Format::Text => text(&report),
        Format::Markdown => markdown(&report),
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
    };
    Outcome { code, stdout, stderr: String::new() }
}

fn alternative(a: AlternativeForm) -> Alternative {
    Alternative { text: a.form.to_string(), form: a.form, rules: a.trail }
}

fn text(r: &EvalReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "integrand:    {}", r.integrand);
    if let Some(cf) = &r.closed_form_text {
        let _ = writeln!(out, "closed form:  {cf}");
        let mut shown: Vec<&Alternative> = r.alternatives.iter().collect();
        shown.sort_by_key(|a| (a.text.chars().count(), a.text.clone()));
        for a in shown.iter().take(SHOWN_ALTERNATIVES) {
            let _ = writeln!(out, "          =   {}   [{}]", a.text, a.rules.join(", "));
        }
        if shown.len() > SHOWN_ALTERNATIVES {
            let _ = writeln!(
                out,
                "              ({} more equivalent forms in --format json)",
                shown.len() - SHOWN_ALTERNATIVES
            );
        }
    }
    if let Some(d) = &r.derivation {
        let _ = writeln!(out, "derivation:");
        for line in d.render(Notation::Text).lines() {
            let _ = writeln!(out, "  {line}");
        }
    }
    if let Some(v) = r.closed_value {
        let _ = writeln!(out, "value:        {v:.15}");
    }
    let o = &r.oracle;
    let _ = writeln!(
        out,
        "quadrature:   {:.15} ± {:.1e} ({} levels, {} evaluations{})",
        o.value,
        o.error_estimate,
        o.levels_used,
        o.evaluations,
        if o.converged { "" } else { ", not converged" }
    );
    match (r.rel_discrepancy, r.agree) {
        (Some(d), Some(true)) => {
            let _ = writeln!(out, "discrepancy:  {d:.2e} (within {:.0e})", r.tolerance);
        }
        (Some(d), _) => {
            let _ = writeln!(out, "discrepancy:  {d:.2e} EXCEEDS {:.0e}", r.tolerance);
        }
        _ => {}
    }
    if let Some(n) = &r.note {
        let _ = writeln!(out, "note:         {n}; quadrature value only");
    }
    out
}

fn markdown(r: &EvalReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| quantity | value |");
    let _ = writeln!(out, "|---|---|");
    let _ = writeln!(out, "| integrand | `{}` |", r.integrand);
    if let Some(cf) = &r.closed_form_latex {
        let _ = writeln!(out, "| closed form | ${cf}$ |");
    }
    for a in &r.alternatives {
        let _ = writeln!(out, "| equivalent | `{}` |", a.text);
    }
    if let Some(v) = r.closed_value {
        let _ = writeln!(out, "| value | {v:.15} |");
    }
    let _ = writeln!(out, "| quadrature | {:.15} ± {:.1e} |", r.oracle.value, r.oracle.error_estimate);
    if let Some(d) = r.rel_discrepancy {
        let _ = writeln!(out, "| relative discrepancy | {d:.2e} |");
    }
    if let Some(n) = &r.note {
        let _ = writeln!(out, "| note | {n} |");
    }
    if let Some(d) = &r.derivation {
        let _ = writeln!(out, "\n$$\n\\begin{{aligned}}\n{}\\end{{aligned}}\n$$", d.render(Notation::Latex));
    }
    out
}
