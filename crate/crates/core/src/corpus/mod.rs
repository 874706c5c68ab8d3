//! Corpus of table entries with their printed closed forms, and the harness
//! that checks each one against the quadrature oracle.

mod template;
mod verify;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::expr::ClosedForm;
use crate::integrand::{convergence_check, parse, ParseError, TrigIntegrand, Upper};
use crate::rational::Rational;

pub use template::{Env, FormTemplate, ParamExpr};
pub use verify::{
    run_corpus, verify_entry, AlternativeCheck, ReportFormat, Summary, Verdict, VerificationReport, VerificationRow,
};

/// The bundled corpus.
pub const DEFAULT_CORPUS: &str = include_str!("../../data/corpus.json");
/// Anchor quotes the bundled corpus is allowed to cite, one per line.
pub const ANCHORS: &str = include_str!("../../data/anchors.txt");

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus is not valid JSON: {0}")]
    Json(String),
    #[error("corpus entry {index}: {message}")]
    Schema { index: usize, message: String },
    #[error("corpus entry {gr_id}: integrand does not parse: {error}")]
    Dsl { gr_id: String, error: ParseError },
    #[error("corpus entry {gr_id}: duplicate binding {binding}")]
    Duplicate { gr_id: String, binding: String },
    #[error("cannot read corpus {path}: {message}")]
    Io { path: String, message: String },
    #[error("{gr_id} [{binding}]: {message}")]
    Verification { gr_id: String, binding: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Verified,
    ErratumSuspected,
    Corrected,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Verified => "verified",
            Status::ErratumSuspected => "erratum_suspected",
            Status::Corrected => "corrected",
        })
    }
}

/// Where an entry's integrand comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum IntegrandSource {
    Dsl {
        source: String,
        integrand: TrigIntegrand,
    },
    Template {
        alpha: ParamExpr,
        beta: ParamExpr,
        gamma: ParamExpr,
        params: Vec<String>,
        /// Named values computed from the parameters, e.g. `a = k/4`.
        derived: Vec<(String, ParamExpr)>,
        bindings: Vec<Vec<i64>>,
    },
}

/// One concrete integral of an entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub binding: Binding,
    pub env: Env,
    pub integrand: TrigIntegrand,
}

/// Parameter values of an instance; empty for fixed integrands.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct Binding {
    pub values: Vec<(String, i64)>,
    pub derived: Vec<(String, Rational)>,
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.values.is_empty() {
            return f.write_str("-");
        }
        let mut parts: Vec<String> = self.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
        parts.extend(self.derived.iter().map(|(k, v)| format!("{k}={v}")));
        f.write_str(&parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub gr_id: String,
    /// Distinguishes several integrands filed under one table number.
    pub variant: Option<String>,
    pub paper_anchor: String,
    pub interval: Upper,
    pub integrand: IntegrandSource,
    pub expected_form: FormTemplate,
    pub status: Status,
    pub corrected_form: Option<FormTemplate>,
    pub alternative_forms: Vec<FormTemplate>,
    pub note: String,
}

impl CorpusEntry {
    /// `gr_id` plus the variant, if any.
    pub fn label(&self) -> String {
        match &self.variant {
            Some(v) => format!("{} ({v})", self.gr_id),
            None => self.gr_id.clone(),
        }
    }

    /// Every concrete integral this entry stands for.
    pub fn instances(&self) -> Result<Vec<Instance>, String> {
        match &self.integrand {
            IntegrandSource::Dsl { integrand, .. } => {
                Ok(vec![Instance { binding: Binding::default(), env: Env::new(), integrand: *integrand }])
            }
            IntegrandSource::Template { alpha, beta, gamma, params, derived, bindings } => bindings
                .iter()
                .map(|values| {
                    if values.len() != params.len() {
                        return Err(format!(
                            "binding {values:?} has {} values for {} parameters",
                            values.len(),
                            params.len()
                        ));
                    }
                    let mut env = Env::new();
                    let mut binding = Binding::default();
                    for (name, v) in params.iter().zip(values) {
                        env.insert(name.clone(), Rational::new(*v, 1).map_err(|e| e.to_string())?);
                        binding.values.push((name.clone(), *v));
                    }
                    for (name, expr) in derived {
                        let v = expr.eval(&env)?;
                        env.insert(name.clone(), v);
                        binding.derived.push((name.clone(), v));
                    }
                    let integrand =
                        TrigIntegrand::new(alpha.eval(&env)?, beta.eval(&env)?, gamma.eval(&env)?, self.interval)
                            .map_err(|e| e.to_string())?;
                    Ok(Instance { binding, env, integrand })
                })
                .collect(),
        }
    }

    pub fn expected(&self, inst: &Instance) -> Result<ClosedForm, String> {
        self.expected_form.instantiate(&inst.env)
    }

    pub fn corrected(&self, inst: &Instance) -> Result<Option<ClosedForm>, String> {
        self.corrected_form.as_ref().map(|t| t.instantiate(&inst.env)).transpose()
    }

    /// The form the oracle is held against: the correction if there is one.
    pub fn reference(&self, inst: &Instance) -> Result<ClosedForm, String> {
        match self.corrected(inst)? {
            Some(c) => Ok(c),
            None => self.expected(inst),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCorpus {
    entries: Vec<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    gr_id: String,
    #[serde(default)]
    variant: Option<String>,
    paper_anchor: String,
    interval: String,
    integrand: Value,
    expected_form: Value,
    status: Status,
    #[serde(default)]
    corrected_form: Option<Value>,
    #[serde(default)]
    alternative_forms: Vec<Value>,
    #[serde(default)]
    note: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTemplate {
    template: RawTriple,
    params: Vec<String>,
    #[serde(default)]
    derived: BTreeMap<String, Value>,
    bindings: Vec<Vec<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTriple {
    alpha: Value,
    beta: Value,
    gamma: Value,
}

/// Parses and validates a corpus document.
pub fn load_corpus_str(text: &str) -> Result<Vec<CorpusEntry>, CorpusError> {
    let raw: RawCorpus = serde_json::from_str(text).map_err(|e| CorpusError::Json(e.to_string()))?;
    let mut entries = Vec::with_capacity(raw.entries.len());
    let mut seen = HashSet::new();
    for (index, value) in raw.entries.into_iter().enumerate() {
        let schema = |message: String| CorpusError::Schema { index, message };
        let r: RawEntry = serde_json::from_value(value).map_err(|e| schema(e.to_string()))?;
        let entry = build_entry(r, index)?;
        let instances = entry.instances().map_err(|m| schema(format!("{}: {m}", entry.gr_id)))?;
        if instances.is_empty() {
            return Err(schema(format!("{}: no parameter bindings", entry.gr_id)));
        }
        for inst in &instances {
            let ctx = |m: String| schema(format!("{} [{}]: {m}", entry.label(), inst.binding));
            let verdict = convergence_check(&inst.integrand);
            if !verdict.convergent {
                return Err(ctx(verdict.reason));
            }
            for form in
                [Some(entry.expected(inst).map_err(ctx)?), entry.corrected(inst).map_err(ctx)?].into_iter().flatten()
            {
                form.validate().map_err(|e| ctx(e.to_string()))?;
            }
            for alt in &entry.alternative_forms {
                alt.instantiate(&inst.env).and_then(|f| f.validate().map_err(|e| e.to_string())).map_err(ctx)?;
            }
            let key = (entry.gr_id.clone(), entry.variant.clone(), inst.binding.clone());
            if !seen.insert(key) {
                return Err(CorpusError::Duplicate { gr_id: entry.label(), binding: inst.binding.to_string() });
            }
        }
        entries.push(entry);
    }
    Ok(entries)
}

fn build_entry(r: RawEntry, index: usize) -> Result<CorpusEntry, CorpusError> {
    let schema = |message: String| CorpusError::Schema { index, message };
    let interval: Upper = r
        .interval
        .parse()
        .map_err(|_| schema(format!("{}: interval must be \"pi/4\" or \"pi/2\", got {:?}", r.gr_id, r.interval)))?;
    let integrand = match r.integrand {
        Value::String(source) => {
            let integrand = parse(&source).map_err(|error| CorpusError::Dsl { gr_id: r.gr_id.clone(), error })?;
            if integrand.upper() != interval {
                return Err(schema(format!(
                    "{}: integrand runs to {} but interval is {}",
                    r.gr_id,
                    integrand.upper().as_str(),
                    interval.as_str()
                )));
            }
            IntegrandSource::Dsl { source, integrand }
        }
        other => {
            let t: RawTemplate = serde_json::from_value(other).map_err(|e| schema(format!("{}: {e}", r.gr_id)))?;
            let expr = |v: &Value| ParamExpr::from_json(v).map_err(|m| schema(format!("{}: {m}", r.gr_id)));
            let derived =
                t.derived.iter().map(|(k, v)| Ok((k.clone(), expr(v)?))).collect::<Result<Vec<_>, CorpusError>>()?;
            if t.params.is_empty() {
                return Err(schema(format!("{}: template without parameters", r.gr_id)));
            }
            IntegrandSource::Template {
                alpha: expr(&t.template.alpha)?,
                beta: expr(&t.template.beta)?,
                gamma: expr(&t.template.gamma)?,
                params: t.params,
                derived,
                bindings: t.bindings,
            }
        }
    };
    let form = |v: &Value| FormTemplate::from_json(v).map_err(|m| schema(format!("{}: {m}", r.gr_id)));
    let expected_form = form(&r.expected_form)?;
    let corrected_form = r.corrected_form.as_ref().map(form).transpose()?;
    let alternative_forms = r.alternative_forms.iter().map(form).collect::<Result<Vec<_>, _>>()?;
    if r.status != Status::Verified && r.note.trim().is_empty() {
        return Err(schema(format!("{}: status {} needs a note", r.gr_id, r.status)));
    }
    if r.status == Status::Corrected && corrected_form.is_none() {
        return Err(schema(format!("{}: status corrected needs corrected_form", r.gr_id)));
    }
    Ok(CorpusEntry {
        gr_id: r.gr_id,
        variant: r.variant,
        paper_anchor: r.paper_anchor,
        interval,
        integrand,
        expected_form,
        status: r.status,
        corrected_form,
        alternative_forms,
        note: r.note,
    })
}

pub fn load_corpus_file(path: &Path) -> Result<Vec<CorpusEntry>, CorpusError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CorpusError::Io { path: path.display().to_string(), message: e.to_string() })?;
    load_corpus_str(&text)
}

/// The bundled corpus; it is validated by the test suite, so failure here
/// is a build defect.
pub fn default_corpus() -> Vec<CorpusEntry> {
    load_corpus_str(DEFAULT_CORPUS).expect("bundled corpus is valid")
}

/// Loads `path`, or the bundled corpus when `None`.
pub fn load_corpus(path: Option<&Path>) -> Result<Vec<CorpusEntry>, CorpusError> {
    match path {
        Some(p) => load_corpus_file(p),
        None => load_corpus_str(DEFAULT_CORPUS),
    }
}
