//! Reduction of trigonometric integrals to beta functions.
//!
//! On `[0, π/2]`, `u = sin²x` turns `sin^α x cos^β x` into
//! `(1/2) B((α+1)/2, (β+1)/2)`. On `[0, π/4]`, `t = tan x` followed by
//! `s = t²` turns `sin^α x cos^β x cos^γ 2x` into `(1/2) B((α+1)/2, γ+1)`,
//! provided `α + β + 2γ + 2 = 0` so that the powers of `1 + t²` cancel.
//! Alternative forms come from [`apply_identities`].

mod rewrite;

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{ClosedForm, ExprError, Notation};
use crate::integrand::{convergence_check, ConvergenceVerdict, Endpoint, TrigIntegrand, Upper};
use crate::rational::{Rational, RationalError};

pub use rewrite::{apply_identities, rule_statement, AlternativeForm, MAX_DEPTH, MAX_FORMS, RULE_IDS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReduceError {
    #[error("integral diverges at the {} endpoint: {}", endpoint_name(.0.offending_endpoint), .0.reason)]
    Divergent(ConvergenceVerdict),
    #[error("no closed form: α + β + 2γ + 2 = {residual}, not 0 (the powers of 1 + tan²x do not cancel)")]
    ConstraintViolated { residual: Rational },
    #[error("integrand on [0, {actual}] passed to the [0, {expected}] reduction")]
    WrongInterval { expected: &'static str, actual: &'static str },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

impl From<RationalError> for ReduceError {
    fn from(e: RationalError) -> Self {
        ReduceError::Expr(e.into())
    }
}

fn endpoint_name(e: Option<Endpoint>) -> &'static str {
    match e {
        Some(Endpoint::Lower) => "lower",
        Some(Endpoint::Upper) => "upper",
        None => "unknown",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Step {
    pub rule_id: String,
    /// The identity or substitution the step uses.
    pub reference: String,
    pub description: String,
    pub state_after: String,
    pub state_after_latex: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Derivation {
    pub steps: Vec<Step>,
}

impl Derivation {
    fn push(&mut self, rule_id: &str, reference: &str, description: String, text: String, latex: String) {
        self.steps.push(Step {
            rule_id: rule_id.to_string(),
            reference: reference.to_string(),
            description,
            state_after: text,
            state_after_latex: latex,
        });
    }

    pub fn render(&self, notation: Notation) -> String {
        let mut out = String::new();
        for (i, s) in self.steps.iter().enumerate() {
            match notation {
                Notation::Text => {
                    let _ = writeln!(out, "{}. [{}] {}", i + 1, s.rule_id, s.description);
                    let _ = writeln!(out, "   using {}", s.reference);
                    let _ = writeln!(out, "   = {}", s.state_after);
                }
                Notation::Latex => {
                    let _ = writeln!(
                        out,
                        "&= {} && \\text{{{}: {}}} \\\\",
                        s.state_after_latex,
                        latex_escape(&s.rule_id),
                        latex_escape(&s.description)
                    );
                }
            }
        }
        out
    }
}

fn latex_escape(s: &str) -> String {
    s.replace('\\', "\\textbackslash{}").replace('_', "\\_").replace('^', "\\^{}").replace('&', "\\&")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionOutcome {
    pub primary_form: ClosedForm,
    pub alternative_forms: Vec<AlternativeForm>,
    pub derivation: Derivation,
}

fn check_convergent(ti: &TrigIntegrand) -> Result<(), ReduceError> {
    let verdict = convergence_check(ti);
    if verdict.convergent {
        Ok(())
    } else {
        Err(ReduceError::Divergent(verdict))
    }
}

fn half_beta(a: Rational, b: Rational) -> Result<ClosedForm, ReduceError> {
    Ok(ClosedForm::mul([ClosedForm::Const(Rational::HALF), ClosedForm::beta(a, b)?])?)
}

fn paren(r: Rational) -> String {
    if r.is_integer() && !r.is_negative() {
        r.to_string()
    } else {
        format!("({r})")
    }
}

fn latex_rational(r: Rational) -> String {
    if r.is_integer() {
        r.to_string()
    } else {
        let sign = if r.is_negative() { "-" } else { "" };
        format!("{sign}\\tfrac{{{}}}{{{}}}", r.numer().abs(), r.denom())
    }
}

fn beta_step(d: &mut Derivation, form: &ClosedForm, a: Rational, b: Rational) {
    d.push(
        "beta.definition",
        "B(a, b) = int[0,1] s^(a-1) (1-s)^(b-1) ds",
        format!("recognize the beta integral with a = {a}, b = {b}"),
        form.render(Notation::Text),
        form.render(Notation::Latex),
    );
}

/// `∫₀^{π/2} sin^α x cos^β x dx = (1/2) B((α+1)/2, (β+1)/2)`.
pub fn reduce_half_pi(ti: &TrigIntegrand) -> Result<ReductionOutcome, ReduceError> {
    if ti.upper() != Upper::HalfPi {
        return Err(ReduceError::WrongInterval { expected: "pi/2", actual: ti.upper().as_str() });
    }
    check_convergent(ti)?;
    let (alpha, beta) = (ti.alpha(), ti.beta_exp());
    let a = alpha.checked_add(&Rational::ONE)?.checked_mul(&Rational::HALF)?;
    let b = beta.checked_add(&Rational::ONE)?.checked_mul(&Rational::HALF)?;
    let (pa, pb) = (a.checked_sub(&Rational::ONE)?, b.checked_sub(&Rational::ONE)?);
    let form = half_beta(a, b)?;

    let mut d = Derivation::default();
    d.push(
        "master.half_pi",
        "u = sin²x, du = 2 sin x cos x dx",
        format!("substitute u = sin²x in {ti}"),
        format!("(1/2)·int[0,1] u^{} (1-u)^{} du", paren(pa), paren(pb)),
        format!("\\frac{{1}}{{2}}\\int_0^1 u^{{{}}}(1-u)^{{{}}}\\,du", latex_rational(pa), latex_rational(pb)),
    );
    beta_step(&mut d, &form, a, b);
    Ok(ReductionOutcome { alternative_forms: apply_identities(&form), primary_form: form, derivation: d })
}

/// `∫₀^{π/4} sin^α x cos^β x cos^γ 2x dx = (1/2) B((α+1)/2, γ+1)` when
/// `α + β + 2γ + 2 = 0`.
pub fn reduce_quarter_pi(ti: &TrigIntegrand) -> Result<ReductionOutcome, ReduceError> {
    if ti.upper() != Upper::QuarterPi {
        return Err(ReduceError::WrongInterval { expected: "pi/4", actual: ti.upper().as_str() });
    }
    let (alpha, beta, gamma) = (ti.alpha(), ti.beta_exp(), ti.gamma_exp());
    let residual = alpha
        .checked_add(&beta)?
        .checked_add(&gamma.checked_mul(&Rational::integer(2))?)?
        .checked_add(&Rational::integer(2))?;
    if !residual.is_zero() {
        return Err(ReduceError::ConstraintViolated { residual });
    }
    check_convergent(ti)?;
    let a = alpha.checked_add(&Rational::ONE)?.checked_mul(&Rational::HALF)?;
    let b = gamma.checked_add(&Rational::ONE)?;
    let pa = a.checked_sub(&Rational::ONE)?;
    let form = half_beta(a, b)?;

    let mut d = Derivation::default();
    d.push(
        "master.quarter_pi",
        "α + β + 2γ + 2 = 0",
        format!("check the exponent condition for {ti}: {alpha} + {beta} + 2·{gamma} + 2 = 0"),
        ti.to_string(),
        format!(
            "\\int_0^{{\\pi/4}} \\sin^{{{}}}x\\,\\cos^{{{}}}x\\,\\cos^{{{}}}2x\\,dx",
            latex_rational(alpha),
            latex_rational(beta),
            latex_rational(gamma)
        ),
    );
    d.push(
        "subst.tan",
        "t = tan x, dx = dt/(1+t²), cos 2x = (1-t²)/(1+t²)",
        "substitute t = tan x; the powers of 1 + t² cancel".to_string(),
        format!("int[0,1] t^{} (1-t^2)^{} dt", paren(alpha), paren(gamma)),
        format!("\\int_0^1 t^{{{}}}(1-t^2)^{{{}}}\\,dt", latex_rational(alpha), latex_rational(gamma)),
    );
    d.push(
        "subst.square",
        "s = t², dt = ds/(2√s)",
        "substitute s = t²".to_string(),
        format!("(1/2)·int[0,1] s^{} (1-s)^{} ds", paren(pa), paren(gamma)),
        format!("\\frac{{1}}{{2}}\\int_0^1 s^{{{}}}(1-s)^{{{}}}\\,ds", latex_rational(pa), latex_rational(gamma)),
    );
    beta_step(&mut d, &form, a, b);
    Ok(ReductionOutcome { alternative_forms: apply_identities(&form), primary_form: form, derivation: d })
}

/// Dispatches on the upper limit.
pub fn reduce(ti: &TrigIntegrand) -> Result<ReductionOutcome, ReduceError> {
    match ti.upper() {
        Upper::HalfPi => reduce_half_pi(ti),
        Upper::QuarterPi => reduce_quarter_pi(ti),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    fn int(n: i64) -> Rational {
        Rational::integer(n)
    }

    #[test]
    fn half_pi_examples() {
        let out = reduce_half_pi(&TrigIntegrand::half_pi(int(0), int(0))).unwrap();
        assert_eq!(out.primary_form.to_string(), "(1/2)·B(1/2, 1/2)");
        assert!((out.primary_form.eval().unwrap() - PI / 2.0).abs() < 1e-14);

        let out = reduce_half_pi(&TrigIntegrand::half_pi(r(-1, 2), int(0))).unwrap();
        assert_eq!(out.primary_form.to_string(), "(1/2)·B(1/4, 1/2)");
        assert!((out.primary_form.eval().unwrap() - 2.622_057_554_292_119_8).abs() < 1e-12);

        let out = reduce_half_pi(&TrigIntegrand::half_pi(int(4), int(0))).unwrap();
        assert_eq!(out.primary_form.exact_value().unwrap().to_string(), "3/16·π");
        assert!(out.alternative_forms.iter().any(|a| a.form.to_string() == "C(4,2)·π/32"));
    }

    #[test]
    fn quarter_pi_examples() {
        let cases = [((0, -2, 0), "1"), ((0, -4, 1), "2/3"), ((2, -4, 0), "1/3")];
        for ((a, b, c), exact) in cases {
            let ti = TrigIntegrand::quarter_pi(int(a), int(b), int(c));
            let out = reduce_quarter_pi(&ti).unwrap();
            assert_eq!(out.primary_form.exact_value().unwrap().to_string(), exact);
            let ids: Vec<&str> = out.derivation.steps.iter().map(|s| s.rule_id.as_str()).collect();
            assert_eq!(ids, ["master.quarter_pi", "subst.tan", "subst.square", "beta.definition"]);
        }
    }

    #[test]
    fn errors() {
        let ti = TrigIntegrand::quarter_pi(int(2), int(0), int(0));
        assert_eq!(reduce_quarter_pi(&ti).unwrap_err(), ReduceError::ConstraintViolated { residual: int(4) });
        let ti = TrigIntegrand::half_pi(int(-1), int(0));
        match reduce_half_pi(&ti).unwrap_err() {
            ReduceError::Divergent(v) => assert_eq!(v.offending_endpoint, Some(Endpoint::Lower)),
            e => panic!("{e}"),
        }
        let ti = TrigIntegrand::quarter_pi(int(0), int(0), int(-1));
        assert!(matches!(reduce_quarter_pi(&ti), Err(ReduceError::Divergent(_))));
        assert!(matches!(
            reduce_half_pi(&TrigIntegrand::quarter_pi(int(0), int(-2), int(0))),
            Err(ReduceError::WrongInterval { .. })
        ));
        assert!(matches!(
            reduce_quarter_pi(&TrigIntegrand::half_pi(int(0), int(0))),
            Err(ReduceError::WrongInterval { .. })
        ));
    }

    #[test]
    fn derivation_renders() {
        let out = reduce(&TrigIntegrand::half_pi(r(-1, 2), int(0))).unwrap();
        assert_eq!(out.derivation.steps[0].rule_id, "master.half_pi");
        let text = out.derivation.render(Notation::Text);
        assert!(text.contains("u^(-3/4) (1-u)^(-1/2)"), "{text}");
        assert!(text.ends_with("= (1/2)·B(1/4, 1/2)\n"));
        let latex = out.derivation.render(Notation::Latex);
        assert!(latex.contains("\\tfrac{3}{4}"), "{latex}");
        assert!(latex.contains("master.half\\_pi"));
    }

    #[test]
    fn symmetric_in_exponents() {
        let x = reduce_half_pi(&TrigIntegrand::half_pi(r(1, 3), r(5, 2))).unwrap();
        let y = reduce_half_pi(&TrigIntegrand::half_pi(r(5, 2), r(1, 3))).unwrap();
        assert_eq!(x.primary_form.eval().unwrap(), y.primary_form.eval().unwrap());
    }
}
