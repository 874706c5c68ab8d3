//! Closed-form answers: products and rational powers of π, Γ, B,
//! `sin(πr)`, `cos(πr)`, binomials, factorials and rational constants.
//!
//! Canonicalization is deliberately shallow: [`ClosedForm::mul`] flattens
//! nested products, folds rational constants into one leading `Const`, and
//! sorts the remaining factors. Anything beyond that is the job of the
//! identity rewriter in [`crate::reduce`].

mod eval;
mod exact;
mod render;

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::rational::{Rational, RationalError};
use crate::specfun::SpecfunError;

pub use eval::{equivalent_numeric, eval_as, eval_closed_form, ScaledValue};
pub use exact::ExactValue;
pub use render::print_closed_form;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("invalid closed form: {0}")]
    Invalid(String),
    #[error(transparent)]
    Rational(#[from] RationalError),
    #[error(transparent)]
    Numeric(#[from] SpecfunError),
}

pub type Result<T> = std::result::Result<T, ExprError>;

/// A closed-form value. Variant order is the canonical factor order inside
/// a product.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedForm {
    Const(Rational),
    Binom(i64, i64),
    Fact(i64),
    Pi,
    Gamma(Rational),
    Beta(Rational, Rational),
    /// `sin(π r)`
    SinPi(Rational),
    /// `cos(π r)`
    CosPi(Rational),
    Pow(Box<ClosedForm>, Rational),
    Mul(Vec<ClosedForm>),
}

/// Text or LaTeX output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Notation {
    #[default]
    Text,
    Latex,
}

impl ClosedForm {
    pub fn int(n: i64) -> Self {
        ClosedForm::Const(Rational::integer(n))
    }

    pub fn constant(r: Rational) -> Self {
        ClosedForm::Const(r)
    }

    pub fn gamma(arg: Rational) -> Result<Self> {
        if arg.is_integer() && !arg.is_positive() {
            return Err(ExprError::Invalid(format!("Γ({arg}) is a pole")));
        }
        Ok(ClosedForm::Gamma(arg))
    }

    pub fn beta(a: Rational, b: Rational) -> Result<Self> {
        if !a.is_positive() || !b.is_positive() {
            return Err(ExprError::Invalid(format!("B({a}, {b}) needs positive arguments")));
        }
        Ok(ClosedForm::Beta(a, b))
    }

    pub fn binom(n: i64, k: i64) -> Result<Self> {
        if k < 0 || n < k {
            return Err(ExprError::Invalid(format!("C({n}, {k}) needs 0 <= k <= n")));
        }
        Ok(ClosedForm::Binom(n, k))
    }

    pub fn fact(n: i64) -> Result<Self> {
        if n < 0 {
            return Err(ExprError::Invalid(format!("{n}! is undefined")));
        }
        Ok(ClosedForm::Fact(n))
    }

    /// `base^exp`; exponents 0 and 1 collapse, and an integer power of a
    /// power multiplies the exponents.
    pub fn pow(base: ClosedForm, exp: Rational) -> Result<Self> {
        if exp.is_zero() {
            return Ok(ClosedForm::int(1));
        }
        if exp == 1 {
            return Ok(base);
        }
        match base {
            ClosedForm::Pow(inner, e) if exp.is_integer() => {
                let e = e.checked_mul(&exp)?;
                ClosedForm::pow(*inner, e)
            }
            ClosedForm::Const(c) if c.is_zero() && exp.is_negative() => {
                Err(ExprError::Invalid("zero raised to a negative power".into()))
            }
            base => Ok(ClosedForm::Pow(Box::new(base), exp)),
        }
    }

    pub fn sqrt(base: ClosedForm) -> Self {
        ClosedForm::Pow(Box::new(base), Rational::HALF)
    }

    pub fn recip(base: ClosedForm) -> Result<Self> {
        ClosedForm::pow(base, Rational::integer(-1))
    }

    /// Canonical product: flattened, constants folded into a single leading
    /// factor, remaining factors sorted.
    pub fn mul(factors: impl IntoIterator<Item = ClosedForm>) -> Result<Self> {
        let mut coeff = Rational::ONE;
        let mut rest = Vec::new();
        let mut stack: Vec<ClosedForm> = factors.into_iter().collect();
        stack.reverse();
        while let Some(f) = stack.pop() {
            match f {
                ClosedForm::Mul(inner) => stack.extend(inner.into_iter().rev()),
                ClosedForm::Const(c) => coeff = coeff.checked_mul(&c)?,
                other => rest.push(other),
            }
        }
        if coeff.is_zero() {
            return Ok(ClosedForm::Const(Rational::ZERO));
        }
        rest.sort_by(factor_order);
        if coeff != 1 || rest.is_empty() {
            rest.insert(0, ClosedForm::Const(coeff));
        }
        Ok(if rest.len() == 1 { rest.pop().unwrap() } else { ClosedForm::Mul(rest) })
    }

    /// Factors of a product, or the node itself.
    pub fn factors(&self) -> &[ClosedForm] {
        match self {
            ClosedForm::Mul(fs) => fs,
            other => std::slice::from_ref(other),
        }
    }

    /// `(base, exponent)` with non-`Pow` nodes at exponent 1.
    pub fn as_power(&self) -> (&ClosedForm, Rational) {
        match self {
            ClosedForm::Pow(b, e) => (b, *e),
            other => (other, Rational::ONE),
        }
    }

    /// Structural invariants; does not evaluate.
    pub fn check_invariants(&self) -> Result<()> {
        match self {
            ClosedForm::Const(_) | ClosedForm::Pi | ClosedForm::SinPi(_) | ClosedForm::CosPi(_) => Ok(()),
            ClosedForm::Gamma(a) => ClosedForm::gamma(*a).map(drop),
            ClosedForm::Beta(a, b) => ClosedForm::beta(*a, *b).map(drop),
            ClosedForm::Binom(n, k) => ClosedForm::binom(*n, *k).map(drop),
            ClosedForm::Fact(n) => ClosedForm::fact(*n).map(drop),
            ClosedForm::Pow(b, _) => b.check_invariants(),
            ClosedForm::Mul(fs) => {
                if fs.len() < 2 {
                    return Err(ExprError::Invalid("product with fewer than two factors".into()));
                }
                if fs.iter().any(|f| matches!(f, ClosedForm::Mul(_))) {
                    return Err(ExprError::Invalid("nested product".into()));
                }
                fs.iter().try_for_each(ClosedForm::check_invariants)
            }
        }
    }

    /// Structural invariants plus finite evaluation.
    pub fn validate(&self) -> Result<()> {
        self.check_invariants()?;
        self.eval().map(drop)
    }

    pub fn eval(&self) -> Result<f64> {
        eval_closed_form(self)
    }

    pub fn render(&self, notation: Notation) -> String {
        print_closed_form(self, notation)
    }

    pub fn exact_value(&self) -> Option<ExactValue> {
        exact::exact_value(self)
    }
}

/// Canonical order inside a product: positive powers before reciprocals,
/// then by base, then by exponent.
fn factor_order(a: &ClosedForm, b: &ClosedForm) -> Ordering {
    let (ba, ea) = a.as_power();
    let (bb, eb) = b.as_power();
    ea.is_negative().cmp(&eb.is_negative()).then_with(|| ba.cmp(bb)).then_with(|| ea.cmp(&eb))
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_closed_form(self, Notation::Text))
    }
}
