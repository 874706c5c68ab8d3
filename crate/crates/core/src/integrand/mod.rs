//! Integrands `sin^α x · cos^β x · cos^γ(2x)` over `[0, π/4]` or `[0, π/2]`,
//! their source syntax, and the rewriting of tan/cot/sec/csc/sqrt into the
//! canonical exponent triple.

mod parser;

use std::fmt;

use serde::Serialize;

use crate::rational::{Rational, RationalError};

pub use parser::{parse, ParseError, ParseErrorKind};

/// Upper limit of integration; the lower limit is always 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Upper {
    #[serde(rename = "pi/4")]
    QuarterPi,
    #[serde(rename = "pi/2")]
    HalfPi,
}

impl Upper {
    pub fn value(self) -> f64 {
        match self {
            Upper::QuarterPi => std::f64::consts::FRAC_PI_4,
            Upper::HalfPi => std::f64::consts::FRAC_PI_2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Upper::QuarterPi => "pi/4",
            Upper::HalfPi => "pi/2",
        }
    }
}

impl std::str::FromStr for Upper {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pi/4" => Ok(Upper::QuarterPi),
            "pi/2" => Ok(Upper::HalfPi),
            other => Err(format!("unsupported interval `{other}`; expected pi/4 or pi/2")),
        }
    }
}

/// Trigonometric bases accepted in source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Base {
    Sin,
    Cos,
    Tan,
    Cot,
    Sec,
    Csc,
    Cos2x,
}

/// Exponents of `sin x`, `cos x` and `cos 2x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Exponents {
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
}

impl Exponents {
    pub fn new(alpha: Rational, beta: Rational, gamma: Rational) -> Self {
        Exponents { alpha, beta, gamma }
    }

    pub fn checked_add(&self, other: &Exponents) -> Result<Exponents, RationalError> {
        Ok(Exponents {
            alpha: self.alpha.checked_add(&other.alpha)?,
            beta: self.beta.checked_add(&other.beta)?,
            gamma: self.gamma.checked_add(&other.gamma)?,
        })
    }
}

/// Rewrites a product of trig powers into `sin^α cos^β cos^γ(2x)`.
pub fn normalize(factors: &[(Base, Rational)]) -> Result<Exponents, RationalError> {
    let mut out = Exponents::default();
    for &(base, e) in factors {
        let neg = e.checked_neg();
        let (da, db, dg) = match base {
            Base::Sin => (e, Rational::ZERO, Rational::ZERO),
            Base::Cos => (Rational::ZERO, e, Rational::ZERO),
            Base::Tan => (e, neg, Rational::ZERO),
            Base::Cot => (neg, e, Rational::ZERO),
            Base::Sec => (Rational::ZERO, neg, Rational::ZERO),
            Base::Csc => (neg, Rational::ZERO, Rational::ZERO),
            Base::Cos2x => (Rational::ZERO, Rational::ZERO, e),
        };
        out = out.checked_add(&Exponents::new(da, db, dg))?;
    }
    Ok(out)
}

/// Canonical integrand. On `[0, π/2]` the `cos 2x` exponent is always zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TrigIntegrand {
    alpha: Rational,
    beta_exp: Rational,
    gamma_exp: Rational,
    upper: Upper,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cos(2x) changes sign on [0, pi/2]; its exponent must be zero there")]
pub struct CosTwoXOnHalfPi;

impl TrigIntegrand {
    pub fn new(
        alpha: Rational,
        beta_exp: Rational,
        gamma_exp: Rational,
        upper: Upper,
    ) -> Result<Self, CosTwoXOnHalfPi> {
        if upper == Upper::HalfPi && !gamma_exp.is_zero() {
            return Err(CosTwoXOnHalfPi);
        }
        Ok(TrigIntegrand { alpha, beta_exp, gamma_exp, upper })
    }

    pub fn half_pi(alpha: Rational, beta_exp: Rational) -> Self {
        TrigIntegrand { alpha, beta_exp, gamma_exp: Rational::ZERO, upper: Upper::HalfPi }
    }

    pub fn quarter_pi(alpha: Rational, beta_exp: Rational, gamma_exp: Rational) -> Self {
        TrigIntegrand { alpha, beta_exp, gamma_exp, upper: Upper::QuarterPi }
    }

    pub fn from_exponents(e: Exponents, upper: Upper) -> Result<Self, CosTwoXOnHalfPi> {
        Self::new(e.alpha, e.beta, e.gamma, upper)
    }

    pub fn alpha(&self) -> Rational {
        self.alpha
    }

    pub fn beta_exp(&self) -> Rational {
        self.beta_exp
    }

    pub fn gamma_exp(&self) -> Rational {
        self.gamma_exp
    }

    pub fn upper(&self) -> Upper {
        self.upper
    }

    pub fn exponents(&self) -> Exponents {
        Exponents::new(self.alpha, self.beta_exp, self.gamma_exp)
    }
}

impl fmt::Display for TrigIntegrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Endpoint {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvergenceVerdict {
    pub convergent: bool,
    pub offending_endpoint: Option<Endpoint>,
    pub reason: String,
}

/// Convergence of the integral from the exponents alone: `sin x` vanishes
/// at 0, and at the upper limit either `cos x` (on `[0, π/2]`) or `cos 2x`
/// (on `[0, π/4]`) does. `cos x` stays above `1/√2` on `[0, π/4]`.
pub fn convergence_check(ti: &TrigIntegrand) -> ConvergenceVerdict {
    let minus_one = Rational::integer(-1);
    if ti.alpha <= minus_one {
        return ConvergenceVerdict {
            convergent: false,
            offending_endpoint: Some(Endpoint::Lower),
            reason: format!("sin(x)^({}) is not integrable at x = 0 (needs exponent > -1)", ti.alpha),
        };
    }
    let (exp, name) = match ti.upper {
        Upper::HalfPi => (ti.beta_exp, "cos(x)"),
        Upper::QuarterPi => (ti.gamma_exp, "cos(2x)"),
    };
    if exp <= minus_one {
        return ConvergenceVerdict {
            convergent: false,
            offending_endpoint: Some(Endpoint::Upper),
            reason: format!("{name}^({exp}) is not integrable at x = {} (needs exponent > -1)", ti.upper.as_str()),
        };
    }
    ConvergenceVerdict { convergent: true, offending_endpoint: None, reason: "convergent".into() }
}

fn render_exponent(e: Rational) -> String {
    if e == 1 {
        String::new()
    } else if e.is_integer() && e.is_positive() {
        format!("^{e}")
    } else {
        format!("^({e})")
    }
}

/// Canonical source text; `parse(render(ti)) == ti`.
pub fn render(ti: &TrigIntegrand) -> String {
    let terms: Vec<String> = [("sin(x)", ti.alpha), ("cos(x)", ti.beta_exp), ("cos(2x)", ti.gamma_exp)]
        .into_iter()
        .filter(|(_, e)| !e.is_zero())
        .map(|(name, e)| format!("{name}{}", render_exponent(e)))
        .collect();
    let body = if terms.is_empty() { "1".to_string() } else { terms.join(" * ") };
    format!("int[0,{}] {body} dx", ti.upper.as_str())
}
