use super::{ClosedForm, ExprError, Result};
use crate::rational::Rational;
use crate::scalar::Real;
use crate::specfun::{self, SpecfunError};

/// A value as `mantissa · 2^exponent`: products and integer powers never
/// overflow before the final conversion, and the mantissa carries the sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue<F> {
    pub mantissa: F,
    pub exponent: i64,
}

impl<F: Real> ScaledValue<F> {
    fn zero() -> Self {
        ScaledValue { mantissa: F::zero(), exponent: 0 }
    }

    fn one() -> Self {
        ScaledValue { mantissa: F::one(), exponent: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == F::zero()
    }

    fn from_value(v: F) -> Self {
        if v == F::zero() {
            return Self::zero();
        }
        let (m, e, sign) = v.integer_decode();
        let m = F::from_u64(m).expect("mantissa fits");
        ScaledValue { mantissa: if sign < 0 { -m } else { m }, exponent: i64::from(e) }
    }

    /// From `ln |v|` and a sign.
    fn from_ln(ln: F, sign: i8) -> Self {
        let direct = ln.exp();
        let s = if sign < 0 { -F::one() } else { F::one() };
        if direct.is_normal() {
            return Self::from_value(s * direct);
        }
        let k = (ln / F::LN_2()).floor();
        let r = ln - k * F::LN_2();
        let mut out = Self::from_value(s * r.exp());
        out.exponent += k.to_i64().expect("finite exponent");
        out
    }

    fn ln_abs(&self) -> F {
        self.mantissa.abs().ln() + F::from_i64(self.exponent).unwrap() * F::LN_2()
    }

    fn sign(&self) -> i8 {
        if self.mantissa < F::zero() {
            -1
        } else {
            1
        }
    }

    fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = Self::from_value(self.mantissa * other.mantissa);
        out.exponent += self.exponent + other.exponent;
        out
    }

    fn recip(self) -> Result<Self> {
        if self.is_zero() {
            return Err(SpecfunError::Pole(0.0).into());
        }
        let mut out = Self::from_value(F::one() / self.mantissa);
        out.exponent -= self.exponent;
        Ok(out)
    }

    fn powi(self, k: u64) -> Self {
        let (mut acc, mut base, mut k) = (Self::one(), self, k);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            k >>= 1;
        }
        acc
    }

    pub fn value(self) -> Result<F> {
        if self.is_zero() {
            return Ok(F::zero());
        }
        let overflow = || ExprError::Numeric(SpecfunError::Overflow("closed form exceeds the floating range".into()));
        let mut v = self.mantissa;
        let mut e = self.exponent;
        let two = F::lit(2.0);
        while e != 0 {
            let step = e.clamp(-512, 512);
            v = v * two.powi(step as i32);
            e -= step;
            if !v.is_finite() {
                return Err(overflow());
            }
            if v == F::zero() {
                return Ok(v);
            }
        }
        Ok(v)
    }
}

/// Numeric value of a closed form.
pub fn eval_closed_form(cf: &ClosedForm) -> Result<f64> {
    eval_as::<f64>(cf)
}

/// Numeric value in any floating type.
pub fn eval_as<F: Real>(cf: &ClosedForm) -> Result<F> {
    scaled::<F>(cf)?.value()
}

impl ClosedForm {
    pub fn eval_as<F: Real>(&self) -> Result<F> {
        eval_as(self)
    }
}

/// `|a - b| <= rel_tol · max(|a|, |b|, 1)`.
pub fn equivalent_numeric(a: &ClosedForm, b: &ClosedForm, rel_tol: f64) -> Result<bool> {
    let (x, y) = (a.eval()?, b.eval()?);
    Ok((x - y).abs() <= rel_tol * x.abs().max(y.abs()).max(1.0))
}

/// `π r` with `r` reduced to `[0, 1/2]`, plus the sign picked up on the way.
fn sin_pi_rational<F: Real>(r: Rational) -> F {
    let reduced = r.fract().checked_add(&Rational::integer(r.floor().rem_euclid(2))).expect("small");
    // reduced in [0, 2)
    let (mut x, mut sign) = (reduced, F::one());
    if x >= 1 {
        x = x.checked_sub(&Rational::ONE).unwrap();
        sign = -sign;
    }
    if x > Rational::HALF {
        x = Rational::ONE.checked_sub(&x).unwrap();
    }
    if x.is_zero() {
        return F::zero();
    }
    if x == Rational::HALF {
        return sign;
    }
    if x == Rational::frac(1, 6) {
        return sign * F::lit(0.5);
    }
    sign * (F::PI() * x.to_real::<F>()).sin()
}

fn cos_pi_rational<F: Real>(r: Rational) -> F {
    // cos(πr) = sin(π(1/2 - r))
    sin_pi_rational(Rational::HALF.checked_sub(&r).expect("small"))
}

fn exact_int<F: Real>(v: std::result::Result<u128, SpecfunError>) -> Result<ScaledValue<F>> {
    let n = v?;
    let f = F::from_u128(n)
        .ok_or_else(|| ExprError::Numeric(SpecfunError::Overflow("integer exceeds the floating range".into())))?;
    Ok(ScaledValue::from_value(f))
}

pub(crate) fn scaled<F: Real>(cf: &ClosedForm) -> Result<ScaledValue<F>> {
    Ok(match cf {
        ClosedForm::Const(c) => ScaledValue::from_value(c.to_real::<F>()),
        ClosedForm::Pi => ScaledValue::from_value(F::PI()),
        ClosedForm::Gamma(a) => {
            if a.is_integer() && !a.is_positive() {
                return Err(SpecfunError::Pole(a.to_f64()).into());
            }
            let x = a.to_real::<F>();
            match specfun::gamma(x) {
                Ok(v) => ScaledValue::from_value(v),
                Err(SpecfunError::Overflow(_)) => {
                    let (ln, sign) = specfun::ln_gamma_abs(x)?;
                    ScaledValue::from_ln(ln, sign)
                }
                Err(e) => return Err(e.into()),
            }
        }
        ClosedForm::Beta(a, b) => ScaledValue::from_ln(specfun::log_beta(a.to_real::<F>(), b.to_real::<F>())?, 1),
        ClosedForm::SinPi(r) => ScaledValue::from_value(sin_pi_rational::<F>(*r)),
        ClosedForm::CosPi(r) => ScaledValue::from_value(cos_pi_rational::<F>(*r)),
        ClosedForm::Binom(n, k) => {
            let (n, k) = (non_negative(*n)?, non_negative(*k)?);
            exact_int(specfun::binomial(n, k))?
        }
        ClosedForm::Fact(n) => exact_int(specfun::factorial(non_negative(*n)?))?,
        ClosedForm::Pow(base, e) => {
            let b = scaled::<F>(base)?;
            if b.is_zero() {
                if e.is_negative() {
                    return Err(SpecfunError::Pole(0.0).into());
                }
                return Ok(ScaledValue::zero());
            }
            match e.to_integer() {
                Some(k) if k >= 0 => b.powi(k.unsigned_abs()),
                Some(k) => b.powi(k.unsigned_abs()).recip()?,
                None if b.sign() < 0 => {
                    return Err(ExprError::Invalid(format!("negative base raised to non-integer power {e}")))
                }
                None => ScaledValue::from_ln(b.ln_abs() * e.to_real::<F>(), 1),
            }
        }
        ClosedForm::Mul(fs) => {
            let mut acc = ScaledValue::one();
            for f in fs {
                acc = acc.mul(scaled::<F>(f)?);
            }
            acc
        }
    })
}

fn non_negative(n: i64) -> Result<u64> {
    u64::try_from(n).map_err(|_| ExprError::Invalid(format!("negative integer argument {n}")))
}
