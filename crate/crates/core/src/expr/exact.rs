//! Exact evaluation for the subset of closed forms whose value is a
//! rational multiple of a half-integer power of π.

use std::fmt;

use super::ClosedForm;
use crate::rational::Rational;
use crate::specfun;

/// `coeff · π^(half_pi_power / 2)`
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactValue {
    pub coeff: Rational,
    pub half_pi_power: i64,
}

impl ExactValue {
    pub fn rational(coeff: Rational) -> Self {
        ExactValue { coeff, half_pi_power: 0 }
    }

    fn mul(self, other: ExactValue) -> Option<ExactValue> {
        Some(ExactValue {
            coeff: self.coeff.checked_mul(&other.coeff).ok()?,
            half_pi_power: self.half_pi_power.checked_add(other.half_pi_power)?,
        })
    }

    fn recip(self) -> Option<ExactValue> {
        Some(ExactValue { coeff: self.coeff.recip().ok()?, half_pi_power: -self.half_pi_power })
    }

    /// Same number, treating every zero as equal.
    pub fn same_value(&self, other: &ExactValue) -> bool {
        if self.coeff.is_zero() || other.coeff.is_zero() {
            return self.coeff.is_zero() && other.coeff.is_zero();
        }
        self == other
    }

    pub fn to_f64(&self) -> f64 {
        self.coeff.to_f64() * std::f64::consts::PI.powf(self.half_pi_power as f64 / 2.0)
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.half_pi_power {
            0 => write!(f, "{}", self.coeff),
            2 => write!(f, "{}·π", self.coeff),
            k if k % 2 == 0 => write!(f, "{}·π^{}", self.coeff, k / 2),
            k => write!(f, "{}·π^({k}/2)", self.coeff),
        }
    }
}

fn int(n: u128) -> Option<Rational> {
    Rational::new(i64::try_from(n).ok()?, 1).ok()
}

fn gamma_exact(a: Rational) -> Option<ExactValue> {
    if let Some(n) = a.to_integer() {
        // n >= 1; poles never reach here because construction rejects them
        let f = specfun::factorial(u64::try_from(n - 1).ok()?).ok()?;
        return Some(ExactValue::rational(int(f)?));
    }
    if !a.is_half_integer() {
        return None;
    }
    let m = a.floor();
    if m >= 0 {
        // Γ(m + 1/2) = (2m)! / (4^m m!) · √π
        let m = u64::try_from(m).ok()?;
        let num = int(specfun::factorial(2 * m).ok()?)?;
        let den =
            int(specfun::factorial(m).ok()?)?.checked_mul(&Rational::integer(4).checked_pow(m as i64).ok()?).ok()?;
        Some(ExactValue { coeff: num.checked_div(&den).ok()?, half_pi_power: 1 })
    } else {
        // Γ(1/2 - k) = (-4)^k k! / (2k)! · √π
        let k = u64::try_from(-m).ok()?;
        let num =
            Rational::integer(-4).checked_pow(k as i64).ok()?.checked_mul(&int(specfun::factorial(k).ok()?)?).ok()?;
        let den = int(specfun::factorial(2 * k).ok()?)?;
        Some(ExactValue { coeff: num.checked_div(&den).ok()?, half_pi_power: 1 })
    }
}

fn sin_pi_exact(r: Rational) -> Option<Rational> {
    // sin(πr) is rational only when 6r is an integer and r is not ±1/3 mod 1
    let six = r.checked_mul(&Rational::integer(6)).ok()?.to_integer()?;
    match six.rem_euclid(12) {
        0 | 6 => Some(Rational::ZERO),
        3 => Some(Rational::ONE),
        9 => Some(Rational::integer(-1)),
        1 | 5 => Some(Rational::HALF),
        7 | 11 => Some(Rational::frac(-1, 2)),
        _ => None,
    }
}

fn integer_root(n: i64, q: u32) -> Option<i64> {
    if n < 0 {
        return if q % 2 == 1 { integer_root(-n, q).map(|r| -r) } else { None };
    }
    let guess = (n as f64).powf(1.0 / q as f64).round() as i64;
    (guess.saturating_sub(1)..=guess + 1).find(|&c| c >= 0 && c.checked_pow(q) == Some(n))
}

fn pow_exact(base: ExactValue, e: Rational) -> Option<ExactValue> {
    let q = u32::try_from(e.denom()).ok()?;
    let p = e.numer();
    // q-th root first, then the integer power
    let coeff = if q == 1 {
        base.coeff
    } else {
        Rational::new(integer_root(base.coeff.numer(), q)?, integer_root(base.coeff.denom(), q)?).ok()?
    };
    if base.half_pi_power % i64::from(q) != 0 {
        return None;
    }
    let rooted = ExactValue { coeff, half_pi_power: base.half_pi_power / i64::from(q) };
    let mut acc = ExactValue::rational(Rational::ONE);
    let step = if p < 0 { rooted.recip()? } else { rooted };
    for _ in 0..p.unsigned_abs() {
        acc = acc.mul(step)?;
    }
    Some(acc)
}

pub(super) fn exact_value(cf: &ClosedForm) -> Option<ExactValue> {
    match cf {
        ClosedForm::Const(c) => Some(ExactValue::rational(*c)),
        ClosedForm::Pi => Some(ExactValue { coeff: Rational::ONE, half_pi_power: 2 }),
        ClosedForm::Gamma(a) => gamma_exact(*a),
        ClosedForm::Beta(a, b) => {
            let sum = a.checked_add(b).ok()?;
            gamma_exact(*a)?.mul(gamma_exact(*b)?)?.mul(gamma_exact(sum)?.recip()?)
        }
        ClosedForm::SinPi(r) => sin_pi_exact(*r).map(ExactValue::rational),
        ClosedForm::CosPi(r) => sin_pi_exact(Rational::HALF.checked_sub(r).ok()?).map(ExactValue::rational),
        ClosedForm::Binom(n, k) => {
            let v = specfun::binomial(u64::try_from(*n).ok()?, u64::try_from(*k).ok()?).ok()?;
            Some(ExactValue::rational(int(v)?))
        }
        ClosedForm::Fact(n) => Some(ExactValue::rational(int(specfun::factorial(u64::try_from(*n).ok()?).ok()?)?)),
        ClosedForm::Pow(b, e) => pow_exact(exact_value(b)?, *e),
        ClosedForm::Mul(fs) => {
            fs.iter().try_fold(ExactValue::rational(Rational::ONE), |acc, f| acc.mul(exact_value(f)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    fn half_beta(a: Rational, b: Rational) -> ClosedForm {
        ClosedForm::mul([ClosedForm::Const(Rational::HALF), ClosedForm::Beta(a, b)]).unwrap()
    }

    #[test]
    fn beta_at_integer_and_half_integer_points() {
        // ½B(1/2, 2) = 2/3
        let v = half_beta(Rational::HALF, Rational::integer(2)).exact_value().unwrap();
        assert_eq!(v, ExactValue::rational(r(2, 3)));
        // ½B(5/2, 1/2) = 3π/16
        let v = half_beta(r(5, 2), Rational::HALF).exact_value().unwrap();
        assert_eq!(v, ExactValue { coeff: r(3, 16), half_pi_power: 2 });
        // ½B(1, 3/2) = 1/3
        let v = half_beta(Rational::ONE, r(3, 2)).exact_value().unwrap();
        assert_eq!(v, ExactValue::rational(r(1, 3)));
        assert!(half_beta(r(1, 4), Rational::HALF).exact_value().is_none());
    }

    #[test]
    fn negative_half_integer_gamma() {
        // Γ(-1/2) = -2√π, Γ(-3/2) = 4√π/3
        assert_eq!(gamma_exact(r(-1, 2)).unwrap(), ExactValue { coeff: Rational::integer(-2), half_pi_power: 1 });
        assert_eq!(gamma_exact(r(-3, 2)).unwrap(), ExactValue { coeff: r(4, 3), half_pi_power: 1 });
    }

    #[test]
    fn binomial_form_is_exact() {
        // C(4,2)·π/32 = 3π/16
        let cf =
            ClosedForm::mul([ClosedForm::Binom(4, 2), ClosedForm::Pi, ClosedForm::recip(ClosedForm::int(32)).unwrap()])
                .unwrap();
        assert_eq!(cf.exact_value().unwrap(), ExactValue { coeff: r(3, 16), half_pi_power: 2 });
    }

    #[test]
    fn roots_and_trig() {
        let cf = ClosedForm::pow(ClosedForm::mul([ClosedForm::int(4), ClosedForm::Pi]).unwrap(), r(-1, 2)).unwrap();
        assert_eq!(cf.exact_value().unwrap(), ExactValue { coeff: Rational::HALF, half_pi_power: -1 });
        assert!(ClosedForm::sqrt(ClosedForm::int(2)).exact_value().is_none());
        assert_eq!(ClosedForm::SinPi(r(5, 6)).exact_value().unwrap(), ExactValue::rational(Rational::HALF));
        assert_eq!(
            ClosedForm::CosPi(Rational::ONE).exact_value().unwrap(),
            ExactValue::rational(Rational::integer(-1))
        );
        assert!(ClosedForm::SinPi(r(1, 3)).exact_value().is_none());
        assert!(ClosedForm::SinPi(r(1, 4)).exact_value().is_none());
    }

    #[test]
    fn exact_agrees_with_float() {
        let cf = half_beta(r(7, 2), r(5, 2));
        let exact = cf.exact_value().unwrap().to_f64();
        assert!((exact - cf.eval().unwrap()).abs() / exact < 1e-13);
    }
}
