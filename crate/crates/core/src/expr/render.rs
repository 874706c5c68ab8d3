use super::{ClosedForm, Notation};
use crate::rational::Rational;

/// Deterministic rendering; the text form is unambiguous for canonical trees.
pub fn print_closed_form(cf: &ClosedForm, notation: Notation) -> String {
    match notation {
        Notation::Text => text(cf),
        Notation::Latex => latex(cf),
    }
}

fn pi_multiple_text(r: Rational) -> String {
    let p = r.numer();
    let head = match p {
        0 => return "0".into(),
        1 => "π".to_string(),
        -1 => "-π".to_string(),
        p => format!("{p}π"),
    };
    if r.denom() == 1 {
        head
    } else {
        format!("{head}/{}", r.denom())
    }
}

fn text_is_atomic(cf: &ClosedForm) -> bool {
    match cf {
        ClosedForm::Const(c) => c.is_integer() && !c.is_negative(),
        ClosedForm::Pi
        | ClosedForm::Gamma(_)
        | ClosedForm::Beta(..)
        | ClosedForm::SinPi(_)
        | ClosedForm::CosPi(_)
        | ClosedForm::Binom(..) => true,
        _ => false,
    }
}

fn text_base(cf: &ClosedForm) -> String {
    match cf {
        ClosedForm::Const(_) => text(cf),
        _ if text_is_atomic(cf) => text(cf),
        _ => format!("({})", text(cf)),
    }
}

fn text_power(base: &ClosedForm, e: Rational) -> String {
    if e == 1 {
        return text_base(base);
    }
    if e.is_integer() && !e.is_negative() {
        format!("{}^{e}", text_base(base))
    } else {
        format!("{}^({e})", text_base(base))
    }
}

fn text(cf: &ClosedForm) -> String {
    match cf {
        ClosedForm::Const(c) => {
            if c.is_integer() && !c.is_negative() {
                c.to_string()
            } else {
                format!("({c})")
            }
        }
        ClosedForm::Pi => "π".into(),
        ClosedForm::Gamma(a) => format!("Γ({a})"),
        ClosedForm::Beta(a, b) => format!("B({a}, {b})"),
        ClosedForm::SinPi(r) => format!("sin({})", pi_multiple_text(*r)),
        ClosedForm::CosPi(r) => format!("cos({})", pi_multiple_text(*r)),
        ClosedForm::Binom(n, k) => format!("C({n},{k})"),
        ClosedForm::Fact(n) => format!("{n}!"),
        ClosedForm::Pow(b, e) => text_power(b, *e),
        ClosedForm::Mul(fs) => {
            let mut out = String::new();
            for (i, f) in fs.iter().enumerate() {
                let (base, e) = f.as_power();
                if e.is_negative() && matches!(f, ClosedForm::Pow(..)) {
                    if i == 0 {
                        out.push('1');
                    }
                    out.push('/');
                    out.push_str(&text_power(base, e.checked_neg()));
                } else {
                    if i > 0 {
                        out.push('·');
                    }
                    out.push_str(&text(f));
                }
            }
            out
        }
    }
}

fn latex_rational(r: Rational) -> String {
    if r.is_integer() {
        r.to_string()
    } else if r.is_negative() {
        format!("-\\tfrac{{{}}}{{{}}}", -r.numer(), r.denom())
    } else {
        format!("\\tfrac{{{}}}{{{}}}", r.numer(), r.denom())
    }
}

fn latex_pi_multiple(r: Rational) -> String {
    let p = r.numer();
    let num = match p {
        0 => return "0".into(),
        1 => "\\pi".to_string(),
        -1 => "-\\pi".to_string(),
        p => format!("{p}\\pi"),
    };
    if r.denom() == 1 {
        num
    } else {
        format!("\\frac{{{num}}}{{{}}}", r.denom())
    }
}

fn latex_is_atomic(cf: &ClosedForm) -> bool {
    match cf {
        ClosedForm::Const(c) => c.is_integer() && !c.is_negative(),
        ClosedForm::Pi | ClosedForm::Beta(..) | ClosedForm::Binom(..) | ClosedForm::Gamma(_) => true,
        _ => false,
    }
}

fn latex_power(base: &ClosedForm, e: Rational) -> String {
    if e == 1 {
        return latex(base);
    }
    if e == Rational::HALF {
        return format!("\\sqrt{{{}}}", latex(base));
    }
    let b = if latex_is_atomic(base) { latex(base) } else { format!("\\left({}\\right)", latex(base)) };
    format!("{b}^{{{e}}}")
}

fn latex(cf: &ClosedForm) -> String {
    match cf {
        ClosedForm::Const(c) => {
            if c.is_integer() {
                c.to_string()
            } else {
                let sign = if c.is_negative() { "-" } else { "" };
                format!("{sign}\\frac{{{}}}{{{}}}", c.numer().abs(), c.denom())
            }
        }
        ClosedForm::Pi => "\\pi".into(),
        ClosedForm::Gamma(a) => format!("\\Gamma\\left({}\\right)", latex_rational(*a)),
        ClosedForm::Beta(a, b) => {
            format!("B\\left({}, {}\\right)", latex_rational(*a), latex_rational(*b))
        }
        ClosedForm::SinPi(r) => format!("\\sin\\left({}\\right)", latex_pi_multiple(*r)),
        ClosedForm::CosPi(r) => format!("\\cos\\left({}\\right)", latex_pi_multiple(*r)),
        ClosedForm::Binom(n, k) => format!("\\binom{{{n}}}{{{k}}}"),
        ClosedForm::Fact(n) => format!("{n}!"),
        ClosedForm::Pow(b, e) => {
            if e.is_negative() {
                format!("\\frac{{1}}{{{}}}", latex_power(b, e.checked_neg()))
            } else {
                latex_power(b, *e)
            }
        }
        ClosedForm::Mul(fs) => {
            let mut sign = "";
            let mut num = Vec::new();
            let mut den = Vec::new();
            for f in fs {
                match f {
                    ClosedForm::Const(c) => {
                        if c.is_negative() {
                            sign = "-";
                        }
                        if c.numer().abs() != 1 {
                            num.push(c.numer().abs().to_string());
                        }
                        if c.denom() != 1 {
                            den.push(c.denom().to_string());
                        }
                    }
                    ClosedForm::Pow(b, e) if e.is_negative() => den.push(latex_power(b, e.checked_neg())),
                    other => num.push(latex_power(other, Rational::ONE)),
                }
            }
            let num = if num.is_empty() { "1".to_string() } else { num.join(" \\, ") };
            if den.is_empty() {
                format!("{sign}{num}")
            } else {
                format!("{sign}\\frac{{{num}}}{{{}}}", den.join(" \\, "))
            }
        }
    }
}
