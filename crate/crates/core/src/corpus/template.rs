//! Parameter expressions and closed-form templates.
//!
//! A template has the same JSON shape as a serialized [`ClosedForm`], except
//! that every rational or integer leaf may be an arithmetic expression over
//! the entry's parameters, e.g. `{"pow": [{"const": "2"}, "2*m-1"]}`.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::Value;

use crate::expr::ClosedForm;
use crate::rational::Rational;

pub type Env = BTreeMap<String, Rational>;

/// `+ - * /`, unary minus, parentheses, integer literals and identifiers.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamExpr {
    Int(i64),
    Var(String),
    Neg(Box<ParamExpr>),
    Bin(Box<ParamExpr>, char, Box<ParamExpr>),
}

impl ParamExpr {
    pub fn parse(src: &str) -> Result<ParamExpr, String> {
        let tokens = tokenize(src)?;
        let mut p = ExprParser { tokens: &tokens, pos: 0 };
        let e = p.sum()?;
        if p.pos != tokens.len() {
            return Err(format!("unexpected `{}` in `{src}`", tokens[p.pos]));
        }
        Ok(e)
    }

    /// Accepts a JSON string or integer.
    pub fn from_json(v: &Value) -> Result<ParamExpr, String> {
        match v {
            Value::String(s) => ParamExpr::parse(s),
            Value::Number(n) => n.as_i64().map(ParamExpr::Int).ok_or_else(|| format!("`{n}` is not an integer")),
            other => Err(format!("expected an expression string, found {other}")),
        }
    }

    pub fn eval(&self, env: &Env) -> Result<Rational, String> {
        let err = |e: crate::rational::RationalError| e.to_string();
        match self {
            ParamExpr::Int(n) => Rational::new(*n, 1).map_err(err),
            ParamExpr::Var(v) => env.get(v).copied().ok_or_else(|| format!("unknown parameter `{v}`")),
            ParamExpr::Neg(e) => Ok(e.eval(env)?.checked_neg()),
            ParamExpr::Bin(a, op, b) => {
                let (x, y) = (a.eval(env)?, b.eval(env)?);
                match op {
                    '+' => x.checked_add(&y),
                    '-' => x.checked_sub(&y),
                    '*' => x.checked_mul(&y),
                    _ => x.checked_div(&y),
                }
                .map_err(err)
            }
        }
    }

    pub fn eval_int(&self, env: &Env) -> Result<i64, String> {
        let v = self.eval(env)?;
        v.to_integer().ok_or_else(|| format!("`{self}` = {v} is not an integer"))
    }

    /// Free variables, in order of first appearance.
    pub fn variables(&self, out: &mut Vec<String>) {
        match self {
            ParamExpr::Int(_) => {}
            ParamExpr::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            ParamExpr::Neg(e) => e.variables(out),
            ParamExpr::Bin(a, _, b) => {
                a.variables(out);
                b.variables(out);
            }
        }
    }
}

impl fmt::Display for ParamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamExpr::Int(n) => write!(f, "{n}"),
            ParamExpr::Var(v) => f.write_str(v),
            ParamExpr::Neg(e) => write!(f, "-({e})"),
            ParamExpr::Bin(a, op, b) => write!(f, "({a}{op}{b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(i64),
    Ident(String),
    Op(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "{n}"),
            Tok::Ident(s) => f.write_str(s),
            Tok::Op(c) => write!(f, "{c}"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
            }
            out.push(Tok::Int(s.parse().map_err(|_| format!("integer `{s}` out of range"))?));
        } else if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_alphanumeric() || **d == '_') {
                s.push(d);
                chars.next();
            }
            out.push(Tok::Ident(s));
        } else if "+-*/()".contains(c) {
            out.push(Tok::Op(c));
            chars.next();
        } else {
            return Err(format!("unexpected character `{c}` in `{src}`"));
        }
    }
    Ok(out)
}

struct ExprParser<'a> {
    tokens: &'a [Tok],
    pos: usize,
}

impl ExprParser<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Tok::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn sum(&mut self) -> Result<ParamExpr, String> {
        let mut lhs = self.product()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            lhs = ParamExpr::Bin(Box::new(lhs), op, Box::new(self.product()?));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<ParamExpr, String> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            lhs = ParamExpr::Bin(Box::new(lhs), op, Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<ParamExpr, String> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(ParamExpr::Neg(Box::new(self.unary()?)));
        }
        let tok = self.tokens.get(self.pos).cloned().ok_or("unexpected end of expression")?;
        self.pos += 1;
        match tok {
            Tok::Int(n) => Ok(ParamExpr::Int(n)),
            Tok::Ident(s) => Ok(ParamExpr::Var(s)),
            Tok::Op('(') => {
                let e = self.sum()?;
                if self.peek_op() != Some(')') {
                    return Err("missing `)`".into());
                }
                self.pos += 1;
                Ok(e)
            }
            Tok::Op(c) => Err(format!("unexpected `{c}`")),
        }
    }
}

/// A [`ClosedForm`] with expression leaves.
#[derive(Debug, Clone, PartialEq)]
pub enum FormTemplate {
    Const(ParamExpr),
    Pi,
    Gamma(ParamExpr),
    Beta(ParamExpr, ParamExpr),
    SinPi(ParamExpr),
    CosPi(ParamExpr),
    Binom(ParamExpr, ParamExpr),
    Fact(ParamExpr),
    Pow(Box<FormTemplate>, ParamExpr),
    Mul(Vec<FormTemplate>),
}

fn pair(v: &Value, tag: &str) -> Result<(Value, Value), String> {
    match v.as_array().map(Vec::as_slice) {
        Some([a, b]) => Ok((a.clone(), b.clone())),
        _ => Err(format!("`{tag}` takes a two-element array")),
    }
}

impl FormTemplate {
    pub fn from_json(v: &Value) -> Result<FormTemplate, String> {
        if v.as_str() == Some("pi") {
            return Ok(FormTemplate::Pi);
        }
        let obj = v
            .as_object()
            .filter(|o| o.len() == 1)
            .ok_or_else(|| format!("expected \"pi\" or a single-key node object, found {v}"))?;
        let (tag, body) = obj.iter().next().unwrap();
        let e = ParamExpr::from_json;
        Ok(match tag.as_str() {
            "const" => FormTemplate::Const(e(body)?),
            "gamma" => FormTemplate::Gamma(e(body)?),
            "sin_pi" => FormTemplate::SinPi(e(body)?),
            "cos_pi" => FormTemplate::CosPi(e(body)?),
            "fact" => FormTemplate::Fact(e(body)?),
            "beta" => {
                let (a, b) = pair(body, tag)?;
                FormTemplate::Beta(e(&a)?, e(&b)?)
            }
            "binom" => {
                let (a, b) = pair(body, tag)?;
                FormTemplate::Binom(e(&a)?, e(&b)?)
            }
            "pow" => {
                let (base, exp) = pair(body, tag)?;
                FormTemplate::Pow(Box::new(FormTemplate::from_json(&base)?), e(&exp)?)
            }
            "mul" => FormTemplate::Mul(
                body.as_array()
                    .ok_or("`mul` takes an array")?
                    .iter()
                    .map(FormTemplate::from_json)
                    .collect::<Result<_, _>>()?,
            ),
            other => return Err(format!("unknown node `{other}`")),
        })
    }

    pub fn instantiate(&self, env: &Env) -> Result<ClosedForm, String> {
        let s = |e: crate::expr::ExprError| e.to_string();
        match self {
            FormTemplate::Const(c) => Ok(ClosedForm::Const(c.eval(env)?)),
            FormTemplate::Pi => Ok(ClosedForm::Pi),
            FormTemplate::Gamma(a) => ClosedForm::gamma(a.eval(env)?).map_err(s),
            FormTemplate::Beta(a, b) => ClosedForm::beta(a.eval(env)?, b.eval(env)?).map_err(s),
            FormTemplate::SinPi(r) => Ok(ClosedForm::SinPi(r.eval(env)?)),
            FormTemplate::CosPi(r) => Ok(ClosedForm::CosPi(r.eval(env)?)),
            FormTemplate::Binom(n, k) => ClosedForm::binom(n.eval_int(env)?, k.eval_int(env)?).map_err(s),
            FormTemplate::Fact(n) => ClosedForm::fact(n.eval_int(env)?).map_err(s),
            FormTemplate::Pow(b, e) => ClosedForm::pow(b.instantiate(env)?, e.eval(env)?).map_err(s),
            FormTemplate::Mul(fs) => {
                let parts = fs.iter().map(|f| f.instantiate(env)).collect::<Result<Vec<_>, _>>()?;
                ClosedForm::mul(parts).map_err(s)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn env(pairs: &[(&str, Rational)]) -> Env {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn expressions() {
        let e = env(&[("n", Rational::integer(3)), ("a", Rational::frac(1, 4))]);
        let cases = [("2*n-1", "5"), ("-(2*n+1)", "-7"), ("a/2+1/4", "3/8"), ("1-(1+a)/2", "3/8"), ("-a", "-1/4")];
        for (src, want) in cases {
            assert_eq!(ParamExpr::parse(src).unwrap().eval(&e).unwrap().to_string(), want, "{src}");
        }
        assert!(ParamExpr::parse("2*").is_err());
        assert!(ParamExpr::parse("(1").is_err());
        assert!(ParamExpr::parse("1 2").is_err());
        assert!(ParamExpr::parse("x^2").is_err());
        assert!(ParamExpr::parse("q").unwrap().eval(&e).is_err());
        assert!(ParamExpr::parse("1/0").unwrap().eval(&e).is_err());
        assert!(ParamExpr::parse("a").unwrap().eval_int(&e).is_err());
        let mut vars = vec![];
        ParamExpr::parse("2*n + m - n").unwrap().variables(&mut vars);
        assert_eq!(vars, ["n", "m"]);
    }

    #[test]
    fn templates_mirror_closed_form_json() {
        let cf = ClosedForm::mul([
            ClosedForm::Const(Rational::HALF),
            ClosedForm::Beta(Rational::frac(1, 4), Rational::HALF),
            ClosedForm::sqrt(ClosedForm::Pi),
        ])
        .unwrap();
        let json = serde_json::to_value(&cf).unwrap();
        let t = FormTemplate::from_json(&json).unwrap();
        assert_eq!(t.instantiate(&Env::new()).unwrap(), cf);
    }

    #[test]
    fn parametric_template() {
        let t = FormTemplate::from_json(&json!({"mul": [
            {"binom": ["2*m", "m"]}, "pi", {"pow": [{"const": 2}, "-(2*m+1)"]}
        ]}))
        .unwrap();
        let cf = t.instantiate(&env(&[("m", Rational::integer(2))])).unwrap();
        assert_eq!(cf.to_string(), "C(4,2)·π/2^5");
        assert_eq!(cf.exact_value().unwrap().to_string(), "3/16·π");
        assert!(t.instantiate(&env(&[("m", Rational::HALF)])).is_err());
    }

    #[test]
    fn malformed_templates() {
        for bad in [json!("e"), json!({"beta": ["1"]}), json!({"foo": "1"}), json!({"mul": 3}), json!({"gamma": true})]
        {
            assert!(FormTemplate::from_json(&bad).is_err(), "{bad}");
        }
        let pole = FormTemplate::from_json(&json!({"gamma": "-n"})).unwrap();
        assert!(pole.instantiate(&env(&[("n", Rational::integer(1))])).is_err());
    }
}
