//! Recursive-descent parser for integral source text:
//!
//! ```text
//! integral := "int" "[" "0" "," bound "]" product "dx"
//! bound    := "pi/2" | "pi/4"
//! product  := term { ("*" | "/") term }        (may start with the literal 1)
//! term     := factor [ "^" "(" rational ")" | "^" integer ] | "sqrt" "(" factor ")"
//! factor   := "sin(x)" | "cos(x)" | "tan(x)" | "cot(x)" | "sec(x)" | "csc(x)" | "cos(2x)"
//! rational := integer [ "/" positive-integer ]
//! ```

use std::fmt;

use super::{normalize, Base, TrigIntegrand, Upper};
use crate::rational::{Rational, RationalError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnsupportedBase(String),
    CosTwoXOnHalfPi,
    Rational(RationalError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the source.
    pub position: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error at position {}: {msg}", self.position),
            ParseErrorKind::UnsupportedBase(b) => {
                write!(f, "domain error at position {}: unsupported base `{b}`", self.position)
            }
            ParseErrorKind::CosTwoXOnHalfPi => {
                write!(f, "domain error at position {}: cos(2x) on half-pi interval", self.position)
            }
            ParseErrorKind::Rational(e) => write!(f, "error at position {}: {e}", self.position),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = src[start..i]
                .parse::<i64>()
                .map_err(|_| ParseError { kind: ParseErrorKind::Rational(RationalError::Overflow), position: start })?;
            out.push((Tok::Int(n), start));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else if b"[],()*/^-".contains(&c) {
            out.push((Tok::Sym(c as char), i));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap();
            return Err(ParseError {
                kind: ParseErrorKind::Syntax(format!("unexpected character `{ch}`")),
                position: i,
            });
        }
    }
    out.push((Tok::Eof, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

/// A parsed `base^exponent` with the offset of its base.
struct Term {
    base: Base,
    exp: Rational,
    position: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { kind: ParseErrorKind::Syntax(msg.into()), position: self.offset() })
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!("expected `{c}`, found {}", self.peek()))
        }
    }

    fn expect_ident(&mut self, name: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == name => {
                self.bump();
                Ok(())
            }
            other => self.syntax(format!("expected `{name}`, found {other}")),
        }
    }

    fn expect_int(&mut self, want: i64) -> Result<(), ParseError> {
        if *self.peek() == Tok::Int(want) {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!("expected `{want}`, found {}", self.peek()))
        }
    }

    fn integral(&mut self) -> Result<(Upper, Vec<Term>), ParseError> {
        self.expect_ident("int")?;
        self.expect_sym('[')?;
        self.expect_int(0)?;
        self.expect_sym(',')?;
        let upper = self.bound()?;
        self.expect_sym(']')?;
        let terms = self.product()?;
        self.expect_ident("dx")?;
        if *self.peek() != Tok::Eof {
            return self.syntax(format!("unexpected {} after `dx`", self.peek()));
        }
        Ok((upper, terms))
    }

    fn bound(&mut self) -> Result<Upper, ParseError> {
        self.expect_ident("pi")?;
        self.expect_sym('/')?;
        match self.peek() {
            Tok::Int(2) => {
                self.bump();
                Ok(Upper::HalfPi)
            }
            Tok::Int(4) => {
                self.bump();
                Ok(Upper::QuarterPi)
            }
            other => self.syntax(format!("upper limit must be pi/2 or pi/4, found pi/{other}")),
        }
    }

    fn product(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut terms = Vec::new();
        if *self.peek() == Tok::Int(1) {
            self.bump();
        } else {
            terms.push(self.term()?);
        }
        loop {
            let invert = match self.peek() {
                Tok::Sym('*') => false,
                Tok::Sym('/') => true,
                _ => break,
            };
            self.bump();
            let mut t = self.term()?;
            if invert {
                t.exp = t.exp.checked_neg();
            }
            terms.push(t);
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if matches!(self.peek(), Tok::Ident(s) if s == "sqrt") {
            self.bump();
            self.expect_sym('(')?;
            let position = self.offset();
            let base = self.factor()?;
            self.expect_sym(')')?;
            return Ok(Term { base, exp: Rational::HALF, position });
        }
        let position = self.offset();
        let base = self.factor()?;
        let exp = if *self.peek() == Tok::Sym('^') {
            self.bump();
            if *self.peek() == Tok::Sym('(') {
                self.bump();
                let r = self.rational()?;
                self.expect_sym(')')?;
                r
            } else {
                Rational::integer(self.signed_int()?)
            }
        } else {
            Rational::ONE
        };
        Ok(Term { base, exp, position })
    }

    fn signed_int(&mut self) -> Result<i64, ParseError> {
        let neg = if *self.peek() == Tok::Sym('-') {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            Tok::Int(n) => Ok(if neg { -n } else { n }),
            other => {
                self.pos -= 1;
                self.syntax(format!("expected an integer exponent, found {other}"))
            }
        }
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let start = self.offset();
        let num = self.signed_int()?;
        let den = if *self.peek() == Tok::Sym('/') {
            self.bump();
            match self.peek() {
                Tok::Int(d) if *d > 0 => {
                    let d = *d;
                    self.bump();
                    d
                }
                other => return self.syntax(format!("expected a positive denominator, found {other}")),
            }
        } else {
            1
        };
        Rational::new(num, den).map_err(|e| ParseError { kind: ParseErrorKind::Rational(e), position: start })
    }

    fn factor(&mut self) -> Result<Base, ParseError> {
        let start = self.offset();
        let name = match self.peek() {
            Tok::Ident(s) => s.clone(),
            other => return self.syntax(format!("expected a trigonometric factor, found {other}")),
        };
        let base = match name.as_str() {
            "sin" => Base::Sin,
            "cos" => Base::Cos,
            "tan" => Base::Tan,
            "cot" => Base::Cot,
            "sec" => Base::Sec,
            "csc" => Base::Csc,
            _ => return Err(ParseError { kind: ParseErrorKind::UnsupportedBase(name), position: start }),
        };
        self.bump();
        self.expect_sym('(')?;
        let arg_pos = self.offset();
        let doubled = if *self.peek() == Tok::Int(2) {
            self.bump();
            true
        } else {
            false
        };
        self.expect_ident("x")?;
        self.expect_sym(')')?;
        match (base, doubled) {
            (_, false) => Ok(base),
            (Base::Cos, true) => Ok(Base::Cos2x),
            (_, true) => {
                Err(ParseError { kind: ParseErrorKind::UnsupportedBase(format!("{name}(2x)")), position: arg_pos })
            }
        }
    }
}

/// Parses integral source text into its canonical exponent triple.
pub fn parse(text: &str) -> Result<TrigIntegrand, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let (upper, terms) = p.integral()?;
    if upper == Upper::HalfPi {
        if let Some(t) = terms.iter().find(|t| t.base == Base::Cos2x && !t.exp.is_zero()) {
            return Err(ParseError { kind: ParseErrorKind::CosTwoXOnHalfPi, position: t.position });
        }
    }
    let pairs: Vec<(Base, Rational)> = terms.iter().map(|t| (t.base, t.exp)).collect();
    let e = normalize(&pairs).map_err(|e| ParseError { kind: ParseErrorKind::Rational(e), position: 0 })?;
    TrigIntegrand::from_exponents(e, upper)
        .map_err(|_| ParseError { kind: ParseErrorKind::CosTwoXOnHalfPi, position: 0 })
}

#[cfg(test)]
mod tests {
    use super::super::render;
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn examples() {
        let ti = parse("int[0,pi/2] sin(x)^(-1/2) dx").unwrap();
        assert_eq!(ti, TrigIntegrand::half_pi(r(-1, 2), Rational::ZERO));
        let ti = parse("int[0,pi/2] tan(x)^(1/3) dx").unwrap();
        assert_eq!(ti, TrigIntegrand::half_pi(r(1, 3), r(-1, 3)));
        let ti = parse("int[0,pi/4] sin(x)^3 * cos(2x)^(1/2) / cos(x)^6 dx").unwrap();
        assert_eq!(ti, TrigIntegrand::quarter_pi(Rational::integer(3), Rational::integer(-6), r(1, 2)));
    }

    #[test]
    fn sugar() {
        let ti = parse("int[0,pi/2] 1/sqrt(sin(x)) dx").unwrap();
        assert_eq!(ti, TrigIntegrand::half_pi(r(-1, 2), Rational::ZERO));
        let ti = parse("  int [ 0 , pi / 4 ] sqrt( cos( 2x ) ) * sin(x)/cos(x)^4 dx ").unwrap();
        assert_eq!(ti, TrigIntegrand::quarter_pi(Rational::ONE, Rational::integer(-4), r(1, 2)));
        let ti = parse("int[0,pi/2] sec(x)^-2 * csc(x) dx").unwrap();
        assert_eq!(ti, TrigIntegrand::half_pi(Rational::integer(-1), Rational::integer(2)));
        let ti = parse("int[0,pi/2] tan(x) * cot(x) dx").unwrap();
        assert_eq!(ti, TrigIntegrand::half_pi(Rational::ZERO, Rational::ZERO));
        let ti = parse("int[0,pi/2] 1 dx").unwrap();
        assert_eq!(ti, TrigIntegrand::half_pi(Rational::ZERO, Rational::ZERO));
        let ti = parse("int[0,pi/2] cos(2x)^0 dx").unwrap();
        assert_eq!(ti, TrigIntegrand::half_pi(Rational::ZERO, Rational::ZERO));
    }

    fn err(src: &str) -> ParseError {
        parse(src).expect_err(src)
    }

    #[test]
    fn rejections_carry_positions() {
        let e = err("int[0,pi/2] cos(2x)^(1/2) dx");
        assert_eq!(e.kind, ParseErrorKind::CosTwoXOnHalfPi);
        assert_eq!(e.position, 12);
        let e = err("int[0,pi/2] exp(x) dx");
        assert_eq!(e.kind, ParseErrorKind::UnsupportedBase("exp".into()));
        assert_eq!(e.position, 12);
        let e = err("int[0,pi/3] sin(x) dx");
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        assert_eq!(e.position, 9);
        let e = err("int[0,pi/2] sin(x)^(1/0) dx");
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        let e = err("int[0,pi/2] sin(x) dx extra");
        assert_eq!(e.position, 22);
        assert!(e.to_string().contains("position 22"));
    }

    fn arb_integrand() -> impl Strategy<Value = TrigIntegrand> {
        let q = (-50i64..50, 1i64..12).prop_map(|(n, d)| Rational::frac(n, d));
        (q.clone(), q.clone(), q, any::<bool>()).prop_map(|(a, b, c, half)| {
            if half {
                TrigIntegrand::half_pi(a, b)
            } else {
                TrigIntegrand::quarter_pi(a, b, c)
            }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn render_round_trips(ti in arb_integrand()) {
            prop_assert_eq!(parse(&render(&ti)).unwrap(), ti);
        }
    }
}
