//! Bounded identity rewriting.
//!
//! Forms are handled as monomials `c · ∏ atomᵉ` with a rational coefficient
//! and rational exponents, which makes cancellation after a rewrite a matter
//! of adding exponents. Rules fire on a monomial and return rewritten
//! monomials; a breadth-first search to depth [`MAX_DEPTH`] collects every
//! distinct result.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::expr::{ClosedForm, Notation};
use crate::rational::Rational;

pub const MAX_DEPTH: usize = 4;
/// Upper bound on the number of alternative forms returned.
pub const MAX_FORMS: usize = 256;
const AGREEMENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlternativeForm {
    pub form: ClosedForm,
    /// Rule ids in application order.
    pub trail: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Monomial {
    coeff: Rational,
    atoms: BTreeMap<ClosedForm, Rational>,
}

#[cfg(test)]
fn r(n: i64, d: i64) -> Rational {
    Rational::frac(n, d)
}

fn is_positive_value(cf: &ClosedForm) -> bool {
    cf.eval().map(|v| v > 0.0).unwrap_or(false)
}

/// Prime factorization of `n > 0` by trial division. A cofactor that
/// survives division up to 10⁶ is kept as a single base.
fn factor_int(mut n: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n && p <= 1_000_000 {
        let mut k = 0;
        while n % p == 0 {
            n /= p;
            k += 1;
        }
        if k > 0 {
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn sin_reduced(x: Rational) -> Option<(Rational, bool)> {
    let two = Rational::integer(2);
    let mut t = x.checked_sub(&two.checked_mul(&Rational::integer(x.checked_div(&two).ok()?.floor())).ok()?).ok()?;
    let mut negative = false;
    if t >= Rational::ONE {
        t = t.checked_sub(&Rational::ONE).ok()?;
        negative = true;
    }
    if t > Rational::HALF {
        t = Rational::ONE.checked_sub(&t).ok()?;
    }
    Some((t, negative))
}

fn cos_reduced(x: Rational) -> Option<(Rational, bool)> {
    let two = Rational::integer(2);
    let mut t = x.checked_sub(&two.checked_mul(&Rational::integer(x.checked_div(&two).ok()?.floor())).ok()?).ok()?;
    if t > Rational::ONE {
        t = two.checked_sub(&t).ok()?;
    }
    let mut negative = false;
    if t > Rational::HALF {
        t = Rational::ONE.checked_sub(&t).ok()?;
        negative = true;
    }
    Some((t, negative))
}

impl Monomial {
    fn from_form(cf: &ClosedForm) -> Option<Monomial> {
        let mut m = Monomial { coeff: Rational::ONE, atoms: BTreeMap::new() };
        m.absorb(cf, Rational::ONE)?;
        Some(m)
    }

    fn exponent(&self, atom: &ClosedForm) -> Rational {
        self.atoms.get(atom).copied().unwrap_or(Rational::ZERO)
    }

    fn bump(&mut self, atom: ClosedForm, e: Rational) -> Option<()> {
        let slot = self.atoms.entry(atom).or_insert(Rational::ZERO);
        *slot = slot.checked_add(&e).ok()?;
        Some(())
    }

    fn opaque(&mut self, cf: &ClosedForm, e: Rational) -> Option<()> {
        let key = ClosedForm::pow(cf.clone(), e).ok()?;
        self.bump(key, Rational::ONE)
    }

    /// Multiplies by `cf^e`, splitting products and powers where that is
    /// valid for real values.
    fn absorb(&mut self, cf: &ClosedForm, e: Rational) -> Option<()> {
        match cf {
            ClosedForm::Const(c) => {
                if let Some(k) = e.to_integer() {
                    self.coeff = self.coeff.checked_mul(&c.checked_pow(k).ok()?).ok()?;
                } else if c.is_positive() {
                    for (p, k) in factor_int(c.numer()) {
                        self.bump(ClosedForm::int(p), e.checked_mul(&Rational::integer(k)).ok()?)?;
                    }
                    for (p, k) in factor_int(c.denom()) {
                        self.bump(ClosedForm::int(p), e.checked_mul(&Rational::integer(-k)).ok()?)?;
                    }
                } else {
                    self.opaque(cf, e)?;
                }
                Some(())
            }
            ClosedForm::Mul(fs) => {
                if e.is_integer() || fs.iter().all(is_positive_value) {
                    fs.iter().try_for_each(|f| self.absorb(f, e))
                } else {
                    self.opaque(cf, e)
                }
            }
            ClosedForm::Pow(b, inner) => {
                if e.is_integer() || is_positive_value(b) {
                    self.absorb(b, inner.checked_mul(&e).ok()?)
                } else {
                    self.opaque(cf, e)
                }
            }
            atom => self.bump(atom.clone(), e),
        }
    }

    /// Copy multiplied by `∏ atomᵉ`.
    fn with(&self, changes: &[(ClosedForm, Rational)]) -> Option<Monomial> {
        let mut m = self.clone();
        for (atom, e) in changes {
            m.absorb(atom, *e)?;
        }
        Some(m)
    }

    /// Canonical monomial, or `None` when the form is zero or undefined.
    fn normalize(self) -> Option<Monomial> {
        let mut out = Monomial { coeff: self.coeff, atoms: BTreeMap::new() };
        for (atom, e) in self.atoms {
            if !e.is_zero() {
                out.put(atom, e)?;
            }
        }
        let bases: Vec<(ClosedForm, Rational)> =
            out.atoms.iter().filter(|(a, _)| matches!(a, ClosedForm::Const(_))).map(|(a, e)| (a.clone(), *e)).collect();
        for (atom, mut e) in bases {
            let ClosedForm::Const(c) = atom else { unreachable!() };
            out.atoms.remove(&atom);
            if let Some(k) = e.to_integer() {
                out.coeff = out.coeff.checked_mul(&c.checked_pow(k).ok()?).ok()?;
                continue;
            }
            // move powers of the base out of the coefficient
            if let Some(p) = c.to_integer().filter(|p| *p > 1) {
                while out.coeff.numer() % p == 0 && !out.coeff.is_zero() {
                    out.coeff = out.coeff.checked_div(&c).ok()?;
                    e = e.checked_add(&Rational::ONE).ok()?;
                }
                while out.coeff.denom() % p == 0 {
                    out.coeff = out.coeff.checked_mul(&c).ok()?;
                    e = e.checked_sub(&Rational::ONE).ok()?;
                }
            }
            out.atoms.insert(atom, e);
        }
        out.atoms.retain(|_, e| !e.is_zero());
        if out.coeff.is_zero() {
            return None;
        }
        Some(out)
    }

    fn put(&mut self, atom: ClosedForm, e: Rational) -> Option<()> {
        match atom {
            ClosedForm::Gamma(a) if a == 1 || a == 2 => Some(()),
            ClosedForm::Gamma(a) if a == Rational::HALF => {
                self.bump(ClosedForm::Pi, e.checked_mul(&Rational::HALF).ok()?)
            }
            ClosedForm::Fact(n) if n <= 1 => Some(()),
            ClosedForm::Binom(n, k) if k == 0 || k == n => Some(()),
            ClosedForm::Binom(n, k) if 2 * k > n => self.bump(ClosedForm::Binom(n, n - k), e),
            ClosedForm::Beta(a, b) if a > b => self.bump(ClosedForm::Beta(b, a), e),
            ClosedForm::SinPi(x) => {
                let (t, negative) = sin_reduced(x)?;
                if t.is_zero() {
                    return None;
                }
                self.sign(negative, e)?;
                if t == Rational::HALF {
                    Some(())
                } else {
                    self.bump(ClosedForm::SinPi(t), e)
                }
            }
            ClosedForm::CosPi(x) => {
                let (t, negative) = cos_reduced(x)?;
                if t == Rational::HALF {
                    return None;
                }
                self.sign(negative, e)?;
                if t.is_zero() {
                    Some(())
                } else {
                    self.bump(ClosedForm::CosPi(t), e)
                }
            }
            other => self.bump(other, e),
        }
    }

    fn sign(&mut self, negative: bool, e: Rational) -> Option<()> {
        if !negative {
            return Some(());
        }
        let k = e.to_integer()?;
        if k % 2 != 0 {
            self.coeff = self.coeff.checked_neg();
        }
        Some(())
    }

    fn to_form(&self) -> Option<ClosedForm> {
        // p/q is written as p · q^(-1) so that denominators print as "/q"
        let mut factors = vec![ClosedForm::int(self.coeff.numer())];
        if self.coeff.denom() != 1 {
            factors.push(ClosedForm::recip(ClosedForm::int(self.coeff.denom())).ok()?);
        }
        for (atom, e) in &self.atoms {
            factors.push(ClosedForm::pow(atom.clone(), *e).ok()?);
        }
        ClosedForm::mul(factors).ok()
    }

    fn gamma_sites(&self) -> Vec<(Rational, Rational)> {
        self.atoms
            .iter()
            .filter_map(|(a, e)| match a {
                ClosedForm::Gamma(x) => Some((*x, *e)),
                _ => None,
            })
            .collect()
    }
}

fn gamma_ok(x: Rational) -> bool {
    !(x.is_integer() && !x.is_positive())
}

fn neg(e: Rational) -> Rational {
    e.checked_neg()
}

/// Largest whole number of times a pairing rule can fire, given the
/// exponent magnitudes it consumes.
fn whole_count(values: &[Rational]) -> Option<Rational> {
    let m = values.iter().map(|v| if v.is_negative() { v.checked_neg() } else { *v }).min()?;
    let k = m.floor();
    (k >= 1).then(|| Rational::integer(k))
}

type Rule = fn(&Monomial) -> Vec<Monomial>;

/// `B(a, b) = Γ(a)Γ(b)/Γ(a+b)` at every beta factor at once.
fn beta_expand(m: &Monomial) -> Vec<Monomial> {
    let mut changes = Vec::new();
    for (atom, e) in &m.atoms {
        if let ClosedForm::Beta(a, b) = atom {
            let Ok(s) = a.checked_add(b) else { return vec![] };
            changes.push((atom.clone(), neg(*e)));
            changes.push((ClosedForm::Gamma(*a), *e));
            changes.push((ClosedForm::Gamma(*b), *e));
            changes.push((ClosedForm::Gamma(s), neg(*e)));
        }
    }
    if changes.is_empty() {
        return vec![];
    }
    m.with(&changes).into_iter().collect()
}

/// `Γ(a)Γ(b)/Γ(a+b) → B(a, b)` for each matching triple.
fn beta_contract(m: &Monomial) -> Vec<Monomial> {
    let sites = m.gamma_sites();
    let mut out = Vec::new();
    for (i, &(a, ea)) in sites.iter().enumerate() {
        for &(b, eb) in &sites[i..] {
            if !(a.is_positive() && b.is_positive() && ea.is_positive() && eb.is_positive()) {
                continue;
            }
            let Ok(s) = a.checked_add(&b) else { continue };
            let es = m.exponent(&ClosedForm::Gamma(s));
            if !es.is_negative() {
                continue;
            }
            let e = if a == b {
                let Ok(half) = ea.checked_mul(&Rational::HALF) else { continue };
                whole_count(&[half, es])
            } else {
                whole_count(&[ea, eb, es])
            };
            let Some(e) = e else { continue };
            out.extend(m.with(&[
                (ClosedForm::Beta(a, b), e),
                (ClosedForm::Gamma(a), neg(e)),
                (ClosedForm::Gamma(b), neg(e)),
                (ClosedForm::Gamma(s), e),
            ]));
        }
    }
    out
}

/// `B(x, 1/2) = 2^(2x-1) B(x, x)`, applied in either direction.
fn beta_duplication(m: &Monomial) -> Vec<Monomial> {
    let mut out = Vec::new();
    for (atom, e) in &m.atoms {
        let ClosedForm::Beta(a, b) = atom else { continue };
        let (x, to) = if *b == Rational::HALF && *a != Rational::HALF {
            (*a, ClosedForm::Beta(*a, *a))
        } else if *a == Rational::HALF && *b != Rational::HALF {
            (*b, ClosedForm::Beta(*b, *b))
        } else if a == b && *a != Rational::HALF {
            (*a, ClosedForm::Beta(*a, Rational::HALF))
        } else {
            continue;
        };
        let Some(power) = x
            .checked_mul(&Rational::integer(2))
            .and_then(|v| v.checked_sub(&Rational::ONE))
            .and_then(|v| v.checked_mul(e))
            .ok()
        else {
            continue;
        };
        let power = if a == b { neg(power) } else { power };
        out.extend(m.with(&[(atom.clone(), neg(*e)), (to, *e), (ClosedForm::int(2), power)]));
    }
    out
}

/// `Γ(t) = π / (sin(πt) Γ(1-t))` at one non-integer site.
fn gamma_reflection(m: &Monomial) -> Vec<Monomial> {
    let mut out = Vec::new();
    for (t, e) in m.gamma_sites() {
        if t.is_integer() || !(e.is_integer() || (t.is_positive() && t < Rational::ONE)) {
            continue;
        }
        let Ok(u) = Rational::ONE.checked_sub(&t) else { continue };
        out.extend(m.with(&[
            (ClosedForm::Gamma(t), neg(e)),
            (ClosedForm::Pi, e),
            (ClosedForm::SinPi(t), neg(e)),
            (ClosedForm::Gamma(u), neg(e)),
        ]));
    }
    out
}

/// `Γ(y)Γ(y+1/2) → 2^(1-2y) √π Γ(2y)` for each matching pair.
fn gamma_duplication_merge(m: &Monomial) -> Vec<Monomial> {
    let mut out = Vec::new();
    for (y, ey) in m.gamma_sites() {
        let Ok(y2) = y.checked_add(&Rational::HALF) else { continue };
        let e2 = m.exponent(&ClosedForm::Gamma(y2));
        if e2.is_zero() || e2.is_negative() != ey.is_negative() {
            continue;
        }
        let Some(dup) = dup_terms(y) else { continue };
        let Some(mag) = whole_count(&[ey, e2]) else { continue };
        let e = if ey.is_negative() { neg(mag) } else { mag };
        let (two_power, double) = dup;
        let Ok(two_e) = two_power.checked_mul(&e) else { continue };
        out.extend(m.with(&[
            (ClosedForm::Gamma(y), neg(e)),
            (ClosedForm::Gamma(y2), neg(e)),
            (ClosedForm::int(2), two_e),
            (ClosedForm::Pi, e.checked_mul(&Rational::HALF).ok().unwrap_or(Rational::ZERO)),
            (ClosedForm::Gamma(double), e),
        ]));
    }
    out
}

/// `(1 - 2y, 2y)` when `Γ(2y)` and `Γ(y + 1/2)` are both finite.
fn dup_terms(y: Rational) -> Option<(Rational, Rational)> {
    let double = y.checked_mul(&Rational::integer(2)).ok()?;
    let shifted = y.checked_add(&Rational::HALF).ok()?;
    if !gamma_ok(double) || !gamma_ok(shifted) {
        return None;
    }
    Some((Rational::ONE.checked_sub(&double).ok()?, double))
}

/// `Γ(y) → 2^(1-2y) √π Γ(2y) / Γ(y+1/2)` at one site.
fn gamma_duplication_complete(m: &Monomial) -> Vec<Monomial> {
    let mut out = Vec::new();
    for (y, e) in m.gamma_sites() {
        if y.is_integer() || y.is_half_integer() {
            continue;
        }
        let Some((two_power, double)) = dup_terms(y) else { continue };
        let (Ok(shifted), Ok(two_e), Ok(pi_e)) =
            (y.checked_add(&Rational::HALF), two_power.checked_mul(&e), e.checked_mul(&Rational::HALF))
        else {
            continue;
        };
        out.extend(m.with(&[
            (ClosedForm::Gamma(y), neg(e)),
            (ClosedForm::Gamma(double), e),
            (ClosedForm::Gamma(shifted), neg(e)),
            (ClosedForm::int(2), two_e),
            (ClosedForm::Pi, pi_e),
        ]));
    }
    out
}

/// Half-integer gamma values as factorials, at every site with an integer
/// exponent: `Γ(m+1/2) = (2m)! √π / (4^m m!)` and
/// `Γ(1/2-m) = (-4)^m m! √π / (2m)!`.
fn gamma_half_integer(m: &Monomial) -> Vec<Monomial> {
    let mut changes = Vec::new();
    let mut coeff = Rational::ONE;
    for (x, e) in m.gamma_sites() {
        let Some(k) = e.to_integer() else { continue };
        if !x.is_half_integer() || x == Rational::HALF {
            continue;
        }
        let n = x.floor();
        let (mm, sign) = if n >= 0 { (n, 1) } else { (-n, -1) };
        let Some(twice) = mm.checked_mul(2) else { return vec![] };
        let Some(four) = Rational::integer(4).checked_pow(mm * sign).ok() else { return vec![] };
        let four = if sign < 0 && mm % 2 == 1 { four.checked_neg() } else { four };
        let Some(c) = four.checked_pow(-k).ok() else { return vec![] };
        let Ok(next) = coeff.checked_mul(&c) else { return vec![] };
        coeff = next;
        let (s, kk) = (Rational::integer(sign), Rational::integer(k));
        changes.push((ClosedForm::Gamma(x), neg(e)));
        changes.push((ClosedForm::Fact(twice), s.checked_mul(&kk).unwrap()));
        changes.push((ClosedForm::Fact(mm), s.checked_neg().checked_mul(&kk).unwrap()));
        changes.push((ClosedForm::Pi, kk.checked_mul(&Rational::HALF).unwrap()));
    }
    if changes.is_empty() {
        return vec![];
    }
    changes.push((ClosedForm::Const(coeff), Rational::ONE));
    m.with(&changes).into_iter().collect()
}

/// `Γ(n) = (n-1)!` at every positive integer site.
fn gamma_factorial(m: &Monomial) -> Vec<Monomial> {
    let changes: Vec<(ClosedForm, Rational)> = m
        .gamma_sites()
        .into_iter()
        .filter_map(|(x, e)| x.to_integer().filter(|n| *n > 0).map(|n| (n, e)))
        .flat_map(|(n, e)| [(ClosedForm::Gamma(Rational::integer(n)), neg(e)), (ClosedForm::Fact(n - 1), e)])
        .collect();
    if changes.is_empty() {
        return vec![];
    }
    m.with(&changes).into_iter().collect()
}

/// `n! / (k! (n-k)!) → C(n, k)` for each matching triple.
fn factorial_binomial(m: &Monomial) -> Vec<Monomial> {
    let facts: Vec<(i64, Rational)> = m
        .atoms
        .iter()
        .filter_map(|(a, e)| match a {
            ClosedForm::Fact(n) => Some((*n, *e)),
            _ => None,
        })
        .collect();
    let mut out = Vec::new();
    for &(n, en) in &facts {
        if !en.is_positive() {
            continue;
        }
        for &(k, ek) in &facts {
            if !(k > 0 && 2 * k <= n && ek.is_negative()) {
                continue;
            }
            let e_rest = m.exponent(&ClosedForm::Fact(n - k));
            if !e_rest.is_negative() {
                continue;
            }
            let e = if 2 * k == n {
                whole_count(&[en, ek.checked_mul(&Rational::HALF).unwrap()])
            } else {
                whole_count(&[en, ek, e_rest])
            };
            let Some(e) = e else { continue };
            out.extend(m.with(&[
                (ClosedForm::Binom(n, k), e),
                (ClosedForm::Fact(n), neg(e)),
                (ClosedForm::Fact(k), e),
                (ClosedForm::Fact(n - k), e),
            ]));
        }
    }
    out
}

/// `sin(πr) ↔ cos(π(1/2 - r))` at one site.
fn trig_cofunction(m: &Monomial) -> Vec<Monomial> {
    let mut out = Vec::new();
    for (atom, e) in &m.atoms {
        let (to, x) = match atom {
            ClosedForm::SinPi(x) => (ClosedForm::CosPi as fn(Rational) -> ClosedForm, *x),
            ClosedForm::CosPi(x) => (ClosedForm::SinPi as fn(Rational) -> ClosedForm, *x),
            _ => continue,
        };
        let Ok(y) = Rational::HALF.checked_sub(&x) else { continue };
        out.extend(m.with(&[(atom.clone(), neg(*e)), (to(y), *e)]));
    }
    out
}

pub const RULE_IDS: [&str; 10] = [
    "beta.expand",
    "beta.contract",
    "beta.duplication",
    "gamma.reflection",
    "gamma.duplication.merge",
    "gamma.duplication.complete",
    "gamma.half_integer",
    "gamma.factorial",
    "factorial.binomial",
    "trig.cofunction",
];

const RULES: [Rule; 10] = [
    beta_expand,
    beta_contract,
    beta_duplication,
    gamma_reflection,
    gamma_duplication_merge,
    gamma_duplication_complete,
    gamma_half_integer,
    gamma_factorial,
    factorial_binomial,
    trig_cofunction,
];

/// One-line statement of each rule, for derivation traces.
pub fn rule_statement(id: &str) -> &'static str {
    match id {
        "beta.expand" => "B(a, b) = Γ(a)Γ(b)/Γ(a+b)",
        "beta.contract" => "Γ(a)Γ(b)/Γ(a+b) = B(a, b)",
        "beta.duplication" => "B(x, 1/2) = 2^(2x-1)·B(x, x)",
        "gamma.reflection" => "Γ(t)Γ(1-t) = π/sin(πt)",
        "gamma.duplication.merge" | "gamma.duplication.complete" => "Γ(2y) = 2^(2y-1)·Γ(y)Γ(y+1/2)/√π",
        "gamma.half_integer" => "Γ(m+1/2) = √π·(2m)!/(4^m·m!)",
        "gamma.factorial" => "Γ(n) = (n-1)!",
        "factorial.binomial" => "n!/(k!(n-k)!) = C(n,k)",
        "trig.cofunction" => "sin(πr) = cos(π(1/2 - r))",
        _ => "",
    }
}

/// Every form reachable from `cf` by at most [`MAX_DEPTH`] rule
/// applications, in breadth-first order, each checked to agree numerically
/// with `cf`. The input itself is not included.
pub fn apply_identities(cf: &ClosedForm) -> Vec<AlternativeForm> {
    let Ok(target) = cf.eval() else { return vec![] };
    let Some(start) = Monomial::from_form(cf).and_then(Monomial::normalize) else {
        return vec![];
    };
    let mut seen: HashSet<String> = HashSet::new();
    seen.insert(cf.render(Notation::Text));
    if let Some(f) = start.to_form() {
        seen.insert(f.render(Notation::Text));
    }
    let mut out = Vec::new();
    let mut frontier = vec![(start, Vec::<String>::new())];
    for _ in 0..MAX_DEPTH {
        let mut next = Vec::new();
        for (m, trail) in &frontier {
            for (id, rule) in RULE_IDS.iter().zip(RULES) {
                for candidate in rule(m) {
                    let Some(n) = candidate.normalize() else { continue };
                    let Some(form) = n.to_form() else { continue };
                    if !seen.insert(form.render(Notation::Text)) {
                        continue;
                    }
                    if form.check_invariants().is_err() || !agrees(&form, target) {
                        continue;
                    }
                    let mut t = trail.clone();
                    t.push(id.to_string());
                    out.push(AlternativeForm { form, trail: t.clone() });
                    if out.len() >= MAX_FORMS {
                        return out;
                    }
                    next.push((n, t));
                }
            }
        }
        frontier = next;
    }
    out
}

fn agrees(form: &ClosedForm, target: f64) -> bool {
    match form.eval() {
        Ok(v) => (v - target).abs() <= AGREEMENT_TOL * v.abs().max(target.abs()).max(1.0),
        Err(_) => false,
    }
}
