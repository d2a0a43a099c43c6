//! Inverse normalizing factors `r(Λ, w)^{-1}` as formal products of completed
//! `L`- and `ε`-symbols.
//!
//! Expressions render in a fixed grammar, for example
//! `L(s-1,chi) / (L(s+2,chi)*eps(s,chi)*eps(s+1,chi)*eps(s+2,chi))`, and the
//! same grammar is accepted by [`LExpression::parse`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Div, Mul};
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::characters::{compose_coroot, AffineForm, CharClass, CharFactor, TorusCharacter};
use crate::rational::{parse_q, q};
use crate::root_system::{coroot, negative_set, WeylElement};
use crate::{Error, Result, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SymbolKind {
    L,
    Eps,
}

/// `L(arg, χ^power)` or `ε(arg, χ^power)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LSymbol {
    pub kind: SymbolKind,
    pub power: i64,
    pub arg: AffineForm,
}

impl LSymbol {
    pub fn l(arg: AffineForm, power: i64) -> Self {
        LSymbol { kind: SymbolKind::L, power, arg }
    }

    pub fn eps(arg: AffineForm, power: i64) -> Self {
        LSymbol { kind: SymbolKind::Eps, power, arg }
    }

    /// Partner under `ε(e, χ^k) ε(1-e, χ^{-k}) = 1`.
    pub fn reflected(&self) -> LSymbol {
        LSymbol { kind: self.kind, power: -self.power, arg: self.arg.reflect() }
    }
}

pub(crate) fn fmt_char_power(k: i64) -> String {
    match k {
        0 => "1".to_string(),
        1 => "chi".to_string(),
        k => format!("chi^{k}"),
    }
}

impl fmt::Display for LSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            SymbolKind::L => "L",
            SymbolKind::Eps => "eps",
        };
        write!(f, "{name}({},{})", self.arg, fmt_char_power(self.power))
    }
}

impl Serialize for LSymbol {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Rational scalar times a product of symbols with signed exponents.
/// Zero exponents are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LExpression {
    pub scalar: Q,
    pub factors: BTreeMap<LSymbol, i64>,
}

impl LExpression {
    pub fn one() -> Self {
        LExpression { scalar: Q::one(), factors: BTreeMap::new() }
    }

    pub fn constant(scalar: Q) -> Self {
        assert!(!scalar.is_zero(), "an L-expression scalar must be nonzero");
        LExpression { scalar, factors: BTreeMap::new() }
    }

    pub fn symbol(sym: LSymbol) -> Self {
        LExpression::one().times(sym, 1)
    }

    /// Multiplies in `sym^exp`.
    pub fn times(mut self, sym: LSymbol, exp: i64) -> Self {
        let e = self.factors.entry(sym).or_insert(0);
        *e += exp;
        if *e == 0 {
            self.factors.remove(&sym);
        }
        self
    }

    pub fn inverse(&self) -> Self {
        LExpression {
            scalar: self.scalar.recip(),
            factors: self.factors.iter().map(|(s, e)| (*s, -e)).collect(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.scalar.is_one() && self.factors.is_empty()
    }

    pub fn numerator(&self) -> Vec<(LSymbol, i64)> {
        self.factors.iter().filter(|(_, e)| **e > 0).map(|(s, e)| (*s, *e)).collect()
    }

    pub fn denominator(&self) -> Vec<(LSymbol, i64)> {
        self.factors.iter().filter(|(_, e)| **e < 0).map(|(s, e)| (*s, -e)).collect()
    }

    /// Symbols of a given kind with their signed exponents.
    pub fn symbols(&self, kind: SymbolKind) -> impl Iterator<Item = (&LSymbol, &i64)> {
        self.factors.iter().filter(move |(s, _)| s.kind == kind)
    }

    /// Substitutes `s = a' s + b'` into every argument.
    pub fn substitute(&self, inner: AffineForm) -> Self {
        let mut out = LExpression::constant(self.scalar);
        for (sym, e) in &self.factors {
            let arg = AffineForm::new(sym.arg.a * inner.a, sym.arg.a * inner.b + sym.arg.b);
            out = out.times(LSymbol { arg, ..*sym }, *e);
        }
        out
    }

    /// Canonical form: powers reduced by `class` when it is known, `ε` dropped
    /// for trivial characters, and each `ε(e, χ^k)` oriented so that the
    /// reflection identity `ε(e, χ^k) ε(1-e, χ^{-k}) = 1` cannot hide equal
    /// expressions.
    pub fn canonicalize(&self, class: Option<CharClass>) -> Self {
        let mut out = LExpression::constant(self.scalar);
        for (sym, e) in &self.factors {
            let mut sym = *sym;
            let mut e = *e;
            if let Some(c) = class {
                sym.power = c.reduce_power(sym.power);
            }
            if sym.kind == SymbolKind::Eps {
                if class.is_some() && sym.power == 0 {
                    continue;
                }
                let mut r = sym.reflected();
                if let Some(c) = class {
                    r.power = c.reduce_power(r.power);
                }
                if (r.arg, r.power) > (sym.arg, sym.power) {
                    sym = r;
                    e = -e;
                }
            }
            out = out.times(sym, e);
        }
        out
    }

    /// Canonical rendering in the fixed grammar.
    pub fn render(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str) -> Result<Self> {
        text.parse()
    }
}

impl Mul for LExpression {
    type Output = LExpression;
    fn mul(self, rhs: LExpression) -> LExpression {
        let mut out = self;
        out.scalar *= rhs.scalar;
        for (s, e) in rhs.factors {
            out = out.times(s, e);
        }
        out
    }
}

impl Div for LExpression {
    type Output = LExpression;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: LExpression) -> LExpression {
        self * rhs.inverse()
    }
}

fn render_product(items: &[(LSymbol, i64)]) -> Vec<String> {
    items
        .iter()
        .map(|(s, e)| if *e == 1 { s.to_string() } else { format!("{s}^{e}") })
        .collect()
}

impl fmt::Display for LExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut num = render_product(&self.numerator());
        let den = render_product(&self.denominator());
        let mut den_scalar = String::new();
        if !self.scalar.is_one() {
            if !self.scalar.numer().is_one() {
                num.insert(0, self.scalar.numer().to_string());
            }
            if !self.scalar.denom().is_one() {
                den_scalar = self.scalar.denom().to_string();
            }
        }
        let mut den_all = den;
        if !den_scalar.is_empty() {
            den_all.insert(0, den_scalar);
        }
        let num_text = if num.is_empty() { "1".to_string() } else { num.join("*") };
        match den_all.len() {
            0 => f.write_str(&num_text),
            1 => write!(f, "{num_text} / {}", den_all[0]),
            _ => write!(f, "{num_text} / ({})", den_all.join("*")),
        }
    }
}

impl Serialize for LExpression {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at byte {} of L-expression", self.pos))
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn take_while(&mut self, f: impl Fn(u8) -> bool) -> &str {
        let start = self.pos;
        while self.peek().is_some_and(&f) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("")
    }

    fn int(&mut self) -> Result<i64> {
        let start = self.pos;
        self.eat(b'-');
        self.take_while(|c| c.is_ascii_digit());
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| self.err("expected integer"))
    }

    /// quotient := factor (('*' | '/')? factor)*, left-associative.
    fn quotient(&mut self) -> Result<LExpression> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'/') {
                acc = acc / self.factor()?;
            } else if self.eat(b'*') || matches!(self.peek(), Some(b'L' | b'e' | b'(')) {
                acc = acc * self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<LExpression> {
        let base = match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.quotient()?;
                self.expect(b')')?;
                inner
            }
            Some(b'L') | Some(b'e') => {
                let name = self.take_while(|c| c.is_ascii_alphabetic()).to_string();
                let kind = match name.as_str() {
                    "L" => SymbolKind::L,
                    "eps" => SymbolKind::Eps,
                    _ => return Err(self.err(&format!("unknown symbol `{name}`"))),
                };
                self.expect(b'(')?;
                let arg_text = self.take_while(|c| c != b',').to_string();
                let arg: AffineForm = arg_text.parse()?;
                self.expect(b',')?;
                let power = self.char_power()?;
                self.expect(b')')?;
                LExpression::symbol(LSymbol { kind, power, arg })
            }
            Some(c) if c.is_ascii_digit() || c == b'-' => {
                let text = self.take_while(|c| c.is_ascii_digit() || c == b'-').to_string();
                let v = parse_q(&text)?;
                if v.is_zero() {
                    return Err(self.err("zero scalar"));
                }
                LExpression::constant(v)
            }
            _ => return Err(self.err("expected factor")),
        };
        if self.eat(b'^') {
            let n = self.int()?;
            let mut out = LExpression::constant(pow_q(base.scalar, n));
            for (s, e) in base.factors {
                out = out.times(s, e * n);
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn char_power(&mut self) -> Result<i64> {
        if self.eat(b'1') {
            return Ok(0);
        }
        let name = self.take_while(|c| c.is_ascii_alphabetic());
        if name != "chi" {
            return Err(self.err("expected `chi` or `1`"));
        }
        if self.eat(b'^') {
            let had_paren = self.eat(b'(');
            let k = self.int()?;
            if had_paren {
                self.expect(b')')?;
            }
            Ok(k)
        } else {
            Ok(1)
        }
    }
}

fn pow_q(x: Q, n: i64) -> Q {
    let mut out = Q::one();
    let base = if n < 0 { x.recip() } else { x };
    for _ in 0..n.unsigned_abs() {
        out *= base;
    }
    out
}

impl FromStr for LExpression {
    type Err = Error;

    /// Also accepts `ε`, `χ`, `²`, `·`, `−` and square brackets as written by hand.
    fn from_str(text: &str) -> Result<Self> {
        let normal: String = text
            .replace('ε', "eps")
            .replace('χ', "chi")
            .replace('²', "^2")
            .replace(['·', '⋅'], "*")
            .replace('−', "-")
            .replace('[', "(")
            .replace(']', ")")
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect();
        let mut p = Parser { src: normal.as_bytes(), pos: 0 };
        let out = p.quotient()?;
        if p.pos != normal.len() {
            return Err(p.err("trailing input"));
        }
        Ok(out)
    }
}

/// The pairs `(k, e)` with `Λ ∘ α^∨ = χ^k ν^e` for `α` in the negative set of `w`.
pub fn factor_pairs(lambda: &TorusCharacter, w: &WeylElement) -> Vec<CharFactor> {
    negative_set(w)
        .iter()
        .map(|alpha| {
            let co = coroot(alpha).expect("negative set contains roots only");
            compose_coroot(lambda, &co).expect("coroots of C_n are integral")
        })
        .collect()
}

/// `Π L(e, χ^k) / (L(e+1, χ^k) ε(e+1, χ^k))` over the negative set of `w`.
pub fn inverse_norm_factor(lambda: &TorusCharacter, w: &WeylElement) -> LExpression {
    let mut out = LExpression::one();
    for CharFactor { power, exponent } in factor_pairs(lambda, w) {
        let next = exponent + AffineForm::constant(q(1));
        out = out
            .times(LSymbol::l(exponent, power), 1)
            .times(LSymbol::l(next, power), -1)
            .times(LSymbol::eps(next, power), -1);
    }
    out.canonicalize(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{heisenberg_lambda, siegel_lambda};

    fn w(n: &str) -> WeylElement {
        WeylElement::parse(2, n).unwrap()
    }

    fn expr(t: &str) -> LExpression {
        t.parse().unwrap()
    }

    #[test]
    fn renders_heisenberg_c1() {
        let r = inverse_norm_factor(&heisenberg_lambda(), &w("c1"));
        assert_eq!(r.render(), "L(s-1,chi) / (L(s+2,chi)*eps(s,chi)*eps(s+1,chi)*eps(s+2,chi))");
    }

    #[test]
    fn parse_roundtrip() {
        for t in [
            "1",
            "L(s-1,chi) / (L(s+2,chi)*eps(s,chi)*eps(s+1,chi)*eps(s+2,chi))",
            "L(2s,chi^2)^2 / L(s+1/2,1)",
            "3*L(s,chi) / (2*eps(s,chi^-1))",
        ] {
            assert_eq!(expr(t).render(), t);
        }
        assert_eq!(expr("L(s,χ)·L(2s,χ²) / [ε(s,χ)]"), expr("L(s,chi)*L(2s,chi^2)/eps(s,chi)"));
        assert!("L(s,psi)".parse::<LExpression>().is_err());
        assert!("L(s,chi".parse::<LExpression>().is_err());
    }

    #[test]
    fn cancellation_and_classes() {
        let e = expr("L(s,chi)/L(s,chi)");
        assert!(e.is_one());
        let eps = expr("eps(s,chi)*eps(s+1,chi)");
        assert!(eps.canonicalize(Some(CharClass::Trivial)).is_one());
        let quad = expr("L(2s,chi^2)").canonicalize(Some(CharClass::Quadratic));
        assert_eq!(quad.render(), "L(2s,1)");
        let refl = expr("eps(s,chi)*eps(1-s,chi^-1)").canonicalize(None);
        assert!(refl.is_one());
        let refl_quad = expr("eps(s,chi)*eps(1-s,chi)").canonicalize(Some(CharClass::Quadratic));
        assert!(refl_quad.is_one());
    }

    #[test]
    fn identity_is_empty_product() {
        assert!(inverse_norm_factor(&siegel_lambda(), &w("id")).is_one());
        assert!(factor_pairs(&siegel_lambda(), &w("id")).is_empty());
    }

    #[test]
    fn substitution() {
        let e = expr("L(2s+1,chi)").substitute(AffineForm::new(q(1), Q::new(-1, 2)));
        assert_eq!(e.render(), "L(2s,chi)");
    }
}
