//! Inducing torus characters `Λ_s` and their pairing with coroots.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::rational::{fmt_q, parse_q, q};
use crate::root_system::{RootVector, WeylElement};
use crate::{Error, Result, Q};

/// Class of a (global or local) character, enough to decide every fact the
/// engine uses. `Sgn` only makes sense at the archimedean place.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CharClass {
    Trivial,
    #[serde(alias = "quadratic_nontrivial")]
    Quadratic,
    Other,
    Sgn,
}

impl CharClass {
    /// Canonical exponent of `χ^k` given the class of `χ`.
    pub fn reduce_power(self, k: i64) -> i64 {
        match self {
            CharClass::Trivial => 0,
            CharClass::Quadratic | CharClass::Sgn => k.rem_euclid(2),
            CharClass::Other => k,
        }
    }

    /// Class of `χ^k`. An `Other` character is taken to have infinite order.
    pub fn power_class(self, k: i64) -> CharClass {
        if self.reduce_power(k) == 0 {
            CharClass::Trivial
        } else {
            self
        }
    }

    pub fn is_trivial(self) -> bool {
        self == CharClass::Trivial
    }

    /// `χ² = 1`.
    pub fn squares_to_one(self) -> bool {
        self != CharClass::Other
    }

    pub fn name(self) -> &'static str {
        match self {
            CharClass::Trivial => "trivial",
            CharClass::Quadratic => "quadratic",
            CharClass::Other => "other",
            CharClass::Sgn => "sgn",
        }
    }
}

impl fmt::Display for CharClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CharClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "trivial" | "1" => Ok(CharClass::Trivial),
            "quadratic" | "quadratic_nontrivial" | "quad" => Ok(CharClass::Quadratic),
            "other" => Ok(CharClass::Other),
            "sgn" => Ok(CharClass::Sgn),
            other => Err(Error::Parse(format!("unknown character class `{other}`"))),
        }
    }
}

/// `a·s + b` with rational coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineForm {
    pub a: Q,
    pub b: Q,
}

impl AffineForm {
    pub fn new(a: Q, b: Q) -> Self {
        AffineForm { a, b }
    }

    pub fn constant(b: Q) -> Self {
        AffineForm::new(Q::zero(), b)
    }

    /// `s + b`.
    pub fn shift(b: Q) -> Self {
        AffineForm::new(Q::one(), b)
    }

    pub fn eval(&self, s0: Q) -> Q {
        self.a * s0 + self.b
    }

    pub fn scale(&self, k: Q) -> Self {
        AffineForm::new(self.a * k, self.b * k)
    }

    /// `1 - self`, the reflected argument of the functional equation.
    pub fn reflect(&self) -> Self {
        AffineForm::new(-self.a, Q::one() - self.b)
    }

    pub fn parse(text: &str) -> Result<Self> {
        text.parse()
    }
}

impl Add for AffineForm {
    type Output = AffineForm;
    fn add(self, o: AffineForm) -> AffineForm {
        AffineForm::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for AffineForm {
    type Output = AffineForm;
    fn sub(self, o: AffineForm) -> AffineForm {
        AffineForm::new(self.a - o.a, self.b - o.b)
    }
}

impl Neg for AffineForm {
    type Output = AffineForm;
    fn neg(self) -> AffineForm {
        AffineForm::new(-self.a, -self.b)
    }
}

impl fmt::Display for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        if !self.a.is_zero() {
            if self.a == q(1) {
                out.push('s');
            } else if self.a == q(-1) {
                out.push_str("-s");
            } else if self.a.is_integer() {
                out.push_str(&format!("{}s", self.a.numer()));
            } else {
                out.push_str(&format!("({})s", fmt_q(&self.a)));
            }
        }
        if out.is_empty() {
            out.push_str(&fmt_q(&self.b));
        } else if self.b > Q::zero() {
            out.push_str(&format!("+{}", fmt_q(&self.b)));
        } else if self.b < Q::zero() {
            out.push_str(&fmt_q(&self.b));
        }
        f.write_str(&out)
    }
}

impl Serialize for AffineForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for AffineForm {
    type Err = Error;

    /// Accepts sums of terms like `s`, `-2s`, `(1/2)s`, `3/2`, e.g. `1/2-s`, `2s+1`.
    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad affine form `{text}`"));
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        let mut terms: Vec<String> = Vec::new();
        let mut depth = 0i32;
        let mut cur = String::new();
        for ch in compact.chars() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            if (ch == '+' || ch == '-') && depth == 0 && !cur.is_empty() {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        let mut form = AffineForm::constant(Q::zero());
        for term in terms {
            let (sign, body) = match term.strip_prefix('-') {
                Some(b) => (q(-1), b.to_string()),
                None => (q(1), term.trim_start_matches('+').to_string()),
            };
            if body.is_empty() {
                return Err(bad());
            }
            if let Some(coef) = body.strip_suffix('s') {
                let coef = coef.trim_end_matches('*');
                let coef = coef.strip_prefix('(').and_then(|c| c.strip_suffix(')')).unwrap_or(coef);
                let c = if coef.is_empty() { q(1) } else { parse_q(coef).map_err(|_| bad())? };
                form.a += sign * c;
            } else {
                form.b += sign * parse_q(&body).map_err(|_| bad())?;
            }
        }
        Ok(form)
    }
}

/// One coordinate of a torus character: `χ^power ν^{exponent}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CharFactor {
    pub power: i64,
    pub exponent: AffineForm,
}

impl CharFactor {
    pub fn new(power: i64, exponent: AffineForm) -> Self {
        CharFactor { power, exponent }
    }
}

impl fmt::Display for CharFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.power {
            0 => write!(f, "nu^({})", self.exponent),
            1 => write!(f, "chi nu^({})", self.exponent),
            k => write!(f, "chi^{k} nu^({})", self.exponent),
        }
    }
}

/// Character of the diagonal torus, one factor per coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TorusCharacter {
    pub coords: Vec<CharFactor>,
}

impl TorusCharacter {
    pub fn new(coords: Vec<CharFactor>) -> Self {
        TorusCharacter { coords }
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    /// Values at `s0`: class-reduced power and real exponent per coordinate.
    pub fn at(&self, s0: Q, class: CharClass) -> Vec<(i64, Q)> {
        self.coords.iter().map(|c| (class.reduce_power(c.power), c.exponent.eval(s0))).collect()
    }

    /// Equality after specializing `s = s0` and reducing powers by `class`.
    pub fn equal_at(&self, other: &TorusCharacter, s0: Q, class: CharClass) -> bool {
        self.at(s0, class) == other.at(s0, class)
    }
}

impl fmt::Display for TorusCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(" (x) "))
    }
}

/// `χν^s ⊗ ν^{-1}`.
pub fn heisenberg_lambda() -> TorusCharacter {
    TorusCharacter::new(vec![
        CharFactor::new(1, AffineForm::shift(Q::zero())),
        CharFactor::new(0, AffineForm::constant(q(-1))),
    ])
}

/// `χν^{s-1/2} ⊗ χν^{s+1/2}`.
pub fn siegel_lambda() -> TorusCharacter {
    TorusCharacter::new(vec![
        CharFactor::new(1, AffineForm::shift(Q::new(-1, 2))),
        CharFactor::new(1, AffineForm::shift(Q::new(1, 2))),
    ])
}

/// `Λ ∘ α^∨` as `χ^k ν^{a s + b}`; `α^∨` must have integer coordinates.
pub fn compose_coroot(lambda: &TorusCharacter, coroot: &RootVector) -> Result<CharFactor> {
    if coroot.rank() != lambda.rank() {
        return Err(Error::Parse(format!("rank mismatch: {coroot} against rank {}", lambda.rank())));
    }
    let mut power = 0i64;
    let mut exponent = AffineForm::constant(Q::zero());
    for (c, f) in coroot.coords.iter().zip(&lambda.coords) {
        if !c.is_integer() {
            return Err(Error::Parse(format!("coroot {coroot} is not integral")));
        }
        let k = c.to_integer();
        power += k * f.power;
        exponent = exponent + f.exponent.scale(*c);
    }
    Ok(CharFactor::new(power, exponent))
}

/// `w(Λ)`: coordinates moved by `w`; a sign flip inverts the factor.
pub fn weyl_act(w: &WeylElement, lambda: &TorusCharacter) -> TorusCharacter {
    let mut coords = lambda.coords.clone();
    for (i, f) in lambda.coords.iter().enumerate() {
        let sign = w.signs()[i] as i64;
        coords[w.perm()[i]] = CharFactor::new(sign * f.power, f.exponent.scale(q(sign)));
    }
    TorusCharacter::new(coords)
}

/// The two maximal parabolics of `Sp(4)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Heisenberg,
    Siegel,
}

impl Case {
    pub const ALL: [Case; 2] = [Case::Heisenberg, Case::Siegel];

    pub fn name(self) -> &'static str {
        match self {
            Case::Heisenberg => "heisenberg",
            Case::Siegel => "siegel",
        }
    }

    pub fn lambda(self) -> TorusCharacter {
        match self {
            Case::Heisenberg => heisenberg_lambda(),
            Case::Siegel => siegel_lambda(),
        }
    }

    /// Simple root of the Levi factor.
    pub fn levi_root(self) -> RootVector {
        match self {
            Case::Heisenberg => RootVector::from_ints(&[0, 2]),
            Case::Siegel => RootVector::from_ints(&[1, -1]),
        }
    }

    /// Weyl elements indexing the constant term, shortest first.
    pub fn coset_reps(self) -> Vec<WeylElement> {
        crate::root_system::coset_reps(2, &[self.levi_root()])
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "heisenberg" | "heis" => Ok(Case::Heisenberg),
            "siegel" => Ok(Case::Siegel),
            other => Err(Error::Parse(format!("unknown case `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn form(t: &str) -> AffineForm {
        t.parse().unwrap()
    }

    fn w(n: &str) -> WeylElement {
        WeylElement::parse(2, n).unwrap()
    }

    #[test]
    fn affine_parse_display() {
        assert_eq!(form("s-1"), AffineForm::new(q(1), q(-1)));
        assert_eq!(form("1/2-s"), AffineForm::new(q(-1), frac(1, 2)));
        assert_eq!(form("2s+1"), AffineForm::new(q(2), q(1)));
        assert_eq!(form("(1/2)s+3"), AffineForm::new(frac(1, 2), q(3)));
        assert_eq!(form("-3/2"), AffineForm::constant(frac(-3, 2)));
        assert_eq!(form("s").to_string(), "s");
        assert_eq!(form("1/2-s").to_string(), "-s+1/2");
        assert_eq!(form("0s").to_string(), "0");
        assert_eq!(form("s+3/2").to_string(), "s+3/2");
        assert!("s+".parse::<AffineForm>().is_err());
        assert!("t".parse::<AffineForm>().is_err());
    }

    #[test]
    fn class_powers() {
        assert_eq!(CharClass::Quadratic.power_class(2), CharClass::Trivial);
        assert_eq!(CharClass::Quadratic.power_class(-1), CharClass::Quadratic);
        assert_eq!(CharClass::Trivial.power_class(5), CharClass::Trivial);
        assert_eq!(CharClass::Other.power_class(2), CharClass::Other);
        assert_eq!(CharClass::Other.power_class(0), CharClass::Trivial);
        assert_eq!(CharClass::Sgn.reduce_power(-3), 1);
    }

    #[test]
    fn heisenberg_pairings() {
        let l = heisenberg_lambda();
        assert_eq!(l.coords[0], CharFactor::new(1, form("s")));
        assert_eq!(l.coords[1], CharFactor::new(0, form("-1")));
        let pair = |c: &[i64]| compose_coroot(&l, &RootVector::from_ints(c)).unwrap();
        assert_eq!(pair(&[1, 0]), CharFactor::new(1, form("s")));
        assert_eq!(pair(&[1, -1]), CharFactor::new(1, form("s+1")));
        assert_eq!(pair(&[1, 1]), CharFactor::new(1, form("s-1")));
    }

    #[test]
    fn siegel_pairings() {
        let l = siegel_lambda();
        assert_eq!(l.coords[0], CharFactor::new(1, form("s-1/2")));
        let pair = |c: &[i64]| compose_coroot(&l, &RootVector::from_ints(c)).unwrap();
        assert_eq!(pair(&[1, 1]), CharFactor::new(2, form("2s")));
        assert_eq!(pair(&[0, 1]), CharFactor::new(1, form("s+1/2")));
    }

    #[test]
    fn weyl_action_on_heisenberg() {
        let l = heisenberg_lambda();
        let sl = weyl_act(&w("s"), &l);
        assert_eq!(sl.coords, vec![CharFactor::new(0, form("-1")), CharFactor::new(1, form("s"))]);
        let cl = weyl_act(&w("c2"), &l);
        assert_eq!(cl.coords, vec![CharFactor::new(1, form("s")), CharFactor::new(0, form("1"))]);
        let c1l = weyl_act(&w("sc2s"), &l);
        assert!(c1l.equal_at(&l, Q::zero(), CharClass::Quadratic));
        assert!(c1l.equal_at(&l, Q::zero(), CharClass::Trivial));
        assert!(!c1l.equal_at(&l, Q::zero(), CharClass::Other));
        assert!(!c1l.equal_at(&l, q(1), CharClass::Trivial));
    }
}
