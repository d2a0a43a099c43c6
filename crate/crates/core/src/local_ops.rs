//! Local normalized intertwining operators as rule tables.
//!
//! The tables live in `data/rules.txt` (schema documented in its header) and
//! record the stated conclusions only: where an operator has a pole and on
//! which subquotient, how it acts on a chosen subquotient relative to another
//! element with the same target, and what the local image looks like.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::characters::{AffineForm, Case, CharClass};
use crate::rational::{as_int, parse_q};
use crate::root_system::WeylElement;
use crate::{Error, Result, Q};

/// The bundled rule table.
pub const STANDARD_RULES: &str = include_str!("../data/rules.txt");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Place {
    NonArch,
    Arch,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Place::NonArch => "nonarch",
            Place::Arch => "arch",
        })
    }
}

impl FromStr for Place {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "nonarch" | "finite" => Ok(Place::NonArch),
            "arch" | "infinite" | "real" => Ok(Place::Arch),
            other => Err(Error::Parse(format!("unknown place kind `{other}`"))),
        }
    }
}

/// Opaque subquotient label `Name(param;param;...)`, compared structurally.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubquotientLabel {
    pub name: String,
    pub params: Vec<String>,
}

impl SubquotientLabel {
    pub fn new(name: &str, params: &[&str]) -> Self {
        SubquotientLabel { name: name.to_string(), params: params.iter().map(|p| p.to_string()).collect() }
    }

    /// The normalized spherical vector.
    pub fn spherical() -> Self {
        SubquotientLabel::new("Spherical", &[])
    }

    pub fn is_spherical(&self) -> bool {
        self.name == "Spherical" && self.params.is_empty()
    }

    /// Labels of subquotients outside the induced representation never match a choice.
    pub fn is_outside(&self) -> bool {
        self.name == "OutsideRep"
    }
}

impl fmt::Display for SubquotientLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.params.is_empty() {
            f.write_str(&self.name)
        } else {
            write!(f, "{}({})", self.name, self.params.join(";"))
        }
    }
}

impl Serialize for SubquotientLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SubquotientLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for SubquotientLabel {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        let bad = || Error::Parse(format!("bad subquotient label `{text}`"));
        let Some(open) = t.find('(') else {
            if t.is_empty() || !t.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(bad());
            }
            return Ok(SubquotientLabel { name: t.to_string(), params: vec![] });
        };
        let inner = t[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let name = &t[..open];
        if name.is_empty() {
            return Err(bad());
        }
        let mut params = Vec::new();
        let mut depth = 0i32;
        let mut cur = String::new();
        for ch in inner.chars() {
            match ch {
                '(' | '{' => depth += 1,
                ')' | '}' => depth -= 1,
                _ => {}
            }
            if depth < 0 {
                return Err(bad());
            }
            if ch == ';' && depth == 0 {
                params.push(std::mem::take(&mut cur).trim().to_string());
            } else {
                cur.push(ch);
            }
        }
        if depth != 0 {
            return Err(bad());
        }
        params.push(cur.trim().to_string());
        Ok(SubquotientLabel { name: name.to_string(), params })
    }
}

/// Action of `N(Λ, w)` on a chosen subquotient, relative to the reference
/// element of its same-target group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Plus,
    Minus,
    Iso,
    Kernel,
}

impl FromStr for Action {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "plus" | "+1" => Ok(Action::Plus),
            "minus" | "-1" => Ok(Action::Minus),
            "iso" => Ok(Action::Iso),
            "kernel" => Ok(Action::Kernel),
            other => Err(Error::Parse(format!("unknown action `{other}`"))),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::Plus => "+1",
            Action::Minus => "-1",
            Action::Iso => "iso",
            Action::Kernel => "kernel",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
enum CondAtom {
    Equals(AffineForm, Q),
    Even(AffineForm),
    Odd(AffineForm),
    Int(AffineForm),
    Less(AffineForm, Q),
    Greater(AffineForm, Q),
}

impl CondAtom {
    fn holds(&self, s0: Q) -> bool {
        let parity = |f: &AffineForm| as_int(&f.eval(s0)).map(|n| n.rem_euclid(2));
        match self {
            CondAtom::Equals(f, v) => f.eval(s0) == *v,
            CondAtom::Even(f) => parity(f) == Some(0),
            CondAtom::Odd(f) => parity(f) == Some(1),
            CondAtom::Int(f) => parity(f).is_some(),
            CondAtom::Less(f, v) => f.eval(s0) < *v,
            CondAtom::Greater(f, v) => f.eval(s0) > *v,
        }
    }
}

/// Conjunction of conditions on `s0`; the empty conjunction (`*`) always holds.
#[derive(Clone, Debug, PartialEq)]
pub struct Condition {
    atoms: Vec<CondAtom>,
    text: String,
}

impl Condition {
    pub fn holds(&self, s0: Q) -> bool {
        self.atoms.iter().all(|a| a.holds(s0))
    }

    /// The single point `s0` fixed by an `s=Q` atom, if any.
    pub fn point(&self) -> Option<Q> {
        self.atoms.iter().find_map(|a| match a {
            CondAtom::Equals(f, v) if f.a == Q::from_integer(1) && f.b.is_zero() => Some(*v),
            _ => None,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        let mut atoms = Vec::new();
        if t != "*" {
            for part in t.split('&') {
                let p = part.trim();
                let unary = |prefix: &str| {
                    p.strip_prefix(prefix).and_then(|r| r.strip_suffix(')')).map(AffineForm::parse)
                };
                let atom = if let Some(f) = unary("even(") {
                    CondAtom::Even(f?)
                } else if let Some(f) = unary("odd(") {
                    CondAtom::Odd(f?)
                } else if let Some(f) = unary("int(") {
                    CondAtom::Int(f?)
                } else if let Some((l, r)) = p.split_once('<') {
                    CondAtom::Less(l.parse()?, parse_q(r)?)
                } else if let Some((l, r)) = p.split_once('>') {
                    CondAtom::Greater(l.parse()?, parse_q(r)?)
                } else if let Some((l, r)) = p.split_once('=') {
                    CondAtom::Equals(l.parse()?, parse_q(r)?)
                } else {
                    return Err(Error::Parse(format!("bad condition `{p}`")));
                };
                atoms.push(atom);
            }
        }
        Ok(Condition { atoms, text: t.to_string() })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlaceSel {
    NonArch,
    Arch,
    Any,
}

impl PlaceSel {
    pub fn matches(self, p: Place) -> bool {
        matches!((self, p), (PlaceSel::Any, _) | (PlaceSel::NonArch, Place::NonArch) | (PlaceSel::Arch, Place::Arch))
    }
}

impl FromStr for PlaceSel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "any" => Ok(PlaceSel::Any),
            other => Ok(match other.parse::<Place>()? {
                Place::NonArch => PlaceSel::NonArch,
                Place::Arch => PlaceSel::Arch,
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Pole,
    Holomorphic,
    /// Every non-identity contribution vanishes and the constant term is the section itself.
    Identity,
    Any,
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "pole" => Ok(Regime::Pole),
            "holomorphic" => Ok(Regime::Holomorphic),
            "identity" => Ok(Regime::Identity),
            "any" => Ok(Regime::Any),
            other => Err(Error::Parse(format!("unknown regime `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Structure {
    Irreducible,
    LengthTwo,
    Reducible,
    FullInduced,
    MaximalProper,
    Subquotient,
}

impl FromStr for Structure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "irreducible" => Ok(Structure::Irreducible),
            "length-two" => Ok(Structure::LengthTwo),
            "reducible" => Ok(Structure::Reducible),
            "full-induced" => Ok(Structure::FullInduced),
            "maximal-proper" => Ok(Structure::MaximalProper),
            "subquotient" => Ok(Structure::Subquotient),
            other => Err(Error::Parse(format!("unknown image structure `{other}`"))),
        }
    }
}

/// Fields shared by every record: which operators, places and characters it covers.
#[derive(Clone, Debug, PartialEq)]
pub struct Scope {
    pub id: String,
    pub case: Case,
    pub place: PlaceSel,
    pub chars: Vec<CharClass>,
    pub cond: Condition,
    pub citation: String,
}

impl Scope {
    fn matches(&self, case: Case, place: Place, class: CharClass, s0: Q) -> bool {
        self.case == case && self.place.matches(place) && self.chars.contains(&class) && self.cond.holds(s0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoleRule {
    pub scope: Scope,
    pub elements: Vec<WeylElement>,
    pub carrier: SubquotientLabel,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActionRule {
    pub scope: Scope,
    pub elements: Vec<WeylElement>,
    /// `None` matches every choice.
    pub choice: Option<SubquotientLabel>,
    pub action: Action,
    pub relative_to: Option<WeylElement>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImageRule {
    pub scope: Scope,
    pub regime: Regime,
    pub choice: Option<SubquotientLabel>,
    pub label: SubquotientLabel,
    pub structure: Structure,
}

/// Index of a local operator `N(Λ_{s,p}, w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalRuleKey {
    pub case: Case,
    pub w: WeylElement,
    pub place: Place,
    pub local_char: CharClass,
    pub s0: Q,
}

impl fmt::Display for LocalRuleKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {}, s0={})", self.case, self.w.name(), self.place, self.local_char, self.s0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActionNote {
    pub choice: Option<SubquotientLabel>,
    pub action: Action,
    pub citation: String,
}

/// Pole order (0 or 1), the subquotients carrying the pole, and the action notes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalRuleResult {
    pub order: u8,
    pub carriers: Vec<SubquotientLabel>,
    pub actions: Vec<ActionNote>,
    pub citations: Vec<String>,
}

impl LocalRuleResult {
    /// Pole order on a vector chosen in `choice`.
    pub fn order_on(&self, choice: &SubquotientLabel) -> u8 {
        u8::from(self.carriers.iter().any(|c| c == choice && !c.is_outside()))
    }
}

/// Parsed rule table.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleTable {
    pub poles: Vec<PoleRule>,
    pub actions: Vec<ActionRule>,
    pub images: Vec<ImageRule>,
}

fn parse_list<T: FromStr<Err = Error>>(field: &str) -> Result<Vec<T>> {
    field.split(',').map(|x| x.trim().parse()).collect()
}

fn parse_elements(field: &str) -> Result<Vec<WeylElement>> {
    field.split(',').map(|x| WeylElement::parse(2, x.trim())).collect()
}

fn parse_choice(field: &str) -> Result<Option<SubquotientLabel>> {
    match field.trim() {
        "*" => Ok(None),
        other => other.parse().map(Some),
    }
}

impl RuleTable {
    /// The bundled table.
    pub fn standard() -> Self {
        RuleTable::parse(STANDARD_RULES).expect("bundled rule table parses")
    }

    pub fn load(path: &Path) -> Result<Self> {
        RuleTable::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut table = RuleTable { poles: vec![], actions: vec![], images: vec![] };
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split('|').map(str::trim).collect();
            let at = |e: Error| Error::Parse(format!("rules line {}: {e}", n + 1));
            let arity = |want: usize| -> Result<()> {
                if f.len() == want {
                    Ok(())
                } else {
                    Err(at(Error::Parse(format!("expected {want} fields, found {}", f.len()))))
                }
            };
            let scope = |place: &str, chars: &str, cond: &str, citation: &str| -> Result<Scope> {
                Ok(Scope {
                    id: f[1].to_string(),
                    case: f[2].parse().map_err(at)?,
                    place: place.parse().map_err(at)?,
                    chars: parse_list(chars).map_err(at)?,
                    cond: cond.parse().map_err(at)?,
                    citation: citation.to_string(),
                })
            };
            match f[0] {
                "pole" => {
                    arity(9)?;
                    table.poles.push(PoleRule {
                        scope: scope(f[4], f[5], f[6], f[8])?,
                        elements: parse_elements(f[3]).map_err(at)?,
                        carrier: f[7].parse().map_err(at)?,
                    });
                }
                "action" => {
                    arity(11)?;
                    let relative_to = match f[9] {
                        "-" => None,
                        w => Some(WeylElement::parse(2, w).map_err(at)?),
                    };
                    table.actions.push(ActionRule {
                        scope: scope(f[4], f[5], f[6], f[10])?,
                        elements: parse_elements(f[3]).map_err(at)?,
                        choice: parse_choice(f[7]).map_err(at)?,
                        action: f[8].parse().map_err(at)?,
                        relative_to,
                    });
                }
                "image" => {
                    arity(11)?;
                    table.images.push(ImageRule {
                        scope: scope(f[3], f[4], f[5], f[10])?,
                        regime: f[6].parse().map_err(at)?,
                        choice: parse_choice(f[7]).map_err(at)?,
                        label: f[8].parse().map_err(at)?,
                        structure: f[9].parse().map_err(at)?,
                    });
                }
                other => return Err(at(Error::Parse(format!("unknown record kind `{other}`")))),
            }
        }
        let mut ids: Vec<&str> = table
            .poles
            .iter()
            .map(|r| r.scope.id.as_str())
            .chain(table.actions.iter().map(|r| r.scope.id.as_str()))
            .chain(table.images.iter().map(|r| r.scope.id.as_str()))
            .collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Parse(format!("duplicate rule id `{}`", w[0])));
        }
        Ok(table)
    }

    fn check_key(&self, key: &LocalRuleKey) -> Result<()> {
        let bad_char = match key.place {
            Place::NonArch => key.local_char == CharClass::Sgn,
            Place::Arch => key.local_char == CharClass::Quadratic,
        };
        if bad_char || !key.case.coset_reps().contains(&key.w) {
            return Err(Error::UncoveredKey(key.to_string()));
        }
        Ok(())
    }

    /// Pole order and carriers of `N(Λ_{s0,p}, w)`; order 0 when no row fires.
    pub fn local_pole(&self, key: &LocalRuleKey) -> Result<LocalRuleResult> {
        self.check_key(key)?;
        let mut carriers = Vec::new();
        let mut citations = Vec::new();
        for r in &self.poles {
            if r.elements.contains(&key.w) && r.scope.matches(key.case, key.place, key.local_char, key.s0) {
                if !carriers.contains(&r.carrier) {
                    carriers.push(r.carrier.clone());
                }
                citations.push(r.scope.citation.clone());
            }
        }
        let actions = self
            .matching_actions(key)
            .map(|r| ActionNote { choice: r.choice.clone(), action: r.action, citation: r.scope.citation.clone() })
            .collect();
        Ok(LocalRuleResult { order: u8::from(!carriers.is_empty()), carriers, actions, citations })
    }

    fn matching_actions<'a, 'k>(&'a self, key: &'k LocalRuleKey) -> impl Iterator<Item = &'a ActionRule> + 'k
    where
        'a: 'k,
    {
        self.actions.iter().filter(move |r| {
            r.elements.contains(&key.w) && r.scope.matches(key.case, key.place, key.local_char, key.s0)
        })
    }

    fn find_action(&self, key: &LocalRuleKey, choice: &SubquotientLabel) -> Option<&ActionRule> {
        self.actions.iter().filter(|r| r.elements.contains(&key.w) && r.scope.matches(key.case, key.place, key.local_char, key.s0)).find(|r| r.choice.as_ref().is_none_or(|c| c == choice))
    }

    /// Stated action on `choice`; the identity element acts as `iso`.
    pub fn sign_action(&self, key: &LocalRuleKey, choice: &SubquotientLabel) -> Result<Action> {
        self.check_key(key)?;
        if key.w.is_identity() {
            return Ok(Action::Iso);
        }
        self.find_action(key, choice).map(|r| r.action).ok_or_else(|| Error::UnknownChoice {
            key: key.to_string(),
            choice: choice.to_string(),
        })
    }

    /// Action used by the constant-term bookkeeping: the spherical vector goes
    /// to the spherical vector, and a choice without a note is an isomorphism
    /// onto an image unrelated to the other terms.
    pub fn effective_action(&self, key: &LocalRuleKey, choice: &SubquotientLabel) -> Result<(Action, Option<String>)> {
        self.check_key(key)?;
        if key.w.is_identity() {
            return Ok((Action::Iso, None));
        }
        if let Some(r) = self.find_action(key, choice) {
            return Ok((r.action, Some(r.scope.citation.clone())));
        }
        if choice.is_spherical() {
            return Ok((Action::Plus, None));
        }
        Ok((Action::Iso, None))
    }

    /// First image row for a place, if any.
    #[allow(clippy::too_many_arguments)]
    pub fn image_for(
        &self,
        case: Case,
        place: Place,
        class: CharClass,
        s0: Q,
        has_pole: bool,
        identity_only: bool,
        choice: &SubquotientLabel,
    ) -> Option<&ImageRule> {
        self.images.iter().find(|r| {
            let regime_ok = match r.regime {
                Regime::Any => true,
                Regime::Pole => has_pole,
                Regime::Holomorphic => !has_pole,
                Regime::Identity => identity_only,
            };
            regime_ok
                && r.scope.matches(case, place, class, s0)
                && r.choice.as_ref().is_none_or(|c| c == choice)
        })
    }
}

/// Reducibility of `χ ν^{s0} ⋊ 1` for `SL(2)`.
pub fn sl2_reducible(place: Place, class: CharClass, s0: Q) -> bool {
    match place {
        Place::NonArch => match class {
            CharClass::Quadratic => s0.is_zero(),
            CharClass::Trivial => s0 == Q::from_integer(1) || s0 == Q::from_integer(-1),
            _ => false,
        },
        Place::Arch => match (class, as_int(&s0)) {
            (CharClass::Trivial, Some(n)) => n.rem_euclid(2) == 1,
            (CharClass::Sgn, Some(n)) => n.rem_euclid(2) == 0,
            _ => false,
        },
    }
}

/// Reducibility of `χ_1 ν^{x} × χ_2` for `GL(2)`, given the class of `χ_1 χ_2^{-1}`.
pub fn gl2_reducible(place: Place, ratio: CharClass, x: Q) -> bool {
    match place {
        Place::NonArch => ratio == CharClass::Trivial && (x == Q::from_integer(1) || x == Q::from_integer(-1)),
        Place::Arch => match (ratio, as_int(&x)) {
            (CharClass::Trivial, Some(n)) => n.rem_euclid(2) == 1,
            (CharClass::Sgn, Some(n)) => n != 0 && n.rem_euclid(2) == 0,
            _ => false,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    fn key(case: Case, w: &str, place: Place, class: CharClass, s0: Q) -> LocalRuleKey {
        LocalRuleKey { case, w: WeylElement::parse(2, w).unwrap(), place, local_char: class, s0 }
    }

    fn label(t: &str) -> SubquotientLabel {
        t.parse().unwrap()
    }

    #[test]
    fn labels_parse_structurally() {
        let l = label("LanglandsQuotient(nu^2,nu^1;1)");
        assert_eq!(l.name, "LanglandsQuotient");
        assert_eq!(l.params, vec!["nu^2,nu^1", "1"]);
        assert_eq!(l.to_string(), "LanglandsQuotient(nu^2,nu^1;1)");
        let opaque = label("ArchDiscrete(L(delta nu^{(-s+1)/2},-s-1))");
        assert_eq!(opaque.params.len(), 1);
        assert!(label("Spherical").is_spherical());
        assert!("Bad(".parse::<SubquotientLabel>().is_err());
    }

    #[test]
    fn conditions() {
        let c: Condition = "even(s)&s<-1".parse().unwrap();
        assert!(c.holds(q(-2)) && c.holds(q(-4)));
        assert!(!c.holds(q(0)) && !c.holds(q(-3)) && !c.holds(frac(-5, 2)));
        let c: Condition = "odd(s+1/2)&s+1/2<0".parse().unwrap();
        assert!(c.holds(frac(-3, 2)) && !c.holds(frac(-5, 2)) && !c.holds(frac(1, 2)));
        let c: Condition = "s=-1/2".parse().unwrap();
        assert_eq!(c.point(), Some(frac(-1, 2)));
        assert!("*".parse::<Condition>().unwrap().holds(q(7)));
        assert!("wobble(s)".parse::<Condition>().is_err());
    }

    #[test]
    fn bundled_table_examples() {
        let t = RuleTable::standard();
        let r = t.local_pole(&key(Case::Heisenberg, "c1", Place::NonArch, CharClass::Trivial, q(-2))).unwrap();
        assert_eq!(r.order, 1);
        assert_eq!(r.carriers, vec![label("SteinbergTwist(3/2)")]);
        let r = t.local_pole(&key(Case::Heisenberg, "c1", Place::Arch, CharClass::Sgn, q(-3))).unwrap();
        assert_eq!(r.order, 1);
        let k0 = key(Case::Heisenberg, "c1", Place::NonArch, CharClass::Trivial, q(0));
        let r = t.local_pole(&k0).unwrap();
        assert_eq!(r.order, 0);
        assert_eq!(t.sign_action(&k0, &label("LanglandsQuotient(nu^1;nu^0x1)")).unwrap(), Action::Plus);
        assert_eq!(t.sign_action(&k0, &label("SteinbergTwist(1/2)")).unwrap(), Action::Minus);
        let r = t.local_pole(&key(Case::Siegel, "c2sc2", Place::NonArch, CharClass::Trivial, frac(-1, 2))).unwrap();
        assert_eq!(r.order, 1);
        assert_eq!(r.order_on(&label("Tempered(T2)")), 1);
        assert_eq!(r.order_on(&SubquotientLabel::spherical()), 0);
    }

    #[test]
    fn sign_actions() {
        let t = RuleTable::standard();
        let k = key(Case::Heisenberg, "c2s", Place::NonArch, CharClass::Quadratic, q(0));
        assert_eq!(t.sign_action(&k, &label("Tempered(T1)")).unwrap(), Action::Plus);
        assert_eq!(t.sign_action(&k, &label("Tempered(T2)")).unwrap(), Action::Minus);
        assert!(matches!(t.sign_action(&k, &label("Nothing")), Err(Error::UnknownChoice { .. })));
        let id = key(Case::Siegel, "id", Place::Arch, CharClass::Sgn, q(3));
        assert_eq!(t.sign_action(&id, &label("Anything")).unwrap(), Action::Iso);
    }

    #[test]
    fn uncovered_keys_fail_loudly() {
        let t = RuleTable::standard();
        let bad = key(Case::Heisenberg, "c2", Place::NonArch, CharClass::Trivial, q(0));
        assert!(matches!(t.local_pole(&bad), Err(Error::UncoveredKey(_))));
        let bad = key(Case::Siegel, "c2", Place::NonArch, CharClass::Sgn, q(0));
        assert!(matches!(t.local_pole(&bad), Err(Error::UncoveredKey(_))));
    }

    #[test]
    fn reducibility() {
        assert!(sl2_reducible(Place::NonArch, CharClass::Quadratic, q(0)));
        assert!(sl2_reducible(Place::NonArch, CharClass::Trivial, q(-1)));
        assert!(!sl2_reducible(Place::NonArch, CharClass::Other, q(-5)));
        assert!(sl2_reducible(Place::Arch, CharClass::Trivial, q(-3)));
        assert!(sl2_reducible(Place::Arch, CharClass::Sgn, q(0)));
        assert!(!sl2_reducible(Place::Arch, CharClass::Trivial, q(-2)));
        assert!(gl2_reducible(Place::NonArch, CharClass::Trivial, q(-1)));
        assert!(!gl2_reducible(Place::NonArch, CharClass::Quadratic, q(-1)));
        assert!(gl2_reducible(Place::Arch, CharClass::Sgn, q(-2)));
    }

    #[test]
    fn nonarch_poles_sit_on_a_reducible_rank_one_step() {
        use crate::characters::compose_coroot;
        use crate::root_system::{coroot, negative_set};
        let t = RuleTable::standard();
        for r in t.poles.iter().filter(|r| r.scope.place == PlaceSel::NonArch) {
            let s0 = r.scope.cond.point().expect("non-archimedean pole rows fix a point");
            for w in &r.elements {
                for &class in &r.scope.chars {
                    let lambda = r.scope.case.lambda();
                    let explained = negative_set(w).iter().any(|a| {
                        let f = compose_coroot(&lambda, &coroot(a).unwrap()).unwrap();
                        let x = f.exponent.eval(s0);
                        let local = class.power_class(f.power);
                        x < Q::zero()
                            && if a.is_long() {
                                sl2_reducible(Place::NonArch, local, x)
                            } else {
                                gl2_reducible(Place::NonArch, local, x)
                            }
                    });
                    assert!(explained, "{} for {} and {class}", r.scope.id, w.name());
                }
            }
        }
    }

    #[test]
    fn no_pole_rows_in_the_right_half_plane() {
        let t = RuleTable::standard();
        for case in Case::ALL {
            for w in case.coset_reps() {
                for (place, classes) in [
                    (Place::NonArch, [CharClass::Trivial, CharClass::Quadratic, CharClass::Other]),
                    (Place::Arch, [CharClass::Trivial, CharClass::Sgn, CharClass::Other]),
                ] {
                    for class in classes {
                        for n in 0..12 {
                            let k = LocalRuleKey { case, w: w.clone(), place, local_char: class, s0: frac(n, 4) };
                            assert_eq!(t.local_pole(&k).unwrap().order, 0, "{k}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn action_rows_are_relative_to_the_shortest_same_target_element() {
        use crate::characters::weyl_act;
        let t = RuleTable::standard();
        for r in &t.actions {
            let Some(rel) = &r.relative_to else { continue };
            let s0 = r.scope.cond.point().expect("action rows fix a point");
            let lambda = r.scope.case.lambda();
            for w in &r.elements {
                for &class in &r.scope.chars {
                    let target = weyl_act(w, &lambda);
                    let group: Vec<WeylElement> = r
                        .scope
                        .case
                        .coset_reps()
                        .into_iter()
                        .filter(|v| weyl_act(v, &lambda).equal_at(&target, s0, class))
                        .collect();
                    let shortest = group.iter().min_by_key(|v| (v.length(), v.name())).unwrap();
                    assert_eq!(shortest, rel, "{} for {}", r.scope.id, w.name());
                }
            }
        }
    }

    #[test]
    fn malformed_tables_are_rejected() {
        assert!(RuleTable::parse("pole | x | heisenberg | c1 | nonarch | trivial | s=-2 | A").is_err());
        assert!(RuleTable::parse("spell | x").is_err());
        let dup = "pole | x | heisenberg | c1 | nonarch | trivial | s=-2 | A | c\npole | x | heisenberg | s | nonarch | trivial | s=-2 | A | c";
        assert!(RuleTable::parse(dup).is_err());
    }
}
