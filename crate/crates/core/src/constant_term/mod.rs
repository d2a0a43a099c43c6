//! The constant term along the Borel subgroup, assembled from one
//! contribution per coset representative `w`:
//!
//! `r(Λ_s, w)^{-1} · (⊗_{p∈S} N(Λ_{s,p}, w) f_p) ⊗ (⊗_{p∉S} f_{w,p})`.
//!
//! Each contribution has a Laurent order at `s0` (global normalizing factor
//! minus local operator poles). Contributions landing in the same principal
//! series at `s0` are summed with the signs of the local operators, which is
//! where cancellation happens.

mod theorems;

pub use theorems::{check_point, grid, verify_theorem, ClauseRow, Expectation, ExpectedPole, GridPoint, TheoremId};

use serde::{Deserialize, Serialize};

use crate::characters::{weyl_act, Case, CharClass, TorusCharacter};
use crate::lgerms::{germ_at, order_at, sum_germs, Germ, OrderValue, Series};
use crate::local_ops::{Action, LocalRuleKey, Place, RuleTable, Structure, SubquotientLabel};
use crate::normfactor::{fmt_char_power, inverse_norm_factor};
use crate::rational::fmt_q;
use crate::root_system::WeylElement;
use crate::{Error, Result, Q};

fn spherical() -> SubquotientLabel {
    SubquotientLabel::spherical()
}

/// One place of the finite set `S` together with the chosen local vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaceChoice {
    pub name: String,
    pub kind: Place,
    pub local_char: CharClass,
    #[serde(default = "spherical")]
    pub choice: SubquotientLabel,
}

/// The global character class and the places where the section is specified.
/// Places not listed carry the normalized spherical vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaceProfile {
    pub character: CharClass,
    pub places: Vec<PlaceChoice>,
}

impl PlaceProfile {
    /// Only the archimedean place, with a spherical vector.
    pub fn new(character: CharClass, arch_char: CharClass) -> Self {
        PlaceProfile {
            character,
            places: vec![PlaceChoice {
                name: "inf".to_string(),
                kind: Place::Arch,
                local_char: arch_char,
                choice: spherical(),
            }],
        }
    }

    /// Adds a place, replacing one with the same name.
    pub fn with_place(mut self, name: &str, kind: Place, local_char: CharClass, choice: SubquotientLabel) -> Self {
        self.places.retain(|p| p.name != name);
        self.places.push(PlaceChoice { name: name.to_string(), kind, local_char, choice });
        self
    }

    pub fn finite(self, name: &str, local_char: CharClass, choice: SubquotientLabel) -> Self {
        self.with_place(name, Place::NonArch, local_char, choice)
    }

    pub fn arch_choice(mut self, choice: SubquotientLabel) -> Self {
        for p in self.places.iter_mut().filter(|p| p.kind == Place::Arch) {
            p.choice = choice.clone();
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidProfile(msg));
        if self.character == CharClass::Sgn {
            return bad("the global character cannot be sgn".into());
        }
        let arch = self.places.iter().filter(|p| p.kind == Place::Arch).count();
        if arch != 1 {
            return bad(format!("expected exactly one archimedean place, found {arch}"));
        }
        for p in &self.places {
            if self.places.iter().filter(|o| o.name == p.name).count() > 1 {
                return bad(format!("place `{}` listed twice", p.name));
            }
            let ok = match (self.character, p.kind, p.local_char) {
                (_, Place::NonArch, CharClass::Sgn) => false,
                (_, Place::Arch, CharClass::Quadratic) => false,
                (CharClass::Trivial, _, local) => local == CharClass::Trivial,
                (CharClass::Quadratic, _, local) => local != CharClass::Other,
                _ => true,
            };
            if !ok {
                return bad(format!(
                    "local class {} at {} place `{}` is incompatible with a {} global character",
                    p.local_char, p.kind, p.name, self.character
                ));
            }
        }
        Ok(())
    }

    /// Places with a non-spherical choice.
    pub fn ramified(&self) -> impl Iterator<Item = &PlaceChoice> {
        self.places.iter().filter(|p| !p.choice.is_spherical())
    }
}

fn key(case: Case, w: &WeylElement, p: &PlaceChoice, s0: Q) -> LocalRuleKey {
    LocalRuleKey { case, w: w.clone(), place: p.kind, local_char: p.local_char, s0 }
}

/// Total local pole order of the contribution of `w`, with the rows used.
fn local_poles(rules: &RuleTable, case: Case, profile: &PlaceProfile, w: &WeylElement, s0: Q) -> Result<(i64, Vec<String>)> {
    let mut total = 0;
    let mut cited = Vec::new();
    for p in &profile.places {
        let r = rules.local_pole(&key(case, w, p, s0))?;
        let n = r.order_on(&p.choice);
        if n > 0 {
            total += i64::from(n);
            cited.extend(r.citations.iter().map(|c| format!("{}: {c}", p.name)));
        }
    }
    Ok((total, cited))
}

/// Laurent order at `s0` of the contribution of `w`.
pub fn term_order(rules: &RuleTable, case: Case, profile: &PlaceProfile, w: &WeylElement, s0: Q) -> Result<OrderValue> {
    profile.validate()?;
    let global = order_at(&inverse_norm_factor(&case.lambda(), w), profile.character, s0)?;
    let (poles, _) = local_poles(rules, case, profile, w, s0)?;
    Ok(global.add(&OrderValue::known(-poles)))
}

fn shortest(group: &[WeylElement]) -> &WeylElement {
    group.iter().min_by_key(|v| (v.length(), v.name())).expect("groups are nonempty")
}

/// Partition of the coset representatives by the value of `w(Λ)` at `s0`.
pub fn same_target_groups(case: Case, s0: Q, class: CharClass) -> Vec<Vec<WeylElement>> {
    let lambda = case.lambda();
    let mut groups: Vec<(TorusCharacter, Vec<WeylElement>)> = Vec::new();
    for w in case.coset_reps() {
        let target = weyl_act(&w, &lambda);
        match groups.iter_mut().find(|(t, _)| t.equal_at(&target, s0, class)) {
            Some((_, g)) => g.push(w),
            None => groups.push((target, vec![w])),
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

fn render_target(t: &TorusCharacter, s0: Q, class: CharClass) -> String {
    let parts: Vec<String> = t
        .at(s0, class)
        .iter()
        .map(|(k, x)| match *k {
            0 => format!("nu^{}", fmt_q(x)),
            k => format!("{} nu^{}", fmt_char_power(k), fmt_q(x)),
        })
        .collect();
    format!("({})", parts.join(", "))
}

/// How a contribution enters the sum.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Relation {
    /// Reference element of its same-target group.
    Reference,
    /// Equal to `sign` times the reference contribution's local part.
    Signed { sign: i64 },
    /// Unrelated to the other contributions of its group.
    Independent,
    /// The chosen vector lies in the kernel at some place.
    Dropped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermReport {
    pub w: String,
    pub expression: String,
    pub global_order: OrderValue,
    pub local_poles: i64,
    pub term_order: OrderValue,
    pub target: String,
    pub group: usize,
    pub relation: Relation,
    pub citations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChainOrder {
    Exact { order: i64 },
    /// A lower bound: the leading coefficients cancel as far as the known
    /// facts reach, or every member carries strip zeros in its numerator.
    AtLeast { order: i64 },
    /// Depends on zeros of `L`-values in the critical strip.
    Conditional { order: OrderValue },
}

impl ChainOrder {
    fn is_vanishing(&self) -> bool {
        match self {
            ChainOrder::Exact { order } | ChainOrder::AtLeast { order } => *order >= 1,
            ChainOrder::Conditional { .. } => false,
        }
    }
}

/// Contributions summed together: a same-target group minus the terms that
/// cannot be related to its reference.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub members: Vec<String>,
    pub order: ChainOrder,
}

/// Pole order of the constant term. `Conditional` means
/// `max(known, max over candidates of -order)` with strip zeros left symbolic.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PoleOrder {
    Known { order: i64 },
    Conditional { known: i64, candidates: Vec<OrderValue> },
}

impl PoleOrder {
    pub fn as_known(&self) -> Option<i64> {
        match self {
            PoleOrder::Known { order } => Some(*order),
            PoleOrder::Conditional { .. } => None,
        }
    }
}

impl std::fmt::Display for PoleOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PoleOrder::Known { order } => write!(f, "{order}"),
            PoleOrder::Conditional { known, candidates } => {
                write!(f, "max({known}")?;
                for c in candidates {
                    write!(f, ", -({c})")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageKind {
    /// The constant term vanishes identically at `s0`.
    Zero,
    /// Leading Laurent coefficient of a pole.
    Residue,
    /// Holomorphic value.
    Embedding,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlaceImage {
    pub place: String,
    pub label: SubquotientLabel,
    pub structure: Structure,
    pub citation: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImageReport {
    pub kind: ImageKind,
    pub places: Vec<PlaceImage>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantTermReport {
    pub case: Case,
    pub character: CharClass,
    pub s0: String,
    pub terms: Vec<TermReport>,
    pub chains: Vec<ChainReport>,
    pub pole_order: PoleOrder,
    pub vanishing: bool,
    pub image: ImageReport,
}

struct Term {
    w: WeylElement,
    germ_order: OrderValue,
    poles: i64,
    relation: Relation,
}

fn shifted(g: Germ, poles: i64) -> Germ {
    Germ { series: Series { val: g.series.val - poles, coeffs: g.series.coeffs }, known: g.known }
}

fn chain_order(case: Case, class: CharClass, s0: Q, members: &[(&Term, i64)]) -> Result<ChainOrder> {
    if let [(t, _)] = members {
        if !t.germ_order.is_known() {
            return Ok(ChainOrder::Conditional { order: t.germ_order.add(&OrderValue::known(-t.poles)) });
        }
    }
    let unknown: Vec<&OrderValue> = members.iter().map(|(t, _)| &t.germ_order).filter(|o| !o.is_known()).collect();
    if !unknown.is_empty() {
        // Strip zeros only in numerators: each member has order at least its base.
        let numerator_only = unknown.iter().all(|o| matches!(o, OrderValue::StripUnknown { den, .. } if den.is_empty()));
        if !numerator_only {
            let symbols: Vec<String> = unknown.iter().flat_map(|o| o.unknown_symbols()).collect();
            return Err(Error::StripUnknown { s0, symbols: symbols.join(", ") });
        }
        let low = members
            .iter()
            .map(|(t, _)| match &t.germ_order {
                OrderValue::Known { order } => order - t.poles,
                OrderValue::StripUnknown { base, .. } => base - t.poles,
            })
            .min()
            .expect("chains are nonempty");
        return Ok(ChainOrder::AtLeast { order: low });
    }
    let mut weighted = Vec::new();
    for (t, sign) in members {
        let g = germ_at(&inverse_norm_factor(&case.lambda(), &t.w), class, s0)?;
        weighted.push((shifted(g, t.poles), Q::from_integer(*sign)));
    }
    match sum_germs(&weighted) {
        Ok(g) => Ok(ChainOrder::Exact { order: g.order() }),
        Err(Error::Indeterminate { at_least }) => Ok(ChainOrder::AtLeast { order: at_least }),
        Err(e) => Err(e),
    }
}

/// Relation of `w` to the reference `r` of its group, from the local actions.
fn relate(
    rules: &RuleTable,
    case: Case,
    profile: &PlaceProfile,
    w: &WeylElement,
    r: &WeylElement,
    s0: Q,
    cited: &mut Vec<String>,
) -> Result<Relation> {
    let mut sign = 1;
    let mut independent = false;
    for p in &profile.places {
        let (action, citation) = rules.effective_action(&key(case, w, p, s0), &p.choice)?;
        if let Some(c) = citation {
            cited.push(format!("{}: {c}", p.name));
        }
        match action {
            Action::Kernel => return Ok(Relation::Dropped),
            Action::Minus => sign = -sign,
            Action::Plus => {}
            Action::Iso => independent = true,
        }
    }
    Ok(if w == r {
        Relation::Reference
    } else if independent {
        Relation::Independent
    } else {
        Relation::Signed { sign }
    })
}

/// Pole order, vanishing and image of the constant term at `s0`.
pub fn eisenstein_order(rules: &RuleTable, case: Case, profile: &PlaceProfile, s0: Q) -> Result<ConstantTermReport> {
    profile.validate()?;
    let class = profile.character;
    let lambda = case.lambda();
    let groups = same_target_groups(case, s0, class);

    let mut reports = Vec::new();
    let mut chains = Vec::new();
    for (gi, group) in groups.iter().enumerate() {
        let reference = shortest(group);
        let mut terms = Vec::new();
        for w in group {
            let e = inverse_norm_factor(&lambda, w);
            let global = order_at(&e, class, s0)?;
            let (poles, mut cited) = local_poles(rules, case, profile, w, s0)?;
            let relation = relate(rules, case, profile, w, reference, s0, &mut cited)?;
            reports.push(TermReport {
                w: w.name(),
                expression: e.render(),
                global_order: global.clone(),
                local_poles: poles,
                term_order: global.add(&OrderValue::known(-poles)),
                target: render_target(&weyl_act(w, &lambda), s0, class),
                group: gi,
                relation: relation.clone(),
                citations: cited,
            });
            terms.push(Term { w: w.clone(), germ_order: global, poles, relation });
        }

        // Terms with a local pole have leading vectors unrelated to the others.
        let joins = |t: &Term| t.poles == 0 && matches!(t.relation, Relation::Reference | Relation::Signed { .. });
        let anchor_ok = terms.iter().any(|t| t.relation == Relation::Reference && joins(t));
        let mut main: Vec<(&Term, i64)> = Vec::new();
        let mut alone: Vec<&Term> = Vec::new();
        for t in &terms {
            match t.relation {
                Relation::Dropped => {}
                Relation::Reference if anchor_ok => main.push((t, 1)),
                Relation::Signed { sign } if anchor_ok && joins(t) => main.push((t, sign)),
                _ => alone.push(t),
            }
        }
        if !main.is_empty() {
            chains.push(ChainReport {
                members: main.iter().map(|(t, _)| t.w.name()).collect(),
                order: chain_order(case, class, s0, &main)?,
            });
        }
        for t in alone {
            chains.push(ChainReport { members: vec![t.w.name()], order: chain_order(case, class, s0, &[(t, 1)])? });
        }
    }

    let mut low: Option<i64> = None;
    let mut candidates = Vec::new();
    for c in &chains {
        match &c.order {
            ChainOrder::Exact { order } => low = Some(low.map_or(*order, |l| l.min(*order))),
            ChainOrder::AtLeast { order } if *order < 0 => return Err(Error::Indeterminate { at_least: *order }),
            ChainOrder::AtLeast { .. } => {}
            ChainOrder::Conditional { order } => match order {
                OrderValue::StripUnknown { base, den, .. } if den.is_empty() && *base >= 0 => {}
                other => candidates.push(other.clone()),
            },
        }
    }
    let known = (-low.unwrap_or(0)).max(0);
    let pole_order = if candidates.is_empty() {
        PoleOrder::Known { order: known }
    } else {
        PoleOrder::Conditional { known, candidates }
    };
    let vanishing = chains.iter().all(|c| c.order.is_vanishing());
    let identity_only = !vanishing
        && chains.iter().all(|c| c.order.is_vanishing() || c.members.iter().all(|m| m == "id"));
    let has_pole = known > 0;
    let kind = if vanishing {
        ImageKind::Zero
    } else if has_pole {
        ImageKind::Residue
    } else {
        ImageKind::Embedding
    };
    let places = profile
        .places
        .iter()
        .map(|p| place_image(rules, case, p, s0, has_pole, identity_only, vanishing))
        .collect();

    Ok(ConstantTermReport {
        case,
        character: class,
        s0: fmt_q(&s0),
        terms: reports,
        chains,
        pole_order,
        vanishing,
        image: ImageReport { kind, places },
    })
}

fn place_image(
    rules: &RuleTable,
    case: Case,
    p: &PlaceChoice,
    s0: Q,
    has_pole: bool,
    identity_only: bool,
    vanishing: bool,
) -> PlaceImage {
    let place = p.name.clone();
    if vanishing {
        return PlaceImage { place, label: SubquotientLabel::new("Zero", &[]), structure: Structure::Irreducible, citation: None };
    }
    if let Some(r) = rules.image_for(case, p.kind, p.local_char, s0, has_pole, identity_only, &p.choice) {
        return PlaceImage { place, label: r.label.clone(), structure: r.structure, citation: Some(r.scope.citation.clone()) };
    }
    if p.choice.is_spherical() {
        PlaceImage { place, label: SubquotientLabel::new("Induced", &[]), structure: Structure::FullInduced, citation: None }
    } else {
        PlaceImage { place, label: p.choice.clone(), structure: Structure::Subquotient, citation: None }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    fn label(t: &str) -> SubquotientLabel {
        t.parse().unwrap()
    }

    fn has_group(groups: &[Vec<WeylElement>], want: &[&str]) -> bool {
        let mut want: Vec<WeylElement> = want.iter().map(|n| WeylElement::parse(2, n).unwrap()).collect();
        want.sort();
        groups.iter().any(|g| {
            let mut g = g.clone();
            g.sort();
            g == want
        })
    }

    #[test]
    fn same_target_examples() {
        let g = same_target_groups(Case::Heisenberg, q(0), CharClass::Trivial);
        assert!(has_group(&g, &["s", "c2s"]));
        assert!(has_group(&g, &["id", "c1"]));
        let g = same_target_groups(Case::Heisenberg, q(1), CharClass::Trivial);
        assert!(has_group(&g, &["c2s", "c1"]));
        let g = same_target_groups(Case::Heisenberg, frac(7, 3), CharClass::Trivial);
        assert!(g.iter().all(|g| g.len() == 1));
    }

    #[test]
    fn term_orders() {
        let rules = RuleTable::standard();
        let sph = PlaceProfile::new(CharClass::Trivial, CharClass::Trivial);
        let c1 = WeylElement::parse(2, "c1").unwrap();
        let id = WeylElement::parse(2, "id").unwrap();
        assert_eq!(term_order(&rules, Case::Heisenberg, &sph, &c1, q(2)).unwrap(), OrderValue::known(-1));
        for s0 in [q(-3), q(0), frac(1, 2), q(2)] {
            assert_eq!(term_order(&rules, Case::Heisenberg, &sph, &id, s0).unwrap(), OrderValue::known(0));
        }
        // The global factor vanishes to first order, each Steinberg choice adds a pole.
        let mut p = sph.clone();
        for n in 1..=3 {
            p = p.finite(&format!("p{n}"), CharClass::Trivial, label("SteinbergTwist(3/2)"));
            assert_eq!(term_order(&rules, Case::Heisenberg, &p, &c1, q(-2)).unwrap(), OrderValue::known(1 - n));
        }
    }

    #[test]
    fn heisenberg_examples() {
        let rules = RuleTable::standard();
        let sph = PlaceProfile::new(CharClass::Trivial, CharClass::Trivial);
        let r = eisenstein_order(&rules, Case::Heisenberg, &sph, q(2)).unwrap();
        assert_eq!(r.pole_order, PoleOrder::Known { order: 1 });
        assert_eq!(r.image.places[0].label, label("LanglandsQuotient(nu^2,nu^1;1)"));
        let r = eisenstein_order(&rules, Case::Heisenberg, &sph, q(-1)).unwrap();
        assert!(r.vanishing);
        let r = eisenstein_order(&rules, Case::Heisenberg, &sph, q(1)).unwrap();
        assert_eq!(r.pole_order, PoleOrder::Known { order: 0 });
        assert!(!r.vanishing);
    }

    #[test]
    fn siegel_examples() {
        let rules = RuleTable::standard();
        let sph = PlaceProfile::new(CharClass::Trivial, CharClass::Trivial);
        let r = eisenstein_order(&rules, Case::Siegel, &sph, frac(1, 2)).unwrap();
        assert_eq!(r.pole_order, PoleOrder::Known { order: 1 });
        let mut p = PlaceProfile::new(CharClass::Quadratic, CharClass::Trivial);
        p = p.finite("p3", CharClass::Quadratic, label("Tempered(T2)"));
        let r = eisenstein_order(&rules, Case::Siegel, &p, frac(1, 2)).unwrap();
        assert_eq!(r.pole_order, PoleOrder::Known { order: 0 });
        assert_eq!(r.image.kind, ImageKind::Embedding);
        let p = p.finite("p5", CharClass::Quadratic, label("Tempered(T2)"));
        let r = eisenstein_order(&rules, Case::Siegel, &p, frac(1, 2)).unwrap();
        assert_eq!(r.pole_order, PoleOrder::Known { order: 1 });
    }

    #[test]
    fn theorem_grids_pass() {
        let rules = RuleTable::standard();
        for id in TheoremId::ALL {
            let rows = verify_theorem(&rules, id);
            assert!(rows.len() > 50);
            for r in rows {
                assert!(r.pass, "{} ({}) s0={} {}: expected {}, computed {}", r.theorem, r.clause, r.s0, r.profile, r.expected, r.computed);
            }
        }
    }

    #[test]
    fn siegel_three_halves_trivial_character_has_a_pole() {
        // Excluded from the holomorphy grid: the normalizing factor of c2sc2
        // has a residue there even though every local operator is holomorphic.
        let rules = RuleTable::standard();
        let sph = PlaceProfile::new(CharClass::Trivial, CharClass::Trivial);
        let r = eisenstein_order(&rules, Case::Siegel, &sph, frac(3, 2)).unwrap();
        assert_eq!(r.pole_order, PoleOrder::Known { order: 1 });
        let c2sc2 = r.terms.iter().find(|t| t.w == "c2sc2").unwrap();
        assert_eq!(c2sc2.global_order, OrderValue::known(-1));
        assert_eq!(c2sc2.local_poles, 0);
    }

    #[test]
    fn invalid_profiles() {
        let p = PlaceProfile::new(CharClass::Trivial, CharClass::Sgn);
        assert!(matches!(p.validate(), Err(Error::InvalidProfile(_))));
        let mut p = PlaceProfile::new(CharClass::Quadratic, CharClass::Trivial);
        p.places.clear();
        assert!(p.validate().is_err());
    }
}
