//! Command-line front end. Every subcommand produces a text rendering, a JSON
//! document and a pass flag; the binary maps the flag to its exit code.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::characters::{Case, CharClass};
use crate::constant_term::{eisenstein_order, verify_theorem, ConstantTermReport, PlaceChoice, PlaceProfile, PoleOrder, TheoremId};
use crate::lgerms::{germ_at, order_at, sum_germs};
use crate::local_ops::{Place, RuleTable};
use crate::normfactor::{inverse_norm_factor, LSymbol};
use crate::numerics::{self, DirichletTable, ORDER_TOLERANCE};
use crate::rational::{fmt_q, parse_q};
use crate::root_system::{enumerate_group, negative_set, WeylElement};
use crate::{Error, Result, Q};

/// Version of the JSON documents written by every subcommand.
pub const SCHEMA_VERSION: u32 = 1;
/// Tolerance for `|ε(s)ε(s+1) - 1|`.
pub const EPSILON_IDENTITY_TOL: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(name = "eisen-sp4", version, about = "Poles and images of degenerate Eisenstein series on Sp(4)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Rule table replacing the bundled one.
    #[arg(long, global = true)]
    pub rules: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WeylScope {
    Heisenberg,
    Siegel,
    Full,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Coset representatives with lengths and negative sets.
    Weyl {
        #[arg(long, value_enum, default_value_t = WeylScope::Full)]
        case: WeylScope,
    },
    /// Inverse normalizing factor r(Λ_s, w)^{-1}.
    Normfactor {
        #[arg(long)]
        case: Case,
        #[arg(long)]
        w: String,
    },
    /// Constant-term report for a scenario file or for spherical data.
    Poles {
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long)]
        case: Option<Case>,
        #[arg(long)]
        chi: Option<CharClass>,
        #[arg(long, allow_hyphen_values = true)]
        s0: Vec<String>,
    },
    /// Clause grids for H+, H-, S+, S- or all.
    Verify {
        #[arg(long, default_value = "all")]
        theorem: String,
    },
    /// Numeric cross-check of symbolic orders, the ε-identity and a cancellation limit.
    Numcheck {
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long)]
        chi: Option<CharClass>,
        /// Largest accepted distance of a fitted slope from an integer.
        #[arg(long, env = "SP4_NUMCHECK_TOL")]
        tol: Option<f64>,
    },
}

/// Result of one invocation.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub text: String,
    pub json: Value,
    pub pass: bool,
}

impl Outcome {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => serde_json::to_string_pretty(&self.json).expect("reports serialize") + "\n",
        }
    }
}

/// Expected outcome at one point of a scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioExpect {
    pub s0: String,
    #[serde(default)]
    pub pole_order: Option<i64>,
    #[serde(default)]
    pub vanishing: Option<bool>,
    /// The pole order depends on zeros of strip `L`-values.
    #[serde(default)]
    pub conditional: Option<bool>,
}

/// A scenario file (TOML).
///
/// ```toml
/// case = "heisenberg"
/// character = "trivial"
/// s0 = ["2"]
/// clause = "s = 2, chi = 1: first-order pole"
///
/// [[places]]
/// name = "p3"
/// kind = "nonarch"
/// local_char = "trivial"
/// choice = "Spherical"
///
/// [[expect]]
/// s0 = "2"
/// pole_order = 1
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub case: Case,
    pub character: CharClass,
    /// Class of the archimedean component when no archimedean place is listed.
    #[serde(default)]
    pub arch_char: Option<CharClass>,
    pub s0: Vec<String>,
    #[serde(default)]
    pub places: Vec<PlaceChoice>,
    /// Numeric stand-in for the character: `principal`, `kronecker:<d>` or `mod5-quartic`.
    #[serde(default)]
    pub table: Option<String>,
    #[serde(default)]
    pub clause: Option<String>,
    #[serde(default)]
    pub expect: Vec<ScenarioExpect>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    pub fn profile(&self) -> Result<PlaceProfile> {
        let arch = self.arch_char.unwrap_or(CharClass::Trivial);
        let mut p = PlaceProfile { character: self.character, places: self.places.clone() };
        if !p.places.iter().any(|c| c.kind == Place::Arch) {
            let mut base = PlaceProfile::new(self.character, arch);
            base.places.extend(p.places);
            p = base;
        }
        p.validate()?;
        Ok(p)
    }

    pub fn points(&self) -> Result<Vec<Q>> {
        self.s0.iter().map(|s| parse_q(s)).collect()
    }

    pub fn table(&self) -> Result<DirichletTable> {
        match self.table.as_deref() {
            None => Ok(default_table(self.character)),
            Some(t) => parse_table(t),
        }
    }
}

pub fn default_table(class: CharClass) -> DirichletTable {
    match class {
        CharClass::Trivial | CharClass::Sgn => DirichletTable::principal(),
        CharClass::Quadratic => DirichletTable::mod4(),
        CharClass::Other => DirichletTable::mod5_quartic(),
    }
}

fn parse_table(t: &str) -> Result<DirichletTable> {
    match t.trim() {
        "principal" => Ok(DirichletTable::principal()),
        "mod5-quartic" => Ok(DirichletTable::mod5_quartic()),
        other => match other.strip_prefix("kronecker:") {
            Some(d) => DirichletTable::kronecker(d.trim().parse().map_err(|_| Error::Parse(format!("bad discriminant `{d}`")))?),
            None => Err(Error::Parse(format!("unknown character table `{other}`"))),
        },
    }
}

fn load_rules(path: Option<&Path>) -> Result<RuleTable> {
    match path {
        Some(p) => RuleTable::load(p),
        None => Ok(RuleTable::standard()),
    }
}

/// Conventional short name of a coset representative (c1, sc1 for the Heisenberg case).
pub fn display_name(case: Option<Case>, w: &WeylElement) -> String {
    let n = w.name();
    match (case, n.as_str()) {
        (Some(Case::Heisenberg), "sc2s") => "c1".to_string(),
        (Some(Case::Heisenberg), "c2s") => "sc1".to_string(),
        _ => n,
    }
}

fn cmd_weyl(scope: WeylScope) -> Outcome {
    let (case, elements) = match scope {
        WeylScope::Heisenberg => (Some(Case::Heisenberg), Case::Heisenberg.coset_reps()),
        WeylScope::Siegel => (Some(Case::Siegel), Case::Siegel.coset_reps()),
        WeylScope::Full => (None, enumerate_group(2)),
    };
    let mut text = String::new();
    let mut rows = Vec::new();
    for w in &elements {
        let neg: Vec<String> = negative_set(w).iter().map(|r| r.to_string()).collect();
        let name = display_name(case, w);
        writeln!(text, "{:<6} word={:<8} length={} negative=[{}]", name, w.name(), w.length(), neg.join(", ")).unwrap();
        rows.push(json!({ "name": name, "word": w.name(), "length": w.length(), "negative_set": neg }));
    }
    let scope_name = format!("{scope:?}").to_lowercase();
    Outcome { text, json: json!({ "schema_version": SCHEMA_VERSION, "command": "weyl", "scope": scope_name, "elements": rows }), pass: true }
}

fn cmd_normfactor(case: Case, w: &str) -> Result<Outcome> {
    let w = WeylElement::parse(2, w)?;
    if !case.coset_reps().contains(&w) {
        return Err(Error::UncoveredKey(format!("{} is not a coset representative for the {case} parabolic", w.name())));
    }
    let e = inverse_norm_factor(&case.lambda(), &w);
    let rendered = e.render();
    Ok(Outcome {
        text: format!("r(Lambda_s, {})^-1 = {rendered}\n", display_name(Some(case), &w)),
        json: json!({ "schema_version": SCHEMA_VERSION, "command": "normfactor", "case": case, "w": display_name(Some(case), &w), "expression": rendered, "numerator": factor_list(&e.numerator()), "denominator": factor_list(&e.denominator()) }),
        pass: true,
    })
}

fn factor_list(f: &[(LSymbol, i64)]) -> Vec<Value> {
    f.iter().map(|(sym, exp)| json!({ "symbol": sym.to_string(), "exponent": exp })).collect()
}

fn render_report(r: &ConstantTermReport) -> String {
    let mut t = String::new();
    writeln!(t, "{} chi={} s0={}: pole order {}, vanishing {}, image {:?}", r.case, r.character, r.s0, r.pole_order, r.vanishing, r.image.kind).unwrap();
    for term in &r.terms {
        writeln!(
            t,
            "  w={:<6} order {} (global {}, local poles {}) target {} {:?}",
            term.w, term.term_order, term.global_order, term.local_poles, term.target, term.relation
        )
        .unwrap();
    }
    for p in &r.image.places {
        writeln!(t, "  image at {}: {} ({:?})", p.place, p.label, p.structure).unwrap();
    }
    t
}

fn expectation_met(e: &ScenarioExpect, r: &ConstantTermReport) -> bool {
    let pole_ok = e.pole_order.is_none_or(|n| r.pole_order == PoleOrder::Known { order: n });
    let vanish_ok = e.vanishing.is_none_or(|v| v == r.vanishing);
    let cond_ok = e.conditional.is_none_or(|c| c == matches!(r.pole_order, PoleOrder::Conditional { .. }));
    pole_ok && vanish_ok && cond_ok
}

/// Runs a scenario's constant-term computations and checks its expectations.
pub fn run_poles(rules: &RuleTable, sc: &Scenario) -> Result<Outcome> {
    let profile = sc.profile()?;
    let mut text = String::new();
    if let Some(c) = &sc.clause {
        writeln!(text, "# {c}").unwrap();
    }
    let mut reports = Vec::new();
    let mut pass = true;
    for (s0_text, s0) in sc.s0.iter().zip(sc.points()?) {
        let r = eisenstein_order(rules, sc.case, &profile, s0)?;
        text.push_str(&render_report(&r));
        for e in sc.expect.iter().filter(|e| parse_q(&e.s0).ok() == Some(s0)) {
            let ok = expectation_met(e, &r);
            pass &= ok;
            writeln!(text, "  {} expectation at s0={}", if ok { "PASS" } else { "FAIL" }, s0_text).unwrap();
        }
        reports.push(r);
    }
    for e in &sc.expect {
        let s = parse_q(&e.s0)?;
        if !sc.points()?.contains(&s) {
            return Err(Error::InvalidProfile(format!("expectation at s0={} has no matching point", e.s0)));
        }
    }
    Ok(Outcome {
        text,
        json: json!({ "schema_version": SCHEMA_VERSION, "command": "poles", "clause": sc.clause, "reports": reports, "pass": pass }),
        pass,
    })
}

fn cmd_verify(rules: &RuleTable, which: &str) -> Result<Outcome> {
    let ids: Vec<TheoremId> = if which.trim() == "all" { TheoremId::ALL.to_vec() } else { vec![which.parse()?] };
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut pass = true;
    for id in ids {
        let r = verify_theorem(rules, id);
        let failed = r.iter().filter(|x| !x.pass).count();
        pass &= failed == 0;
        writeln!(text, "{id}: {} rows, {failed} failed", r.len()).unwrap();
        for row in r.iter().filter(|x| !x.pass) {
            writeln!(text, "  FAIL ({}) chi={} s0={} {}: expected {}; computed {}", row.clause, row.character, row.s0, row.profile, row.expected, row.computed).unwrap();
        }
        rows.extend(r);
    }
    Ok(Outcome { text, json: json!({ "schema_version": SCHEMA_VERSION, "command": "verify", "rows": rows, "pass": pass }), pass })
}

#[derive(Clone, Debug, Serialize)]
pub struct NumRow {
    pub check: String,
    pub detail: String,
    pub symbolic: String,
    pub numeric: String,
    pub pass: bool,
}

/// Symbolic versus numeric order for every representative at the given points.
pub fn order_rows(case: Case, class: CharClass, tbl: &DirichletTable, points: &[Q], tol: f64) -> Vec<NumRow> {
    let mut rows = Vec::new();
    for w in case.coset_reps() {
        let e = inverse_norm_factor(&case.lambda(), &w);
        for s0 in points {
            let Ok(sym) = order_at(&e, class, *s0) else { continue };
            let Some(sym) = sym.as_known() else { continue };
            let detail = format!("{case} {} chi={class} s0={}", display_name(Some(case), &w), fmt_q(s0));
            let (numeric, pass) = match numerics::estimate_order(&e, tbl, *s0) {
                Ok(est) => (
                    format!("slope {:.4} fitted {} residual {:.4}", est.slope, est.fitted, est.residual),
                    est.fitted == sym && est.residual < tol,
                ),
                Err(err) => (format!("error: {err}"), false),
            };
            rows.push(NumRow { check: "order".into(), detail, symbolic: sym.to_string(), numeric, pass });
        }
    }
    rows
}

/// `ε(s,χ)ε(s+1,χ) = 1` for a quadratic table at a few points including `s = 0`.
pub fn epsilon_rows(tbl: &DirichletTable) -> Vec<NumRow> {
    [C::new(0.0, 0.0), C::new(0.25, 0.0), C::new(0.4, 0.3)]
        .iter()
        .map(|s| {
            let v = numerics::epsilon_ratio(tbl, 1, *s).and_then(|a| Ok(a * numerics::epsilon_ratio(tbl, 1, s + 1.0)?));
            let (numeric, pass) = match v {
                Ok(v) => (format!("{:.3e}", (v - 1.0).norm()), (v - 1.0).norm() < EPSILON_IDENTITY_TOL),
                Err(e) => (format!("error: {e}"), false),
            };
            NumRow {
                check: "epsilon".into(),
                detail: format!("mod {} at s={s}", tbl.modulus),
                symbolic: "eps(s,chi)*eps(s+1,chi) = 1".into(),
                numeric,
                pass,
            }
        })
        .collect()
}

/// Limit at `s0 = 0` of the summed `s` and `c2s` contributions (Heisenberg,
/// trivial character) against the symbolic leading coefficient.
pub fn cancellation_row() -> NumRow {
    let lambda = Case::Heisenberg.lambda();
    let exprs: Vec<_> = ["s", "c2s"].iter().map(|w| inverse_norm_factor(&lambda, &WeylElement::parse(2, w).unwrap())).collect();
    let tbl = DirichletTable::principal();
    let f = |s: C| -> Result<C> { Ok(numerics::evaluate(&exprs[0], &tbl, s)? + numerics::evaluate(&exprs[1], &tbl, s)?) };
    let symbolic = exprs
        .iter()
        .map(|e| germ_at(e, CharClass::Trivial, Q::from_integer(0)).map(|g| (g, Q::from_integer(1))))
        .collect::<Result<Vec<_>>>()
        .and_then(|t| sum_germs(&t));
    let detail = "heisenberg {s, sc1} chi=trivial s0=0".to_string();
    match (symbolic, numerics::numeric_limit(f, 0.0), numerics::estimate_order_with(f, 0.0)) {
        (Ok(g), Ok(lim), Ok(est)) => {
            let lead = numerics::poly_value(g.leading(), &tbl);
            let (lead_text, agree) = match lead {
                Ok(v) => (format!("{v:.8}"), (v - lim.value()).norm() < 1e-5),
                Err(e) => (format!("error: {e}"), false),
            };
            let pass = g.order() == 0 && est.fitted == 0 && lim.value().norm() > 1e-3 && lim.spread < 1e-5 && agree;
            NumRow {
                check: "cancellation".into(),
                detail,
                symbolic: format!("order {} leading {} = {lead_text}", g.order(), g.leading()),
                numeric: format!("limit {:.8} (spread {:.1e}), fitted order {}", lim.value(), lim.spread, est.fitted),
                pass,
            }
        }
        (s, l, e) => NumRow {
            check: "cancellation".into(),
            detail,
            symbolic: format!("{:?}", s.map(|g| g.order())),
            numeric: format!("{:?} {:?}", l.map(|l| l.value_re), e.map(|e| e.fitted)),
            pass: false,
        },
    }
}

fn default_points() -> Vec<Q> {
    (-12..=12).map(|k| Q::new(k, 4)).collect()
}

fn cmd_numcheck(profile: Option<&Path>, chi: Option<CharClass>, tol: Option<f64>) -> Result<Outcome> {
    let tol = tol.unwrap_or(ORDER_TOLERANCE);
    let mut rows = Vec::new();
    match profile {
        Some(path) => {
            let sc = Scenario::load(path)?;
            rows.extend(order_rows(sc.case, sc.character, &sc.table()?, &sc.points()?, tol));
        }
        None => {
            let classes: Vec<CharClass> = match chi {
                Some(c) => vec![c],
                None => vec![CharClass::Trivial, CharClass::Quadratic, CharClass::Other],
            };
            for case in Case::ALL {
                for class in &classes {
                    rows.extend(order_rows(case, *class, &default_table(*class), &default_points(), tol));
                }
            }
            rows.extend(epsilon_rows(&DirichletTable::mod4()));
            rows.push(cancellation_row());
        }
    }
    let pass = !rows.is_empty() && rows.iter().all(|r| r.pass);
    let mut text = String::new();
    for r in &rows {
        writeln!(text, "{} {:<12} {}: symbolic {}; numeric {}", if r.pass { "PASS" } else { "FAIL" }, r.check, r.detail, r.symbolic, r.numeric).unwrap();
    }
    writeln!(text, "{} of {} checks passed (slope tolerance {tol})", rows.iter().filter(|r| r.pass).count(), rows.len()).unwrap();
    Ok(Outcome { text, json: json!({ "schema_version": SCHEMA_VERSION, "command": "numcheck", "tolerance": tol, "rows": rows, "pass": pass }), pass })
}

fn spherical_scenario(case: Case, chi: CharClass, s0: Vec<String>) -> Scenario {
    Scenario { case, character: chi, arch_char: None, s0, places: vec![], table: None, clause: None, expect: vec![] }
}

/// Executes a parsed command line.
pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Weyl { case } => Ok(cmd_weyl(*case)),
        Command::Normfactor { case, w } => cmd_normfactor(*case, w),
        Command::Poles { profile, case, chi, s0 } => {
            let rules = load_rules(cli.rules.as_deref())?;
            let mut sc = match profile {
                Some(p) => Scenario::load(p)?,
                None => {
                    let case = case.ok_or_else(|| Error::InvalidProfile("--case or --profile is required".into()))?;
                    spherical_scenario(case, chi.unwrap_or(CharClass::Trivial), vec![])
                }
            };
            if !s0.is_empty() {
                sc.s0 = s0.clone();
                sc.expect.retain(|e| s0.contains(&e.s0));
            }
            if sc.s0.is_empty() {
                return Err(Error::InvalidProfile("no s0 given".into()));
            }
            run_poles(&rules, &sc)
        }
        Command::Verify { theorem } => cmd_verify(&load_rules(cli.rules.as_deref())?, theorem),
        Command::Numcheck { profile, chi, tol } => cmd_numcheck(profile.as_deref(), *chi, *tol),
    }
}
