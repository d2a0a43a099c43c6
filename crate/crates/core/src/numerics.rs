//! Double-precision evaluation of completed `ζ` and completed Dirichlet
//! `L`-functions, used as an independent oracle for the symbolic orders.
//!
//! `ε`-factors are never evaluated on their own: an `ε` symbol is replaced by
//! its defining ratio `L(s,χ^k) / L(1-s,χ^{-k})` before evaluation.

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use num_integer::Integer;
use serde::Serialize;

use crate::lgerms::{Atom, Poly};
use crate::normfactor::{LExpression, SymbolKind};
use crate::rational::to_f64;
use crate::{Error, Result, Q};

/// Largest `|Im s|` accepted by the evaluators.
pub const IM_LIMIT: f64 = 50.0;
/// Distance to a pole below which evaluation is refused.
pub const POLE_GUARD: f64 = 1e-8;
/// Offsets `δ` at which `f(s0 + δ)` is sampled when estimating orders.
pub const DELTA_LADDER: [f64; 7] = [1e-2, 3.16227766e-3, 1e-3, 3.16227766e-4, 1e-4, 3.16227766e-5, 1e-5];
/// Maximal distance of the fitted slope from an integer.
pub const ORDER_TOLERANCE: f64 = 0.05;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `B_2, B_4, ..., B_28`.
const BERNOULLI: [f64; 14] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
];

/// Terms summed directly before the Euler–Maclaurin tail.
const EM_TERMS: usize = 32;

fn check_domain(s: C) -> Result<()> {
    if !s.re.is_finite() || !s.im.is_finite() || s.im.abs() > IM_LIMIT {
        return Err(Error::Numeric(format!("argument {s} outside |Im s| <= {IM_LIMIT}")));
    }
    Ok(())
}

/// `Γ(z)` by the Lanczos approximation and reflection.
pub fn gamma(z: C) -> C {
    if z.re < 0.5 {
        return C::new(PI, 0.0) / ((C::new(PI, 0.0) * z).sin() * gamma(C::new(1.0, 0.0) - z));
    }
    let z = z - 1.0;
    let mut x = C::new(LANCZOS[0], 0.0);
    for (i, p) in LANCZOS.iter().enumerate().skip(1) {
        x += *p / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    ((z + 0.5) * t.ln() - t).exp() * (2.0 * PI).sqrt() * x
}

/// Euler–Maclaurin tail of `Σ_{k≥N} (k+a)^{-s}` without the `(N+a)^{1-s}/(s-1)` term.
fn em_tail(s: C, x: f64) -> C {
    let lx = x.ln();
    let pow = |e: C| (-e * lx).exp();
    let mut total = pow(s) * 0.5;
    let mut rising = s;
    let mut fact = 2.0;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let m = 2 * j as i32 + 1;
        total += rising * (*b / fact) * pow(s + f64::from(m));
        rising = rising * (s + f64::from(m)) * (s + f64::from(m + 1));
        fact *= f64::from((m + 2) * (m + 3));
    }
    total
}

fn partial_sum(s: C, a: f64) -> C {
    (0..EM_TERMS).map(|k| (-s * (k as f64 + a).ln()).exp()).sum()
}

/// Hurwitz `ζ(s, a)` for `0 < a ≤ 1`, `s ≠ 1`.
pub fn hurwitz_zeta(s: C, a: f64) -> Result<C> {
    check_domain(s)?;
    if (s - 1.0).norm() < POLE_GUARD {
        return Err(Error::Numeric(format!("Hurwitz zeta pole at s = {s}")));
    }
    let x = EM_TERMS as f64 + a;
    Ok(partial_sum(s, a) + (-(s - 1.0) * x.ln()).exp() / (s - 1.0) + em_tail(s, x))
}

/// Riemann `ζ(s)` by Euler–Maclaurin, any `s ≠ 1` of moderate size.
pub fn zeta(s: C) -> Result<C> {
    hurwitz_zeta(s, 1.0)
}

/// `Σ_{n≥1} n^{-s}` summed directly; only for `Re s > 2`.
pub fn zeta_direct(s: C, terms: usize) -> C {
    (1..=terms).map(|n| (-s * (n as f64).ln()).exp()).sum()
}

fn near_pole(s: C) -> bool {
    s.norm() < POLE_GUARD || (s - 1.0).norm() < POLE_GUARD
}

/// `π^{-s/2} Γ(s/2) ζ(s)`, reflected to `Re s > 0` when needed.
pub fn completed_zeta(s: C) -> Result<C> {
    check_domain(s)?;
    if near_pole(s) {
        return Err(Error::Numeric(format!("completed zeta pole at s = {s}")));
    }
    if s.re <= 0.0 {
        return completed_zeta(C::new(1.0, 0.0) - s);
    }
    Ok((-(s / 2.0) * PI.ln()).exp() * gamma(s / 2.0) * zeta(s)?)
}

/// Values of a Dirichlet character on `ℤ/q`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletTable {
    pub modulus: u64,
    pub values: Vec<C>,
    /// `0` for even, `1` for odd characters.
    pub parity: u8,
}

fn close(a: C, b: C) -> bool {
    (a - b).norm() < 1e-12
}

/// Kronecker symbol `(d/n)` for `n > 0`.
fn kronecker(d: i64, mut n: u64) -> i64 {
    let mut result = 1;
    while n.is_multiple_of(2) {
        n /= 2;
        result *= match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    // Jacobi symbol (d mod n / n) for odd n.
    let mut a = d.rem_euclid(n as i64) as u64;
    let mut m = n;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if m % 8 == 3 || m % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            result = -result;
        }
        a %= m;
    }
    if m == 1 {
        result
    } else {
        0
    }
}

impl DirichletTable {
    /// The trivial character, modulus one.
    pub fn principal() -> Self {
        DirichletTable { modulus: 1, values: vec![C::new(1.0, 0.0)], parity: 0 }
    }

    /// Validates complete multiplicativity, support on units and `χ(1) = 1`.
    pub fn from_values(modulus: u64, values: Vec<C>) -> Result<Self> {
        let q = modulus as usize;
        if q == 0 || values.len() != q {
            return Err(Error::Numeric(format!("expected {q} values for modulus {modulus}")));
        }
        let bad = |m: String| Err(Error::Numeric(format!("not a Dirichlet character mod {modulus}: {m}")));
        for a in 0..q {
            let unit = (a as u64).gcd(&modulus) == 1;
            if unit && (values[a].norm() - 1.0).abs() > 1e-12 {
                return bad(format!("|chi({a})| != 1"));
            }
            if !unit && values[a].norm() > 1e-12 {
                return bad(format!("chi({a}) != 0"));
            }
            for b in 0..q {
                if !close(values[a] * values[b], values[(a * b) % q]) {
                    return bad(format!("chi({a})chi({b}) != chi({})", (a * b) % q));
                }
            }
        }
        if !close(values[1 % q], C::new(1.0, 0.0)) {
            return bad("chi(1) != 1".into());
        }
        let minus_one = values[(q - 1) % q];
        let parity = if close(minus_one, C::new(1.0, 0.0)) { 0 } else { 1 };
        Ok(DirichletTable { modulus, values, parity })
    }

    /// `a ↦ (d/a)` for a fundamental discriminant `d`, modulus `|d|`.
    pub fn kronecker(d: i64) -> Result<Self> {
        let q = d.unsigned_abs();
        let values = (0..q).map(|a| C::new(kronecker(d, a.max(1)) as f64 * f64::from(u8::from(a.gcd(&q) == 1 || q == 1)), 0.0));
        let t = DirichletTable::from_values(q, values.collect())?;
        if !t.is_primitive() {
            return Err(Error::Numeric(format!("{d} is not a fundamental discriminant")));
        }
        Ok(t)
    }

    /// The odd quadratic character mod 4.
    pub fn mod4() -> Self {
        DirichletTable::kronecker(-4).expect("-4 is a fundamental discriminant")
    }

    /// A character of order four mod 5 (`χ(2) = i`).
    pub fn mod5_quartic() -> Self {
        let i = C::new(0.0, 1.0);
        let values = vec![C::new(0.0, 0.0), C::new(1.0, 0.0), i, -i, C::new(-1.0, 0.0)];
        DirichletTable::from_values(5, values).expect("valid character")
    }

    pub fn at(&self, n: u64) -> C {
        self.values[(n % self.modulus) as usize]
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im.abs() < 1e-12)
    }

    pub fn conj(&self) -> Self {
        DirichletTable { values: self.values.iter().map(|v| v.conj()).collect(), ..self.clone() }
    }

    /// Trivial on every unit.
    pub fn is_principal(&self) -> bool {
        (0..self.modulus).filter(|a| a.gcd(&self.modulus) == 1).all(|a| close(self.at(a), C::new(1.0, 0.0)))
    }

    pub fn power(&self, k: i64) -> Self {
        let values = self
            .values
            .iter()
            .map(|v| if v.norm() < 1e-12 { *v } else { v.powi(k as i32) })
            .collect();
        let parity = if k.rem_euclid(2) == 0 { 0 } else { self.parity };
        DirichletTable { modulus: self.modulus, values, parity }
    }

    /// Not induced from any proper divisor of the modulus.
    pub fn is_primitive(&self) -> bool {
        if self.modulus == 1 {
            return true;
        }
        let q = self.modulus;
        (1..q).filter(|d| q.is_multiple_of(*d)).all(|d| {
            (1..q).any(|a| a % d == 1 % d && a.gcd(&q) == 1 && !close(self.at(a), C::new(1.0, 0.0)))
        })
    }

    /// Gauss sum `Σ χ(a) e^{2πia/q}`.
    pub fn gauss_sum(&self) -> C {
        let q = self.modulus as f64;
        (0..self.modulus).map(|a| self.at(a) * C::from_polar(1.0, 2.0 * PI * a as f64 / q)).sum()
    }

    /// `W(χ)` in `Λ(s,χ) = W(χ) Λ(1-s, χ̄)`.
    pub fn root_number(&self) -> C {
        if self.modulus == 1 {
            return C::new(1.0, 0.0);
        }
        let i_kappa = if self.parity == 0 { C::new(1.0, 0.0) } else { C::new(0.0, 1.0) };
        self.gauss_sum() / (i_kappa * (self.modulus as f64).sqrt())
    }
}

/// `(e^{-uL} - 1) / u`, accurate for small `u`.
fn expm1_ratio(u: C, l: f64) -> C {
    let ul = u * l;
    if ul.norm() > 1e-2 {
        return ((-ul).exp() - 1.0) / u;
    }
    let mut term = C::new(-l, 0.0);
    let mut total = term;
    for n in 2..12 {
        term = term * (-ul) / n as f64;
        total += term;
    }
    total
}

/// `L(s,χ) = q^{-s} Σ_a χ(a) ζ(s, a/q)` for a nonprincipal character.
fn dirichlet_l(tbl: &DirichletTable, s: C) -> C {
    let q = tbl.modulus as f64;
    let mut total = C::new(0.0, 0.0);
    for a in 1..tbl.modulus {
        let chi = tbl.at(a);
        if chi.norm() < 1e-12 {
            continue;
        }
        let a = a as f64 / q;
        let x = EM_TERMS as f64 + a;
        // Σ χ(a) = 0 removes the pole of the x^{1-s}/(s-1) terms.
        total += chi * (partial_sum(s, a) + expm1_ratio(s - 1.0, x.ln()) + em_tail(s, x));
    }
    total * (-s * q.ln()).exp()
}

/// Completed `L(s,χ)` with Γ-factor `(q/π)^{(s+κ)/2} Γ((s+κ)/2)`, reflected
/// to `Re s > 0` by the functional equation.
pub fn completed_dirichlet(tbl: &DirichletTable, s: C) -> Result<C> {
    if !tbl.is_primitive() {
        return Err(Error::Numeric(format!("character mod {} is not primitive", tbl.modulus)));
    }
    if tbl.is_principal() {
        return completed_zeta(s);
    }
    check_domain(s)?;
    if s.re <= 0.0 {
        return Ok(tbl.root_number() * completed_dirichlet(&tbl.conj(), C::new(1.0, 0.0) - s)?);
    }
    let h = (s + f64::from(tbl.parity)) / 2.0;
    let q = tbl.modulus as f64;
    Ok((h * (q / PI).ln()).exp() * gamma(h) * dirichlet_l(tbl, s))
}

/// Completed `L(s, χ^k)` with `χ^k` replaced by its primitive character.
pub fn completed_l_power(tbl: &DirichletTable, k: i64, s: C) -> Result<C> {
    let p = tbl.power(k);
    if p.is_principal() {
        completed_zeta(s)
    } else {
        completed_dirichlet(&p, s)
    }
}

/// `ε(s, χ^k) = L(s, χ^k) / L(1-s, χ^{-k})`.
pub fn epsilon_ratio(tbl: &DirichletTable, k: i64, s: C) -> Result<C> {
    Ok(completed_l_power(tbl, k, s)? / completed_l_power(tbl, -k, C::new(1.0, 0.0) - s)?)
}

/// Numeric value of an expression at complex `s`.
pub fn evaluate(e: &LExpression, tbl: &DirichletTable, s: C) -> Result<C> {
    let mut v = C::new(to_f64(&e.scalar), 0.0);
    for (sym, n) in &e.factors {
        let x = s * to_f64(&sym.arg.a) + to_f64(&sym.arg.b);
        let f = match sym.kind {
            SymbolKind::L => completed_l_power(tbl, sym.power, x)?,
            SymbolKind::Eps => epsilon_ratio(tbl, sym.power, x)?,
        };
        v *= f.powi(*n as i32);
    }
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::Numeric(format!("overflow evaluating {e} at {s}")));
    }
    Ok(v)
}

/// Least-squares slope of `log|f(s0+δ)|` against `log δ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrderEstimate {
    pub slope: f64,
    pub fitted: i64,
    pub residual: f64,
}

impl OrderEstimate {
    pub fn is_clean(&self) -> bool {
        self.residual < ORDER_TOLERANCE
    }
}

/// Order estimate for any function sampled along `s0 + δ`.
pub fn estimate_order_with(f: impl Fn(C) -> Result<C>, s0: f64) -> Result<OrderEstimate> {
    let mut pts = Vec::new();
    for d in DELTA_LADDER {
        let v = f(C::new(s0 + d, 0.0))?;
        let m = v.norm();
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::Numeric(format!("|f| = {m} at s0 + {d}")));
        }
        pts.push((d.ln(), m.ln()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let fitted = slope.round() as i64;
    Ok(OrderEstimate { slope, fitted, residual: (slope - fitted as f64).abs() })
}

/// Order of an expression at `s0`, estimated numerically.
pub fn estimate_order(e: &LExpression, tbl: &DirichletTable, s0: Q) -> Result<OrderEstimate> {
    estimate_order_with(|s| evaluate(e, tbl, s), to_f64(&s0))
}

/// Value of a limit at `s0` from symmetric samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NumericLimit {
    pub value_re: f64,
    pub value_im: f64,
    /// Difference between the estimates at the two smallest offsets.
    pub spread: f64,
}

impl NumericLimit {
    pub fn value(&self) -> C {
        C::new(self.value_re, self.value_im)
    }
}

/// `lim_{t→0} f(s0 + t)` from `(f(s0+h) + f(s0-h)) / 2`, which removes the
/// linear term; `f` must be finite near `s0`.
pub fn numeric_limit(f: impl Fn(C) -> Result<C>, s0: f64) -> Result<NumericLimit> {
    let avg = |h: f64| -> Result<C> { Ok((f(C::new(s0 + h, 0.0))? + f(C::new(s0 - h, 0.0))?) / 2.0) };
    let a = avg(1e-3)?;
    let b = avg(1e-4)?;
    Ok(NumericLimit { value_re: b.re, value_im: b.im, spread: (a - b).norm() })
}

/// Value of a `k = 0` atom: an `L`-value, the constant Laurent coefficient at
/// a pole, or an `ε`-value.
pub fn atom_value(atom: &Atom, tbl: &DirichletTable) -> Result<C> {
    match *atom {
        Atom::L { power, point, k: 0 } => {
            let x = to_f64(&point);
            let pole = tbl.power(power).is_principal() && (point == Q::from_integer(0) || point == Q::from_integer(1));
            if pole {
                let f = |s: C| completed_l_power(tbl, power, s);
                let h = 1e-4;
                Ok((f(C::new(x + h, 0.0))? + f(C::new(x - h, 0.0))?) / 2.0)
            } else {
                completed_l_power(tbl, power, C::new(x, 0.0))
            }
        }
        Atom::Eps { power, point, k: 0 } => epsilon_ratio(tbl, power, C::new(to_f64(&point), 0.0)),
        _ => Err(Error::Numeric(format!("no numeric value for derivative atom {atom}"))),
    }
}

/// Numeric value of a coefficient built from `k = 0` atoms.
pub fn poly_value(p: &Poly, tbl: &DirichletTable) -> Result<C> {
    let mut total = C::new(0.0, 0.0);
    for (m, c) in &p.0 {
        let mut v = C::new(to_f64(c), 0.0);
        for (a, e) in &m.0 {
            v *= atom_value(a, tbl)?.powi(*e as i32);
        }
        total += v;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn gamma_values() {
        assert!((gamma(c(5.0, 0.0)) - 24.0).norm() < 1e-11);
        assert!((gamma(c(0.5, 0.0)) - PI.sqrt()).norm() < 1e-13);
        assert!((gamma(c(-0.5, 0.0)) + 2.0 * PI.sqrt()).norm() < 1e-12);
    }

    #[test]
    fn zeta_closed_forms() {
        assert!((zeta(c(2.0, 0.0)).unwrap() - PI * PI / 6.0).norm() < 1e-13);
        assert!((zeta(c(0.0, 0.0)).unwrap() + 0.5).norm() < 1e-13);
        assert!((zeta(c(-1.0, 0.0)).unwrap() + 1.0 / 12.0).norm() < 1e-12);
        assert!((completed_zeta(c(2.0, 0.0)).unwrap() - PI / 6.0).norm() < 1e-12);
    }

    #[test]
    fn poles_are_refused() {
        assert!(completed_zeta(c(0.0, 0.0)).is_err());
        assert!(completed_zeta(c(1.0 + 1e-9, 0.0)).is_err());
        assert!(completed_zeta(c(0.5, 80.0)).is_err());
    }

    #[test]
    fn tables() {
        let m4 = DirichletTable::mod4();
        assert_eq!(m4.parity, 1);
        assert!(m4.is_real() && m4.is_primitive());
        assert!((m4.root_number() - 1.0).norm() < 1e-12);
        assert!(DirichletTable::kronecker(5).unwrap().parity == 0);
        assert!(DirichletTable::kronecker(-3).is_ok());
        assert!(DirichletTable::kronecker(12).is_ok());
        assert!(DirichletTable::kronecker(9).is_err());
        let q5 = DirichletTable::mod5_quartic();
        assert!(q5.power(4).is_principal());
        assert!(q5.power(2).is_real());
        assert!((q5.root_number().norm() - 1.0).abs() < 1e-12);
        let imprimitive = DirichletTable::from_values(3, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(!imprimitive.is_primitive());
        assert!(completed_dirichlet(&imprimitive, c(2.0, 0.0)).is_err());
        assert!(DirichletTable::from_values(4, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)]).is_err());
    }

    #[test]
    fn catalan_constant() {
        // L(2, χ_{-4}) is Catalan's constant.
        let l = dirichlet_l(&DirichletTable::mod4(), c(2.0, 0.0));
        assert!((l - 0.915_965_594_177_219).norm() < 1e-12);
        // L(1, χ_{-4}) = π/4.
        let l = dirichlet_l(&DirichletTable::mod4(), c(1.0, 0.0));
        assert!((l - PI / 4.0).norm() < 1e-12);
    }

    #[test]
    fn order_of_simple_pole() {
        let e = LExpression::parse("L(s,1)").unwrap();
        let est = estimate_order(&e, &DirichletTable::principal(), q(1)).unwrap();
        assert_eq!(est.fitted, -1);
        assert!(est.is_clean());
        let e = LExpression::parse("L(2s,1)").unwrap();
        assert_eq!(estimate_order(&e, &DirichletTable::principal(), frac(1, 2)).unwrap().fitted, -1);
    }

    #[test]
    fn regularized_constant_at_zero() {
        let euler = 0.577_215_664_901_532_9;
        let want = (euler - (4.0 * PI).ln()) / 2.0;
        let v = atom_value(&Atom::L { power: 0, point: q(0), k: 0 }, &DirichletTable::principal()).unwrap();
        assert!((v.re - want).abs() < 1e-7, "{v} vs {want}");
    }
}
