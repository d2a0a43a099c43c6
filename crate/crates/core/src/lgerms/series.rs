//! Truncated Laurent series whose coefficients are polynomials over `Q` in
//! opaque atoms (values and Taylor coefficients of `L` and `ε`).

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::normfactor::fmt_char_power;
use crate::rational::fmt_q;
use crate::Q;

/// Number of coefficients carried by every series.
pub const PRECISION: usize = 4;

/// `k`-th coefficient of a completed `L(·, χ^power)` or `ε(·, χ^power)` at
/// `point`, in the local variable `u = x - point`. For the pole of the
/// trivial `L` at `0`, `k = 0` is the constant term after the polar part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    L { power: i64, point: Q, k: u32 },
    Eps { power: i64, point: Q, k: u32 },
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (name, power, point, k) = match self {
            Atom::L { power, point, k } => ("L", power, point, k),
            Atom::Eps { power, point, k } => ("eps", power, point, k),
        };
        let chi = fmt_char_power(*power);
        let p = fmt_q(point);
        match k {
            0 => write!(f, "{name}({p},{chi})"),
            k => write!(f, "{name}_{k}({p},{chi})"),
        }
    }
}

/// Product of atoms with signed exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub BTreeMap<Atom, i64>);

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn atom(a: Atom) -> Self {
        Monomial(BTreeMap::from([(a, 1)]))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (a, e) in &other.0 {
            let v = out.entry(*a).or_insert(0);
            *v += e;
            if *v == 0 {
                out.remove(a);
            }
        }
        Monomial(out)
    }

    pub fn inverse(&self) -> Monomial {
        Monomial(self.0.iter().map(|(a, e)| (*a, -e)).collect())
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.0.keys()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut num = Vec::new();
        let mut den = Vec::new();
        for (a, e) in &self.0 {
            let item = if e.abs() == 1 { a.to_string() } else { format!("{a}^{}", e.abs()) };
            if *e > 0 {
                num.push(item);
            } else {
                den.push(item);
            }
        }
        let n = if num.is_empty() { "1".to_string() } else { num.join("*") };
        match den.len() {
            0 => f.write_str(&n),
            1 => write!(f, "{n}/{}", den[0]),
            _ => write!(f, "{n}/({})", den.join("*")),
        }
    }
}

/// Finite `Q`-linear combination of monomials; zero terms are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly(pub BTreeMap<Monomial, Q>);

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Q) -> Self {
        Poly::term(c, Monomial::one())
    }

    pub fn atom(a: Atom) -> Self {
        Poly::term(Q::one(), Monomial::atom(a))
    }

    pub fn term(c: Q, m: Monomial) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.0.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// The single term `c·m`, if the polynomial has exactly one.
    pub fn as_term(&self) -> Option<(Q, &Monomial)> {
        if self.0.len() == 1 {
            self.0.iter().next().map(|(m, c)| (*c, m))
        } else {
            None
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.0.clone();
        for (m, c) in &other.0 {
            let v = out.entry(m.clone()).or_insert_with(Q::zero);
            *v += c;
            if v.is_zero() {
                out.remove(m);
            }
        }
        Poly(out)
    }

    pub fn scale(&self, k: Q) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|(m, c)| (m.clone(), c * k)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &other.0 {
                out = out.add(&Poly::term(c1 * c2, m1.mul(m2)));
            }
        }
        out
    }

    /// Inverse of a single-term polynomial.
    pub fn inverse(&self) -> Option<Poly> {
        let (c, m) = self.as_term()?;
        Some(Poly::term(c.recip(), m.inverse()))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(m, c)| {
                if m.0.is_empty() {
                    fmt_q(c)
                } else if c.is_one() {
                    m.to_string()
                } else if *c == -Q::one() {
                    format!("-{m}")
                } else {
                    format!("{}*{m}", fmt_q(c))
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// `Σ_{i < PRECISION} coeffs[i] t^{val + i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    pub val: i64,
    pub coeffs: Vec<Poly>,
}

impl Series {
    /// Pads or truncates to [`PRECISION`] coefficients.
    pub fn new(val: i64, mut coeffs: Vec<Poly>) -> Self {
        coeffs.resize(PRECISION, Poly::zero());
        Series { val, coeffs }
    }

    pub fn constant(c: Poly) -> Self {
        Series::new(0, vec![c])
    }

    pub fn one() -> Self {
        Series::constant(Poly::constant(Q::one()))
    }

    pub fn leading(&self) -> &Poly {
        &self.coeffs[0]
    }

    pub fn mul(&self, other: &Series) -> Series {
        let mut coeffs = vec![Poly::zero(); PRECISION];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate().take(PRECISION - i) {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Series { val: self.val + other.val, coeffs }
    }

    /// Multiplicative inverse; `None` unless the leading coefficient is a single term.
    pub fn inverse(&self) -> Option<Series> {
        let b0 = self.coeffs[0].inverse()?;
        let mut out = vec![b0.clone()];
        for n in 1..PRECISION {
            let mut acc = Poly::zero();
            for j in 1..=n {
                acc = acc.add(&self.coeffs[j].mul(&out[n - j]));
            }
            out.push(acc.mul(&b0).scale(-Q::one()));
        }
        Some(Series { val: -self.val, coeffs: out })
    }

    pub fn pow(&self, n: i64) -> Option<Series> {
        let base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut out = Series::one();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        Some(out)
    }

    pub fn scale(&self, k: Q) -> Series {
        Series { val: self.val, coeffs: self.coeffs.iter().map(|c| c.scale(k)).collect() }
    }

    /// Substitutes `u = a t`, multiplying the `u^n` coefficient by `a^n`.
    pub fn rescale_variable(&self, a: Q) -> Series {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let n = self.val + i as i64;
                let f = if n >= 0 { pow_q(a, n as u64) } else { pow_q(a.recip(), n.unsigned_abs()) };
                c.scale(f)
            })
            .collect();
        Series { val: self.val, coeffs }
    }

    /// Substitutes `u = -u`.
    pub fn reflect_variable(&self) -> Series {
        self.rescale_variable(-Q::one())
    }
}

fn pow_q(x: Q, n: u64) -> Q {
    (0..n).fold(Q::one(), |acc, _| acc * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn a(k: u32) -> Atom {
        Atom::L { power: 1, point: q(-1), k }
    }

    #[test]
    fn inverse_roundtrip() {
        let s = Series::new(-1, vec![Poly::atom(a(0)), Poly::atom(a(1)), Poly::constant(q(3))]);
        let inv = s.inverse().unwrap();
        let prod = s.mul(&inv);
        assert_eq!(prod, Series::one());
    }

    #[test]
    fn rescaling() {
        let s = Series::new(-1, vec![Poly::constant(q(1)), Poly::constant(q(1)), Poly::constant(q(1))]);
        let r = s.rescale_variable(q(2));
        assert_eq!(r.coeffs[0], Poly::constant(Q::new(1, 2)));
        assert_eq!(r.coeffs[1], Poly::constant(q(1)));
        assert_eq!(r.coeffs[2], Poly::constant(q(2)));
    }

    #[test]
    fn polys_cancel() {
        let p = Poly::atom(a(0)).add(&Poly::atom(a(0)).scale(-Q::one()));
        assert!(p.is_zero());
        assert!(Poly::atom(a(0)).add(&Poly::atom(a(1))).inverse().is_none());
        assert_eq!(Poly::atom(a(0)).scale(q(2)).to_string(), "2*L(-1,chi)");
        assert_eq!(Poly::atom(a(2)).to_string(), "L_2(-1,chi)");
    }
}
