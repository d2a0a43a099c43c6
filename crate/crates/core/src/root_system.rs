//! Type `C_n` root system and its Weyl group, realized as signed permutations.
//!
//! Only rank 2 is exercised by the rest of the crate, but nothing here is
//! specific to it. Conventions:
//!
//! - simple roots are `e_i - e_{i+1}` (`i < n`) and `2 e_n`;
//! - the generators are the swaps `s_i` of coordinates `i, i+1` and the sign
//!   flip `c_n` of the last coordinate (for rank 2: `s` and `c2`);
//! - a word `g_1 g_2 ... g_k` denotes the product acting by `g_k` first, so
//!   `act(w1 * w2, v) = act(w1, act(w2, v))`.

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::rational::{fmt_q, q};
use crate::{Error, Result, Q};

/// A vector in the weight lattice, written in the basis `e_1..e_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootVector {
    pub coords: Vec<Q>,
}

impl RootVector {
    pub fn new(coords: Vec<Q>) -> Self {
        RootVector { coords }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        RootVector::new(coords.iter().map(|&c| q(c)).collect())
    }

    /// Unit vector `e_{i+1}` (0-based index).
    pub fn unit(rank: usize, i: usize) -> Self {
        let mut c = vec![Q::zero(); rank];
        c[i] = q(1);
        RootVector::new(c)
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn dot(&self, other: &RootVector) -> Q {
        self.coords
            .iter()
            .zip(&other.coords)
            .fold(Q::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn scale(&self, k: Q) -> RootVector {
        RootVector::new(self.coords.iter().map(|c| c * k).collect())
    }

    pub fn neg(&self) -> RootVector {
        self.scale(q(-1))
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// Positive with respect to the standard Borel: first nonzero coordinate is positive.
    pub fn is_positive(&self) -> bool {
        self.coords
            .iter()
            .find(|c| !c.is_zero())
            .is_some_and(|c| c.is_positive())
    }

    pub fn is_negative(&self) -> bool {
        self.neg().is_positive()
    }

    /// `±e_i ± e_j` (short) or `±2 e_i` (long).
    pub fn is_root(&self) -> bool {
        let nz: Vec<&Q> = self.coords.iter().filter(|c| !c.is_zero()).collect();
        match nz.as_slice() {
            [a, b] => a.abs() == q(1) && b.abs() == q(1),
            [a] => a.abs() == q(2),
            _ => false,
        }
    }

    pub fn is_long(&self) -> bool {
        self.is_root() && self.dot(self) == q(4)
    }

    /// Height with respect to the simple roots `e_i - e_{i+1}`, `2 e_n`.
    pub fn height(&self) -> Q {
        let n = self.rank();
        let mut h = Q::zero();
        let mut partial = Q::zero();
        for k in 0..n.saturating_sub(1) {
            partial += self.coords[k];
            h += partial;
        }
        let total: Q = self.coords.iter().sum();
        h + total / q(2)
    }
}

impl fmt::Display for RootVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else if out.is_empty() { "" } else { "+" };
            let coef = if mag == q(1) { String::new() } else { fmt_q(&mag) };
            out.push_str(&format!("{sign}{coef}e{}", i + 1));
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

impl Serialize for RootVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Positive roots of `C_n`, sorted by height and then by decreasing coordinates.
///
/// For rank 2 this is `e1-e2, 2e2, e1+e2, 2e1`.
pub fn positive_roots(rank: usize) -> Vec<RootVector> {
    let mut roots = Vec::new();
    for i in 0..rank {
        for j in i + 1..rank {
            let mut a = vec![0; rank];
            a[i] = 1;
            a[j] = -1;
            roots.push(RootVector::from_ints(&a));
            a[j] = 1;
            roots.push(RootVector::from_ints(&a));
        }
        let mut a = vec![0; rank];
        a[i] = 2;
        roots.push(RootVector::from_ints(&a));
    }
    roots.sort_by(|a, b| a.height().cmp(&b.height()).then_with(|| b.coords.cmp(&a.coords)));
    roots
}

pub fn simple_roots(rank: usize) -> Vec<RootVector> {
    let mut out = Vec::new();
    for i in 0..rank.saturating_sub(1) {
        let mut a = vec![0; rank];
        a[i] = 1;
        a[i + 1] = -1;
        out.push(RootVector::from_ints(&a));
    }
    let mut a = vec![0; rank];
    if rank > 0 {
        a[rank - 1] = 2;
        out.push(RootVector::from_ints(&a));
    }
    out
}

/// `2α/⟨α,α⟩`.
pub fn coroot(alpha: &RootVector) -> Result<RootVector> {
    if !alpha.is_root() {
        return Err(Error::NotARoot { rank: alpha.rank(), vector: alpha.to_string() });
    }
    Ok(alpha.scale(q(2) / alpha.dot(alpha)))
}

/// Simple reflections of the Weyl group of `C_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    /// Swap of coordinates `i` and `i + 1` (0-based).
    Swap(usize),
    /// Sign flip of the last coordinate.
    Flip,
}

impl Generator {
    pub fn all(rank: usize) -> Vec<Generator> {
        let mut g: Vec<Generator> = (0..rank.saturating_sub(1)).map(Generator::Swap).collect();
        g.push(Generator::Flip);
        g
    }

    pub fn name(&self, rank: usize) -> String {
        match self {
            Generator::Swap(_) if rank == 2 => "s".to_string(),
            Generator::Swap(i) => format!("s{}", i + 1),
            Generator::Flip => format!("c{rank}"),
        }
    }

    fn element(&self, rank: usize) -> (Vec<usize>, Vec<i8>) {
        let mut perm: Vec<usize> = (0..rank).collect();
        let mut signs = vec![1i8; rank];
        match *self {
            Generator::Swap(i) => perm.swap(i, i + 1),
            Generator::Flip => signs[rank - 1] = -1,
        }
        (perm, signs)
    }
}

/// Element of the hyperoctahedral group `W(C_n)`.
///
/// `act(w, e_i) = signs[i] * e_{perm[i]}`. Equality and ordering use this
/// normal form; `word` is always the canonical reduced word (shortlex over
/// the generator order `s_1, ..., s_{n-1}, c_n`, built by right multiplication).
#[derive(Clone, Debug)]
pub struct WeylElement {
    perm: Vec<usize>,
    signs: Vec<i8>,
    word: Vec<Generator>,
}

impl PartialEq for WeylElement {
    fn eq(&self, other: &Self) -> bool {
        self.perm == other.perm && self.signs == other.signs
    }
}

impl Eq for WeylElement {}

impl std::hash::Hash for WeylElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.perm.hash(state);
        self.signs.hash(state);
    }
}

impl Ord for WeylElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.length()
            .cmp(&other.length())
            .then_with(|| self.word.cmp(&other.word))
            .then_with(|| self.perm.cmp(&other.perm))
            .then_with(|| self.signs.cmp(&other.signs))
    }
}

impl PartialOrd for WeylElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl WeylElement {
    pub fn identity(rank: usize) -> Self {
        WeylElement { perm: (0..rank).collect(), signs: vec![1; rank], word: Vec::new() }
    }

    pub fn generator(rank: usize, g: Generator) -> Self {
        WeylElement::from_word(rank, &[g])
    }

    /// Product of the generators in `word` (leftmost acts last).
    pub fn from_word(rank: usize, word: &[Generator]) -> Self {
        let mut w = WeylElement::identity(rank);
        for g in word {
            let (perm, signs) = g.element(rank);
            w = w.compose_raw(&perm, &signs);
        }
        w.canonicalize()
    }

    /// From a signed permutation: `act(w, e_i) = signs[i] e_{perm[i]}`.
    pub fn from_signed_perm(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let rank = perm.len();
        let set: BTreeSet<usize> = perm.iter().copied().collect();
        if signs.len() != rank || set.len() != rank || set.iter().any(|&i| i >= rank) {
            return Err(Error::Parse(format!("not a signed permutation: {perm:?} {signs:?}")));
        }
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::Parse(format!("signs must be ±1: {signs:?}")));
        }
        Ok(WeylElement { perm, signs, word: Vec::new() }.canonicalize())
    }

    /// Parses `id`, `1`, rank-2 words such as `sc2s`, `c2sc2`, and the aliases
    /// `c1 = sc2s`, `sc1 = c2s`. For higher rank, words use `s1..s{n-1}` and `c{n}`
    /// separated by spaces or `*`.
    pub fn parse(rank: usize, name: &str) -> Result<Self> {
        let t = name.trim();
        let unknown = || Error::UnknownWeylElement(name.to_string());
        match t {
            "id" | "1" | "e" => return Ok(WeylElement::identity(rank)),
            "c1" if rank == 2 => return WeylElement::parse(rank, "sc2s"),
            "sc1" if rank == 2 => return WeylElement::parse(rank, "c2s"),
            _ => {}
        }
        let flip = format!("c{rank}");
        let mut word = Vec::new();
        if rank == 2 {
            let mut rest = t;
            while !rest.is_empty() {
                if let Some(r) = rest.strip_prefix("c2") {
                    word.push(Generator::Flip);
                    rest = r;
                } else if let Some(r) = rest.strip_prefix('s') {
                    word.push(Generator::Swap(0));
                    rest = r;
                } else {
                    return Err(unknown());
                }
            }
        } else {
            for tok in t.split(|c: char| c == '*' || c.is_whitespace()).filter(|x| !x.is_empty()) {
                if tok == flip {
                    word.push(Generator::Flip);
                } else if let Some(i) = tok.strip_prefix('s').and_then(|x| x.parse::<usize>().ok()) {
                    if i == 0 || i >= rank {
                        return Err(unknown());
                    }
                    word.push(Generator::Swap(i - 1));
                } else {
                    return Err(unknown());
                }
            }
        }
        Ok(WeylElement::from_word(rank, &word))
    }

    pub fn rank(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn word(&self) -> &[Generator] {
        &self.word
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, p)| i == *p) && self.signs.iter().all(|s| *s == 1)
    }

    pub fn name(&self) -> String {
        if self.word.is_empty() {
            return "id".to_string();
        }
        let rank = self.rank();
        let parts: Vec<String> = self.word.iter().map(|g| g.name(rank)).collect();
        if rank == 2 {
            parts.concat()
        } else {
            parts.join("*")
        }
    }

    fn compose_raw(&self, perm2: &[usize], signs2: &[i8]) -> WeylElement {
        // (self * other)(e_i) = signs2[i] * self(e_{perm2[i]})
        let rank = self.rank();
        let mut perm = vec![0; rank];
        let mut signs = vec![1; rank];
        for i in 0..rank {
            perm[i] = self.perm[perm2[i]];
            signs[i] = signs2[i] * self.signs[perm2[i]];
        }
        WeylElement { perm, signs, word: Vec::new() }
    }

    /// `self * other`: acts by `other` first.
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        self.compose_raw(&other.perm, &other.signs).canonicalize()
    }

    pub fn inverse(&self) -> WeylElement {
        let rank = self.rank();
        let mut perm = vec![0; rank];
        let mut signs = vec![1; rank];
        for i in 0..rank {
            perm[self.perm[i]] = i;
            signs[self.perm[i]] = self.signs[i];
        }
        WeylElement { perm, signs, word: Vec::new() }.canonicalize()
    }

    fn canonicalize(mut self) -> WeylElement {
        let rank = self.rank();
        let found = enumerate_group(rank)
            .into_iter()
            .find(|w| w.perm == self.perm && w.signs == self.signs)
            .expect("every signed permutation lies in W(C_n)");
        self.word = found.word;
        self
    }

    pub fn act(&self, v: &RootVector) -> RootVector {
        let mut out = vec![Q::zero(); v.rank()];
        for (i, c) in v.coords.iter().enumerate() {
            out[self.perm[i]] = *c * Q::from_integer(self.signs[i] as i64);
        }
        RootVector::new(out)
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl Serialize for WeylElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

/// All of `W(C_n)` by breadth-first right multiplication, so each element
/// carries its shortlex-first reduced word. Sorted by length, then word.
pub fn enumerate_group(rank: usize) -> Vec<WeylElement> {
    let gens: Vec<(Generator, Vec<usize>, Vec<i8>)> = Generator::all(rank)
        .into_iter()
        .map(|g| {
            let (p, s) = g.element(rank);
            (g, p, s)
        })
        .collect();
    let id = WeylElement::identity(rank);
    let mut seen: BTreeSet<(Vec<usize>, Vec<i8>)> = BTreeSet::new();
    seen.insert((id.perm.clone(), id.signs.clone()));
    let mut out = vec![];
    let mut queue = VecDeque::from([id]);
    while let Some(w) = queue.pop_front() {
        for (g, p, s) in &gens {
            let mut next = w.compose_raw(p, s);
            if seen.insert((next.perm.clone(), next.signs.clone())) {
                next.word = w.word.iter().copied().chain(std::iter::once(*g)).collect();
                queue.push_back(next);
            }
        }
        out.push(w);
    }
    out
}

/// Positive roots sent to negative roots by `w`.
pub fn negative_set(w: &WeylElement) -> Vec<RootVector> {
    positive_roots(w.rank()).into_iter().filter(|a| w.act(a).is_negative()).collect()
}

/// Minimal-length representatives `{w : w(α) > 0 for all α in keep}`, by brute-force filtering.
pub fn coset_reps(rank: usize, keep: &[RootVector]) -> Vec<WeylElement> {
    let mut reps: Vec<WeylElement> = enumerate_group(rank)
        .into_iter()
        .filter(|w| keep.iter().all(|a| w.act(a).is_positive()))
        .collect();
    reps.sort();
    reps
}

/// Same set as [`coset_reps`], grown from the identity by left multiplication
/// with generators. The set is closed under deleting the leftmost letter of a
/// reduced word, so pruning at each step loses nothing.
pub fn coset_reps_by_words(rank: usize, keep: &[RootVector]) -> Vec<WeylElement> {
    let ok = |w: &WeylElement| keep.iter().all(|a| w.act(a).is_positive());
    let gens: Vec<WeylElement> =
        Generator::all(rank).into_iter().map(|g| WeylElement::generator(rank, g)).collect();
    let mut found = vec![WeylElement::identity(rank)];
    let mut frontier = found.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for w in &frontier {
            for g in &gens {
                let cand = g.compose(w);
                if cand.length() == w.length() + 1 && ok(&cand) && !found.contains(&cand) && !next.contains(&cand) {
                    next.push(cand);
                }
            }
        }
        found.extend(next.iter().cloned());
        frontier = next;
    }
    found.sort();
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(name: &str) -> WeylElement {
        WeylElement::parse(2, name).unwrap()
    }

    fn r(c: &[i64]) -> RootVector {
        RootVector::from_ints(c)
    }

    #[test]
    fn positive_roots_rank_two_and_one() {
        let roots = positive_roots(2);
        let shown: Vec<String> = roots.iter().map(|r| r.to_string()).collect();
        assert_eq!(shown, ["e1-e2", "2e2", "e1+e2", "2e1"]);
        assert_eq!(simple_roots(2), vec![r(&[1, -1]), r(&[0, 2])]);
        assert_eq!(positive_roots(1), vec![r(&[2])]);
    }

    #[test]
    fn coroots() {
        assert_eq!(coroot(&r(&[1, -1])).unwrap(), r(&[1, -1]));
        assert_eq!(coroot(&r(&[0, 2])).unwrap(), r(&[0, 1]));
        assert_eq!(coroot(&r(&[1, 1])).unwrap(), r(&[1, 1]));
        assert!(matches!(coroot(&r(&[1, 0])), Err(Error::NotARoot { .. })));
        assert!(coroot(&r(&[0, 0])).is_err());
    }

    #[test]
    fn generator_actions() {
        let e1 = RootVector::unit(2, 0);
        let e2 = RootVector::unit(2, 1);
        assert_eq!(w("s").act(&e1), e2);
        assert_eq!(w("c2").act(&e2), e2.neg());
        assert_eq!(w("id").act(&r(&[3, -1])), r(&[3, -1]));
    }

    #[test]
    fn named_elements() {
        assert_eq!(w("c1"), w("sc2s"));
        assert_eq!(w("sc1"), w("c2s"));
        assert_eq!(w("c1").length(), 3);
        assert_eq!(w("sc1").length(), 2);
        assert_eq!(w("s").compose(&w("c1")), w("sc1"));
        // c1 flips the first coordinate
        assert_eq!(w("c1").act(&RootVector::unit(2, 0)), RootVector::unit(2, 0).neg());
        assert_eq!(w("c2sc2s"), w("sc2sc2"));
        assert!(WeylElement::parse(2, "sx").is_err());
    }

    #[test]
    fn negative_sets() {
        let shown = |x: &str| -> Vec<String> { negative_set(&w(x)).iter().map(|r| r.to_string()).collect() };
        assert_eq!(shown("c1"), ["e1-e2", "e1+e2", "2e1"]);
        assert_eq!(shown("c2s"), ["e1-e2", "2e1"]);
        assert!(shown("id").is_empty());
    }

    #[test]
    fn cosets() {
        let heis = coset_reps(2, &[r(&[0, 2])]);
        assert_eq!(heis, vec![w("id"), w("s"), w("c2s"), w("c1")]);
        let lengths: Vec<usize> = heis.iter().map(|x| x.length()).collect();
        assert_eq!(lengths, [0, 1, 2, 3]);
        let siegel = coset_reps(2, &[r(&[1, -1])]);
        assert_eq!(siegel, vec![w("id"), w("c2"), w("sc2"), w("c2sc2")]);
        assert_eq!(coset_reps(2, &simple_roots(2)), vec![w("id")]);
        assert_eq!(coset_reps_by_words(2, &[r(&[0, 2])]), heis);
        assert_eq!(coset_reps_by_words(2, &[r(&[1, -1])]), siegel);
    }

    #[test]
    fn group_axioms() {
        let all = enumerate_group(2);
        assert_eq!(all.len(), 8);
        let s = w("s");
        let c2 = w("c2");
        let id = WeylElement::identity(2);
        assert_eq!(s.compose(&s), id);
        assert_eq!(c2.compose(&c2), id);
        let sc = s.compose(&c2);
        let mut p = id.clone();
        for k in 1..=4 {
            p = p.compose(&sc);
            assert_eq!(p == id, k == 4);
        }
        assert_eq!(enumerate_group(3).len(), 48);
    }

    #[test]
    fn rank_three_words_parse() {
        let x = WeylElement::parse(3, "s1*c3*s2").unwrap();
        assert_eq!(x.length(), 3);
        assert_eq!(WeylElement::parse(3, &x.name()).unwrap(), x);
        assert_eq!(negative_set(&x).len(), x.length());
    }
}
