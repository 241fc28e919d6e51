use std::collections::BTreeMap;
use std::fmt;

use super::JetError;
use crate::arith::{fmt_gauss, Coeff, GaussRat};

pub const MAX_DIM: usize = 4;

/// Jet variable `a_{αβ̄}` packed as 4-bit entries: α in the low 16 bits, β in
/// the high 16 bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetVar(u32);

impl JetVar {
    pub fn new(alpha: &[u8], beta: &[u8]) -> Result<Self, JetError> {
        if alpha.len() > MAX_DIM || beta.len() > MAX_DIM {
            return Err(JetError::Dimension(alpha.len().max(beta.len())));
        }
        let mut code = 0u32;
        for (i, &a) in alpha.iter().enumerate() {
            if a > 15 {
                return Err(JetError::IndexTooLarge(a as u32));
            }
            code |= (a as u32) << (4 * i);
        }
        for (i, &b) in beta.iter().enumerate() {
            if b > 15 {
                return Err(JetError::IndexTooLarge(b as u32));
            }
            code |= (b as u32) << (16 + 4 * i);
        }
        Ok(JetVar(code))
    }

    pub fn alpha_at(self, i: usize) -> u8 {
        ((self.0 >> (4 * i)) & 0xf) as u8
    }

    pub fn beta_at(self, i: usize) -> u8 {
        ((self.0 >> (16 + 4 * i)) & 0xf) as u8
    }

    pub fn alpha(self, n: usize) -> Vec<u8> {
        (0..n).map(|i| self.alpha_at(i)).collect()
    }

    pub fn beta(self, n: usize) -> Vec<u8> {
        (0..n).map(|i| self.beta_at(i)).collect()
    }

    pub fn hol_degree(self) -> u32 {
        (0..MAX_DIM).map(|i| self.alpha_at(i) as u32).sum()
    }

    pub fn anti_degree(self) -> u32 {
        (0..MAX_DIM).map(|i| self.beta_at(i) as u32).sum()
    }

    /// Doubled weight `|α| + |β| − 2`.
    pub fn weight2(self) -> u32 {
        self.hol_degree() + self.anti_degree() - 2
    }

    /// `a_{βᾱ}`, the hermitian partner.
    pub fn conj(self) -> JetVar {
        JetVar((self.0 >> 16) | ((self.0 & 0xffff) << 16))
    }

    /// Highest coordinate index used, plus one.
    pub fn dim(self) -> usize {
        (0..MAX_DIM)
            .rev()
            .find(|&i| self.alpha_at(i) > 0 || self.beta_at(i) > 0)
            .map_or(0, |i| i + 1)
    }
}

impl JetVar {
    /// `a[α;β]` with `n` coordinates per multi-index.
    pub fn display_in(self, n: usize) -> String {
        let join = |v: Vec<u8>| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        format!("a[{};{}]", join(self.alpha(n)), join(self.beta(n)))
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_in(self.dim().max(1)))
    }
}

/// Product of jet variables with exponents, sorted by variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct JetMono(Vec<(JetVar, u16)>);

impl JetMono {
    pub fn one() -> Self {
        JetMono(Vec::new())
    }

    pub fn var(v: JetVar) -> Self {
        JetMono(vec![(v, 1)])
    }

    pub fn factors(&self) -> &[(JetVar, u16)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e as u32).sum()
    }

    pub fn weight2(&self) -> u32 {
        self.0.iter().map(|&(v, e)| v.weight2() * e as u32).sum()
    }

    pub fn mul(&self, other: &JetMono) -> JetMono {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        JetMono(out)
    }

    pub fn conj(&self) -> JetMono {
        let mut v: Vec<(JetVar, u16)> = self.0.iter().map(|&(x, e)| (x.conj(), e)).collect();
        v.sort_unstable();
        JetMono(v)
    }
}

impl JetMono {
    fn dim(&self) -> usize {
        self.0
            .iter()
            .map(|(v, _)| v.dim())
            .max()
            .unwrap_or(0)
            .max(1)
    }

    pub fn display_in(&self, n: usize) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| {
                if *e == 1 {
                    v.display_in(n)
                } else {
                    format!("{}^{}", v.display_in(n), e)
                }
            })
            .collect();
        parts.join("·")
    }
}

impl fmt::Display for JetMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_in(self.dim()))
    }
}

/// Truncation of jet polynomials by total degree and doubled weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cap {
    pub max_degree: u32,
    pub max_weight2: u32,
}

impl Cap {
    pub const NONE: Cap = Cap {
        max_degree: u32::MAX,
        max_weight2: u32::MAX,
    };

    pub fn weight(max_weight2: u32) -> Cap {
        Cap {
            max_degree: u32::MAX,
            max_weight2,
        }
    }

    pub fn meet(self, other: Cap) -> Cap {
        Cap {
            max_degree: self.max_degree.min(other.max_degree),
            max_weight2: self.max_weight2.min(other.max_weight2),
        }
    }

    fn admits(self, m: &JetMono) -> bool {
        m.degree() <= self.max_degree && m.weight2() <= self.max_weight2
    }
}

/// Polynomial in jet variables with Gaussian-rational coefficients. Terms
/// outside the cap are discarded as they arise; the cap propagates to sums
/// and products as the most restrictive of the operands.
#[derive(Clone, Debug)]
pub struct JetPoly {
    terms: BTreeMap<JetMono, GaussRat>,
    cap: Cap,
}

impl PartialEq for JetPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for JetPoly {}

impl JetPoly {
    pub fn var(v: JetVar, cap: Cap) -> JetPoly {
        let mut p = JetPoly {
            terms: BTreeMap::new(),
            cap,
        };
        let m = JetMono::var(v);
        if cap.admits(&m) {
            p.terms.insert(m, GaussRat::one());
        }
        p
    }

    pub fn constant(c: GaussRat) -> JetPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(JetMono::one(), c);
        }
        JetPoly {
            terms,
            cap: Cap::NONE,
        }
    }

    pub fn terms(&self) -> &BTreeMap<JetMono, GaussRat> {
        &self.terms
    }

    pub fn cap(&self) -> Cap {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn with_cap(&self, cap: Cap) -> JetPoly {
        let cap = self.cap.meet(cap);
        JetPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| cap.admits(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
            cap,
        }
    }

    pub fn filter<F: Fn(&JetMono) -> bool>(&self, pred: F) -> JetPoly {
        JetPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| pred(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
            cap: self.cap,
        }
    }

    /// Homogeneous part of the given degree in the jet variables.
    pub fn degree_part(&self, d: u32) -> JetPoly {
        self.filter(|m| m.degree() == d)
    }

    pub fn weight2_part(&self, w2: u32) -> JetPoly {
        self.filter(|m| m.weight2() == w2)
    }

    /// `Some(w2)` when every term has doubled weight `w2`.
    pub fn homogeneous_weight2(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.weight2());
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    pub fn vars(&self) -> Vec<JetVar> {
        let mut v: Vec<JetVar> = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().map(|&(x, _)| x))
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Substitutes numbers for the jet variables; missing variables are zero.
    pub fn evaluate(&self, values: &BTreeMap<JetVar, GaussRat>) -> GaussRat {
        let mut acc = GaussRat::zero();
        'terms: for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in &m.0 {
                match values.get(&v) {
                    Some(x) => t *= num::pow(x.clone(), e as usize),
                    None => continue 'terms,
                }
            }
            acc += t;
        }
        acc
    }

    fn insert(&mut self, m: JetMono, c: GaussRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }
}

impl fmt::Display for JetPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let n = self.terms.keys().map(JetMono::dim).max().unwrap_or(1);
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if m.0.is_empty() {
                    fmt_gauss(c)
                } else if *c == <GaussRat as Coeff>::one() {
                    m.display_in(n)
                } else {
                    format!("({})·{}", fmt_gauss(c), m.display_in(n))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Coeff for JetPoly {
    fn zero() -> Self {
        JetPoly {
            terms: BTreeMap::new(),
            cap: Cap::NONE,
        }
    }

    fn one() -> Self {
        JetPoly::constant(GaussRat::one())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_assign(&mut self, other: &Self) {
        let cap = self.cap.meet(other.cap);
        if cap != self.cap {
            self.terms.retain(|m, _| cap.admits(m));
            self.cap = cap;
        }
        for (m, c) in &other.terms {
            if cap.admits(m) {
                self.insert(m.clone(), c.clone());
            }
        }
    }

    fn mul(&self, other: &Self) -> Self {
        let cap = self.cap.meet(other.cap);
        let mut out = JetPoly {
            terms: BTreeMap::new(),
            cap,
        };
        for (ma, ca) in &self.terms {
            let (da, wa) = (ma.degree(), ma.weight2());
            for (mb, cb) in &other.terms {
                if da + mb.degree() > cap.max_degree || wa + mb.weight2() > cap.max_weight2 {
                    continue;
                }
                out.insert(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    fn neg(&self) -> Self {
        JetPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
            cap: self.cap,
        }
    }

    fn scale(&self, s: &GaussRat) -> Self {
        if s.is_zero() {
            return JetPoly {
                terms: BTreeMap::new(),
                cap: self.cap,
            };
        }
        JetPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
            cap: self.cap,
        }
    }

    fn conj(&self) -> Self {
        JetPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.conj(), c.conj()))
                .collect(),
            cap: self.cap,
        }
    }

    fn from_gauss(s: GaussRat) -> Self {
        JetPoly::constant(s)
    }
}

/// Numeric value split by doubled weight: `Σ_k c_k ε^k`, truncated at `cap`.
///
/// Numeric jets scaled by `ε^{weight2}` keep the weight grading, so weight
/// truncation works for numbers exactly as it does for jet polynomials.
#[derive(Clone, Debug)]
pub struct Graded {
    parts: Vec<GaussRat>,
    cap: u32,
}

impl Graded {
    pub fn monomial(value: GaussRat, weight2: u32, cap: u32) -> Graded {
        let mut parts = Vec::new();
        if weight2 <= cap && !value.is_zero() {
            parts = vec![GaussRat::zero(); weight2 as usize + 1];
            parts[weight2 as usize] = value;
        }
        Graded { parts, cap }
    }

    pub fn part(&self, weight2: u32) -> GaussRat {
        self.parts
            .get(weight2 as usize)
            .cloned()
            .unwrap_or_else(GaussRat::zero)
    }

    /// Sum over all weights (the value at `ε = 1`).
    pub fn total(&self) -> GaussRat {
        self.parts.iter().fold(GaussRat::zero(), |a, b| a + b)
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    fn trim(&mut self) {
        let keep = (self.cap as usize).saturating_add(1);
        if self.parts.len() > keep {
            self.parts.truncate(keep);
        }
        while self.parts.last().is_some_and(|c| c.is_zero()) {
            self.parts.pop();
        }
    }
}

impl PartialEq for Graded {
    fn eq(&self, other: &Self) -> bool {
        let n = self.parts.len().max(other.parts.len());
        (0..n as u32).all(|k| self.part(k) == other.part(k))
    }
}

impl Eq for Graded {}

impl Coeff for Graded {
    fn zero() -> Self {
        Graded {
            parts: Vec::new(),
            cap: u32::MAX,
        }
    }

    fn one() -> Self {
        Graded {
            parts: vec![GaussRat::one()],
            cap: u32::MAX,
        }
    }

    fn is_zero(&self) -> bool {
        self.parts.iter().all(|c| c.is_zero())
    }

    fn add_assign(&mut self, other: &Self) {
        self.cap = self.cap.min(other.cap);
        if self.parts.len() < other.parts.len() {
            self.parts.resize(other.parts.len(), GaussRat::zero());
        }
        for (a, b) in self.parts.iter_mut().zip(&other.parts) {
            *a += b;
        }
        self.trim();
    }

    fn mul(&self, other: &Self) -> Self {
        let cap = self.cap.min(other.cap);
        if self.parts.is_empty() || other.parts.is_empty() {
            return Graded {
                parts: Vec::new(),
                cap,
            };
        }
        let len = (self.parts.len() + other.parts.len() - 1).min((cap as usize).saturating_add(1));
        let mut parts = vec![GaussRat::zero(); len];
        for (i, a) in self.parts.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.parts.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                parts[i + j] += a * b;
            }
        }
        let mut g = Graded { parts, cap };
        g.trim();
        g
    }

    fn neg(&self) -> Self {
        Graded {
            parts: self.parts.iter().map(|c| -c.clone()).collect(),
            cap: self.cap,
        }
    }

    fn scale(&self, s: &GaussRat) -> Self {
        let mut g = Graded {
            parts: self.parts.iter().map(|c| c * s).collect(),
            cap: self.cap,
        };
        g.trim();
        g
    }

    fn conj(&self) -> Self {
        Graded {
            parts: self.parts.iter().map(|c| c.conj()).collect(),
            cap: self.cap,
        }
    }

    fn from_gauss(s: GaussRat) -> Self {
        let mut g = Graded {
            parts: vec![s],
            cap: u32::MAX,
        };
        g.trim();
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{gauss, gauss_int, rat};

    #[test]
    fn var_packing() {
        let v = JetVar::new(&[2, 1], &[0, 3]).unwrap();
        assert_eq!(v.alpha(2), vec![2, 1]);
        assert_eq!(v.beta(2), vec![0, 3]);
        assert_eq!(v.weight2(), 4);
        assert_eq!(v.conj().alpha(2), vec![0, 3]);
        assert_eq!(v.conj().conj(), v);
        assert_eq!(v.to_string(), "a[2,1;0,3]");
        assert!(JetVar::new(&[16], &[2]).is_err());
    }

    #[test]
    fn cap_drops_terms() {
        let x = JetVar::new(&[2], &[2]).unwrap();
        let y = JetVar::new(&[3], &[2]).unwrap();
        let lin = Cap {
            max_degree: 1,
            max_weight2: u32::MAX,
        };
        let p = JetPoly::var(x, lin).add(&JetPoly::one());
        let sq = p.mul(&p);
        assert_eq!(sq.len(), 2);
        let w = JetPoly::var(x, Cap::weight(3)).mul(&JetPoly::var(y, Cap::NONE));
        assert!(w.is_zero());
    }

    #[test]
    fn conjugation_is_an_involution() {
        let x = JetVar::new(&[2, 0], &[1, 1]).unwrap();
        let p = JetPoly::var(x, Cap::NONE)
            .scale(&gauss(rat(1), rat(2)))
            .add(&JetPoly::from_int(3));
        assert_eq!(p.conj().conj(), p);
        assert_ne!(p.conj(), p);
    }

    #[test]
    fn evaluation() {
        let x = JetVar::new(&[2], &[2]).unwrap();
        let p = JetPoly::var(x, Cap::NONE)
            .mul(&JetPoly::var(x, Cap::NONE))
            .add(&JetPoly::from_int(1));
        let vals = BTreeMap::from([(x, gauss_int(3))]);
        assert_eq!(p.evaluate(&vals), gauss_int(10));
    }

    #[test]
    fn graded_arithmetic() {
        let a = Graded::monomial(gauss_int(2), 2, 4);
        let b = Graded::monomial(gauss_int(3), 3, 4);
        assert!(a.mul(&b).is_zero());
        let c = a.mul(&a);
        assert_eq!(c.part(4), gauss_int(4));
        assert_eq!(a.add(&b).total(), gauss_int(5));
        assert_eq!(Graded::one().mul(&a), a);
    }
}
