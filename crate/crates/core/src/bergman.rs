//! Bergman kernel expansion coefficients from a potential jet.
//!
//! With `log h = |z|² + H`, the operator symbol
//! `A(z; ζ, t) = det g(z, ζ/t) · exp(−H(z, ζ/t) t)` is quantized with
//! `ζ → ∂_z` in normal order, its formal adjoint is inverted as a Neumann
//! series in `t⁻¹`, and the constant terms of the inverse are the
//! coefficients `a_j`.
//!
//! Every term `c z^a ∂^b t^{−j}` carries the doubled weight `2j − |b| + |a|`,
//! which equals the doubled weight of its jet coefficient and is preserved by
//! products, reordering and the adjoint. Terms above weight `2J` never reach
//! `a_J` and are dropped as they arise.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::arith::{binomial, falling, fmt_gauss, gauss_rat, Coeff, GaussRat, Rat};
use crate::invariant::{permutation_sign, permutations};
use crate::jets::{Cap, JetError, JetPoly, JetValue, Potential, MAX_DIM};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BergmanError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("operator is not the identity plus terms of t-order ≤ −1 (offending t-order {0})")]
    NotPerturbation(i32),
}

/// `z^z ∂^d t^{−t_order}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeylMonomial {
    pub t_order: i32,
    pub z: [u8; MAX_DIM],
    pub d: [u8; MAX_DIM],
}

fn deg(v: &[u8; MAX_DIM]) -> i32 {
    v.iter().map(|&x| x as i32).sum()
}

fn pad(v: &[u8]) -> [u8; MAX_DIM] {
    let mut out = [0u8; MAX_DIM];
    out[..v.len()].copy_from_slice(v);
    out
}

impl WeylMonomial {
    pub const IDENTITY: WeylMonomial = WeylMonomial {
        t_order: 0,
        z: [0; MAX_DIM],
        d: [0; MAX_DIM],
    };

    pub fn new(t_order: i32, z: &[u8], d: &[u8]) -> Self {
        WeylMonomial {
            t_order,
            z: pad(z),
            d: pad(d),
        }
    }

    pub fn weight2(&self) -> i32 {
        2 * self.t_order - deg(&self.d) + deg(&self.z)
    }

    pub fn is_constant(&self) -> bool {
        deg(&self.z) == 0 && deg(&self.d) == 0
    }
}

impl fmt::Display for WeylMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, &e) in self.z.iter().enumerate().filter(|(_, &e)| e > 0) {
            parts.push(if e == 1 {
                format!("z{}", i + 1)
            } else {
                format!("z{}^{}", i + 1, e)
            });
        }
        for (i, &e) in self.d.iter().enumerate().filter(|(_, &e)| e > 0) {
            parts.push(if e == 1 {
                format!("∂{}", i + 1)
            } else {
                format!("∂{}^{}", i + 1, e)
            });
        }
        if self.t_order != 0 {
            parts.push(format!("t^{}", -self.t_order));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("·"))
        }
    }
}

/// Normal-ordered operator series in `z`, `∂_z` and `t⁻¹`, truncated at
/// t-order `max_t` and doubled weight `max_weight2`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentOperatorSeries<C> {
    n: usize,
    max_t: i32,
    max_weight2: i32,
    terms: BTreeMap<WeylMonomial, C>,
}

/// Product of `z^a ∂^b` and `z^c ∂^d` brought to normal order, one
/// coordinate at a time: `Σ_k C(b,k) (c)_k z^{a+c−k} ∂^{b+d−k}`.
fn reorder_terms(b: &[u8; MAX_DIM], c: &[u8; MAX_DIM]) -> Vec<([u8; MAX_DIM], Rat)> {
    let mut out = vec![([0u8; MAX_DIM], Rat::from_integer(1.into()))];
    for i in 0..MAX_DIM {
        let top = b[i].min(c[i]);
        if top == 0 {
            continue;
        }
        let mut next = Vec::with_capacity(out.len() * (top as usize + 1));
        for (k, w) in &out {
            for ki in 0..=top {
                let mut k2 = *k;
                k2[i] = ki;
                let f = binomial(b[i] as u32, ki as u32) * falling(c[i] as u32, ki as u32);
                next.push((k2, w * Rat::from_integer(f)));
            }
        }
        out = next;
    }
    out
}

impl<C: Coeff> LaurentOperatorSeries<C> {
    pub fn zero(n: usize, max_t: i32, max_weight2: i32) -> Self {
        LaurentOperatorSeries {
            n,
            max_t,
            max_weight2,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize, max_t: i32, max_weight2: i32) -> Self {
        let mut s = Self::zero(n, max_t, max_weight2);
        s.insert(WeylMonomial::IDENTITY, C::one());
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_t(&self) -> i32 {
        self.max_t
    }

    pub fn max_weight2(&self) -> i32 {
        self.max_weight2
    }

    pub fn terms(&self) -> &BTreeMap<WeylMonomial, C> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &WeylMonomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    fn admits(&self, m: &WeylMonomial) -> bool {
        m.t_order <= self.max_t && m.weight2() <= self.max_weight2
    }

    pub fn insert(&mut self, m: WeylMonomial, c: C) {
        if c.is_zero() || !self.admits(&m) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign(&c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn truncated(&self, max_t: i32, max_weight2: i32) -> Self {
        let mut out = Self::zero(
            self.n,
            self.max_t.min(max_t),
            self.max_weight2.min(max_weight2),
        );
        for (m, c) in &self.terms {
            out.insert(*m, c.clone());
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.truncated(other.max_t, other.max_weight2);
        for (m, c) in &other.terms {
            out.insert(*m, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentOperatorSeries {
            n: self.n,
            max_t: self.max_t,
            max_weight2: self.max_weight2,
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn map_coeffs<F: Fn(&C) -> C>(&self, f: F) -> Self {
        let mut out = Self::zero(self.n, self.max_t, self.max_weight2);
        for (m, c) in &self.terms {
            out.insert(*m, f(c));
        }
        out
    }

    /// Product treating `z`, `ζ` and `t⁻¹` as commuting variables.
    pub fn commutative_mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(
            self.n,
            self.max_t.min(other.max_t),
            self.max_weight2.min(other.max_weight2),
        );
        for (ma, ca) in &self.terms {
            let wa = ma.weight2();
            for (mb, cb) in &other.terms {
                if wa + mb.weight2() > out.max_weight2 || ma.t_order + mb.t_order > out.max_t {
                    continue;
                }
                let mut m = *ma;
                m.t_order += mb.t_order;
                for i in 0..MAX_DIM {
                    m.z[i] += mb.z[i];
                    m.d[i] += mb.d[i];
                }
                out.insert(m, ca.mul(cb));
            }
        }
        out
    }

    /// Operator product, re-normal-ordered with `[∂_i, z_j] = δ_ij`.
    pub fn weyl_mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(
            self.n,
            self.max_t.min(other.max_t),
            self.max_weight2.min(other.max_weight2),
        );
        for (ma, ca) in &self.terms {
            let wa = ma.weight2();
            for (mb, cb) in &other.terms {
                if wa + mb.weight2() > out.max_weight2 || ma.t_order + mb.t_order > out.max_t {
                    continue;
                }
                let prod = ca.mul(cb);
                if prod.is_zero() {
                    continue;
                }
                for (k, w) in reorder_terms(&ma.d, &mb.z) {
                    let mut m = WeylMonomial {
                        t_order: ma.t_order + mb.t_order,
                        z: [0; MAX_DIM],
                        d: [0; MAX_DIM],
                    };
                    for i in 0..MAX_DIM {
                        m.z[i] = ma.z[i] + mb.z[i] - k[i];
                        m.d[i] = ma.d[i] + mb.d[i] - k[i];
                    }
                    out.insert(m, prod.scale(&gauss_rat(w)));
                }
            }
        }
        out
    }

    /// Formal adjoint: `c z^a ∂^b t^{−j} ↦ c̄ ∂^a z^b t^{−(j + |a| − |b|)}`,
    /// normal-ordered and truncated at t-order `max_t`.
    pub fn adjoint(&self, max_t: i32) -> Self {
        let mut out = Self::zero(self.n, max_t, self.max_weight2);
        for (m, c) in &self.terms {
            let t_order = m.t_order + deg(&m.z) - deg(&m.d);
            if t_order > max_t {
                continue;
            }
            let cc = c.conj();
            for (k, w) in reorder_terms(&m.z, &m.d) {
                let mut key = WeylMonomial {
                    t_order,
                    z: [0; MAX_DIM],
                    d: [0; MAX_DIM],
                };
                for i in 0..MAX_DIM {
                    key.z[i] = m.d[i] - k[i];
                    key.d[i] = m.z[i] - k[i];
                }
                out.insert(key, cc.scale(&gauss_rat(w)));
            }
        }
        out
    }

    /// `1 − self` after checking that `self` is the identity plus terms of
    /// t-order at least one.
    fn perturbation(&self) -> Result<Self, BergmanError> {
        for (m, c) in &self.terms {
            if *m == WeylMonomial::IDENTITY {
                if *c != C::one() {
                    return Err(BergmanError::NotPerturbation(0));
                }
            } else if m.t_order < 1 {
                return Err(BergmanError::NotPerturbation(m.t_order));
            }
        }
        if !self.terms.contains_key(&WeylMonomial::IDENTITY) {
            return Err(BergmanError::NotPerturbation(0));
        }
        let mut e = self.neg();
        e.terms.remove(&WeylMonomial::IDENTITY);
        Ok(e)
    }

    /// `Σ_l (1 − self)^l` through t-order `max_t`.
    pub fn neumann_invert(&self) -> Result<Self, BergmanError> {
        let e = self.perturbation()?;
        let mut inv = Self::one(self.n, self.max_t, self.max_weight2);
        let mut power = inv.clone();
        while !power.is_empty() {
            power = power.weyl_mul(&e);
            inv = inv.add(&power);
        }
        Ok(inv)
    }

    /// Part with no `z`.
    pub fn z_free(&self) -> Self {
        let mut out = Self::zero(self.n, self.max_t, self.max_weight2);
        for (m, c) in &self.terms {
            if deg(&m.z) == 0 {
                out.insert(*m, c.clone());
            }
        }
        out
    }

    /// Constant terms `c t^{−j}` for `j = 0..=max_t`.
    pub fn constants(&self) -> Vec<C> {
        (0..=self.max_t.max(0))
            .map(|j| {
                self.coeff(&WeylMonomial {
                    t_order: j,
                    z: [0; MAX_DIM],
                    d: [0; MAX_DIM],
                })
            })
            .collect()
    }

    /// Constant terms of the Neumann inverse without forming it. The
    /// z-free part of `X·E` depends only on the z-free part of `X`, and
    /// `∂^b · z^c ∂^d` has z-free part `C(b,c) c! ∂^{b−c+d}` for `c ≤ b`.
    pub fn inverse_constants(&self) -> Result<Vec<C>, BergmanError> {
        let e = self.perturbation()?;
        let mut acc = Self::one(self.n, self.max_t, self.max_weight2);
        let mut v = e.z_free();
        while !v.is_empty() {
            acc = acc.add(&v);
            let mut next = Self::zero(self.n, self.max_t, self.max_weight2);
            for (ma, ca) in &v.terms {
                for (mb, cb) in &e.terms {
                    if ma.t_order + mb.t_order > self.max_t
                        || ma.weight2() + mb.weight2() > self.max_weight2
                    {
                        continue;
                    }
                    if (0..MAX_DIM).any(|i| mb.z[i] > ma.d[i]) {
                        continue;
                    }
                    let mut f = Rat::from_integer(1.into());
                    let mut m = WeylMonomial {
                        t_order: ma.t_order + mb.t_order,
                        z: [0; MAX_DIM],
                        d: [0; MAX_DIM],
                    };
                    for i in 0..MAX_DIM {
                        f *= Rat::from_integer(
                            binomial(ma.d[i] as u32, mb.z[i] as u32)
                                * crate::arith::factorial(mb.z[i] as u32),
                        );
                        m.d[i] = ma.d[i] - mb.z[i] + mb.d[i];
                    }
                    next.insert(m, ca.mul(cb).scale(&gauss_rat(f)));
                }
            }
            v = next;
        }
        Ok(acc.constants())
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for LaurentOperatorSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("({})·{}", c, m))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Displays a Gaussian-rational coefficient series.
pub fn format_gauss_series(s: &LaurentOperatorSeries<GaussRat>) -> String {
    if s.terms.is_empty() {
        return "0".into();
    }
    s.terms
        .iter()
        .map(|(m, c)| format!("({})·{}", fmt_gauss(c), m))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// The symbol `A = det g(z, ζ/t) exp(−H(z, ζ/t) t)` with `ζ → ∂_z`,
/// truncated at doubled weight `2J`.
pub fn build_a<C: JetValue>(
    pot: &Potential,
    order: u32,
    cap: Cap,
) -> Result<LaurentOperatorSeries<C>, BergmanError> {
    let n = pot.n();
    let max_w2 = 2 * order as i32;
    let cap = cap.meet(Cap::weight(2 * order));
    let jets = pot.jets::<C>(2 * order + 2, cap)?;
    let unbounded = i32::MAX;
    let mut minus_ht = LaurentOperatorSeries::<C>::zero(n, unbounded, max_w2);
    let mut g: Vec<Vec<LaurentOperatorSeries<C>>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    if a == b {
                        LaurentOperatorSeries::one(n, unbounded, max_w2)
                    } else {
                        LaurentOperatorSeries::zero(n, unbounded, max_w2)
                    }
                })
                .collect()
        })
        .collect();
    for (alpha, beta, c) in &jets {
        let q: i32 = beta.iter().map(|&x| x as i32).sum();
        minus_ht.insert(WeylMonomial::new(q - 1, alpha, beta), c.neg());
        for a in 0..n {
            for b in 0..n {
                if alpha[a] == 0 || beta[b] == 0 {
                    continue;
                }
                let mut za = alpha.clone();
                za[a] -= 1;
                let mut db = beta.clone();
                db[b] -= 1;
                let f = GaussRat::from_int(alpha[a] as i64 * beta[b] as i64);
                g[a][b].insert(WeylMonomial::new(q - 1, &za, &db), c.scale(&f));
            }
        }
    }
    let mut det = LaurentOperatorSeries::zero(n, unbounded, max_w2);
    for p in permutations(n) {
        let mut term = LaurentOperatorSeries::one(n, unbounded, max_w2);
        for (a, &b) in p.iter().enumerate() {
            term = term.commutative_mul(&g[a][b]);
        }
        if permutation_sign(&p) < 0 {
            term = term.neg();
        }
        det = det.add(&term);
    }
    let mut exp = LaurentOperatorSeries::one(n, unbounded, max_w2);
    let mut power = exp.clone();
    let mut m = 1i64;
    loop {
        power = power
            .commutative_mul(&minus_ht)
            .map_coeffs(|c| c.scale(&gauss_rat(Rat::new(1.into(), m.into()))));
        if power.is_empty() {
            break;
        }
        exp = exp.add(&power);
        m += 1;
    }
    Ok(det.commutative_mul(&exp))
}

/// `adjoint(build_a(H))` truncated at t-order `J`.
pub fn build_a_adjoint<C: JetValue>(
    pot: &Potential,
    order: u32,
    cap: Cap,
) -> Result<LaurentOperatorSeries<C>, BergmanError> {
    Ok(build_a::<C>(pot, order, cap)?.adjoint(order as i32))
}

/// `[a_0, …, a_J]` at the origin.
pub fn bergman_coefficients<C: JetValue>(
    pot: &Potential,
    order: u32,
    cap: Cap,
) -> Result<Vec<C>, BergmanError> {
    build_a_adjoint::<C>(pot, order, cap)?.inverse_constants()
}

/// Same as [`bergman_coefficients`] but through the full operator inverse.
pub fn bergman_coefficients_full<C: JetValue>(
    pot: &Potential,
    order: u32,
    cap: Cap,
) -> Result<Vec<C>, BergmanError> {
    Ok(build_a_adjoint::<C>(pot, order, cap)?
        .neumann_invert()?
        .constants())
}

/// Linear-in-`H` prediction for the adjoint symbol:
/// `Σ_{k≥0} (k−1)/k! · Δ^k H(z, t⁻¹∂) t^{1−k}` with `Δ = Σ ∂_{z_i}∂_{ζ_i}`,
/// i.e. `1 − H t + Σ_{j≥1} j/(j+1)! Δ^{j+1}H t^{−j}`.
pub fn linear_adjoint_prediction(
    pot: &Potential,
    order: u32,
) -> Result<LaurentOperatorSeries<JetPoly>, BergmanError> {
    let n = pot.n();
    let cap = Cap {
        max_degree: 1,
        max_weight2: 2 * order,
    };
    let mut out = LaurentOperatorSeries::one(n, order as i32, 2 * order as i32);
    for (alpha, beta, c) in pot.jets::<JetPoly>(2 * order + 2, cap)? {
        let mut layer: BTreeMap<([u8; MAX_DIM], [u8; MAX_DIM]), Rat> = BTreeMap::new();
        layer.insert((pad(&alpha), pad(&beta)), Rat::from_integer(1.into()));
        let mut k = 0i64;
        while !layer.is_empty() {
            let fact = Rat::from_integer(crate::arith::factorial(k as u32));
            let w = Rat::from_integer((k - 1).into()) / fact;
            for ((z, d), r) in &layer {
                let t_order = deg(d) + k as i32 - 1;
                out.insert(
                    WeylMonomial {
                        t_order,
                        z: *z,
                        d: *d,
                    },
                    c.scale(&gauss_rat(r * &w)),
                );
            }
            let mut next = BTreeMap::new();
            for ((z, d), r) in &layer {
                for i in 0..n {
                    if z[i] == 0 || d[i] == 0 {
                        continue;
                    }
                    let (mut z2, mut d2) = (*z, *d);
                    z2[i] -= 1;
                    d2[i] -= 1;
                    let e = next
                        .entry((z2, d2))
                        .or_insert_with(|| Rat::from_integer(0.into()));
                    *e += r * Rat::from_integer((z[i] as i64 * d[i] as i64).into());
                }
            }
            layer = next;
            k += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{gauss_int, ratio};
    use crate::jets::{named_scalar, Graded, NamedScalar};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_op(rng: &mut ChaCha8Rng, n: usize) -> LaurentOperatorSeries<GaussRat> {
        let mut s = LaurentOperatorSeries::zero(n, 8, 40);
        for _ in 0..3 {
            let z: Vec<u8> = (0..n).map(|_| rng.gen_range(0..3)).collect();
            let d: Vec<u8> = (0..n).map(|_| rng.gen_range(0..3)).collect();
            s.insert(
                WeylMonomial::new(rng.gen_range(0..3), &z, &d),
                gauss_int(rng.gen_range(-3..=3)),
            );
        }
        s
    }

    #[test]
    fn weyl_product_basics() {
        let d = {
            let mut s = LaurentOperatorSeries::zero(1, 5, 20);
            s.insert(WeylMonomial::new(0, &[0], &[1]), gauss_int(1));
            s
        };
        let z = {
            let mut s = LaurentOperatorSeries::zero(1, 5, 20);
            s.insert(WeylMonomial::new(0, &[1], &[0]), gauss_int(1));
            s
        };
        let comm = d.weyl_mul(&z).sub(&z.weyl_mul(&d));
        assert_eq!(comm, LaurentOperatorSeries::one(1, 5, 20));
    }

    #[test]
    fn weyl_product_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let (a, b, c) = (
                random_op(&mut rng, 2),
                random_op(&mut rng, 2),
                random_op(&mut rng, 2),
            );
            assert_eq!(a.weyl_mul(&b).weyl_mul(&c), a.weyl_mul(&b.weyl_mul(&c)));
        }
    }

    #[test]
    fn adjoint_of_identity_and_conjugate_linearity() {
        let one = LaurentOperatorSeries::<GaussRat>::one(2, 4, 20);
        assert_eq!(one.adjoint(4), one);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_op(&mut rng, 2);
        let i = GaussRat::new(ratio(0, 1), ratio(1, 1));
        let lhs = a.map_coeffs(|c| c * &i).adjoint(8);
        let rhs = a.adjoint(8).map_coeffs(|c| c * i.conj());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn flat_potential_gives_trivial_coefficients() {
        let flat = Potential::numeric(2, Vec::new()).unwrap();
        let a: Vec<GaussRat> = bergman_coefficients(&flat, 3, Cap::NONE).unwrap();
        assert_eq!(
            a,
            vec![gauss_int(1), gauss_int(0), gauss_int(0), gauss_int(0)]
        );
    }

    #[test]
    fn fubini_study_coefficients() {
        let fs = Potential::fubini_study(1, 8).unwrap();
        let a: Vec<GaussRat> = bergman_coefficients(&fs, 3, Cap::NONE).unwrap();
        assert_eq!(
            a,
            vec![gauss_int(1), gauss_int(1), gauss_int(0), gauss_int(0)]
        );
        let fs = Potential::fubini_study(2, 8).unwrap();
        let a: Vec<GaussRat> = bergman_coefficients(&fs, 3, Cap::NONE).unwrap();
        assert_eq!(
            a,
            vec![gauss_int(1), gauss_int(3), gauss_int(2), gauss_int(0)]
        );
    }

    #[test]
    fn fast_constants_match_full_inverse() {
        let pot = Potential::random_hermitian(2, 4, 21).unwrap();
        let fast: Vec<GaussRat> = bergman_coefficients(&pot, 2, Cap::NONE).unwrap();
        let full: Vec<GaussRat> = bergman_coefficients_full(&pot, 2, Cap::NONE).unwrap();
        assert_eq!(fast, full);
    }

    #[test]
    fn coefficients_are_weight_homogeneous() {
        let pot = Potential::random_hermitian(1, 6, 2).unwrap();
        let a: Vec<Graded> = bergman_coefficients(&pot, 3, Cap::NONE).unwrap();
        for (j, aj) in a.iter().enumerate() {
            assert_eq!(aj.total(), aj.part(2 * j as u32));
        }
    }

    #[test]
    fn first_coefficient_is_half_scalar_curvature() {
        let pot = Potential::symbolic(1).unwrap();
        let a: Vec<JetPoly> = bergman_coefficients(&pot, 1, Cap::NONE).unwrap();
        let s: JetPoly = named_scalar(&pot, NamedScalar::SCALAR, Cap::NONE).unwrap();
        assert_eq!(a[1].scale(&gauss_int(2)), s);
    }

    #[test]
    fn perturbation_check() {
        let mut s = LaurentOperatorSeries::<GaussRat>::one(1, 3, 10);
        s.insert(WeylMonomial::new(0, &[1], &[0]), gauss_int(1));
        assert_eq!(s.neumann_invert(), Err(BergmanError::NotPerturbation(0)));
    }
}
