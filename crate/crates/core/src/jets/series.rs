use std::collections::BTreeMap;

use super::{JetError, MAX_DIM};
use crate::arith::{Coeff, GaussRat};

/// Exponent of `z^a z̄^b`: `a` in slots `0..4`, `b` in slots `4..8`.
pub type Exp = [u8; 2 * MAX_DIM];

fn degree(e: &Exp) -> i32 {
    e.iter().map(|&x| x as i32).sum()
}

/// Power series in `(z, z̄)` known exactly through total degree `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarSeries<C> {
    n: usize,
    order: i32,
    terms: BTreeMap<Exp, C>,
}

impl<C: Coeff> ScalarSeries<C> {
    pub fn zero(n: usize, order: i32) -> Self {
        ScalarSeries {
            n,
            order,
            terms: BTreeMap::new(),
        }
    }

    /// Zero known to every order; the neutral element for `order` bookkeeping.
    pub fn exact_zero(n: usize) -> Self {
        Self::zero(n, i32::MAX)
    }

    pub fn constant(n: usize, c: C) -> Self {
        let mut s = Self::exact_zero(n);
        s.insert([0; 2 * MAX_DIM], c);
        s
    }

    pub fn monomial(n: usize, order: i32, exp: Exp, c: C) -> Self {
        let mut s = Self::zero(n, order);
        if degree(&exp) <= order {
            s.insert(exp, c);
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn terms(&self) -> &BTreeMap<Exp, C> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn insert(&mut self, exp: Exp, c: C) {
        if c.is_zero() || degree(&exp) > self.order {
            return;
        }
        match self.terms.entry(exp) {
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

    fn restrict(&mut self, order: i32) {
        if order < self.order {
            self.order = order;
            self.terms.retain(|e, _| degree(e) <= order);
        }
    }

    pub fn truncated(&self, order: i32) -> Self {
        let mut s = self.clone();
        s.restrict(order);
        s
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut s = self.clone();
        s.add_assign(other);
        s
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.restrict(other.order);
        for (e, c) in &other.terms {
            self.insert(*e, c.clone());
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        ScalarSeries {
            n: self.n,
            order: self.order,
            terms: self.terms.iter().map(|(e, c)| (*e, c.neg())).collect(),
        }
    }

    pub fn scale(&self, s: &GaussRat) -> Self {
        let mut out = Self::zero(self.n, self.order);
        for (e, c) in &self.terms {
            out.insert(*e, c.scale(s));
        }
        out
    }

    pub fn scale_by(&self, s: &C) -> Self {
        let mut out = Self::zero(self.n, self.order);
        for (e, c) in &self.terms {
            out.insert(*e, c.mul(s));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let mut out = Self::zero(self.n, order);
        let rhs: Vec<(&Exp, &C, i32)> =
            other.terms.iter().map(|(e, c)| (e, c, degree(e))).collect();
        for (ea, ca) in &self.terms {
            let da = degree(ea);
            for &(eb, cb, db) in &rhs {
                if da + db > order {
                    continue;
                }
                let mut e = *ea;
                for k in 0..2 * MAX_DIM {
                    e[k] += eb[k];
                }
                out.insert(e, ca.mul(cb));
            }
        }
        out
    }

    fn derivative(&self, slot: usize) -> Self {
        let mut out = Self::zero(self.n, self.order.saturating_sub(1));
        for (e, c) in &self.terms {
            if e[slot] == 0 {
                continue;
            }
            let mut f = *e;
            f[slot] -= 1;
            out.insert(f, c.scale(&GaussRat::from_int(e[slot] as i64)));
        }
        out
    }

    /// `∂/∂z_i`.
    pub fn d_hol(&self, i: usize) -> Self {
        self.derivative(i)
    }

    /// `∂/∂z̄_i`.
    pub fn d_anti(&self, i: usize) -> Self {
        self.derivative(MAX_DIM + i)
    }

    /// Complex conjugate: swaps `z` and `z̄` and conjugates coefficients.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.n, self.order);
        for (e, c) in &self.terms {
            let mut f = [0u8; 2 * MAX_DIM];
            f[..MAX_DIM].copy_from_slice(&e[MAX_DIM..]);
            f[MAX_DIM..].copy_from_slice(&e[..MAX_DIM]);
            out.insert(f, c.conj());
        }
        out
    }

    /// Constant term; fails when truncation has left nothing known.
    pub fn at_origin(&self) -> Result<C, JetError> {
        if self.order < 0 {
            return Err(JetError::Truncation);
        }
        Ok(self
            .terms
            .get(&[0; 2 * MAX_DIM])
            .cloned()
            .unwrap_or_else(C::zero))
    }

    /// Lowest total degree present.
    pub fn min_degree(&self) -> Option<i32> {
        self.terms.keys().map(degree).min()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::gauss_int;

    fn z(i: usize) -> Exp {
        let mut e = [0; 8];
        e[i] = 1;
        e
    }

    #[test]
    fn product_respects_order() {
        let x = ScalarSeries::monomial(1, 3, z(0), gauss_int(1))
            .add(&ScalarSeries::constant(1, gauss_int(1)));
        let sq = x.mul(&x);
        assert_eq!(sq.order(), 3);
        assert_eq!(sq.terms().len(), 3);
        let cube = sq.mul(&sq);
        assert_eq!(cube.terms().len(), 4);
    }

    #[test]
    fn derivatives_drop_order() {
        let mut e = [0u8; 8];
        e[0] = 2;
        e[4] = 1;
        let s = ScalarSeries::monomial(1, 4, e, gauss_int(3));
        let d = s.d_hol(0).d_anti(0);
        assert_eq!(d.order(), 2);
        assert_eq!(d.terms().get(&z(0)), Some(&gauss_int(6)));
        assert_eq!(d.d_hol(0).at_origin().unwrap(), gauss_int(6));
        let deep = d.d_hol(0).d_hol(0).d_hol(0);
        assert_eq!(deep.at_origin(), Err(JetError::Truncation));
    }

    #[test]
    fn conjugation_swaps_variables() {
        let s = ScalarSeries::monomial(
            1,
            4,
            z(0),
            crate::arith::gauss(crate::arith::rat(1), crate::arith::rat(2)),
        );
        let c = s.conj();
        assert_eq!(
            c.terms().get(&z(4)),
            Some(&crate::arith::gauss(
                crate::arith::rat(1),
                crate::arith::rat(-2)
            ))
        );
    }
}
