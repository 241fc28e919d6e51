use std::fmt;
use std::str::FromStr;

use num::{One, Zero};

use super::geometry::{curvature_package, laplacian_g, CurvaturePackage};
use super::potential::JetValue;
use super::{Cap, JetError, Potential};
use crate::arith::{binomial, gauss_rat, Coeff, Rat};
use crate::chern::Partition;
use crate::invariant::{permutation_sign, permutations};

/// Local scalar invariants that can be evaluated at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedScalar {
    /// `Δ^k S`; `k = 0` is the scalar curvature.
    LaplaceScalar(u32),
    RiemannNorm,
    RicciNorm,
    /// Normalized top-degree contraction of the Todd form.
    Todd(u32),
    DivQ,
}

impl NamedScalar {
    pub const SCALAR: NamedScalar = NamedScalar::LaplaceScalar(0);

    pub fn weight(self) -> u32 {
        match self {
            NamedScalar::LaplaceScalar(k) => 1 + k,
            NamedScalar::RiemannNorm | NamedScalar::RicciNorm => 2,
            NamedScalar::Todd(j) => j,
            NamedScalar::DivQ => 3,
        }
    }

    /// Smallest series order of `H` that determines the value at the origin.
    pub fn min_order(self) -> u32 {
        2 * self.weight() + 2
    }
}

impl fmt::Display for NamedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedScalar::LaplaceScalar(0) => write!(f, "S"),
            NamedScalar::LaplaceScalar(1) => write!(f, "ΔS"),
            NamedScalar::LaplaceScalar(k) => write!(f, "Δ^{}S", k),
            NamedScalar::RiemannNorm => write!(f, "|R|^2"),
            NamedScalar::RicciNorm => write!(f, "|Ric|^2"),
            NamedScalar::Todd(j) => write!(f, "P{}", j),
            NamedScalar::DivQ => write!(f, "divQ"),
        }
    }
}

impl FromStr for NamedScalar {
    type Err = JetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || JetError::UnknownScalar(s.to_string());
        match t.as_str() {
            "S" => return Ok(NamedScalar::SCALAR),
            "|R|^2" | "|R|²" => return Ok(NamedScalar::RiemannNorm),
            "|Ric|^2" | "|Ric|²" => return Ok(NamedScalar::RicciNorm),
            "divQ" => return Ok(NamedScalar::DivQ),
            _ => {}
        }
        if let Some(j) = t.strip_prefix('P') {
            return j.parse().map(NamedScalar::Todd).map_err(|_| bad());
        }
        let rest = t
            .strip_prefix("Delta")
            .or_else(|| t.strip_prefix('Δ'))
            .ok_or_else(bad)?;
        let body = rest.strip_suffix('S').ok_or_else(bad)?;
        if body.is_empty() {
            return Ok(NamedScalar::LaplaceScalar(1));
        }
        body.strip_prefix('^')
            .and_then(|k| k.parse().ok())
            .map(NamedScalar::LaplaceScalar)
            .ok_or_else(bad)
    }
}

fn bernoulli(m: usize) -> Vec<Rat> {
    let mut b = vec![Rat::one()];
    for k in 1..=m {
        let mut acc = Rat::zero();
        for i in 0..k {
            acc += Rat::from_integer(binomial(k as u32 + 1, i as u32)) * &b[i];
        }
        b.push(-acc / Rat::from_integer((k as i64 + 1).into()));
    }
    b
}

/// Coefficients `c_k` with `Td = exp(Σ c_k tr(R^k))` in the curvature sign
/// convention used here.
fn todd_log_coefficients(j: usize) -> Vec<Rat> {
    let b = bernoulli(j);
    let mut c = vec![Rat::zero(); j + 1];
    if j >= 1 {
        c[1] = Rat::new((-1).into(), 2.into());
    }
    for k in (2..=j).step_by(2) {
        let fact = Rat::from_integer(crate::arith::factorial(k as u32));
        c[k] = -(&b[k] / (Rat::from_integer((k as i64).into()) * fact));
    }
    c
}

/// Full contraction of `Π_cycles tr(R^k)` where the curvature components at
/// the origin are `r[a][b][c][d]` (row-major, metric `δ`).
fn cycle_contraction<C: Coeff>(r: &[C], n: usize, parts: &[u32]) -> C {
    let j: usize = parts.iter().map(|&p| p as usize).sum();
    let mut next = vec![0usize; j];
    let mut start = 0;
    for &p in parts {
        let p = p as usize;
        for i in 0..p {
            next[start + i] = start + (i + 1) % p;
        }
        start += p;
    }
    let at = |a: usize, b: usize, c: usize, d: usize| &r[((a * n + b) * n + c) * n + d];
    let mut total = C::zero();
    let total_idx = n.pow(2 * j as u32);
    for rho in permutations(j) {
        let sign = permutation_sign(&rho);
        let mut sum = C::zero();
        'idx: for code in 0..total_idx {
            let mut k = code;
            let mut m = vec![0usize; j];
            let mut f = vec![0usize; j];
            for i in 0..j {
                m[i] = k % n;
                k /= n;
                f[i] = k % n;
                k /= n;
            }
            let mut prod = C::one();
            for i in 0..j {
                let x = at(m[i], m[next[i]], f[i], f[rho[i]]);
                if x.is_zero() {
                    continue 'idx;
                }
                prod = prod.mul(x);
            }
            sum.add_assign(&prod);
        }
        if sign < 0 {
            total.sub_assign(&sum);
        } else {
            total.add_assign(&sum);
        }
    }
    total
}

/// Top-degree contraction of the degree-`j` Todd polynomial, from curvature
/// components at the origin. The contraction sums over all `j!` pairings of
/// form indices, so it already carries the `1/j!` of the form normalization.
pub fn todd_form<C: Coeff>(riemann_at_origin: &[C], n: usize, j: u32) -> C {
    let c = todd_log_coefficients(j as usize);
    let mut out = C::zero();
    for p in Partition::all(j as usize) {
        let parts = p.parts();
        let mut coeff = Rat::one();
        let mut k = 0;
        while k < parts.len() {
            let mut mult = 0;
            let part = parts[k];
            while k < parts.len() && parts[k] == part {
                mult += 1;
                k += 1;
            }
            coeff *= num::pow(c[part as usize].clone(), mult)
                / Rat::from_integer(crate::arith::factorial(mult as u32));
        }
        if coeff.is_zero() {
            continue;
        }
        let term = cycle_contraction(riemann_at_origin, n, parts);
        out.add_assign(&term.scale(&gauss_rat(coeff)));
    }
    out
}

/// Evaluates a named scalar at the origin from a curvature package.
pub fn scalar_from_package<C: Coeff>(
    pkg: &CurvaturePackage<C>,
    s: NamedScalar,
) -> Result<C, JetError> {
    match s {
        NamedScalar::LaplaceScalar(k) => laplacian_g(pkg, &pkg.scalar, k as usize),
        NamedScalar::RiemannNorm => pkg.riemann_norm().at_origin(),
        NamedScalar::RicciNorm => pkg.ricci_norm().at_origin(),
        NamedScalar::Todd(j) => Ok(todd_form(&pkg.riemann.at_origin()?, pkg.n, j)),
        NamedScalar::DivQ => pkg.div_q().at_origin(),
    }
}

/// Evaluates `s` at the origin with `H` truncated at `order`.
pub fn named_scalar_at_order<C: JetValue>(
    pot: &Potential,
    s: NamedScalar,
    order: u32,
    cap: Cap,
) -> Result<C, JetError> {
    if order < s.min_order() {
        return Err(JetError::OrderTooSmall {
            got: order as usize,
            min: s.min_order() as usize,
        });
    }
    let cap = cap.meet(Cap::weight(2 * s.weight()));
    let pkg = curvature_package::<C>(pot, order, cap)?;
    scalar_from_package(&pkg, s)
}

/// Evaluates `s` at the origin using the minimal truncation order.
pub fn named_scalar<C: JetValue>(pot: &Potential, s: NamedScalar, cap: Cap) -> Result<C, JetError> {
    named_scalar_at_order(pot, s, s.min_order(), cap)
}

/// Like [`named_scalar`], but recomputes two orders higher and fails if the
/// value moves.
pub fn named_scalar_audited<C: JetValue>(
    pot: &Potential,
    s: NamedScalar,
    cap: Cap,
) -> Result<C, JetError> {
    let v = named_scalar::<C>(pot, s, cap)?;
    let w = named_scalar_at_order::<C>(pot, s, s.min_order() + 2, cap)?;
    if v != w {
        return Err(JetError::AuditFailed(s.to_string()));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{gauss_int, ratio, GaussRat};
    use crate::jets::{Graded, JetPoly, JetVar};

    #[test]
    fn parse_and_display() {
        for s in ["S", "ΔS", "Δ^2S", "|R|^2", "|Ric|^2", "P3", "divQ"] {
            let x: NamedScalar = s.parse().unwrap();
            assert_eq!(x.to_string(), s);
        }
        assert_eq!(
            "Delta^3 S".parse::<NamedScalar>().unwrap(),
            NamedScalar::LaplaceScalar(3)
        );
        assert!("T".parse::<NamedScalar>().is_err());
    }

    #[test]
    fn todd_coefficients() {
        let c = todd_log_coefficients(4);
        assert_eq!(c[1], ratio(-1, 2));
        assert_eq!(c[2], ratio(-1, 24));
        assert_eq!(c[3], ratio(0, 1));
        assert_eq!(c[4], ratio(1, 2880));
    }

    #[test]
    fn fubini_study_curvature() {
        for n in 1..=3 {
            let fs = Potential::fubini_study(n, 8).unwrap();
            let s: GaussRat = named_scalar(&fs, NamedScalar::SCALAR, Cap::NONE).unwrap();
            assert_eq!(s, gauss_int((n * (n + 1)) as i64));
            let lap: GaussRat =
                named_scalar(&fs, NamedScalar::LaplaceScalar(1), Cap::NONE).unwrap();
            assert!(Coeff::is_zero(&lap));
        }
        let fs = Potential::fubini_study(1, 8).unwrap();
        let p1: GaussRat = named_scalar(&fs, NamedScalar::Todd(1), Cap::NONE).unwrap();
        assert_eq!(p1, gauss_int(1));
    }

    #[test]
    fn fubini_study_todd_is_elementary_symmetric() {
        // On projective space the Todd contractions are e_j(1, .., n).
        let fs = Potential::fubini_study(3, 10).unwrap();
        for (j, e) in [(1, 6), (2, 11), (3, 6), (4, 0)] {
            let p: GaussRat = named_scalar(&fs, NamedScalar::Todd(j), Cap::NONE).unwrap();
            assert_eq!(p, gauss_int(e), "P{}", j);
        }
    }

    #[test]
    fn first_todd_is_half_scalar_curvature() {
        let pot = Potential::symbolic(2).unwrap();
        let s: JetPoly = named_scalar(&pot, NamedScalar::SCALAR, Cap::NONE).unwrap();
        let p1: JetPoly = named_scalar(&pot, NamedScalar::Todd(1), Cap::NONE).unwrap();
        assert_eq!(p1.scale(&gauss_int(2)), s);
        let v = |a: &[u8], b: &[u8]| JetPoly::var(JetVar::new(a, b).unwrap(), Cap::NONE);
        let expect = v(&[2, 0], &[2, 0])
            .add(&v(&[0, 2], &[0, 2]))
            .scale(&gauss_int(-4))
            .add(&v(&[1, 1], &[1, 1]).scale(&gauss_int(-2)));
        assert_eq!(s, expect);
    }

    #[test]
    fn second_todd_matches_curvature_norms() {
        let pot = Potential::random_hermitian(2, 4, 11).unwrap();
        let get = |s: NamedScalar| -> GaussRat { named_scalar(&pot, s, Cap::NONE).unwrap() };
        let s = get(NamedScalar::SCALAR);
        let expect = get(NamedScalar::RiemannNorm)
            .sub(&get(NamedScalar::RicciNorm).mul(&gauss_int(4)))
            .add(&s.mul(&s).mul(&gauss_int(3)))
            .mul(&gauss_rat(ratio(1, 24)));
        assert_eq!(get(NamedScalar::Todd(2)), expect);
    }

    #[test]
    fn audit_and_order_guard() {
        let pot = Potential::random_hermitian(2, 4, 3).unwrap();
        let v: Graded =
            named_scalar_audited(&pot, NamedScalar::LaplaceScalar(1), Cap::NONE).unwrap();
        assert_eq!(v.total(), v.part(4));
        assert!(matches!(
            named_scalar_at_order::<GaussRat>(&pot, NamedScalar::DivQ, 6, Cap::NONE),
            Err(JetError::OrderTooSmall { .. })
        ));
    }
}
