//! Exact integration of invariants over the torus `[0, 2π]^{2n}` for
//! trigonometric-polynomial inputs.
//!
//! A mode `e^{i(k·x + l·y)}` (with `z_a = x_a + i y_a`) is an eigenfunction of
//! every `∂_a` and `∂_ā`, so each contraction between factors carrying modes
//! `ξ` and `η` contributes the scalar `D(ξ, η) = −¼ Σ_a (k_a − i l_a)(k'_a + i l'_a)`
//! and the integral keeps only assignments whose modes sum to zero. Values are
//! reported in units of `(2π)^{2n}`. Integrating by parts on the torus has no
//! boundary terms, exactly as for compactly supported functions on ℂⁿ.

use std::collections::BTreeMap;

use num::{BigInt, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arith::{gauss, ratio, GaussRat, Rat};
use crate::invariant::{ContractionMonomial, Invariant, Kind};

pub const DEFAULT_SUPPORT_CAP: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("only scalar invariants can be integrated, found valence {0:?}")]
    FreeIndices((u32, u32)),
    #[error("mode support of size {size} exceeds the cap {cap}")]
    SupportTooLarge { size: usize, cap: usize },
    #[error("functions live in different dimensions")]
    DimensionMismatch,
    #[error("expected {expected} functions for a multilinear invariant, got {got}")]
    FunctionCount { expected: usize, got: usize },
    #[error("mode vector has length {got}, expected {expected}")]
    ModeLength { expected: usize, got: usize },
    #[error("coefficients violate conjugate symmetry at mode {0:?}")]
    NotReal(Vec<i32>),
}

/// Finite sum `Σ c_ξ e^{i(k·x + l·y)}` with `ξ = (k₁..k_n, l₁..l_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierFunction {
    n: usize,
    modes: BTreeMap<Vec<i32>, GaussRat>,
}

impl FourierFunction {
    /// Builds a real-valued function; every mode must be paired with the
    /// conjugate coefficient at the negated mode.
    pub fn new(n: usize, modes: BTreeMap<Vec<i32>, GaussRat>) -> Result<Self, OracleError> {
        let f = Self::new_unchecked(n, modes)?;
        for (xi, c) in &f.modes {
            let neg: Vec<i32> = xi.iter().map(|v| -v).collect();
            let partner = f.modes.get(&neg).cloned().unwrap_or_else(GaussRat::zero);
            if partner != c.conj() {
                return Err(OracleError::NotReal(xi.clone()));
            }
        }
        Ok(f)
    }

    /// Complex-valued function (no symmetry requirement); useful for
    /// multilinearity checks.
    pub fn new_unchecked(
        n: usize,
        modes: BTreeMap<Vec<i32>, GaussRat>,
    ) -> Result<Self, OracleError> {
        for xi in modes.keys() {
            if xi.len() != 2 * n {
                return Err(OracleError::ModeLength {
                    expected: 2 * n,
                    got: xi.len(),
                });
            }
        }
        let modes = modes.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(FourierFunction { n, modes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modes(&self) -> &BTreeMap<Vec<i32>, GaussRat> {
        &self.modes
    }

    pub fn support_size(&self) -> usize {
        self.modes.len()
    }

    pub fn is_real(&self) -> bool {
        self.modes.iter().all(|(xi, c)| {
            let neg: Vec<i32> = xi.iter().map(|v| -v).collect();
            self.modes.get(&neg).is_some_and(|p| *p == c.conj())
        })
    }

    pub fn add(&self, other: &FourierFunction) -> FourierFunction {
        let mut modes = self.modes.clone();
        for (xi, c) in &other.modes {
            *modes.entry(xi.clone()).or_insert_with(GaussRat::zero) += c;
        }
        modes.retain(|_, c| !c.is_zero());
        FourierFunction { n: self.n, modes }
    }

    pub fn scale(&self, s: &GaussRat) -> FourierFunction {
        let modes = self
            .modes
            .iter()
            .map(|(k, c)| (k.clone(), c * s))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        FourierFunction { n: self.n, modes }
    }
}

/// `D(ξ, η)`: a holomorphic derivative on mode `ξ` contracted with an
/// antiholomorphic derivative on mode `η`.
pub fn pairing(xi: &[i32], eta: &[i32]) -> GaussRat {
    let n = xi.len() / 2;
    let mut acc = GaussRat::zero();
    for a in 0..n {
        let h = gauss(
            Rat::from_integer(BigInt::from(xi[a])),
            Rat::from_integer(BigInt::from(-xi[n + a])),
        );
        let b = gauss(
            Rat::from_integer(BigInt::from(eta[a])),
            Rat::from_integer(BigInt::from(eta[n + a])),
        );
        acc += h * b;
    }
    acc * gauss(ratio(-1, 4), Rat::zero())
}

/// `∫ L` in units of `(2π)^{2n}`. Phi-invariants take one function; psi-
/// invariants take one function per factor.
pub fn eval_integral(
    l: &Invariant,
    fs: &[FourierFunction],
    cap: usize,
) -> Result<GaussRat, OracleError> {
    if !l.is_scalar() {
        return Err(OracleError::FreeIndices(l.valence()));
    }
    if fs.iter().any(|f| f.n != fs[0].n) {
        return Err(OracleError::DimensionMismatch);
    }
    for f in fs {
        if f.support_size() > cap {
            return Err(OracleError::SupportTooLarge {
                size: f.support_size(),
                cap,
            });
        }
    }
    let mut by_degree: BTreeMap<usize, Vec<(&ContractionMonomial, &Rat)>> = BTreeMap::new();
    for (m, c) in l.iter() {
        by_degree.entry(m.sigma()).or_default().push((m, c));
    }
    let mut total = GaussRat::zero();
    for (sigma, terms) in by_degree {
        let funcs: Vec<&FourierFunction> = match l.kind() {
            Kind::Phi => {
                if fs.len() != 1 {
                    return Err(OracleError::FunctionCount {
                        expected: 1,
                        got: fs.len(),
                    });
                }
                vec![&fs[0]; sigma]
            }
            Kind::Psi => {
                if fs.len() != sigma {
                    return Err(OracleError::FunctionCount {
                        expected: sigma,
                        got: fs.len(),
                    });
                }
                fs.iter().collect()
            }
        };
        total += eval_degree(&terms, &funcs);
    }
    Ok(total)
}

/// Convenience wrapper for a single function.
pub fn eval_phi(l: &Invariant, f: &FourierFunction) -> Result<GaussRat, OracleError> {
    eval_integral(l, std::slice::from_ref(f), DEFAULT_SUPPORT_CAP)
}

fn eval_degree(terms: &[(&ContractionMonomial, &Rat)], funcs: &[&FourierFunction]) -> GaussRat {
    let sigma = funcs.len();
    if sigma == 0 {
        return terms.iter().fold(GaussRat::zero(), |acc, (_, c)| {
            acc + gauss((*c).clone(), Rat::zero())
        });
    }
    let n2 = 2 * funcs[0].n;
    let supports: Vec<Vec<(&Vec<i32>, &GaussRat)>> =
        funcs.iter().map(|f| f.modes.iter().collect()).collect();
    let mut total = GaussRat::zero();
    let mut chosen: Vec<usize> = Vec::with_capacity(sigma);
    let mut partial = vec![0i32; n2];
    assign(&supports, terms, &mut chosen, &mut partial, &mut total);
    total
}

fn assign(
    supports: &[Vec<(&Vec<i32>, &GaussRat)>],
    terms: &[(&ContractionMonomial, &Rat)],
    chosen: &mut Vec<usize>,
    partial: &mut Vec<i32>,
    total: &mut GaussRat,
) {
    let depth = chosen.len();
    let sigma = supports.len();
    if depth + 1 == sigma {
        let need: Vec<i32> = partial.iter().map(|v| -v).collect();
        let Ok(last) =
            supports[depth].binary_search_by(|(xi, _)| xi.as_slice().cmp(need.as_slice()))
        else {
            return;
        };
        chosen.push(last);
        let modes: Vec<&Vec<i32>> = chosen
            .iter()
            .enumerate()
            .map(|(i, &k)| supports[i][k].0)
            .collect();
        let weight = chosen
            .iter()
            .enumerate()
            .fold(GaussRat::one(), |acc, (i, &k)| acc * supports[i][k].1);
        let mut d = vec![GaussRat::zero(); sigma * sigma];
        for i in 0..sigma {
            for j in 0..sigma {
                d[i * sigma + j] = pairing(modes[i], modes[j]);
            }
        }
        let mut sum = GaussRat::zero();
        for (m, c) in terms {
            let mut v = gauss((*c).clone(), Rat::zero());
            for i in 0..sigma {
                for j in 0..sigma {
                    let e = m.edge(i, j);
                    if e > 0 {
                        v *= num::pow(d[i * sigma + j].clone(), e as usize);
                    }
                }
            }
            sum += v;
        }
        *total += weight * sum;
        chosen.pop();
        return;
    }
    for (k, (xi, _)) in supports[depth].iter().enumerate() {
        chosen.push(k);
        for (p, v) in partial.iter_mut().zip(xi.iter()) {
            *p += v;
        }
        assign(supports, terms, chosen, partial, total);
        for (p, v) in partial.iter_mut().zip(xi.iter()) {
            *p -= v;
        }
        chosen.pop();
    }
}

fn random_gauss(rng: &mut ChaCha8Rng) -> GaussRat {
    let r = |rng: &mut ChaCha8Rng| {
        let num: i64 = rng.gen_range(-6..=6);
        let den: i64 = rng.gen_range(1..=4);
        ratio(num, den)
    };
    let re = r(rng);
    let im = r(rng);
    gauss(re, im)
}

/// Deterministic pseudo-random real trigonometric polynomial.
///
/// A few random generator modes in the box `[-mode_bound, mode_bound]^{2n}`
/// are closed under negation and pairwise sums/differences that stay in the
/// box, so that many mode assignments sum to zero; coefficients are small
/// Gaussian rationals with conjugate symmetry and the zero mode is real.
pub fn random_phi(n: usize, mode_bound: i32, seed: u64) -> FourierFunction {
    assert!(mode_bound >= 1, "mode_bound must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let in_box = |v: &Vec<i32>| v.iter().all(|x| x.abs() <= mode_bound);
    let mut gens: Vec<Vec<i32>> = Vec::new();
    while gens.len() < 3 {
        let v: Vec<i32> = (0..2 * n)
            .map(|_| rng.gen_range(-mode_bound..=mode_bound))
            .collect();
        if v.iter().any(|&x| x != 0) && !gens.contains(&v) {
            gens.push(v);
        }
    }
    let mut support: Vec<Vec<i32>> = gens.clone();
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            for sign in [1, -1] {
                let v: Vec<i32> = gens[i]
                    .iter()
                    .zip(&gens[j])
                    .map(|(a, b)| a + sign * b)
                    .collect();
                if in_box(&v) && v.iter().any(|&x| x != 0) {
                    support.push(v);
                }
            }
        }
    }
    let mut modes: BTreeMap<Vec<i32>, GaussRat> = BTreeMap::new();
    for v in support {
        let neg: Vec<i32> = v.iter().map(|x| -x).collect();
        if modes.contains_key(&v) || modes.contains_key(&neg) {
            continue;
        }
        let mut c = random_gauss(&mut rng);
        if c.is_zero() {
            c = GaussRat::one();
        }
        modes.insert(neg, c.conj());
        modes.insert(v, c);
    }
    let zero = random_gauss(&mut rng).re;
    if !zero.is_zero() {
        modes.insert(vec![0; 2 * n], gauss(zero, Rat::zero()));
    }
    FourierFunction { n, modes }
}
