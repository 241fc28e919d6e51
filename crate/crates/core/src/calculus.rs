//! Leibniz divergence, the local divergence formula, and the formal test for
//! "integrates to zero".

use std::collections::BTreeMap;

use num::{One, Zero};
use thiserror::Error;

use crate::arith::Rat;
use crate::invariant::{polarize, ContractionMonomial, Invariant, InvariantError, Kind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CalculusError {
    #[error("divergence needs exactly one free slot, found valence {0:?}")]
    Valence((u32, u32)),
    #[error("local divergence needs a multilinear (psi) invariant")]
    NotMultilinear,
    #[error("local divergence needs degree at least 2, found {0}")]
    DegreeTooSmall(usize),
    #[error("factor index {k} outside 1..={sigma}")]
    FactorOutOfRange { k: usize, sigma: usize },
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

/// `∂_b̄ T_b` for valence (1,0) or `∂_b T_b̄` for valence (0,1).
pub fn divergence(t: &Invariant) -> Result<Invariant, CalculusError> {
    let hol = match t.valence() {
        (1, 0) => true,
        (0, 1) => false,
        v => return Err(CalculusError::Valence(v)),
    };
    let mut out = Invariant::scalar_zero(t.kind());
    for (m, c) in t.iter() {
        let s = m.sigma();
        let free = if hol { m.free_hol() } else { m.free_anti() };
        let i = free
            .iter()
            .position(|&f| f == 1)
            .expect("valence (1,0)/(0,1) has one free slot");
        let base = m.flat_edges().to_vec();
        for target in 0..s {
            let mut edges = base.clone();
            if hol {
                edges[i * s + target] += 1;
            } else {
                edges[target * s + i] += 1;
            }
            let mm = ContractionMonomial::from_flat(m.kind(), s, edges, vec![0; s], vec![0; s]);
            out.insert_raw(mm.canonical(), c.clone());
        }
    }
    Ok(out)
}

#[derive(Clone, Copy)]
enum Pending {
    /// Holomorphic derivative whose partner antiholomorphic slot is on `anti`.
    Hol { anti: usize },
    /// Antiholomorphic derivative whose partner holomorphic slot is on `hol`.
    Anti { hol: usize },
    /// A trace: one derivative of each type, both to be distributed.
    Pair,
}

/// Integrates every derivative off factor `k` (1-based) of a scalar
/// multilinear invariant. The result is a psi-invariant in the remaining
/// `σ − 1` functions, which keep their relative order.
pub fn local_divergence(l: &Invariant, k: usize) -> Result<Invariant, CalculusError> {
    if !l.is_scalar() {
        return Err(InvariantError::NotScalar(l.valence()).into());
    }
    if l.is_empty() {
        return Ok(Invariant::scalar_zero(Kind::Psi));
    }
    if l.kind() != Kind::Psi {
        return Err(CalculusError::NotMultilinear);
    }
    let sigma = l.homogeneous_degree().ok_or(InvariantError::MixedDegree)?;
    if sigma < 2 {
        return Err(CalculusError::DegreeTooSmall(sigma));
    }
    if k == 0 || k > sigma {
        return Err(CalculusError::FactorOutOfRange { k, sigma });
    }
    let k0 = k - 1;
    let s = sigma - 1;
    let new_index = |old: usize| if old < k0 { old } else { old - 1 };
    let mut out = Invariant::scalar_zero(Kind::Psi);
    for (m, c) in l.iter() {
        let mut base = vec![0u32; s * s];
        let mut pending = Vec::new();
        for i in 0..sigma {
            for j in 0..sigma {
                let e = m.edge(i, j);
                if e == 0 {
                    continue;
                }
                let item = match (i == k0, j == k0) {
                    (false, false) => {
                        base[new_index(i) * s + new_index(j)] += e;
                        continue;
                    }
                    (true, false) => Pending::Hol { anti: new_index(j) },
                    (false, true) => Pending::Anti { hol: new_index(i) },
                    (true, true) => Pending::Pair,
                };
                pending.extend(std::iter::repeat_n(item, e as usize));
            }
        }
        let sig = m.signature(k0);
        let sign = if (sig.hol + sig.anti) % 2 == 0 {
            Rat::one()
        } else {
            -Rat::one()
        };
        let mut states: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        states.insert(base, sign * c);
        for item in pending {
            let mut next: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
            for (edges, coeff) in &states {
                let mut push = |a: usize, b: usize| {
                    let mut e = edges.clone();
                    e[a * s + b] += 1;
                    *next.entry(e).or_insert_with(Rat::zero) += coeff;
                };
                match item {
                    Pending::Hol { anti } => (0..s).for_each(|h| push(h, anti)),
                    Pending::Anti { hol } => (0..s).for_each(|a| push(hol, a)),
                    Pending::Pair => {
                        for h in 0..s {
                            for a in 0..s {
                                push(h, a);
                            }
                        }
                    }
                }
            }
            states = next;
        }
        for (edges, coeff) in states {
            out.insert_raw(
                ContractionMonomial::from_flat(Kind::Psi, s, edges, vec![0; s], vec![0; s]),
                coeff,
            );
        }
    }
    Ok(out)
}

/// The obstruction to integrating to zero: `Local₁` of the polarized input
/// for degree ≥ 2, the underived part for degree 1, the input itself for
/// degree 0.
pub fn local_residue(l: &Invariant) -> Result<Invariant, CalculusError> {
    if !l.is_scalar() {
        return Err(InvariantError::NotScalar(l.valence()).into());
    }
    if l.is_empty() {
        return Ok(Invariant::scalar_zero(Kind::Psi));
    }
    let sigma = l.homogeneous_degree().ok_or(InvariantError::MixedDegree)?;
    match sigma {
        0 => Ok(l.clone()),
        // Δ^w ψ with w ≥ 1 is a total derivative; only the bare function survives.
        1 => Ok(l.filter(|m| m.weight() == 0)),
        _ => {
            let p = if l.kind() == Kind::Phi {
                polarize(l)?
            } else {
                l.clone()
            };
            local_divergence(&p, 1)
        }
    }
}

/// Formal co-exactness test.
pub fn integrates_to_zero(l: &Invariant) -> Result<bool, CalculusError> {
    Ok(local_residue(l)?.is_empty())
}
