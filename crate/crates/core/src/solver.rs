//! Decomposition of co-exact invariants into Chern polynomials plus
//! divergences, found by exact linear algebra.

use std::collections::{BTreeMap, BTreeSet};

use num::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{fmt_rat, parse_rat, Rat};
use crate::calculus::{divergence, local_residue, CalculusError};
use crate::chern::{chern_basis, chern_invariant, Partition};
use crate::invariant::{
    canonicalize, ContractionMonomial, Invariant, InvariantError, Kind, RestrictionList,
};
use crate::linalg::{eliminate, SparseVec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("invariant does not integrate to zero; local residue: {residue}")]
    NotCoexact { residue: Invariant },
    #[error("no decomposition found in weight {weight}, degree {degree}")]
    Infeasible { weight: u32, degree: usize },
    #[error("decomposition needs a phi-invariant")]
    NotPhi,
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

/// Compositions of `total` into `parts` non-negative summands, lexicographic.
pub fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(rest: u32, parts: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            cur.push(rest);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for v in 0..=rest {
            cur.push(v);
            rec(rest - v, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(vec![]);
        }
        return out;
    }
    rec(total, parts, &mut Vec::new(), &mut out);
    out
}

/// Every canonical `l`-acceptable phi-monomial of weight `w`, degree `sigma`
/// and free-slot valence `valence`, sorted.
pub fn enumerate_monomials(
    w: u32,
    sigma: usize,
    l: &RestrictionList,
    valence: (u32, u32),
) -> Result<Vec<ContractionMonomial>, InvariantError> {
    if l.len() != sigma {
        return Err(InvariantError::RestrictionLength {
            expected: sigma,
            got: l.len(),
        });
    }
    let hol_free = compositions(valence.0, sigma);
    let anti_free = compositions(valence.1, sigma);
    let mut found = BTreeSet::new();
    for edges in compositions(w, sigma * sigma) {
        for fh in &hol_free {
            for fa in &anti_free {
                let m = ContractionMonomial::from_flat(
                    Kind::Phi,
                    sigma,
                    edges.clone(),
                    fh.clone(),
                    fa.clone(),
                );
                if m.is_acceptable(l)? {
                    found.insert(m.canonical());
                }
            }
        }
    }
    Ok(found.into_iter().collect())
}

/// `L = Σ chern_p·I_p + ∂_b̄ T_b + ∂_b T_b̄`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub chern: BTreeMap<Partition, Rat>,
    pub t_hol: Invariant,
    pub t_anti: Invariant,
}

impl Default for Decomposition {
    fn default() -> Self {
        Decomposition {
            chern: BTreeMap::new(),
            t_hol: Invariant::zero(Kind::Phi, (1, 0)),
            t_anti: Invariant::zero(Kind::Phi, (0, 1)),
        }
    }
}

impl Decomposition {
    pub fn reconstruct(&self) -> Result<Invariant, SolverError> {
        let mut out = Invariant::scalar_zero(Kind::Phi);
        for (p, c) in &self.chern {
            out.add_scaled(&chern_invariant(p), c)?;
        }
        out = out.add(&divergence(&self.t_hol)?)?;
        out = out.add(&divergence(&self.t_anti)?)?;
        Ok(out)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&DecompositionJson::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, String> {
        let raw: DecompositionJson = serde_json::from_str(s).map_err(|e| e.to_string())?;
        let mut chern = BTreeMap::new();
        for t in raw.chern {
            chern.insert(t.partition, parse_rat(&t.coeff).map_err(|e| e.to_string())?);
        }
        Ok(Decomposition {
            chern,
            t_hol: raw.t_hol,
            t_anti: raw.t_anti,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct ChernTermJson {
    partition: Partition,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct DecompositionJson {
    chern: Vec<ChernTermJson>,
    t_hol: Invariant,
    t_anti: Invariant,
}

impl From<&Decomposition> for DecompositionJson {
    fn from(d: &Decomposition) -> Self {
        DecompositionJson {
            chern: d
                .chern
                .iter()
                .map(|(p, c)| ChernTermJson {
                    partition: p.clone(),
                    coeff: fmt_rat(c),
                })
                .collect(),
            t_hol: d.t_hol.clone(),
            t_anti: d.t_anti.clone(),
        }
    }
}

/// Exact check that `d` reproduces `l`.
pub fn verify_decomposition(l: &Invariant, d: &Decomposition) -> bool {
    match d.reconstruct() {
        Ok(r) => {
            let lhs = canonicalize(l);
            if lhs.is_empty() {
                return r.is_empty();
            }
            lhs.kind() == Kind::Phi && r.sub(&lhs).is_ok_and(|x| x.is_empty())
        }
        Err(_) => false,
    }
}

/// Finds a Chern-plus-divergence witness for a scalar phi-invariant that
/// integrates to zero. Inhomogeneous input is solved per `(weight, degree)`
/// block. `restrict` overrides the default all-`(2,2)` restriction list and
/// must match the degree of every block.
pub fn decompose(
    l: &Invariant,
    restrict: Option<&RestrictionList>,
) -> Result<Decomposition, SolverError> {
    if !l.is_scalar() {
        return Err(InvariantError::NotScalar(l.valence()).into());
    }
    if l.is_empty() {
        return Ok(Decomposition::default());
    }
    if l.kind() != Kind::Phi {
        return Err(SolverError::NotPhi);
    }
    let l = canonicalize(l);
    let mut out = Decomposition::default();
    for ((w, sigma), block) in l.split_by_weight_degree() {
        let residue = local_residue(&block)?;
        if !residue.is_empty() {
            return Err(SolverError::NotCoexact { residue });
        }
        let list = match restrict {
            Some(r) => {
                if r.len() != sigma {
                    return Err(InvariantError::RestrictionLength {
                        expected: sigma,
                        got: r.len(),
                    }
                    .into());
                }
                r.clone()
            }
            None => RestrictionList::default_for(sigma),
        };
        let d = solve_block(&block, w, sigma, &list)?;
        for (p, c) in d.chern {
            *out.chern.entry(p).or_insert_with(Rat::zero) += c;
        }
        out.t_hol = out.t_hol.add(&d.t_hol)?;
        out.t_anti = out.t_anti.add(&d.t_anti)?;
    }
    out.chern.retain(|_, c| !c.is_zero());
    Ok(out)
}

enum Column {
    Chern(Partition),
    Hol(ContractionMonomial),
    Anti(ContractionMonomial),
}

fn solve_block(
    block: &Invariant,
    w: u32,
    sigma: usize,
    list: &RestrictionList,
) -> Result<Decomposition, SolverError> {
    let mut columns: Vec<(Column, Invariant)> = Vec::new();
    if w as usize == 2 * sigma {
        for (p, i) in chern_basis(sigma) {
            columns.push((Column::Chern(p), i));
        }
    }
    if w > 0 {
        for m in enumerate_monomials(w - 1, sigma, list, (1, 0))? {
            let d = divergence(&Invariant::monomial(m.clone()))?;
            columns.push((Column::Hol(m), d));
        }
        for m in enumerate_monomials(w - 1, sigma, list, (0, 1))? {
            let d = divergence(&Invariant::monomial(m.clone()))?;
            columns.push((Column::Anti(m), d));
        }
    }
    let mut row_of: BTreeMap<ContractionMonomial, usize> = BTreeMap::new();
    for (_, inv) in &columns {
        for (m, _) in inv.iter() {
            let next = row_of.len();
            row_of.entry(m.clone()).or_insert(next);
        }
    }
    for (m, _) in block.iter() {
        if !row_of.contains_key(m) {
            return Err(SolverError::Infeasible {
                weight: w,
                degree: sigma,
            });
        }
    }
    let mut rows: Vec<SparseVec> = vec![SparseVec::new(); row_of.len()];
    for (c, (_, inv)) in columns.iter().enumerate() {
        for (m, v) in inv.iter() {
            rows[row_of[m]].insert(c, v.clone());
        }
    }
    let mut rhs = vec![Rat::zero(); row_of.len()];
    for (m, v) in block.iter() {
        rhs[row_of[m]] = v.clone();
    }
    let x =
        eliminate(columns.len(), rows, rhs)
            .basic_solution()
            .ok_or(SolverError::Infeasible {
                weight: w,
                degree: sigma,
            })?;
    let mut d = Decomposition::default();
    for ((col, _), v) in columns.into_iter().zip(x) {
        if v.is_zero() {
            continue;
        }
        match col {
            Column::Chern(p) => {
                d.chern.insert(p, v);
            }
            Column::Hol(m) => d.t_hol.add_term(m, v)?,
            Column::Anti(m) => d.t_anti.add_term(m, v)?,
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::chern::chern_reduce;

    fn mono(edges: Vec<Vec<u32>>) -> ContractionMonomial {
        ContractionMonomial::scalar(Kind::Phi, edges).unwrap()
    }

    #[test]
    fn enumeration_small_cases() {
        let d = |s| RestrictionList::default_for(s);
        assert_eq!(
            enumerate_monomials(2, 1, &d(1), (0, 0)).unwrap(),
            vec![mono(vec![vec![2]])]
        );
        assert_eq!(
            enumerate_monomials(3, 1, &d(1), (0, 0)).unwrap(),
            vec![mono(vec![vec![3]])]
        );
        let two = enumerate_monomials(4, 2, &d(2), (0, 0)).unwrap();
        let expected: BTreeSet<_> = [
            mono(vec![vec![2, 0], vec![0, 2]]),
            mono(vec![vec![1, 1], vec![1, 1]]),
            mono(vec![vec![0, 2], vec![2, 0]]),
        ]
        .into_iter()
        .map(|m| m.canonical())
        .collect();
        assert_eq!(two.into_iter().collect::<BTreeSet<_>>(), expected);
        assert!(enumerate_monomials(1, 1, &d(1), (0, 0)).unwrap().is_empty());
    }

    #[test]
    fn enumeration_counts_free_slots() {
        assert!(
            enumerate_monomials(1, 1, &RestrictionList::default_for(1), (1, 0))
                .unwrap()
                .is_empty()
        );
        let ones = enumerate_monomials(2, 1, &RestrictionList::default_for(1), (1, 0)).unwrap();
        assert_eq!(ones.len(), 1);
        assert_eq!(ones[0].signature(0).hol, 3);
    }

    #[test]
    fn laplacian_squared_of_phi_is_first_chern() {
        let d = decompose(&Invariant::monomial(mono(vec![vec![2]])), None).unwrap();
        assert_eq!(
            d.chern,
            BTreeMap::from([(Partition::new(vec![1]).unwrap(), rat(1))])
        );
        assert!(d.t_hol.is_empty() && d.t_anti.is_empty());
    }

    #[test]
    fn divergence_round_trip() {
        let t = ContractionMonomial::new(
            Kind::Phi,
            vec![vec![0, 2], vec![2, 0]],
            vec![1, 0],
            vec![0, 0],
        )
        .unwrap();
        let l = divergence(&Invariant::monomial(t)).unwrap();
        let d = decompose(&l, None).unwrap();
        assert!(d.chern.is_empty());
        assert!(verify_decomposition(&l, &d));
    }

    #[test]
    fn non_coexact_is_rejected() {
        let l = Invariant::monomial(mono(vec![vec![2, 0], vec![0, 2]]));
        match decompose(&l, None) {
            Err(SolverError::NotCoexact { residue }) => assert!(!residue.is_empty()),
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn verification_detects_perturbation() {
        let l = chern_invariant(&Partition::new(vec![2]).unwrap());
        let mut d = decompose(&l, None).unwrap();
        assert!(verify_decomposition(&l, &d));
        let first = d.chern.keys().next().cloned().unwrap();
        *d.chern.get_mut(&first).unwrap() += rat(1);
        assert!(!verify_decomposition(&l, &d));
        assert!(verify_decomposition(
            &Invariant::scalar_zero(Kind::Phi),
            &Decomposition::default()
        ));
    }

    #[test]
    fn order_zero_matches_chern_reduce() {
        let mut l = chern_invariant(&Partition::new(vec![2, 1]).unwrap()).scale(&rat(3));
        l.add_scaled(
            &chern_invariant(&Partition::new(vec![3]).unwrap()),
            &rat(-2),
        )
        .unwrap();
        let d = decompose(&l, None).unwrap();
        let r = chern_reduce(&l).unwrap();
        assert!(r.remainder.is_empty());
        assert_eq!(d.chern, r.chern);
        assert!(d.t_hol.is_empty() && d.t_anti.is_empty());
    }

    #[test]
    fn inhomogeneous_input_is_split() {
        let mut l = Invariant::monomial(mono(vec![vec![2]]));
        l.add_term(mono(vec![vec![5]]), rat(2)).unwrap();
        let d = decompose(&l, None).unwrap();
        assert!(verify_decomposition(&l, &d));
    }

    #[test]
    fn json_round_trip() {
        let t = ContractionMonomial::new(
            Kind::Phi,
            vec![vec![1, 1], vec![2, 0]],
            vec![0, 0],
            vec![0, 1],
        )
        .unwrap();
        let mut l = divergence(&Invariant::monomial(t)).unwrap();
        l.add_scaled(
            &chern_invariant(&Partition::new(vec![1, 1]).unwrap()),
            &rat(5),
        )
        .unwrap();
        let d = decompose(&l, None).unwrap();
        let back = Decomposition::from_json(&d.to_json_pretty()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(2, 3).len(), 6);
        assert_eq!(compositions(0, 0), vec![Vec::<u32>::new()]);
        assert!(compositions(1, 0).is_empty());
    }
}
