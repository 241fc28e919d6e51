//! Chern polynomials `I_{k₁…k_m}(φ)` at the level of contraction monomials,
//! and the max-height reduction of order-zero invariants onto them.

use std::collections::BTreeMap;
use std::fmt;

use num::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{rat, Rat};
use crate::invariant::{
    permutation_sign, permutations, ContractionMonomial, Invariant, InvariantError, Kind,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChernError {
    #[error("partition parts must be positive")]
    ZeroPart,
    #[error("cannot parse partition `{0}`")]
    Parse(String),
    #[error("chern reduction needs every factor of type (2,2); found {0}")]
    NotOrderZero(String),
    #[error("chern reduction needs a phi-invariant")]
    NotPhi,
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

/// Non-increasing positive parts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Sorts the parts into non-increasing order.
    pub fn new(mut parts: Vec<u32>) -> Result<Self, ChernError> {
        if parts.contains(&0) {
            return Err(ChernError::ZeroPart);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn degree(&self) -> usize {
        self.parts.iter().sum::<u32>() as usize
    }

    /// All partitions of `k` in reverse lexicographic order (`[k]` first).
    pub fn all(k: usize) -> Vec<Partition> {
        fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition { parts: cur.clone() });
                return;
            }
            for p in (1..=rest.min(max)).rev() {
                cur.push(p);
                rec(rest - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(k as u32, k as u32, &mut Vec::new(), &mut out);
        out
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = ChernError;
    fn try_from(v: Vec<u32>) -> Result<Self, Self::Error> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl std::str::FromStr for Partition {
    type Err = ChernError;
    /// Parses `"2,1,1"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| ChernError::Parse(s.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Partition::new(parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", s.join(","))
    }
}

/// `I_p(φ)`: contraction of `ch_{k₁}∧…∧ch_{k_m}` divided by `k!`.
///
/// Factor `i` contributes the curvature-form entry `F_{a_i ā_{i+1}}` of its
/// cycle (one edge to the next factor of the cycle, a trace for a 1-cycle) and
/// the form slots `dz^c∧dz̄^ē`; contracting the wedge product pairs the
/// holomorphic form slot of factor `i` with the antiholomorphic one of factor
/// `ρ(i)`, weighted by `sgn ρ`.
pub fn chern_invariant(p: &Partition) -> Invariant {
    let k = p.degree();
    let mut next = vec![0usize; k];
    let mut start = 0;
    for &len in p.parts() {
        let len = len as usize;
        for i in 0..len {
            next[start + i] = start + (i + 1) % len;
        }
        start += len;
    }
    let mut base = vec![0u32; k * k];
    for i in 0..k {
        base[next[i] * k + i] += 1;
    }
    let mut out = Invariant::scalar_zero(Kind::Phi);
    for rho in permutations(k) {
        let mut edges = base.clone();
        for i in 0..k {
            edges[i * k + rho[i]] += 1;
        }
        let m = ContractionMonomial::from_flat(Kind::Phi, k, edges, vec![0; k], vec![0; k]);
        out.insert_raw(m.canonical(), rat(permutation_sign(&rho)));
    }
    out
}

/// `[I_p for p in Partition::all(σ)]`.
pub fn chern_basis(sigma: usize) -> Vec<(Partition, Invariant)> {
    Partition::all(sigma)
        .into_iter()
        .map(|p| {
            let i = chern_invariant(&p);
            (p, i)
        })
        .collect()
}

/// Number of traces of a monomial.
pub fn height(m: &ContractionMonomial) -> u32 {
    m.trace_count()
}

fn all_factors_traced(m: &ContractionMonomial) -> bool {
    (0..m.sigma()).all(|i| m.factor_traces(i) > 0)
}

/// Terms with a trace on every factor that attain the maximal height among such terms.
pub fn max_height_terms(l: &Invariant) -> Invariant {
    let max = l
        .iter()
        .filter(|(m, _)| all_factors_traced(m))
        .map(|(m, _)| height(m))
        .max();
    match max {
        Some(h) => l.filter(|m| all_factors_traced(m) && height(m) == h),
        None => Invariant::zero(l.kind(), l.valence()),
    }
}

/// Cycle type of the trace-arc graph of an order-zero monomial with a trace
/// on every factor: factor `i` links to the factor carrying the
/// antiholomorphic partner of its non-trace holomorphic index.
pub fn cycle_partition(m: &ContractionMonomial) -> Partition {
    let s = m.sigma();
    let succ: Vec<usize> = (0..s)
        .map(|i| {
            if m.edge(i, i) >= 2 {
                i
            } else {
                (0..s).find(|&j| j != i && m.edge(i, j) > 0).unwrap_or(i)
            }
        })
        .collect();
    let mut seen = vec![false; s];
    let mut parts = Vec::new();
    for i in 0..s {
        if seen[i] {
            continue;
        }
        let mut len = 0;
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            j = succ[j];
            len += 1;
        }
        parts.push(len);
    }
    Partition::new(parts).expect("cycle lengths are positive")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChernReduction {
    pub chern: BTreeMap<Partition, Rat>,
    pub remainder: Invariant,
}

impl ChernReduction {
    /// `Σ c_p I_p + remainder`.
    pub fn reconstruct(&self) -> Invariant {
        let mut out = self.remainder.clone();
        for (p, c) in &self.chern {
            out.add_scaled(&chern_invariant(p), c)
                .expect("compatible scalar phi-invariants");
        }
        out
    }
}

/// Peels Chern polynomials off an order-zero invariant until no term has a
/// trace on every factor.
pub fn chern_reduce(l: &Invariant) -> Result<ChernReduction, ChernError> {
    if !l.is_scalar() {
        return Err(InvariantError::NotScalar(l.valence()).into());
    }
    if l.kind() != Kind::Phi && !l.is_empty() {
        return Err(ChernError::NotPhi);
    }
    for (m, _) in l.iter() {
        if m.signatures().iter().any(|s| s.hol != 2 || s.anti != 2) {
            return Err(ChernError::NotOrderZero(m.to_string()));
        }
    }
    let mut rem = l.clone();
    let mut chern: BTreeMap<Partition, Rat> = BTreeMap::new();
    let mut cache: BTreeMap<Partition, Invariant> = BTreeMap::new();
    loop {
        let top = max_height_terms(&rem);
        // BTreeMap order makes the first key the canonically smallest.
        let Some((m, c)) = top.iter().next() else {
            break;
        };
        let p = cycle_partition(m);
        let ip = cache
            .entry(p.clone())
            .or_insert_with(|| chern_invariant(&p));
        let lead = ip.coeff(m);
        debug_assert!(!lead.is_zero());
        let factor = c / &lead;
        rem.add_scaled(ip, &-factor.clone())?;
        let slot = chern.entry(p.clone()).or_insert_with(Rat::zero);
        *slot += factor;
        if slot.is_zero() {
            chern.remove(&p);
        }
    }
    Ok(ChernReduction {
        chern,
        remainder: rem,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::integrates_to_zero;

    fn mono(edges: Vec<Vec<u32>>) -> ContractionMonomial {
        ContractionMonomial::scalar(Kind::Phi, edges).unwrap()
    }

    fn part(p: &[u32]) -> Partition {
        Partition::new(p.to_vec()).unwrap()
    }

    fn combo(terms: &[(Vec<Vec<u32>>, i64)]) -> Invariant {
        Invariant::from_terms(
            Kind::Phi,
            (0, 0),
            terms.iter().map(|(e, c)| (mono(e.clone()), rat(*c))),
        )
        .unwrap()
    }

    #[test]
    fn closed_forms() {
        assert_eq!(chern_invariant(&part(&[1])), combo(&[(vec![vec![2]], 1)]));
        assert_eq!(
            chern_invariant(&part(&[2])),
            combo(&[
                (vec![vec![1, 1], vec![1, 1]], 1),
                (vec![vec![0, 2], vec![2, 0]], -1)
            ])
        );
        assert_eq!(
            chern_invariant(&part(&[1, 1])),
            combo(&[
                (vec![vec![2, 0], vec![0, 2]], 1),
                (vec![vec![1, 1], vec![1, 1]], -1)
            ])
        );
    }

    #[test]
    fn basis_sizes_and_order() {
        assert_eq!(chern_basis(1).len(), 1);
        let b2: Vec<Partition> = chern_basis(2).into_iter().map(|(p, _)| p).collect();
        assert_eq!(b2, vec![part(&[2]), part(&[1, 1])]);
        assert_eq!(chern_basis(3).len(), 3);
        assert_eq!(Partition::all(4).len(), 5);
    }

    #[test]
    fn chern_polynomials_integrate_to_zero() {
        for s in 1..=4 {
            for (p, i) in chern_basis(s) {
                assert!(integrates_to_zero(&i).unwrap(), "{}", p);
            }
        }
    }

    #[test]
    fn k_cycle_is_unique_top_term() {
        for k in 1..=4 {
            let ik = chern_invariant(&part(&[k]));
            let top = max_height_terms(&ik);
            assert_eq!(top.len(), 1);
            let (m, c) = top.iter().next().unwrap();
            assert_eq!(*c, rat(1));
            assert_eq!(height(m), if k == 1 { 2 } else { k });
            assert_eq!(cycle_partition(m), part(&[k]));
        }
    }

    #[test]
    fn heights() {
        assert_eq!(height(&mono(vec![vec![2, 0], vec![0, 2]])), 4);
        assert_eq!(height(&mono(vec![vec![1, 1], vec![1, 1]])), 2);
        assert_eq!(height(&mono(vec![vec![0, 2], vec![2, 0]])), 0);
    }

    #[test]
    fn reduce_examples() {
        let r = chern_reduce(&chern_invariant(&part(&[1, 1]))).unwrap();
        assert_eq!(r.chern, BTreeMap::from([(part(&[1, 1]), rat(1))]));
        assert!(r.remainder.is_empty());

        let cross = combo(&[(vec![vec![1, 1], vec![1, 1]], 1)]);
        let r = chern_reduce(&cross).unwrap();
        assert_eq!(r.chern, BTreeMap::from([(part(&[2]), rat(1))]));
        assert_eq!(r.remainder, combo(&[(vec![vec![0, 2], vec![2, 0]], 1)]));

        let tf = combo(&[(vec![vec![0, 2], vec![2, 0]], 1)]);
        let r = chern_reduce(&tf).unwrap();
        assert!(r.chern.is_empty());
        assert_eq!(r.remainder, tf);
    }

    #[test]
    fn reduce_rejects_higher_order() {
        let l = combo(&[(vec![vec![3]], 1)]);
        assert!(matches!(chern_reduce(&l), Err(ChernError::NotOrderZero(_))));
    }

    #[test]
    fn partition_parsing() {
        assert_eq!("1,2".parse::<Partition>().unwrap(), part(&[2, 1]));
        assert!("2,0".parse::<Partition>().is_err());
        assert!("a".parse::<Partition>().is_err());
        assert_eq!(part(&[2, 1]).to_string(), "[2,1]");
    }
}
