//! Contraction monomials and invariants built from them.
//!
//! A factor `∂^(A,B)ψ` is totally symmetric in its holomorphic slots and in its
//! antiholomorphic slots, so a complete or partial contraction of σ factors is
//! determined by the multiplicity matrix `e[i][j]` (holomorphic index on
//! factor `i` paired with an antiholomorphic index on factor `j`) together with
//! the number of free slots of each type on every factor.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{BigInt, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{fmt_rat, parse_rat, ParseRatError, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error("edge matrix must be square: row {row} has {len} entries, expected {sigma}")]
    NotSquare {
        row: usize,
        len: usize,
        sigma: usize,
    },
    #[error("free slot vectors must have length {sigma}")]
    FreeLength { sigma: usize },
    #[error("declared sigma {declared} does not match edge matrix size {actual}")]
    SigmaMismatch { declared: usize, actual: usize },
    #[error("restriction list has {got} entries but the monomial has {expected} factors")]
    RestrictionLength { expected: usize, got: usize },
    #[error("restriction entry ({0},{1}) outside {{0,1,2}}")]
    RestrictionValue(u8, u8),
    #[error("kind mismatch: expected {expected}, found {found}")]
    KindMismatch { expected: Kind, found: Kind },
    #[error("valence mismatch: expected {expected:?}, found {found:?}")]
    ValenceMismatch {
        expected: (u32, u32),
        found: (u32, u32),
    },
    #[error("operation requires a scalar invariant, found valence {0:?}")]
    NotScalar((u32, u32)),
    #[error("invariant is not homogeneous in degree")]
    MixedDegree,
    #[error("invalid coefficient: {0}")]
    Coeff(#[from] ParseRatError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Every factor is the same function φ; factors are unordered.
    Phi,
    /// Factor `i` is the labelled function ψ^(i+1); factor order is fixed.
    Psi,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Phi => write!(f, "phi"),
            Kind::Psi => write!(f, "psi"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FactorSignature {
    pub hol: u32,
    pub anti: u32,
}

/// Per-factor minimum signatures `(α_j, β_j)` with entries in `{0,1,2}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(u8, u8)>", into = "Vec<(u8, u8)>")]
pub struct RestrictionList {
    entries: Vec<(u8, u8)>,
}

impl RestrictionList {
    pub fn new(entries: Vec<(u8, u8)>) -> Result<Self, InvariantError> {
        for &(a, b) in &entries {
            if a > 2 || b > 2 {
                return Err(InvariantError::RestrictionValue(a, b));
            }
        }
        Ok(RestrictionList { entries })
    }

    /// All entries `(2,2)`: the acceptability condition for invariants of φ.
    pub fn default_for(sigma: usize) -> Self {
        RestrictionList {
            entries: vec![(2, 2); sigma],
        }
    }

    pub fn entries(&self) -> &[(u8, u8)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn is_uniform(&self) -> bool {
        self.entries.windows(2).all(|w| w[0] == w[1])
    }
}

impl TryFrom<Vec<(u8, u8)>> for RestrictionList {
    type Error = InvariantError;
    fn try_from(v: Vec<(u8, u8)>) -> Result<Self, Self::Error> {
        RestrictionList::new(v)
    }
}

impl From<RestrictionList> for Vec<(u8, u8)> {
    fn from(l: RestrictionList) -> Self {
        l.entries
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ContractionMonomial {
    kind: Kind,
    sigma: usize,
    // row-major sigma x sigma
    edges: Vec<u32>,
    free_hol: Vec<u32>,
    free_anti: Vec<u32>,
}

impl ContractionMonomial {
    pub fn new(
        kind: Kind,
        edges: Vec<Vec<u32>>,
        free_hol: Vec<u32>,
        free_anti: Vec<u32>,
    ) -> Result<Self, InvariantError> {
        let sigma = edges.len();
        for (row, r) in edges.iter().enumerate() {
            if r.len() != sigma {
                return Err(InvariantError::NotSquare {
                    row,
                    len: r.len(),
                    sigma,
                });
            }
        }
        if free_hol.len() != sigma || free_anti.len() != sigma {
            return Err(InvariantError::FreeLength { sigma });
        }
        Ok(ContractionMonomial {
            kind,
            sigma,
            edges: edges.into_iter().flatten().collect(),
            free_hol,
            free_anti,
        })
    }

    /// Scalar monomial with no free slots.
    pub fn scalar(kind: Kind, edges: Vec<Vec<u32>>) -> Result<Self, InvariantError> {
        let s = edges.len();
        Self::new(kind, edges, vec![0; s], vec![0; s])
    }

    pub(crate) fn from_flat(
        kind: Kind,
        sigma: usize,
        edges: Vec<u32>,
        free_hol: Vec<u32>,
        free_anti: Vec<u32>,
    ) -> Self {
        debug_assert_eq!(edges.len(), sigma * sigma);
        ContractionMonomial {
            kind,
            sigma,
            edges,
            free_hol,
            free_anti,
        }
    }

    /// The constant monomial (no factors).
    pub fn unit(kind: Kind) -> Self {
        ContractionMonomial {
            kind,
            sigma: 0,
            edges: vec![],
            free_hol: vec![],
            free_anti: vec![],
        }
    }

    /// `Δ^w ψ` as a single factor.
    pub fn laplace_power(kind: Kind, w: u32) -> Self {
        ContractionMonomial {
            kind,
            sigma: 1,
            edges: vec![w],
            free_hol: vec![0],
            free_anti: vec![0],
        }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn degree(&self) -> usize {
        self.sigma
    }

    pub fn edge(&self, i: usize, j: usize) -> u32 {
        self.edges[i * self.sigma + j]
    }

    pub(crate) fn flat_edges(&self) -> &[u32] {
        &self.edges
    }

    pub fn edge_matrix(&self) -> Vec<Vec<u32>> {
        if self.sigma == 0 {
            return vec![];
        }
        self.edges.chunks(self.sigma).map(|r| r.to_vec()).collect()
    }

    pub fn free_hol(&self) -> &[u32] {
        &self.free_hol
    }

    pub fn free_anti(&self) -> &[u32] {
        &self.free_anti
    }

    pub fn signature(&self, i: usize) -> FactorSignature {
        let s = self.sigma;
        let hol: u32 = self.edges[i * s..(i + 1) * s].iter().sum::<u32>() + self.free_hol[i];
        let anti: u32 = (0..s).map(|j| self.edge(j, i)).sum::<u32>() + self.free_anti[i];
        FactorSignature { hol, anti }
    }

    pub fn signatures(&self) -> Vec<FactorSignature> {
        (0..self.sigma).map(|i| self.signature(i)).collect()
    }

    pub fn weight(&self) -> u32 {
        self.edges.iter().sum()
    }

    pub fn geometric_weight(&self) -> i64 {
        self.weight() as i64 - self.sigma as i64
    }

    pub fn valence(&self) -> (u32, u32) {
        (self.free_hol.iter().sum(), self.free_anti.iter().sum())
    }

    /// `Σ (A_j + B_j − α_j − β_j)`.
    pub fn order(&self, l: &RestrictionList) -> Result<i64, InvariantError> {
        if l.len() != self.sigma {
            return Err(InvariantError::RestrictionLength {
                expected: self.sigma,
                got: l.len(),
            });
        }
        Ok(self
            .signatures()
            .iter()
            .zip(l.entries())
            .map(|(s, &(a, b))| s.hol as i64 + s.anti as i64 - a as i64 - b as i64)
            .sum())
    }

    pub fn order_default(&self) -> i64 {
        self.order(&RestrictionList::default_for(self.sigma))
            .expect("length matches")
    }

    pub fn factor_traces(&self, i: usize) -> u32 {
        self.edge(i, i)
    }

    /// Total number of traces (also the height of the monomial).
    pub fn trace_count(&self) -> u32 {
        (0..self.sigma).map(|i| self.edge(i, i)).sum()
    }

    /// Contractions with antiholomorphic index on factor `i` and holomorphic
    /// index on factor `j`.
    pub fn special_contraction_count(&self, i: usize, j: usize) -> u32 {
        self.edge(j, i)
    }

    pub fn is_acceptable(&self, l: &RestrictionList) -> Result<bool, InvariantError> {
        if l.len() != self.sigma {
            return Err(InvariantError::RestrictionLength {
                expected: self.sigma,
                got: l.len(),
            });
        }
        let sigs = self.signatures();
        let fits =
            |s: &FactorSignature, &(a, b): &(u8, u8)| s.hol >= a as u32 && s.anti >= b as u32;
        if self.kind == Kind::Psi || l.is_uniform() {
            return Ok(sigs.iter().zip(l.entries()).all(|(s, e)| fits(s, e)));
        }
        // Factors of a phi-monomial carry no labels, so any assignment of the
        // factors to the list entries is allowed.
        Ok(permutations(self.sigma)
            .iter()
            .any(|p| (0..self.sigma).all(|k| fits(&sigs[p[k]], &l.entries()[k]))))
    }

    pub fn is_acceptable_default(&self) -> bool {
        self.signatures().iter().all(|s| s.hol >= 2 && s.anti >= 2)
    }

    /// Relabels factors: new factor `k` is old factor `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let s = self.sigma;
        let mut edges = vec![0; s * s];
        for a in 0..s {
            for b in 0..s {
                edges[a * s + b] = self.edge(perm[a], perm[b]);
            }
        }
        ContractionMonomial {
            kind: self.kind,
            sigma: s,
            edges,
            free_hol: perm.iter().map(|&p| self.free_hol[p]).collect(),
            free_anti: perm.iter().map(|&p| self.free_anti[p]).collect(),
        }
    }

    pub fn with_kind(&self, kind: Kind) -> Self {
        ContractionMonomial {
            kind,
            ..self.clone()
        }
    }

    /// Exchanges holomorphic and antiholomorphic slots.
    pub fn conjugate(&self) -> Self {
        let s = self.sigma;
        let mut edges = vec![0; s * s];
        for i in 0..s {
            for j in 0..s {
                edges[i * s + j] = self.edge(j, i);
            }
        }
        ContractionMonomial {
            kind: self.kind,
            sigma: s,
            edges,
            free_hol: self.free_anti.clone(),
            free_anti: self.free_hol.clone(),
        }
    }

    fn factor_key(&self, i: usize) -> FactorKey {
        let s = self.sigma;
        let mut row: Vec<u32> = (0..s)
            .filter(|&j| j != i)
            .map(|j| self.edge(i, j))
            .collect();
        let mut col: Vec<u32> = (0..s)
            .filter(|&j| j != i)
            .map(|j| self.edge(j, i))
            .collect();
        row.sort_unstable();
        col.sort_unstable();
        let sig = self.signature(i);
        FactorKey {
            sig: (sig.hol, sig.anti),
            trace: self.edge(i, i),
            free: (self.free_hol[i], self.free_anti[i]),
            row,
            col,
        }
    }

    /// Canonical representative: phi-monomials are minimised over factor
    /// relabelings, psi-monomials are returned unchanged.
    pub fn canonical(&self) -> Self {
        if self.kind == Kind::Psi || self.sigma <= 1 {
            return self.clone();
        }
        let keys: Vec<FactorKey> = (0..self.sigma).map(|i| self.factor_key(i)).collect();
        let mut order: Vec<usize> = (0..self.sigma).collect();
        order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for &i in &order {
            match blocks.last_mut() {
                Some(b) if keys[b[0]] == keys[i] => b.push(i),
                _ => blocks.push(vec![i]),
            }
        }
        if blocks.iter().all(|b| b.len() == 1) {
            return self.permuted(&order);
        }
        let block_perms: Vec<Vec<Vec<usize>>> = blocks
            .iter()
            .map(|b| {
                permutations(b.len())
                    .into_iter()
                    .map(|p| p.iter().map(|&k| b[k]).collect())
                    .collect()
            })
            .collect();
        let mut idx = vec![0usize; blocks.len()];
        let mut best: Option<ContractionMonomial> = None;
        loop {
            let perm: Vec<usize> = idx
                .iter()
                .zip(&block_perms)
                .flat_map(|(&k, ps)| ps[k].iter().copied())
                .collect();
            let cand = self.permuted(&perm);
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    return best.expect("at least one candidate");
                }
                idx[pos] += 1;
                if idx[pos] < block_perms[pos].len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical() == *self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct FactorKey {
    sig: (u32, u32),
    trace: u32,
    free: (u32, u32),
    row: Vec<u32>,
    col: Vec<u32>,
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n)
            .rev()
            .find(|&j| cur[j] > cur[i - 1])
            .expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

pub fn permutation_sign(p: &[usize]) -> i64 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1;
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = p[k];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Finite rational combination of canonical monomials of one kind and valence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariant {
    kind: Kind,
    valence: (u32, u32),
    terms: BTreeMap<ContractionMonomial, Rat>,
}

impl Invariant {
    pub fn zero(kind: Kind, valence: (u32, u32)) -> Self {
        Invariant {
            kind,
            valence,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar_zero(kind: Kind) -> Self {
        Self::zero(kind, (0, 0))
    }

    pub fn from_monomial(m: ContractionMonomial, coeff: Rat) -> Self {
        let mut inv = Invariant::zero(m.kind(), m.valence());
        inv.insert_raw(m.canonical(), coeff);
        inv
    }

    pub fn monomial(m: ContractionMonomial) -> Self {
        Self::from_monomial(m, Rat::one())
    }

    pub fn from_terms<I>(kind: Kind, valence: (u32, u32), terms: I) -> Result<Self, InvariantError>
    where
        I: IntoIterator<Item = (ContractionMonomial, Rat)>,
    {
        let mut inv = Invariant::zero(kind, valence);
        for (m, c) in terms {
            inv.add_term(m, c)?;
        }
        Ok(inv)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn valence(&self) -> (u32, u32) {
        self.valence
    }

    pub fn is_scalar(&self) -> bool {
        self.valence == (0, 0)
    }

    pub fn terms(&self) -> &BTreeMap<ContractionMonomial, Rat> {
        &self.terms
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ContractionMonomial, &Rat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &ContractionMonomial) -> Rat {
        self.terms
            .get(&m.canonical())
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    /// Adds `c·m` after canonicalizing `m`.
    pub fn add_term(&mut self, m: ContractionMonomial, c: Rat) -> Result<(), InvariantError> {
        if m.kind() != self.kind {
            return Err(InvariantError::KindMismatch {
                expected: self.kind,
                found: m.kind(),
            });
        }
        if m.valence() != self.valence {
            return Err(InvariantError::ValenceMismatch {
                expected: self.valence,
                found: m.valence(),
            });
        }
        self.insert_raw(m.canonical(), c);
        Ok(())
    }

    /// Adds `c·m` where `m` is already canonical and compatible.
    pub(crate) fn insert_raw(&mut self, m: ContractionMonomial, c: Rat) {
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

    fn check_compatible(&self, other: &Invariant) -> Result<(), InvariantError> {
        if other.is_empty() || self.is_empty() {
            if self.valence != other.valence {
                return Err(InvariantError::ValenceMismatch {
                    expected: self.valence,
                    found: other.valence,
                });
            }
            return Ok(());
        }
        if self.kind != other.kind {
            return Err(InvariantError::KindMismatch {
                expected: self.kind,
                found: other.kind,
            });
        }
        if self.valence != other.valence {
            return Err(InvariantError::ValenceMismatch {
                expected: self.valence,
                found: other.valence,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Invariant) -> Result<Invariant, InvariantError> {
        self.check_compatible(other)?;
        let mut out = if self.is_empty() {
            other.clone()
        } else {
            self.clone()
        };
        if !self.is_empty() {
            for (m, c) in &other.terms {
                out.insert_raw(m.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Invariant) -> Result<Invariant, InvariantError> {
        self.add(&other.neg())
    }

    pub fn add_scaled(&mut self, other: &Invariant, s: &Rat) -> Result<(), InvariantError> {
        self.check_compatible(other)?;
        if self.is_empty() {
            self.kind = other.kind;
        }
        for (m, c) in &other.terms {
            self.insert_raw(m.clone(), c * s);
        }
        Ok(())
    }

    pub fn scale(&self, s: &Rat) -> Invariant {
        let mut out = Invariant::zero(self.kind, self.valence);
        for (m, c) in &self.terms {
            out.insert_raw(m.clone(), c * s);
        }
        out
    }

    pub fn neg(&self) -> Invariant {
        self.scale(&-Rat::one())
    }

    pub fn weights(&self) -> BTreeSet<u32> {
        self.terms.keys().map(|m| m.weight()).collect()
    }

    pub fn degrees(&self) -> BTreeSet<usize> {
        self.terms.keys().map(|m| m.sigma()).collect()
    }

    pub fn homogeneous_weight(&self) -> Option<u32> {
        let w = self.weights();
        (w.len() == 1).then(|| *w.iter().next().unwrap())
    }

    pub fn homogeneous_degree(&self) -> Option<usize> {
        let d = self.degrees();
        (d.len() == 1).then(|| *d.iter().next().unwrap())
    }

    /// Homogeneous components keyed by `(weight, degree)`.
    pub fn split_by_weight_degree(&self) -> BTreeMap<(u32, usize), Invariant> {
        let mut out: BTreeMap<(u32, usize), Invariant> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry((m.weight(), m.sigma()))
                .or_insert_with(|| Invariant::zero(self.kind, self.valence))
                .insert_raw(m.clone(), c.clone());
        }
        out
    }

    /// Sublinear combination of the terms whose monomial satisfies `pred`.
    pub fn filter<F: Fn(&ContractionMonomial) -> bool>(&self, pred: F) -> Invariant {
        Invariant {
            kind: self.kind,
            valence: self.valence,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| pred(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn conjugate(&self) -> Invariant {
        let mut out = Invariant::zero(self.kind, (self.valence.1, self.valence.0));
        for (m, c) in &self.terms {
            out.insert_raw(m.conjugate().canonical(), c.clone());
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&InvariantJson::from(self)).expect("serializable")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&InvariantJson::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Invariant, JsonError> {
        let raw: InvariantJson =
            serde_json::from_str(s).map_err(|e| JsonError::Syntax(e.to_string()))?;
        Ok(Invariant::try_from(raw)?)
    }
}

/// Canonicalizes every monomial and collects like terms.
pub fn canonicalize(inv: &Invariant) -> Invariant {
    let mut out = Invariant::zero(inv.kind, inv.valence);
    for (m, c) in &inv.terms {
        out.insert_raw(m.canonical(), c.clone());
    }
    out
}

/// Multilinear form of a homogeneous phi-invariant (average over `S_σ`).
pub fn polarize(inv: &Invariant) -> Result<Invariant, InvariantError> {
    if inv.kind() == Kind::Psi && !inv.is_empty() {
        return Err(InvariantError::KindMismatch {
            expected: Kind::Phi,
            found: Kind::Psi,
        });
    }
    let Some(sigma) = inv.homogeneous_degree() else {
        if inv.is_empty() {
            return Ok(Invariant::zero(Kind::Psi, inv.valence()));
        }
        return Err(InvariantError::MixedDegree);
    };
    let perms = permutations(sigma);
    let norm = Rat::new(BigInt::one(), crate::arith::factorial(sigma as u32));
    let mut out = Invariant::zero(Kind::Psi, inv.valence());
    for (m, c) in inv.iter() {
        let c = c * &norm;
        let psi = m.with_kind(Kind::Psi);
        for p in &perms {
            out.insert_raw(psi.permuted(p), c.clone());
        }
    }
    Ok(out)
}

/// Identifies all factor labels of a psi-invariant.
pub fn symmetrize(inv: &Invariant) -> Result<Invariant, InvariantError> {
    if inv.kind() == Kind::Phi && !inv.is_empty() {
        return Err(InvariantError::KindMismatch {
            expected: Kind::Psi,
            found: Kind::Phi,
        });
    }
    let mut out = Invariant::zero(Kind::Phi, inv.valence());
    for (m, c) in inv.iter() {
        out.insert_raw(m.with_kind(Kind::Phi).canonical(), c.clone());
    }
    Ok(out)
}

/// Block-diagonal product of two scalar invariants.
pub fn multiply(u: &Invariant, v: &Invariant) -> Result<Invariant, InvariantError> {
    for x in [u, v] {
        if !x.is_scalar() {
            return Err(InvariantError::NotScalar(x.valence()));
        }
    }
    if u.kind() != v.kind() && !u.is_empty() && !v.is_empty() {
        return Err(InvariantError::KindMismatch {
            expected: u.kind(),
            found: v.kind(),
        });
    }
    let kind = if u.is_empty() { v.kind() } else { u.kind() };
    let mut out = Invariant::scalar_zero(kind);
    for (a, ca) in u.iter() {
        for (b, cb) in v.iter() {
            out.insert_raw(block_product(a, b).canonical(), ca * cb);
        }
    }
    Ok(out)
}

pub(crate) fn block_product(
    a: &ContractionMonomial,
    b: &ContractionMonomial,
) -> ContractionMonomial {
    let (sa, sb) = (a.sigma(), b.sigma());
    let s = sa + sb;
    let mut edges = vec![0; s * s];
    for i in 0..sa {
        for j in 0..sa {
            edges[i * s + j] = a.edge(i, j);
        }
    }
    for i in 0..sb {
        for j in 0..sb {
            edges[(sa + i) * s + sa + j] = b.edge(i, j);
        }
    }
    let cat = |x: &[u32], y: &[u32]| x.iter().chain(y).copied().collect::<Vec<_>>();
    ContractionMonomial::from_flat(
        a.kind(),
        s,
        edges,
        cat(a.free_hol(), b.free_hol()),
        cat(a.free_anti(), b.free_anti()),
    )
}

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("JSON syntax: {0}")]
    Syntax(String),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

#[derive(Serialize, Deserialize)]
struct MonomialJson {
    kind: Kind,
    sigma: usize,
    edges: Vec<Vec<u32>>,
    free_hol: Vec<u32>,
    free_anti: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    monomial: MonomialJson,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct InvariantJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kind: Option<Kind>,
    valence: [u32; 2],
    terms: Vec<TermJson>,
}

impl From<&ContractionMonomial> for MonomialJson {
    fn from(m: &ContractionMonomial) -> Self {
        MonomialJson {
            kind: m.kind(),
            sigma: m.sigma(),
            edges: m.edge_matrix(),
            free_hol: m.free_hol().to_vec(),
            free_anti: m.free_anti().to_vec(),
        }
    }
}

impl TryFrom<MonomialJson> for ContractionMonomial {
    type Error = InvariantError;
    fn try_from(j: MonomialJson) -> Result<Self, Self::Error> {
        if j.sigma != j.edges.len() {
            return Err(InvariantError::SigmaMismatch {
                declared: j.sigma,
                actual: j.edges.len(),
            });
        }
        ContractionMonomial::new(j.kind, j.edges, j.free_hol, j.free_anti)
    }
}

impl From<&Invariant> for InvariantJson {
    fn from(inv: &Invariant) -> Self {
        InvariantJson {
            kind: inv.is_empty().then_some(inv.kind()),
            valence: [inv.valence().0, inv.valence().1],
            terms: inv
                .iter()
                .map(|(m, c)| TermJson {
                    monomial: m.into(),
                    coeff: fmt_rat(c),
                })
                .collect(),
        }
    }
}

impl TryFrom<InvariantJson> for Invariant {
    type Error = InvariantError;
    fn try_from(j: InvariantJson) -> Result<Self, Self::Error> {
        let valence = (j.valence[0], j.valence[1]);
        let kind = j
            .kind
            .or_else(|| j.terms.first().map(|t| t.monomial.kind))
            .unwrap_or(Kind::Phi);
        let mut inv = Invariant::zero(kind, valence);
        for t in j.terms {
            let c = parse_rat(&t.coeff)?;
            inv.add_term(t.monomial.try_into()?, c)?;
        }
        Ok(inv)
    }
}

impl Serialize for Invariant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        InvariantJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Invariant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = InvariantJson::deserialize(d)?;
        Invariant::try_from(raw).map_err(serde::de::Error::custom)
    }
}

impl Serialize for ContractionMonomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MonomialJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ContractionMonomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = MonomialJson::deserialize(d)?;
        ContractionMonomial::try_from(raw).map_err(serde::de::Error::custom)
    }
}

const SUPERSCRIPTS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];

fn superscript(n: usize) -> String {
    n.to_string()
        .chars()
        .map(|c| SUPERSCRIPTS[c.to_digit(10).unwrap() as usize])
        .collect()
}

fn index_name(k: usize) -> String {
    if k < 26 {
        ((b'a' + k as u8) as char).to_string()
    } else {
        format!("i{}", k)
    }
}

impl fmt::Display for ContractionMonomial {
    /// Index notation: `Δ²φ`, `Δφ_{ab̄}·Δφ_{bā}`, `ψ¹_{a}·ψ²_{ā}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.sigma;
        if s == 0 {
            return write!(f, "1");
        }
        let mut hol: Vec<Vec<String>> = vec![vec![]; s];
        let mut anti: Vec<Vec<String>> = vec![vec![]; s];
        let mut next = 0;
        for i in 0..s {
            for _ in 0..self.free_hol[i] {
                hol[i].push(index_name(next));
                next += 1;
            }
            for _ in 0..self.free_anti[i] {
                anti[i].push(index_name(next));
                next += 1;
            }
        }
        for i in 0..s {
            for j in 0..s {
                if i == j {
                    continue;
                }
                for _ in 0..self.edge(i, j) {
                    let name = index_name(next);
                    next += 1;
                    hol[i].push(name.clone());
                    anti[j].push(name);
                }
            }
        }
        let factors: Vec<String> = (0..s)
            .map(|i| {
                let mut out = String::new();
                match self.edge(i, i) {
                    0 => {}
                    1 => out.push('Δ'),
                    t => out.push_str(&format!("Δ{}", superscript(t as usize))),
                }
                match self.kind {
                    Kind::Phi => out.push('φ'),
                    Kind::Psi => out.push_str(&format!("ψ{}", superscript(i + 1))),
                }
                if !hol[i].is_empty() || !anti[i].is_empty() {
                    out.push_str("_{");
                    for h in &hol[i] {
                        out.push_str(h);
                    }
                    for a in &anti[i] {
                        out.push_str(a);
                        out.push('\u{304}');
                    }
                    out.push('}');
                }
                out
            })
            .collect();
        write!(f, "{}", factors.join("·"))
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "−")?,
                (0, false) => {}
                (_, true) => write!(f, " − ")?,
                (_, false) => write!(f, " + ")?,
            }
            if !a.is_one() {
                write!(f, "{}·", fmt_rat(&a))?;
            }
            write!(f, "{}", m)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};

    fn phi(edges: Vec<Vec<u32>>) -> ContractionMonomial {
        ContractionMonomial::scalar(Kind::Phi, edges).unwrap()
    }

    fn psi(edges: Vec<Vec<u32>>) -> ContractionMonomial {
        ContractionMonomial::scalar(Kind::Psi, edges).unwrap()
    }

    #[test]
    fn swapped_copies_collect() {
        let a = phi(vec![vec![0, 2], vec![2, 0]]);
        let b = a.permuted(&[1, 0]);
        let mut inv = Invariant::scalar_zero(Kind::Phi);
        inv.add_term(a.clone(), rat(1)).unwrap();
        inv.add_term(b, rat(1)).unwrap();
        assert_eq!(inv.len(), 1);
        assert_eq!(inv.coeff(&a), rat(2));
    }

    #[test]
    fn cancellation_gives_empty() {
        let c = Invariant::monomial(phi(vec![vec![1, 1], vec![1, 1]]));
        assert!(c.sub(&c).unwrap().is_empty());
    }

    #[test]
    fn psi_order_is_fixed() {
        let m = ContractionMonomial::scalar(Kind::Psi, vec![vec![2, 0], vec![1, 1]]).unwrap();
        assert_eq!(m.canonical(), m);
        let n = psi(vec![vec![1, 1], vec![1, 1]]);
        assert_eq!(
            canonicalize(&Invariant::monomial(n.clone()))
                .terms()
                .keys()
                .next(),
            Some(&n)
        );
    }

    #[test]
    fn counts_match_definitions() {
        // signatures (3,2),(2,3)
        let m = phi(vec![vec![1, 2], vec![1, 1]]);
        assert_eq!(m.signature(0), FactorSignature { hol: 3, anti: 2 });
        assert_eq!(m.signature(1), FactorSignature { hol: 2, anti: 3 });
        assert_eq!(
            (
                m.weight(),
                m.sigma(),
                m.order_default(),
                m.geometric_weight()
            ),
            (5, 2, 2, 3)
        );

        let d = phi(vec![vec![1, 1], vec![1, 1]]);
        assert_eq!(d.order_default(), 0);

        let l3 = phi(vec![vec![3]]);
        assert_eq!(
            (
                l3.weight(),
                l3.sigma(),
                l3.order_default(),
                l3.geometric_weight()
            ),
            (3, 1, 2, 2)
        );

        assert_eq!(
            m.order(&RestrictionList::default_for(3)),
            Err(InvariantError::RestrictionLength {
                expected: 2,
                got: 3
            })
        );
    }

    #[test]
    fn polarize_examples() {
        let sq = Invariant::monomial(phi(vec![vec![2, 0], vec![0, 2]]));
        let p = polarize(&sq).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.coeff(&psi(vec![vec![2, 0], vec![0, 2]])), rat(1));

        let single = polarize(&Invariant::monomial(phi(vec![vec![2]]))).unwrap();
        assert_eq!(single.coeff(&psi(vec![vec![2]])), rat(1));

        let cross = Invariant::monomial(phi(vec![vec![1, 1], vec![1, 1]]));
        let s = symmetrize(&Invariant::monomial(psi(vec![vec![1, 1], vec![1, 1]]))).unwrap();
        assert_eq!(s, cross);
    }

    #[test]
    fn polarize_averages_asymmetric_terms() {
        let m = phi(vec![vec![3, 0], vec![0, 1]]);
        let p = polarize(&Invariant::monomial(m.clone())).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.coeff(&psi(vec![vec![3, 0], vec![0, 1]])), ratio(1, 2));
        assert_eq!(symmetrize(&p).unwrap(), Invariant::monomial(m));
    }

    #[test]
    fn polarize_rejects_mixed_degree() {
        let mut inv = Invariant::monomial(phi(vec![vec![2]]));
        inv.add_term(phi(vec![vec![2, 0], vec![0, 2]]), rat(1))
            .unwrap();
        assert_eq!(polarize(&inv), Err(InvariantError::MixedDegree));
    }

    #[test]
    fn acceptability() {
        let l1 = RestrictionList::default_for(1);
        assert!(phi(vec![vec![2]]).is_acceptable(&l1).unwrap());
        let m = ContractionMonomial::new(
            Kind::Phi,
            vec![vec![2, 1], vec![0, 1]],
            vec![0, 0],
            vec![0, 0],
        )
        .unwrap();
        assert_eq!(m.signature(1), FactorSignature { hol: 1, anti: 2 });
        assert!(!m.is_acceptable(&RestrictionList::default_for(2)).unwrap());
        let relaxed = RestrictionList::new(vec![(2, 2), (1, 2)]).unwrap();
        assert!(m.is_acceptable(&relaxed).unwrap());
        // factor order of a phi-monomial is irrelevant
        let swapped = RestrictionList::new(vec![(1, 2), (2, 2)]).unwrap();
        assert!(m.is_acceptable(&swapped).unwrap());
        assert!(RestrictionList::new(vec![(3, 0)]).is_err());
    }

    #[test]
    fn filter_trace_free_part() {
        let mut i2 = Invariant::monomial(phi(vec![vec![1, 1], vec![1, 1]]));
        i2.add_term(phi(vec![vec![0, 2], vec![2, 0]]), rat(-1))
            .unwrap();
        let tf = i2.filter(|m| m.trace_count() == 0);
        assert_eq!(
            tf,
            Invariant::from_monomial(phi(vec![vec![0, 2], vec![2, 0]]), rat(-1))
        );
    }

    #[test]
    fn special_contractions() {
        let m = psi(vec![vec![0, 3], vec![1, 0]]);
        assert_eq!(m.special_contraction_count(0, 1), 1);
        assert_eq!(m.special_contraction_count(1, 0), 3);
    }

    #[test]
    fn multiply_examples() {
        let d2 = Invariant::monomial(phi(vec![vec![2]]));
        let sq = multiply(&d2, &d2).unwrap();
        assert_eq!(sq, Invariant::monomial(phi(vec![vec![2, 0], vec![0, 2]])));
        assert!(multiply(&d2, &Invariant::scalar_zero(Kind::Phi))
            .unwrap()
            .is_empty());
        let one_form = Invariant::monomial(
            ContractionMonomial::new(Kind::Phi, vec![vec![2]], vec![1], vec![0]).unwrap(),
        );
        assert!(matches!(
            multiply(&d2, &one_form),
            Err(InvariantError::NotScalar(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let mut inv = Invariant::monomial(phi(vec![vec![1, 1], vec![1, 1]]));
        inv.add_term(phi(vec![vec![0, 2], vec![2, 0]]), ratio(-3, 4))
            .unwrap();
        let s = inv.to_json();
        let back = Invariant::from_json(&s).unwrap();
        assert_eq!(back, inv);
        assert_eq!(back.to_json(), s);
        let empty = Invariant::scalar_zero(Kind::Psi);
        assert_eq!(Invariant::from_json(&empty.to_json()).unwrap(), empty);
    }

    #[test]
    fn json_rejects_bad_input() {
        assert!(Invariant::from_json("{").is_err());
        let bad = r#"{"valence":[0,0],"terms":[{"monomial":{"kind":"phi","sigma":2,"edges":[[1]],"free_hol":[0],"free_anti":[0]},"coeff":"1"}]}"#;
        assert!(Invariant::from_json(bad).is_err());
        let bad_coeff = r#"{"valence":[0,0],"terms":[{"monomial":{"kind":"phi","sigma":1,"edges":[[2]],"free_hol":[0],"free_anti":[0]},"coeff":"x"}]}"#;
        assert!(Invariant::from_json(bad_coeff).is_err());
    }

    #[test]
    fn display_uses_index_notation() {
        assert_eq!(phi(vec![vec![2]]).to_string(), "Δ²φ");
        assert_eq!(
            phi(vec![vec![1, 1], vec![1, 1]]).to_string(),
            "Δφ_{ab\u{304}}·Δφ_{ba\u{304}}"
        );
        let mut inv = Invariant::monomial(phi(vec![vec![2]]));
        inv.add_term(phi(vec![vec![3]]), ratio(-1, 2)).unwrap();
        assert_eq!(inv.to_string(), "Δ²φ − 1/2·Δ³φ");
    }

    #[test]
    fn permutation_helpers() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
        assert_eq!(permutation_sign(&[1, 2, 0]), 1);
    }
}
