use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Cap, Graded, JetError, JetPoly, JetVar, ScalarSeries, MAX_DIM};
use crate::arith::{factorial, fmt_rat, gauss, parse_rat, rat, ratio, Coeff, GaussRat, Rat};

/// Coefficient types a jet `a_{αβ̄}` can be turned into.
pub trait JetValue: Coeff {
    /// `value` is `None` for a symbolic jet. Returns `None` when this type
    /// cannot represent the jet.
    fn from_jet(v: JetVar, value: Option<&GaussRat>, cap: Cap) -> Option<Self>;
}

impl JetValue for GaussRat {
    fn from_jet(_: JetVar, value: Option<&GaussRat>, _: Cap) -> Option<Self> {
        value.cloned()
    }
}

impl JetValue for Graded {
    fn from_jet(v: JetVar, value: Option<&GaussRat>, cap: Cap) -> Option<Self> {
        value.map(|x| Graded::monomial(x.clone(), v.weight2(), cap.max_weight2))
    }
}

impl JetValue for JetPoly {
    fn from_jet(v: JetVar, value: Option<&GaussRat>, cap: Cap) -> Option<Self> {
        Some(match value {
            None => JetPoly::var(v, cap),
            Some(x) => {
                if v.weight2() > cap.max_weight2 {
                    <JetPoly as Coeff>::zero()
                } else {
                    JetPoly::constant(x.clone())
                }
            }
        })
    }
}

/// Perturbation `H` of the flat potential in Bochner gauge, either fully
/// symbolic or a finite list of numeric jets.
#[derive(Clone, Debug, PartialEq)]
pub enum Potential {
    Symbolic {
        n: usize,
    },
    Numeric {
        n: usize,
        jets: BTreeMap<JetVar, GaussRat>,
    },
}

#[derive(Serialize, Deserialize)]
struct JetRecord {
    alpha: Vec<u8>,
    beta: Vec<u8>,
    re: String,
    #[serde(default = "zero_string")]
    im: String,
}

fn zero_string() -> String {
    "0".into()
}

#[derive(Serialize, Deserialize)]
struct PotentialFile {
    n: usize,
    jets: Vec<JetRecord>,
}

fn check_dim(n: usize) -> Result<(), JetError> {
    if n == 0 || n > MAX_DIM {
        return Err(JetError::Dimension(n));
    }
    Ok(())
}

/// All multi-indices of length `n` with entries summing to `k`.
pub(crate) fn multi_indices(n: usize, k: u32) -> Vec<Vec<u8>> {
    if n == 0 {
        return if k == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=k).rev() {
        for mut rest in multi_indices(n - 1, k - first) {
            rest.insert(0, first as u8);
            out.push(rest);
        }
    }
    out
}

/// Pairs `(α, β)` with `|α|, |β| ≥ 2` and `|α| + |β| ≤ max_degree`.
fn allowed_pairs(n: usize, max_degree: u32) -> Vec<(Vec<u8>, Vec<u8>)> {
    let mut out = Vec::new();
    for a in 2..=max_degree.saturating_sub(2) {
        for b in 2..=max_degree - a {
            for alpha in multi_indices(n, a) {
                for beta in multi_indices(n, b) {
                    out.push((alpha.clone(), beta));
                }
            }
        }
    }
    out
}

impl Potential {
    pub fn symbolic(n: usize) -> Result<Potential, JetError> {
        check_dim(n)?;
        Ok(Potential::Symbolic { n })
    }

    /// Numeric potential from `(α, β, value)` triples. Missing hermitian
    /// partners are filled in; given partners must agree.
    pub fn numeric<I>(n: usize, jets: I) -> Result<Potential, JetError>
    where
        I: IntoIterator<Item = (Vec<u8>, Vec<u8>, GaussRat)>,
    {
        check_dim(n)?;
        let mut map: BTreeMap<JetVar, GaussRat> = BTreeMap::new();
        for (alpha, beta, value) in jets {
            if alpha.len() != n || beta.len() != n {
                return Err(JetError::Malformed(format!(
                    "multi-index length differs from n = {}",
                    n
                )));
            }
            let a: u32 = alpha.iter().map(|&x| x as u32).sum();
            let b: u32 = beta.iter().map(|&x| x as u32).sum();
            if a < 2 || b < 2 {
                return Err(JetError::ForbiddenJet { alpha, beta });
            }
            let v = JetVar::new(&alpha, &beta)?;
            for (key, val) in [(v, value.clone()), (v.conj(), value.conj())] {
                match map.get(&key) {
                    Some(old) if *old != val => return Err(JetError::NotHermitian { alpha, beta }),
                    _ => {
                        map.insert(key, val);
                    }
                }
            }
        }
        map.retain(|_, c| !Coeff::is_zero(c));
        Ok(Potential::Numeric { n, jets: map })
    }

    /// `log(1 + |z|²) − |z|²` through total degree `max_degree`.
    pub fn fubini_study(n: usize, max_degree: u32) -> Result<Potential, JetError> {
        check_dim(n)?;
        let mut jets = Vec::new();
        for k in 2..=max_degree / 2 {
            let sign = if k % 2 == 0 { -1 } else { 1 };
            for gamma in multi_indices(n, k) {
                let mut c = Rat::from_integer(factorial(k)) / rat(k as i64);
                for &g in &gamma {
                    c /= Rat::from_integer(factorial(g as u32));
                }
                jets.push((gamma.clone(), gamma, gauss(c * rat(sign), rat(0))));
            }
        }
        Potential::numeric(n, jets)
    }

    /// Random hermitian potential with small rational jets of doubled weight
    /// at most `max_weight2`.
    pub fn random_hermitian(n: usize, max_weight2: u32, seed: u64) -> Result<Potential, JetError> {
        check_dim(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut jets = Vec::new();
        for (alpha, beta) in allowed_pairs(n, max_weight2 + 2) {
            if alpha > beta {
                continue;
            }
            let re = ratio(rng.gen_range(-4..=4), rng.gen_range(1..=4));
            let im = if alpha == beta {
                ratio(0, 1)
            } else {
                ratio(rng.gen_range(-4..=4), rng.gen_range(1..=4))
            };
            jets.push((alpha, beta, gauss(re, im)));
        }
        Potential::numeric(n, jets)
    }

    pub fn n(&self) -> usize {
        match self {
            Potential::Symbolic { n } | Potential::Numeric { n, .. } => *n,
        }
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self, Potential::Symbolic { .. })
    }

    /// Jets with `|α| + |β| ≤ max_degree`, converted to `C`.
    pub fn jets<C: JetValue>(
        &self,
        max_degree: u32,
        cap: Cap,
    ) -> Result<Vec<(Vec<u8>, Vec<u8>, C)>, JetError> {
        let n = self.n();
        let mut out = Vec::new();
        match self {
            Potential::Symbolic { .. } => {
                for (alpha, beta) in allowed_pairs(n, max_degree) {
                    let v = JetVar::new(&alpha, &beta)?;
                    let c = C::from_jet(v, None, cap).ok_or_else(|| {
                        JetError::Malformed(
                            "symbolic jets need a polynomial coefficient type".into(),
                        )
                    })?;
                    if !c.is_zero() {
                        out.push((alpha, beta, c));
                    }
                }
            }
            Potential::Numeric { jets, .. } => {
                for (v, x) in jets {
                    if v.hol_degree() + v.anti_degree() > max_degree {
                        continue;
                    }
                    let c = C::from_jet(*v, Some(x), cap).expect("numeric jets convert");
                    if !c.is_zero() {
                        out.push((v.alpha(n), v.beta(n), c));
                    }
                }
            }
        }
        Ok(out)
    }

    /// `H` as a series known through total degree `order`.
    pub fn series<C: JetValue>(&self, order: u32, cap: Cap) -> Result<ScalarSeries<C>, JetError> {
        let mut s = ScalarSeries::zero(self.n(), order as i32);
        for (alpha, beta, c) in self.jets::<C>(order, cap)? {
            let mut e = [0u8; 2 * MAX_DIM];
            e[..alpha.len()].copy_from_slice(&alpha);
            e[MAX_DIM..MAX_DIM + beta.len()].copy_from_slice(&beta);
            s.insert(e, c);
        }
        Ok(s)
    }

    /// Values for every numeric jet, keyed by variable.
    pub fn values(&self) -> Option<&BTreeMap<JetVar, GaussRat>> {
        match self {
            Potential::Symbolic { .. } => None,
            Potential::Numeric { jets, .. } => Some(jets),
        }
    }

    pub fn to_json(&self) -> Result<String, JetError> {
        let Potential::Numeric { n, jets } = self else {
            return Err(JetError::Malformed(
                "symbolic potentials have no JSON form".into(),
            ));
        };
        let file = PotentialFile {
            n: *n,
            jets: jets
                .iter()
                .map(|(v, c)| JetRecord {
                    alpha: v.alpha(*n),
                    beta: v.beta(*n),
                    re: fmt_rat(&c.re),
                    im: fmt_rat(&c.im),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).map_err(|e| JetError::Malformed(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Potential, JetError> {
        let file: PotentialFile =
            serde_json::from_str(s).map_err(|e| JetError::Malformed(e.to_string()))?;
        let mut jets = Vec::new();
        for r in file.jets {
            let re = parse_rat(&r.re).map_err(|e| JetError::Malformed(e.to_string()))?;
            let im = parse_rat(&r.im).map_err(|e| JetError::Malformed(e.to_string()))?;
            jets.push((r.alpha, r.beta, gauss(re, im)));
        }
        Potential::numeric(file.n, jets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::gauss_int;

    #[test]
    fn fubini_study_jets() {
        let p = Potential::fubini_study(2, 6).unwrap();
        let v = p.values().unwrap();
        let get = |a: &[u8], b: &[u8]| v.get(&JetVar::new(a, b).unwrap()).cloned();
        assert_eq!(get(&[2, 0], &[2, 0]), Some(gauss(ratio(-1, 2), rat(0))));
        assert_eq!(get(&[1, 1], &[1, 1]), Some(gauss(rat(-1), rat(0))));
        assert_eq!(get(&[2, 1], &[2, 1]), Some(gauss(rat(1), rat(0))));
        assert_eq!(get(&[3, 0], &[3, 0]), Some(gauss(ratio(1, 3), rat(0))));
        assert_eq!(get(&[2, 0], &[1, 1]), None);
    }

    #[test]
    fn forbidden_and_inconsistent_jets() {
        assert!(matches!(
            Potential::numeric(1, vec![(vec![1], vec![3], gauss_int(1))]),
            Err(JetError::ForbiddenJet { .. })
        ));
        let bad = vec![
            (vec![2], vec![3], gauss_int(1)),
            (vec![3], vec![2], gauss_int(2)),
        ];
        assert!(matches!(
            Potential::numeric(1, bad),
            Err(JetError::NotHermitian { .. })
        ));
        assert!(matches!(
            Potential::symbolic(5),
            Err(JetError::Dimension(5))
        ));
    }

    #[test]
    fn json_round_trip() {
        let p = Potential::random_hermitian(2, 3, 7).unwrap();
        let back = Potential::from_json(&p.to_json().unwrap()).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn symbolic_jet_count() {
        let p = Potential::symbolic(1).unwrap();
        let jets = p.jets::<JetPoly>(5, Cap::NONE).unwrap();
        assert_eq!(jets.len(), 3);
        assert!(p.jets::<GaussRat>(5, Cap::NONE).is_err());
    }
}
