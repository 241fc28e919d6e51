//! Verification drivers shared by the `verify` subcommand and the acceptance
//! suite. Each check returns a [`CheckRecord`] rather than panicking.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{fmt_gauss, gauss_rat, ratio, Coeff, GaussRat, Rat};
use crate::bergman::{
    bergman_coefficients, build_a_adjoint, linear_adjoint_prediction, BergmanError,
};
use crate::calculus::{integrates_to_zero, CalculusError};
use crate::chern::{chern_invariant, chern_reduce, ChernError, Partition};
use crate::fourier::{eval_phi, random_phi, OracleError};
use crate::jets::{
    named_scalar, named_scalar_audited, Cap, JetError, JetPoly, JetValue, NamedScalar, Potential,
};
use crate::sampling::{random_coexact, random_invariant, random_order_zero, random_shape};
use crate::solver::{decompose, verify_decomposition, SolverError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Bergman(#[from] BergmanError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Chern(#[from] ChernError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One line of a verification report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub status: Status,
    pub lhs: String,
    pub rhs: String,
    pub dim: usize,
    pub seed: Option<u64>,
}

impl CheckRecord {
    fn new(
        check: impl Into<String>,
        ok: bool,
        lhs: impl Into<String>,
        rhs: impl Into<String>,
        dim: usize,
        seed: Option<u64>,
    ) -> Self {
        CheckRecord {
            check: check.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            lhs: lhs.into(),
            rhs: rhs.into(),
            dim,
            seed,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("plain record serializes")
    }
}

/// Evaluation settings for the jet-side scalars.
#[derive(Clone, Copy, Debug)]
pub struct JetSettings {
    /// Recompute every named scalar two orders higher and fail if it moves.
    pub audit: bool,
}

impl Default for JetSettings {
    fn default() -> Self {
        JetSettings {
            audit: std::env::var("INVAR_TRUNCATION_AUDIT")
                .map(|v| v != "0")
                .unwrap_or(false),
        }
    }
}

fn scalar<C: JetValue>(
    pot: &Potential,
    s: NamedScalar,
    cap: Cap,
    cfg: JetSettings,
) -> Result<C, JetError> {
    if cfg.audit {
        named_scalar_audited(pot, s, cap)
    } else {
        named_scalar(pot, s, cap)
    }
}

fn frac(p: i64, q: i64) -> GaussRat {
    gauss_rat(ratio(p, q))
}

/// Symbolic `a_1 = S/2`.
pub fn check_a1(n: usize, cfg: JetSettings) -> Result<CheckRecord, VerifyError> {
    let pot = Potential::symbolic(n)?;
    let a: Vec<JetPoly> = bergman_coefficients(&pot, 1, Cap::NONE)?;
    let s: JetPoly = scalar(&pot, NamedScalar::SCALAR, Cap::NONE, cfg)?;
    let rhs = s.scale(&frac(1, 2));
    Ok(CheckRecord::new(
        "a1 == S/2",
        a[1] == rhs,
        a[1].to_string(),
        rhs.to_string(),
        n,
        None,
    ))
}

/// Symbolic `a_2 = P_2 + ΔS/3`.
pub fn check_a2(n: usize, cfg: JetSettings) -> Result<CheckRecord, VerifyError> {
    let pot = Potential::symbolic(n)?;
    let a: Vec<JetPoly> = bergman_coefficients(&pot, 2, Cap::NONE)?;
    let p2: JetPoly = scalar(&pot, NamedScalar::Todd(2), Cap::NONE, cfg)?;
    let ds: JetPoly = scalar(&pot, NamedScalar::LaplaceScalar(1), Cap::NONE, cfg)?;
    let rhs = p2.add(&ds.scale(&frac(1, 3)));
    Ok(CheckRecord::new(
        "a2 == P2 + ΔS/3",
        a[2] == rhs,
        a[2].to_string(),
        rhs.to_string(),
        n,
        None,
    ))
}

/// `a_3 = P_3 + divQ + Δ²S/8` at a random hermitian rational jet.
pub fn check_a3(n: usize, seed: u64, cfg: JetSettings) -> Result<CheckRecord, VerifyError> {
    let pot = Potential::random_hermitian(n, 6, seed)?;
    let a: Vec<GaussRat> = bergman_coefficients(&pot, 3, Cap::NONE)?;
    let p3: GaussRat = scalar(&pot, NamedScalar::Todd(3), Cap::NONE, cfg)?;
    let dq: GaussRat = scalar(&pot, NamedScalar::DivQ, Cap::NONE, cfg)?;
    let dds: GaussRat = scalar(&pot, NamedScalar::LaplaceScalar(2), Cap::NONE, cfg)?;
    let rhs = p3 + dq + dds * frac(1, 8);
    Ok(CheckRecord::new(
        "a3 == P3 + divQ + Δ²S/8",
        a[3] == rhs,
        fmt_gauss(&a[3]),
        fmt_gauss(&rhs),
        n,
        Some(seed),
    ))
}

/// Linear part of `a_j` against `j/(j+1)! Δ^{j−1}S`.
pub fn check_linear(n: usize, j: u32, cfg: JetSettings) -> Result<CheckRecord, VerifyError> {
    let pot = Potential::symbolic(n)?;
    let lin = Cap {
        max_degree: 1,
        max_weight2: u32::MAX,
    };
    let a: Vec<JetPoly> = bergman_coefficients(&pot, j, lin)?;
    let lhs = a[j as usize].degree_part(1);
    let s: JetPoly = scalar(&pot, NamedScalar::LaplaceScalar(j - 1), lin, cfg)?;
    let c = Rat::from_integer(j.into()) / Rat::from_integer(crate::arith::factorial(j + 1));
    let rhs = s.degree_part(1).scale(&gauss_rat(c));
    Ok(CheckRecord::new(
        format!("lin(a{}) == {}/{}!·Δ^{}S", j, j, j + 1, j - 1),
        lhs == rhs,
        lhs.to_string(),
        rhs.to_string(),
        n,
        None,
    ))
}

/// Elementary symmetric polynomials `e_0..=e_order` of `1, 2, …, n`.
fn elementary_symmetric(n: usize, order: u32) -> Vec<i64> {
    let mut e = vec![0i64; order as usize + 1];
    e[0] = 1;
    for x in 1..=n as i64 {
        for k in (1..e.len()).rev() {
            e[k] += x * e[k - 1];
        }
    }
    e
}

/// Fubini–Study coefficients against `e_j(1, 2, …, n)`, read off from
/// `dim H⁰(ℂPⁿ, O(m)) = (m+1)⋯(m+n)/n!`.
pub fn check_fubini_study(n: usize, order: u32) -> Result<CheckRecord, VerifyError> {
    let pot = Potential::fubini_study(n, 2 * order + 2)?;
    let a: Vec<GaussRat> = bergman_coefficients(&pot, order, Cap::NONE)?;
    let expect: Vec<GaussRat> = elementary_symmetric(n, order)
        .into_iter()
        .map(|e| gauss_rat(ratio(e, 1)))
        .collect();
    let show = |v: &[GaussRat]| v.iter().map(fmt_gauss).collect::<Vec<_>>().join(", ");
    Ok(CheckRecord::new(
        "fubini-study a_j == e_j(1..n)",
        a == expect,
        show(&a),
        show(&expect),
        n,
        None,
    ))
}

/// Linear part of `adjoint(build_A)` against the closed-form prediction.
pub fn check_adjoint_pin(n: usize, order: u32) -> Result<CheckRecord, VerifyError> {
    let pot = Potential::symbolic(n)?;
    let lin = Cap {
        max_degree: 1,
        max_weight2: u32::MAX,
    };
    let got = build_a_adjoint::<JetPoly>(&pot, order, lin)?;
    let want = linear_adjoint_prediction(&pot, order)?;
    let diff = got.sub(&want);
    Ok(CheckRecord::new(
        format!("lin(A*) termwise, t-order ≤ {}", order),
        diff.is_empty(),
        format!("{} terms", got.len()),
        format!("{} terms (mismatches: {})", want.len(), diff.len()),
        n,
        None,
    ))
}

/// Oracle dimension for an invariant of degree `sigma`.
pub fn oracle_dim(sigma: usize) -> usize {
    sigma.max(2)
}

/// `∫ I_p(φ) = 0` on `trials` random functions in dimension `n`.
pub fn check_chern_integral(
    p: &Partition,
    n: usize,
    trials: usize,
    mode_bound: i32,
    seed: u64,
) -> Result<CheckRecord, VerifyError> {
    let ip = chern_invariant(p);
    let mut bad = None;
    for t in 0..trials {
        let v = eval_phi(&ip, &random_phi(n, mode_bound, seed.wrapping_add(t as u64)))?;
        if !Coeff::is_zero(&v) {
            bad = Some(v);
            break;
        }
    }
    let lhs = bad.as_ref().map(fmt_gauss).unwrap_or_else(|| "0".into());
    Ok(CheckRecord::new(
        format!("∫I{} == 0 ({} trials)", p, trials),
        bad.is_none(),
        lhs,
        "0",
        n,
        Some(seed),
    ))
}

/// Formal co-exactness against vanishing on `trials` random functions.
pub fn check_oracle_agreement(
    seed: u64,
    trials: usize,
    mode_bound: i32,
) -> Result<CheckRecord, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, sigma) = random_shape(6, 3, &mut rng);
    let l = if rng.gen_bool(0.5) {
        random_coexact(w, sigma, &mut rng)
    } else {
        random_invariant(w, sigma, &mut rng)
    };
    let formal = integrates_to_zero(&l)?;
    let n = oracle_dim(sigma);
    let mut oracle_zero = true;
    for t in 0..trials {
        let v = eval_phi(
            &l,
            &random_phi(
                n,
                mode_bound,
                seed.wrapping_mul(1000).wrapping_add(t as u64),
            ),
        )?;
        if !Coeff::is_zero(&v) {
            oracle_zero = false;
            break;
        }
    }
    Ok(CheckRecord::new(
        format!("formal ⟺ oracle (w={}, σ={})", w, sigma),
        formal == oracle_zero,
        format!("formal: {}", formal),
        format!("oracle: {}", oracle_zero),
        n,
        Some(seed),
    ))
}

/// Decomposes a random co-exact invariant and checks the reconstruction.
pub fn check_roundtrip(seed: u64) -> Result<CheckRecord, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, sigma) = random_shape(6, 3, &mut rng);
    let l = random_coexact(w, sigma, &mut rng);
    let d = decompose(&l, None)?;
    let ok = verify_decomposition(&l, &d);
    Ok(CheckRecord::new(
        format!("decompose round-trip (w={}, σ={})", w, sigma),
        ok,
        format!(
            "{} chern, {} + {} one-form terms",
            d.chern.len(),
            d.t_hol.len(),
            d.t_anti.len()
        ),
        format!("{} input terms", l.len()),
        0,
        Some(seed),
    ))
}

/// `chern_reduce` on a random order-zero input; co-exact inputs must leave
/// no remainder.
pub fn check_chern_reduce(seed: u64) -> Result<CheckRecord, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = rng.gen_range(1..=3);
    let coexact = rng.gen_bool(0.5);
    let l = if coexact {
        random_coexact(2 * sigma as u32, sigma, &mut rng)
    } else {
        random_order_zero(sigma, &mut rng)
    };
    let r = chern_reduce(&l)?;
    let trace_free = r
        .remainder
        .iter()
        .all(|(m, _)| (0..m.sigma()).any(|i| m.edge(i, i) == 0));
    let rebuilt = r.reconstruct() == l;
    let ok = trace_free && rebuilt && (!coexact || r.remainder.is_empty());
    Ok(CheckRecord::new(
        format!(
            "chern_reduce (σ={}, {})",
            sigma,
            if coexact { "co-exact" } else { "generic" }
        ),
        ok,
        format!(
            "remainder terms: {}, reconstructs: {}",
            r.remainder.len(),
            rebuilt
        ),
        if coexact {
            "remainder empty".to_string()
        } else {
            "every remainder term has a trace-free factor".to_string()
        },
        0,
        Some(seed),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_in_dimension_one() {
        let cfg = JetSettings { audit: true };
        assert!(check_a1(1, cfg).unwrap().passed());
        assert!(check_a2(1, cfg).unwrap().passed());
        assert!(check_linear(1, 3, cfg).unwrap().passed());
    }

    #[test]
    fn a3_in_dimension_one() {
        let r = check_a3(1, 1, JetSettings { audit: false }).unwrap();
        assert!(r.passed(), "{:?}", r);
    }

    #[test]
    fn fubini_study_and_adjoint_pin() {
        assert!(check_fubini_study(2, 3).unwrap().passed());
        assert!(check_adjoint_pin(1, 4).unwrap().passed());
    }

    #[test]
    fn records_serialize() {
        let r = check_fubini_study(1, 2).unwrap();
        let line = r.to_json_line();
        assert!(line.contains("\"status\":\"pass\""));
        assert!(line.contains("\"dim\":1"));
    }

    #[test]
    fn combinatorial_checks() {
        assert!(
            check_chern_integral(&Partition::new(vec![2]).unwrap(), 2, 3, 2, 5)
                .unwrap()
                .passed()
        );
        assert!(check_oracle_agreement(3, 5, 2).unwrap().passed());
        assert!(check_roundtrip(4).unwrap().passed());
        assert!(check_chern_reduce(6).unwrap().passed());
    }
}
