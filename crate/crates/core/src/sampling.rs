//! Seeded random invariants for property checks and the `verify` drivers.

use num::Zero;
use rand::Rng;

use crate::arith::{ratio, Rat};
use crate::calculus::divergence;
use crate::chern::chern_basis;
use crate::invariant::{ContractionMonomial, Invariant, Kind, RestrictionList};
use crate::solver::enumerate_monomials;

/// Nonzero rational with small numerator and denominator.
pub fn random_rat<R: Rng>(rng: &mut R) -> Rat {
    loop {
        let r = ratio(rng.gen_range(-5..=5), rng.gen_range(1..=3));
        if !r.is_zero() {
            return r;
        }
    }
}

fn random_combination<R: Rng>(
    basis: &[ContractionMonomial],
    terms: usize,
    rng: &mut R,
    valence: (u32, u32),
) -> Invariant {
    let mut out = Invariant::zero(Kind::Phi, valence);
    if basis.is_empty() {
        return out;
    }
    for _ in 0..terms {
        let m = basis[rng.gen_range(0..basis.len())].clone();
        out.add_term(m, random_rat(rng))
            .expect("basis matches valence");
    }
    out
}

/// Random combination of `chern_basis(sigma)`.
pub fn random_chern_combination<R: Rng>(sigma: usize, rng: &mut R) -> Invariant {
    let mut out = Invariant::scalar_zero(Kind::Phi);
    for (_, i) in chern_basis(sigma) {
        if rng.gen_bool(0.7) {
            out.add_scaled(&i, &random_rat(rng)).expect("scalar phi");
        }
    }
    out
}

/// Random acceptable one-forms of weight `w − 1` and degree `sigma` (both
/// valences) and the scalar divergence they produce.
pub fn random_divergence<R: Rng>(
    w: u32,
    sigma: usize,
    rng: &mut R,
) -> (Invariant, Invariant, Invariant) {
    let l = RestrictionList::default_for(sigma);
    let hol = enumerate_monomials(w - 1, sigma, &l, (1, 0)).expect("list length matches");
    let anti = enumerate_monomials(w - 1, sigma, &l, (0, 1)).expect("list length matches");
    let th = random_combination(&hol, rng.gen_range(1..=3), rng, (1, 0));
    let ta = random_combination(&anti, rng.gen_range(0..=2), rng, (0, 1));
    let d = divergence(&th)
        .unwrap()
        .add(&divergence(&ta).unwrap())
        .unwrap();
    (th, ta, d)
}

/// A random `(weight, degree)` pair with `2σ ≤ w ≤ max_w`, `σ ≤ max_sigma`.
pub fn random_shape<R: Rng>(max_w: u32, max_sigma: usize, rng: &mut R) -> (u32, usize) {
    let sigma = rng.gen_range(1..=max_sigma.min(max_w as usize / 2));
    let w = rng.gen_range(2 * sigma as u32..=max_w);
    (w, sigma)
}

/// Chern combination (when `w = 2σ`) plus divergences, so co-exact by
/// construction.
pub fn random_coexact<R: Rng>(w: u32, sigma: usize, rng: &mut R) -> Invariant {
    let mut out = if w as usize == 2 * sigma {
        random_chern_combination(sigma, rng)
    } else {
        Invariant::scalar_zero(Kind::Phi)
    };
    if w as usize > 2 * sigma || rng.gen_bool(0.5) {
        out = out
            .add(&random_divergence(w, sigma, rng).2)
            .expect("scalar phi");
    }
    out
}

/// Random combination of acceptable scalar monomials; generically not co-exact.
pub fn random_invariant<R: Rng>(w: u32, sigma: usize, rng: &mut R) -> Invariant {
    let basis = enumerate_monomials(w, sigma, &RestrictionList::default_for(sigma), (0, 0))
        .expect("list length matches");
    let terms = rng.gen_range(1..=4);
    random_combination(&basis, terms, rng, (0, 0))
}

/// Random combination of monomials whose factors are all `(2,2)`.
pub fn random_order_zero<R: Rng>(sigma: usize, rng: &mut R) -> Invariant {
    let basis = enumerate_monomials(
        2 * sigma as u32,
        sigma,
        &RestrictionList::default_for(sigma),
        (0, 0),
    )
    .expect("list length matches");
    let terms = rng.gen_range(1..=5);
    random_combination(&basis, terms, rng, (0, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::integrates_to_zero;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn coexact_samples_pass_the_formal_test() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let (w, s) = random_shape(6, 3, &mut rng);
            let l = random_coexact(w, s, &mut rng);
            assert!(integrates_to_zero(&l).unwrap());
        }
    }

    #[test]
    fn order_zero_samples_have_22_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let l = random_order_zero(3, &mut rng);
        assert!(l.iter().all(|(m, _)| m.order_default() == 0));
    }
}
