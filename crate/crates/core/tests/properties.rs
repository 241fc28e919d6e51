use invar::arith::{gauss, gauss_int, rat, Coeff, GaussRat};
use invar::bergman::{LaurentOperatorSeries, WeylMonomial};
use invar::calculus::integrates_to_zero;
use invar::chern::chern_reduce;
use invar::fourier::{eval_phi, random_phi};
use invar::invariant::{canonicalize, permutations, Invariant};
use invar::jets::Potential;
use invar::sampling::{
    random_coexact, random_divergence, random_invariant, random_order_zero, random_shape,
};
use invar::solver::{decompose, verify_decomposition};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_gauss() -> impl Strategy<Value = GaussRat> {
    (-3i64..=3, -3i64..=3).prop_map(|(a, b)| gauss(rat(a), rat(b)))
}

fn weyl_series(n: usize) -> impl Strategy<Value = LaurentOperatorSeries<GaussRat>> {
    let mono = (
        0i32..=2,
        prop::collection::vec(0u8..=2, n),
        prop::collection::vec(0u8..=2, n),
    );
    prop::collection::vec((mono, small_gauss()), 1..4).prop_map(move |terms| {
        let mut s = LaurentOperatorSeries::zero(n, 4, 8);
        for ((t, z, d), c) in terms {
            let m = WeylMonomial::new(t, &z, &d);
            // Truncation is only multiplicative on non-negative weights.
            if m.weight2() >= 0 {
                s.insert(m, c);
            }
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_ignores_factor_order(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (w, sigma) = random_shape(6, 3, &mut r);
        let l = random_invariant(w, sigma, &mut r);
        let canon = canonicalize(&l);
        for perm in permutations(sigma) {
            let mut relabelled = Invariant::scalar_zero(l.kind());
            for (m, c) in l.iter() {
                relabelled.add_term(m.permuted(&perm), c.clone()).unwrap();
            }
            prop_assert_eq!(canonicalize(&relabelled), canon.clone());
        }
    }

    #[test]
    fn divergences_integrate_to_zero(seed in any::<u64>(), extra in 0u32..=2, sigma in 1usize..=2) {
        let (_, _, l) = random_divergence(2 * sigma as u32 + extra, sigma, &mut rng(seed));
        prop_assert!(integrates_to_zero(&l).unwrap());
        let v = eval_phi(&l, &random_phi(2, 2, seed)).unwrap();
        prop_assert!(Coeff::is_zero(&v));
    }

    #[test]
    fn decomposition_reconstructs_input(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (w, sigma) = random_shape(6, 3, &mut r);
        let l = random_coexact(w, sigma, &mut r);
        let d = decompose(&l, None).unwrap();
        prop_assert!(verify_decomposition(&l, &d));
        prop_assert_eq!(d.reconstruct().unwrap(), canonicalize(&l));
    }

    #[test]
    fn chern_reduction_reconstructs_input(seed in any::<u64>(), sigma in 1usize..=3) {
        let l = random_order_zero(sigma, &mut rng(seed));
        let red = chern_reduce(&l).unwrap();
        prop_assert_eq!(red.reconstruct(), l);
    }

    #[test]
    fn invariant_json_roundtrip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (w, sigma) = random_shape(6, 3, &mut r);
        let l = random_invariant(w, sigma, &mut r);
        prop_assert_eq!(Invariant::from_json(&l.to_json()).unwrap(), l);
    }

    #[test]
    fn weyl_product_is_associative(a in weyl_series(2), b in weyl_series(2), c in weyl_series(2)) {
        let left = a.weyl_mul(&b).weyl_mul(&c);
        let right = a.weyl_mul(&b.weyl_mul(&c));
        prop_assert_eq!(left.terms(), right.terms());
    }

    #[test]
    fn adjoint_is_conjugate_linear(a in weyl_series(1), b in weyl_series(1), s in small_gauss()) {
        let i = gauss(rat(0), rat(1));
        let lhs = a.add(&b.map_coeffs(|x| x.mul(&s))).adjoint(4);
        let rhs = a.adjoint(4).add(&b.adjoint(4).map_coeffs(|x| x.mul(&s.conj())));
        prop_assert_eq!(lhs.terms(), rhs.terms());
        let scaled = a.map_coeffs(|x| x.mul(&i)).adjoint(4);
        let expect = a.adjoint(4).map_coeffs(|x| x.mul(&i).neg());
        prop_assert_eq!(scaled.terms(), expect.terms());
    }

    #[test]
    fn potential_json_roundtrip(seed in any::<u64>(), n in 1usize..=2) {
        let pot = Potential::random_hermitian(n, 4, seed).unwrap();
        let back = Potential::from_json(&pot.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.to_json().unwrap(), pot.to_json().unwrap());
    }
}

#[test]
fn identity_is_weyl_unit() {
    let mut x = LaurentOperatorSeries::zero(2, 4, 8);
    x.insert(WeylMonomial::new(1, &[1, 0], &[0, 2]), gauss_int(3));
    let one = LaurentOperatorSeries::one(2, 4, 8);
    assert_eq!(one.weyl_mul(&x).terms(), x.terms());
    assert_eq!(x.weyl_mul(&one).terms(), x.terms());
}
