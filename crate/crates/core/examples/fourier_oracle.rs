//! Evaluates ∫L(φ) on the torus for trigonometric polynomials φ: Chern
//! polynomials vanish, |Δφ|² does not.

use invar::arith::{fmt_gauss, ratio};
use invar::chern::{chern_invariant, Partition};
use invar::fourier::{eval_phi, random_phi};
use invar::invariant::{ContractionMonomial, Invariant, Kind};

fn main() {
    let c2 = chern_invariant(&Partition::new(vec![2]).unwrap());
    let lap_sq = Invariant::from_monomial(
        ContractionMonomial::scalar(Kind::Phi, vec![vec![1, 1], vec![1, 1]]).unwrap(),
        ratio(1, 1),
    );
    for seed in 0..3 {
        let phi = random_phi(2, 2, seed);
        println!(
            "seed {}: {} modes, ∫I(2) = {}, ∫L = {}",
            seed,
            phi.support_size(),
            fmt_gauss(&eval_phi(&c2, &phi).unwrap()),
            fmt_gauss(&eval_phi(&lap_sq, &phi).unwrap())
        );
    }
}
