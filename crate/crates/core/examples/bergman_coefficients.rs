//! Bergman kernel coefficients a_j at the origin, compared with the local
//! curvature formulas for a random potential.

use invar::arith::{fmt_gauss, gauss_rat, ratio, Coeff, GaussRat};
use invar::bergman::bergman_coefficients;
use invar::jets::{named_scalar, Cap, NamedScalar, Potential};

fn main() {
    let fs = Potential::fubini_study(2, 8).unwrap();
    let a: Vec<GaussRat> = bergman_coefficients(&fs, 3, Cap::NONE).unwrap();
    for (j, v) in a.iter().enumerate() {
        println!("Fubini-Study a{} = {}", j, fmt_gauss(v));
    }

    let pot = Potential::random_hermitian(2, 4, 5).unwrap();
    let a: Vec<GaussRat> = bergman_coefficients(&pot, 2, Cap::NONE).unwrap();
    let get = |s: NamedScalar| -> GaussRat { named_scalar(&pot, s, Cap::NONE).unwrap() };
    let rhs = get(NamedScalar::Todd(2))
        .add(&get(NamedScalar::LaplaceScalar(1)).mul(&gauss_rat(ratio(1, 3))));
    println!("\nrandom potential:");
    println!(
        "a1 = {}, S/2 = {}",
        fmt_gauss(&a[1]),
        fmt_gauss(&get(NamedScalar::SCALAR).mul(&gauss_rat(ratio(1, 2))))
    );
    println!("a2 = {}, P2 + ΔS/3 = {}", fmt_gauss(&a[2]), fmt_gauss(&rhs));
}
