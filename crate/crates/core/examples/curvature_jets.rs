//! Curvature scalars of a Kähler potential from its Taylor jets: symbolic in
//! the jet variables, and exact for Fubini-Study.

use invar::arith::{fmt_gauss, GaussRat};
use invar::jets::{named_scalar, Cap, JetPoly, NamedScalar, Potential};

fn main() {
    let sym = Potential::symbolic(2).unwrap();
    let s: JetPoly = named_scalar(&sym, NamedScalar::SCALAR, Cap::NONE).unwrap();
    println!("S = {}", s);

    let fs = Potential::fubini_study(2, 10).unwrap();
    for name in ["S", "|R|^2", "|Ric|^2", "ΔS", "P2", "divQ"] {
        let x: NamedScalar = name.parse().unwrap();
        let v: GaussRat = named_scalar(&fs, x, Cap::NONE).unwrap();
        println!("Fubini-Study {:>8} = {}", name, fmt_gauss(&v));
    }
}
