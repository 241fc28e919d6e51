//! Builds a small invariant by hand, relabels its factors and shows that the
//! canonical form does not depend on the labelling.

use invar::arith::ratio;
use invar::invariant::{canonicalize, ContractionMonomial, Invariant, Kind};

fn main() {
    let m =
        ContractionMonomial::scalar(Kind::Phi, vec![vec![2, 1, 0], vec![0, 1, 1], vec![1, 0, 1]])
            .unwrap();
    let relabelled = m.permuted(&[2, 0, 1]);
    println!("monomial:    {}", m);
    println!("relabelled:  {}", relabelled);

    let mut inv = Invariant::from_monomial(m, ratio(3, 2));
    inv.add_term(relabelled, ratio(-1, 2)).unwrap();
    let canon = canonicalize(&inv);
    println!("sum:         {}", canon);
    println!(
        "weight {:?}, degree {:?}",
        canon.homogeneous_weight(),
        canon.homogeneous_degree()
    );
    println!("{}", canon.to_json_pretty());
}
