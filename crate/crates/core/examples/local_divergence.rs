//! Divergences of 1-forms integrate to zero; the local residue detects this
//! formally, without choosing a manifold.

use invar::arith::ratio;
use invar::calculus::{divergence, integrates_to_zero, local_residue};
use invar::invariant::{ContractionMonomial, Invariant, Kind};
use invar::sampling::random_divergence;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (t_hol, t_anti, l) = random_divergence(5, 2, &mut rng);
    println!("T_a    = {}", t_hol);
    println!("T_abar = {}", t_anti);
    println!("L      = {}", l);
    println!("div T_a = {}", divergence(&t_hol).unwrap());
    println!("integrates to zero: {}", integrates_to_zero(&l).unwrap());

    let lap_sq = Invariant::from_monomial(
        ContractionMonomial::scalar(Kind::Phi, vec![vec![1, 1], vec![1, 1]]).unwrap(),
        ratio(1, 1),
    );
    println!("\nL = {}", lap_sq);
    println!("residue = {}", local_residue(&lap_sq).unwrap());
    println!(
        "integrates to zero: {}",
        integrates_to_zero(&lap_sq).unwrap()
    );
}
