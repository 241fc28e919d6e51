//! Prints the Chern-polynomial invariants of each degree and reduces a random
//! order-zero invariant against them.

use invar::chern::{chern_basis, chern_reduce};
use invar::sampling::random_order_zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    for sigma in 1..=3 {
        for (p, inv) in chern_basis(sigma) {
            println!("I{} = {}", p, inv);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let l = random_order_zero(3, &mut rng);
    let red = chern_reduce(&l).unwrap();
    println!("\nL = {}", l);
    for (p, c) in &red.chern {
        println!("  coefficient of I{}: {}", p, c);
    }
    println!("  remainder: {}", red.remainder);
    assert_eq!(red.reconstruct(), l);
}
