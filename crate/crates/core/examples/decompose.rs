//! Splits an invariant that integrates to zero into a Chern part plus the
//! divergence of two 1-forms, then checks the result.

use invar::sampling::random_coexact;
use invar::solver::{decompose, verify_decomposition};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let l = random_coexact(5, 2, &mut rng);
    println!("L = {}", l);
    let d = decompose(&l, None).unwrap();
    println!("{}", d.to_json_pretty());
    println!("verified: {}", verify_decomposition(&l, &d));
}
