pub mod arith;
pub mod bergman;
pub mod calculus;
pub mod chern;
pub mod cli;
pub mod fourier;
pub mod invariant;
pub mod jets;
pub mod linalg;
pub mod sampling;
pub mod solver;
pub mod verify;
