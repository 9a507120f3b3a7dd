//! Exact integer, modular and lattice primitives.
//!
//! Everything here is a pure function on owned or borrowed values. Big
//! integers come from `num-bigint`; the hot prime scans use the `u64`
//! variants in [`poly`] and [`prime`].

pub mod congruence;
pub mod matrix;
pub mod poly;
pub mod prime;

pub use congruence::{mod_floor, mod_inverse, solve_linear_congruence};
pub use matrix::{hnf, IntMatrix};
pub use poly::{multiple_roots_mod_p, poly_roots_mod_p, ModPoly};
pub use prime::{factorize, is_prime, is_prime_u64, primes_up_to};
