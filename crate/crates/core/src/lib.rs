//! Exact `p`-adic and CM computations: unramified `p`-adic arithmetic,
//! Hilbert class polynomials, modular polynomials and `p`-adic distances,
//! a quaternion order over `Q(sqrt(-3))`, a square-free sieve, and the
//! experiment runners built on them.

pub mod arith;
pub mod cm;
pub mod error;
pub mod experiments;
pub mod galois_matrix;
pub mod modular;
pub mod padic;
pub mod quaternion;
pub mod sieve;

pub use error::{Error, Result};
