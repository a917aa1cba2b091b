//! Exact machinery for counting algebraic points with conjugate coordinates
//! near manifolds: symmetric-function algebra, symmetric-independence
//! certification, Vandermonde-system lattice geometry, tailored irreducible
//! polynomials and brute-force point counting.

pub mod counting;
pub mod error;
pub mod goodness;
pub mod groebner;
pub mod lattice;
pub mod matrix;
pub mod poly;
pub mod profile;
mod quadratic;
pub mod rational;
pub mod reduction;
pub mod reference;
pub mod symmetric;
pub mod symord;
pub mod tailored;
pub mod univariate;

pub use error::{Error, Result};
