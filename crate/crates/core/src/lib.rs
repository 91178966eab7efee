//! Exact Schubert calculus for type-A flag varieties `SL(n)/P_J`.
//!
//! The crate is organised around one trusted multiplication kernel (the
//! Borel presentation of `H*(G/B)` acting on Schubert polynomials) plus an
//! independent Monk-rule oracle, and two consumers of that kernel:
//!
//! * [`obstruct`] builds the integer constraint system a morphism
//!   `P^m -> G/P_J` induces on cohomology, searches for admissible pullback
//!   assignments, and verifies case-split sum-of-squares nonexistence
//!   certificates.
//! * [`geometry`] realises the positive results with exact rational linear
//!   algebra: the symplectic line map `P^3 -> G(1,3,4)` and its embedding
//!   into flag varieties of minimal parabolics.
//!
//! All arithmetic is exact: big integers in the polynomial ring, big
//! rationals in elimination. No floating point anywhere.

pub mod cohomology;
pub mod error;
pub mod geometry;
pub mod obstruct;
pub mod poly;
pub mod weyl;

pub use error::{Error, Result};
