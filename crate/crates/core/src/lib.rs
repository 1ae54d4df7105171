//! Drinfeld-type modular forms over F_q(T): the Bruhat-Tits tree of PGL₂(F_∞),
//! quotient graphs Γ₀(n)\T, harmonic cochains, Hecke operators, and the
//! Eisenstein ideal and cuspidal divisor group.

pub mod cli;
pub mod cochain;
pub mod cusp;
pub mod cyclo;
pub mod eisenstein;
pub mod error;
pub mod field;
pub mod hecke;
pub mod intmat;
pub mod lattice;
pub mod laurent;
pub mod parse;
pub mod pmat;
pub mod poly;
pub mod quotient;
pub mod tree;
pub mod verify;

pub use error::{Error, Result};
pub use field::Fq;
pub use intmat::IntMatrix;
pub use laurent::Laurent;
pub use poly::Poly;
