//! Exact arithmetic for theta blocks and Jacobi forms of lattice index.

pub mod blocks;
pub mod cyclotomic;
pub mod error;
pub mod hecke;
pub mod lattice;
pub mod lifts;
pub(crate) mod par;
pub mod qseries;
pub mod rational;
pub mod weil;

pub use error::{Error, Result};
pub use lattice::{DualVector, GramLattice};
pub use qseries::{Exponent, FourierSeries};
pub use rational::Rat;
