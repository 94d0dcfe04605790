//! Exact rational computations for free Lie algebras, finitely presented Lie
//! algebras and their nilpotent quotients, finite CDGAs, and
//! Chevalley–Eilenberg towers.

pub mod cdga;
pub mod ce;
pub mod error;
pub mod fplie;
pub mod freelie;
pub mod ratlin;

pub use error::{Error, Result};
