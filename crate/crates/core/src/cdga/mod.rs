//! Finite connected cdgas in low degrees: cohomology, the truncations
//! `A[q]`, holonomy Lie algebras, resonance, and fixed sub-cdgas under a
//! finite group action.

mod algebra;
mod ops;

pub use algebra::{CdgaMorphism, FiniteCdga, MAX_LOAD_DEGREE};
pub use ops::{
    fixed_subcdga, holonomy, resonance_dim, resonance_membership, resonance_trivial_probe,
    truncate, GroupAction, ProbeVerdict, ResonancePoint,
};
