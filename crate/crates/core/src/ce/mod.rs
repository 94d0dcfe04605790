//! Chevalley–Eilenberg complexes of nilpotent Lie algebras, flat
//! connections, and the tower of cochain algebras of the nilpotent
//! quotients of a holonomy Lie algebra.

mod complex;
mod flat;
mod tower;

pub use complex::{
    ce_chain_boundary, ce_cochain, lie_homology, lie_homology_by_weight, CeComplex, ExteriorBasis,
};
pub use flat::{flat_to_lie_map, flat_to_morphism, is_flat, FlatConnection};
pub use tower::{
    canonical_connection, canonical_filtration, canonical_flatness, check_stability,
    classifying_stage, classifying_stage_in, homology_image_inclusion, verify_one_equivalence,
    verify_one_equivalence_in, ClassifyingStage, FiltrationReport, FiltrationStage, HirschTower,
    OneEquivalence, Stability, TowerStage,
};
