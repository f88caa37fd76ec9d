//! Lower-bound instance families: the recursive layered graph and the
//! girth-based distance-δ pairs.

pub mod base_graph;
pub mod delta;
pub mod hkappa;

pub use base_graph::{
    additive_base_graph, convex_label_base_graph, convex_labels, provide, validate_base_graph, BaseGraph, BaseReport,
    BaseViolation,
};
pub use delta::{
    delta_pairs, forced_edges_witness, sample_and_cover, sample_and_cover_with, CoverReport, DeltaPairInstance,
};
pub use hkappa::{
    build_h_kappa, build_h_kappa_capped, verify_mechanism, BaseProvider, ConvexProvider, FixedTop, HKappaInstance,
    MechanismReport,
};
