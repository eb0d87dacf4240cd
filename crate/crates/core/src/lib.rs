//! Finitely presented strongly maximal TAF algebras: presentations, ideals,
//! C*-envelopes of quotients, primitivity, mi-chains and nest representations.
//!
//! Levels, rows and columns are 1-based; summand ids are 0-based.

pub mod chain;
pub mod diagram;
pub mod envelope;
pub mod error;
pub mod fixtures;
pub mod ideal;
pub mod irreducibility;
pub mod linear;
pub mod nest;
pub mod oracle;
pub mod primitivity;
pub mod scalar;

pub use chain::{ideal_from_mi_chain, is_mi_chain, mi_chain_from_ideal, ChainCheck, ChainIdeal, MiChain};
pub use diagram::{
    summand_graph, validate_presentation, EmbeddingArm, Layout, MatrixUnit, StationaryTemplate, SummandGraph,
    TafPresentation, TemplateArm, ValidationReport, Violation,
};
pub use envelope::{
    build_envelope, envelope_arms, envelope_compression, j_free_intervals, EnvelopeDiagram, KeptStatus, NodeRef,
};
pub use error::{Result, TafError};
pub use ideal::{contains, generate_ideal, intersect, join, ClosedSet, IdealTable, Membership};
pub use irreducibility::{is_meet_irreducible, MiAnswer, MiMethod, MiReport};
pub use linear::{SparseMatrix, UnitCombination};
pub use nest::{
    build_state_chain, check_nest, density_witness, finite_gns_stage, kernel_check, FiniteNestStage, StateChain,
    SubordinateRule,
};
pub use primitivity::{
    analyze_envelope, characteristic_matrix_units, descendant_matrices, find_essential_path, is_prime_bounded,
    is_prime_pairwise, verify_essential_path, PrimenessStatus, PrimenessVerdict, TypeGraph,
};
pub use scalar::Scalar;

/// Integer coefficients; exact and the default for 0/1 stage matrices.
pub type IntCombination = UnitCombination<i64>;
pub type RationalCombination = UnitCombination<num_rational::Rational64>;
pub type RealCombination = UnitCombination<f64>;
pub type RealCombination32 = UnitCombination<f32>;
pub type NestStage = FiniteNestStage<i64>;
pub type RationalNestStage = FiniteNestStage<num_rational::Rational64>;
pub type RealNestStage = FiniteNestStage<f64>;
