//! Ergodic-source models, minimal typical projectors and the universal
//! typical subspace construction.

pub mod source;
pub mod typical;

pub use source::{beta_report, parse_exact, BetaRow, LocalDensity, SourceKind, SourceModel, TypicalProjector};
pub use typical::{
    aggregated_trace_bound, block_length_lm, empirical_typical_codewords, q_projector, symmetric_basis,
    symmetric_subspace_check, symmetric_subspace_dim, universal_typical_projector, UniversalProjector,
};
