//! Universal encode/decode construction and complexity bound calculators.
//!
//! The universal machine is a host-level decoder rather than a tape-level
//! machine description: it recomputes halting spaces, matches the codeword,
//! decompresses and simulates.

pub mod bounds;
pub mod universal;

pub use bounds::{
    chi_quantity, counting_bound, counting_experiment, holevo_bound, incompressibility_audit, orthonormal_bound,
    qc_scheme_upper_bound, qc_upper_bound, relation_check, AuditReport, CountingReport, Ensemble, ParamMode, QcBound,
    RelationReport, SearchConfig,
};
pub use universal::{
    cascade_levels, decode_program, default_eps0, encode_input, encode_superposition, fine_tuning,
    halting_time_sequence, machine_description, parse_machine_description, FineTuning, HaltingTimeSequence, Mode,
    PipelineOptions, SeqEntry, UniversalProgram,
};
