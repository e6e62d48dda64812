//! Machine model: specifications, exact evolution, halting detection, the
//! reading operation and parameter encoding.

pub mod encode;
pub mod machines;
pub mod qstring;
pub mod sim;
pub mod spec;
pub mod validate;

pub use encode::{encode_pair, encode_rational, encoded_length};
pub use qstring::{
    block_dim, index_string, is_binary, string_index, strings_of_len, Density, QubitString, SurdMat, MAX_DENSE_LEN,
};
pub use sim::{apply, halting_time, qf_weights, run, Config, GlobalState, Weight, WeightClass};
pub use spec::{Branch, Cell, Dir, QtmSpec, RuleGroup};
pub use validate::validate_unitarity;
