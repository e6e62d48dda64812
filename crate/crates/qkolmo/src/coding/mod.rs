//! Self-delimiting integers, blind prefix coding and standard (de)compression.

pub mod compress;
pub mod prefix;

pub use compress::{ceil_log2, embed_fixed_length, standard_basis, unembed_fixed_length, CompressionMap};
pub use prefix::{
    blind_prefix_extend, kraft_check, kraft_sum, self_delim_decode, self_delim_decode_big, self_delim_encode,
    self_delim_encode_big, PrefixCode,
};
