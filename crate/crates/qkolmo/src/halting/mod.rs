//! Exact halting subspaces, the ball test and interpolation algorithms,
//! approximate halting spaces and the halting-stability bounds.

pub mod approx;
pub mod bounds;
pub mod exact;

pub use approx::{
    approx_halting_space, ball_halting_test, ball_test, interpolate, interpolating_subspace, sphere_cover,
    ApproxHaltingSpace, SphereCover,
};
pub use exact::{
    eps_t_halting, exact_halting_space, exact_halting_spaces, is_prefix_domain, machine_id, HaltingForms, HaltingSpace,
};
