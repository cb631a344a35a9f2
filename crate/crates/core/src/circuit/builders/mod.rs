//! Reusable subcircuits.

pub(crate) mod mcx;
mod poly;
mod qft;
mod reflection;
mod state_prep;

pub use mcx::build_mcx;
pub use poly::{build_poly_phase, poly_phase_affine};
pub use qft::{build_cqft, build_qft};
pub use reflection::build_zero_reflection;
pub use state_prep::build_state_prep;
