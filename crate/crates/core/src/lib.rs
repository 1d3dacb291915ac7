//! Exact symbolic verification of Noether symmetries and conservation laws for
//! the damped nonlinear wave family `□u + a(t)u_t + f(u) = 0`.

pub mod currents;
pub mod jet;
pub mod model;
pub mod param;
pub mod solve;
pub mod symmetry;
