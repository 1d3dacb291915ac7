//! Finite-difference runs of the damped wave family on periodic grids, and
//! the diagnostics that check conservation laws and damping removal on them.

pub mod diagnostics;
pub mod grid;
pub mod law;
pub mod snapio;
pub mod solver;
pub mod sum;
pub mod xform;
