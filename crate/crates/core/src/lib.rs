//! Finite-element simulation of Boussinesq natural convection in
//! rectangular enclosures on two-level tetrahedral meshes.

// `!(x > 0.0)` also rejects NaN; index loops mirror the matrix algebra.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod exec;
pub mod fem;
pub mod mesh;
pub mod model;
pub mod postprocess;
pub mod run;
pub mod solvers;
pub mod stepper;
