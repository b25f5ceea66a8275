//! Steady-state search-and-matching model of unemployment with a pluggable
//! matching technology.
//!
//! The crate is organized around the flow of a desk-scale study:
//!
//! - [`matching`] defines the matching-technology abstraction and the two
//!   concrete parameterizations (Cobb-Douglas and nonlinear).
//! - [`equilibrium`] checks the existence condition, root-finds equilibrium
//!   tightness, and assembles all steady-state objects.
//! - [`elasticity`] decomposes the productivity elasticity of tightness into
//!   its two factors and computes the wage elasticity.
//! - [`calibration`] inverts the model to hit an unemployment target and
//!   implements the cost/efficiency renormalization.
//! - [`experiment`] runs productivity sweeps and emits CSV rows.
//! - [`empirics`] ingests public unemployment and job-openings series and
//!   builds the empirical tightness and bound series.

// Domain checks are written as `!(x > 0.0)` so that NaN falls out of the
// domain along with everything else.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod elasticity;
pub mod empirics;
pub mod equilibrium;
pub mod experiment;
pub mod matching;
mod root;

pub use calibration::{calibrate_efficiency, CalibrationTarget};
pub use elasticity::{tightness_elasticity, ElasticityReport};
pub use equilibrium::{solve_equilibrium, EconomyParams, Equilibrium};
pub use matching::{CobbDouglas, MatchingTechnology, Nonlinear, Shape, Technology};
