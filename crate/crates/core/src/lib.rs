//! Deterministic maximization of monotone submodular functions with bounded
//! curvature under a matroid constraint.
//!
//! The solver splits `f` into a curved part `g` and an additive part `l`,
//! lifts the ground set to `ℓ` colored copies and runs a best-improvement
//! local search guided by the potential `Φ_f = Φ_g + l∘π` (see [`potential`]).
//! At an approximate local maximum the projected solution is within
//! `1 - κ/e - ε` of the optimum. The [`verify`] module re-checks the local
//! guarantees numerically against brute-force optima on small instances.

pub mod corpus;
pub mod error;
pub mod instance;
pub mod matroid;
pub mod potential;
pub mod search;
pub mod set;
pub mod setfn;
pub mod verify;

pub use error::{Error, Result};
pub use instance::{load_instance, parse_instance, Instance, InstanceFile, LoadOptions};
pub use matroid::{LiftedElement, LiftedSolution, MatroidKind, MatroidOracle};
pub use potential::{PotentialParams, PotentialValue};
pub use search::{solve_with_curvature, GammaMode, RunReport, SearchConfig};
pub use set::{ElementSet, GroundSet};
pub use setfn::{
    curvature, decompose, Decomposition, FunctionKind, SetFunction, SetFunctionOracle,
};
