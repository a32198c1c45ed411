//! Explicit hyperbolicity constants for quasi-geodesic path systems, a
//! verifier for finite metric instances, and an approximate curtain model
//! over Euclidean spaces and metric trees.

pub mod constants;
pub mod curtain;
pub mod error;
pub mod metric;
pub mod schema;

pub use constants::{
    curtain_model_params, delta_from_delta_prime, delta_prime, eval_f, kappa_n, kappa_table, kappa_terms, solve_kappa,
    theorem_b_bounds, HyperbolicityBounds, KappaCertificate, KappaMethod, QuasiParams, Route,
};
pub use curtain::backend::{MetricTree, Point, SpaceBackend, TreePoint};
pub use curtain::dual::{curtain_dual, Chain, Curtain};
pub use error::{ConstantsError, CurtainError, MetricError, SchemaError};
pub use metric::paths::PathSystem;
pub use metric::space::FiniteMetricSpace;
pub use metric::verify::{certify, VerifierReport};
