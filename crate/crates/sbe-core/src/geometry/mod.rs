//! Polytope decision sets, inscribed ellipsoids, and exploration bases.
//!
//! All geometry values are immutable after construction and safe to share
//! across threads; the solver itself is single-threaded per instance.

mod basis;
mod ellipsoid;
mod families;
mod polytope;

pub use basis::{decompose, exploration_basis, reconstruct, Decomposition, ExplorationBasis};
pub use ellipsoid::{
    certify_ellipsoid, inscribed_ellipsoid, kappa_bound, unit_ball_volume, CertifiedEllipsoid,
    Ellipsoid, EllipsoidMode, SOLVER_DEFAULT_TOL, SOLVER_ITERATION_CAP,
};
pub use families::{
    family_polytope, random_linear_image, reference_ellipsoid, regular_simplex_vertices, Family,
};
pub use polytope::{polytope_from_json, validate_polytope, Halfspace, Polytope, GEOM_TOL};

/// Errors from polytope validation and ellipsoid computation.
#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("vertex {vertex} violates halfspace {halfspace} by {violation:.3e}")]
    VertexOutsideHalfspace {
        vertex: usize,
        halfspace: usize,
        violation: f64,
    },
    #[error("polytope has empty interior")]
    EmptyInterior,
    #[error("vertex {vertex} has norm {norm} > 1")]
    NormExceedsOne { vertex: usize, norm: f64 },
    #[error("ellipsoid solver failed to converge within {iterations} iterations")]
    SolverNonConvergence { iterations: usize },
    #[error("semi-axis {axis} is degenerate")]
    DegenerateAxis { axis: usize },
    #[error("unsupported polytope family: {0}")]
    UnsupportedFamily(String),
}
