//! Polytope decision sets given as a paired vertex list (V-rep) and
//! halfspace list (H-rep).
//!
//! Both representations are required: the inscribed-ellipsoid solver works on
//! facets while learners take argmaxes over vertices. General vertex/facet
//! enumeration is out of scope, so consistency between the two reps is
//! validated rather than derived.

use serde::{Deserialize, Serialize};

use crate::linalg::{dot, norm};

use super::GeometryError;

/// Geometric tolerance used for membership and tightness predicates.
pub const GEOM_TOL: f64 = 1e-9;

/// Closed halfspace `a . x <= b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    /// Facet normal.
    pub a: Vec<f64>,
    /// Offset.
    pub b: f64,
}

impl Halfspace {
    pub fn new(a: Vec<f64>, b: f64) -> Self {
        Self { a, b }
    }

    /// Signed slack `b - a . x`; nonnegative inside.
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.b - dot(&self.a, x)
    }
}

/// A bounded polytope with both representations validated against each other.
///
/// Invariants established by [`validate_polytope`]:
/// - every vertex satisfies every halfspace within [`GEOM_TOL`];
/// - every vertex has Euclidean norm at most 1 (the decision sets this crate
///   models live inside the unit ball);
/// - the vertex centroid strictly satisfies all halfspaces, so the interior
///   is nonempty;
/// - `dim >= 1` and there are at least `dim + 1` vertices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Polytope {
    #[serde(rename = "d")]
    dim: usize,
    vertices: Vec<Vec<f64>>,
    halfspaces: Vec<Halfspace>,
    /// Per-halfspace flag: tight at fewer than `dim` vertices, so it does not
    /// support a facet of the vertex hull.
    #[serde(skip)]
    redundant: Vec<bool>,
}

impl Polytope {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    /// Halfspaces flagged as not tight at `dim` or more vertices.
    pub fn redundant_flags(&self) -> &[bool] {
        &self.redundant
    }

    /// Membership against the H-rep within `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim && self.halfspaces.iter().all(|h| h.slack(x) >= -tol)
    }

    /// Mean of the vertices; strictly interior for any validated polytope.
    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for v in &self.vertices {
            for (ci, vi) in c.iter_mut().zip(v) {
                *ci += vi;
            }
        }
        let n = self.vertices.len() as f64;
        c.iter_mut().for_each(|ci| *ci /= n);
        c
    }

    /// Translate the polytope by `shift` (vertices and facet offsets move
    /// together). The caller is responsible for the norm bound still holding
    /// if the result is used as a decision set.
    pub fn translated(&self, shift: &[f64]) -> Polytope {
        let vertices = self
            .vertices
            .iter()
            .map(|v| v.iter().zip(shift).map(|(vi, si)| vi + si).collect())
            .collect();
        let halfspaces = self
            .halfspaces
            .iter()
            .map(|h| Halfspace::new(h.a.clone(), h.b + dot(&h.a, shift)))
            .collect();
        Polytope {
            dim: self.dim,
            vertices,
            halfspaces,
            redundant: self.redundant.clone(),
        }
    }

    /// Index of the vertex maximizing `score`, lowest index on ties
    /// (tie tolerance `GEOM_TOL`).
    pub fn argmax_vertex(&self, score: impl Fn(&[f64]) -> f64) -> usize {
        let mut best = 0usize;
        let mut best_score = f64::NEG_INFINITY;
        for (i, v) in self.vertices.iter().enumerate() {
            let s = score(v);
            if s > best_score + GEOM_TOL {
                best = i;
                best_score = s;
            }
        }
        best
    }
}

/// Validate a paired V-rep/H-rep into a [`Polytope`].
///
/// Checks run in this order: dimensional consistency, the unit-norm bound,
/// nonempty interior (vertex centroid must clear every facet by `GEOM_TOL`),
/// then per-vertex halfspace membership. Each halfspace is also cross-checked
/// for tightness at `dim` or more vertices; failures are flagged, not
/// rejected, since a redundant facet does not invalidate the set.
pub fn validate_polytope(
    vertices: Vec<Vec<f64>>,
    halfspaces: Vec<Halfspace>,
) -> Result<Polytope, GeometryError> {
    if vertices.is_empty() || halfspaces.is_empty() {
        return Err(GeometryError::DimensionMismatch(
            "vertex and halfspace lists must be nonempty".into(),
        ));
    }
    let dim = vertices[0].len();
    if dim == 0 {
        return Err(GeometryError::DimensionMismatch(
            "dimension must be at least 1".into(),
        ));
    }
    if vertices.len() < dim + 1 {
        return Err(GeometryError::DimensionMismatch(format!(
            "need at least {} vertices in dimension {}, got {}",
            dim + 1,
            dim,
            vertices.len()
        )));
    }
    for (i, v) in vertices.iter().enumerate() {
        if v.len() != dim {
            return Err(GeometryError::DimensionMismatch(format!(
                "vertex {i} has length {}, expected {dim}",
                v.len()
            )));
        }
    }
    for (i, h) in halfspaces.iter().enumerate() {
        if h.a.len() != dim {
            return Err(GeometryError::DimensionMismatch(format!(
                "halfspace {i} normal has length {}, expected {dim}",
                h.a.len()
            )));
        }
        if norm(&h.a) < GEOM_TOL {
            return Err(GeometryError::DimensionMismatch(format!(
                "halfspace {i} has a near-zero normal"
            )));
        }
    }
    for (i, v) in vertices.iter().enumerate() {
        let n = norm(v);
        if n > 1.0 + GEOM_TOL {
            return Err(GeometryError::NormExceedsOne { vertex: i, norm: n });
        }
    }
    // Interior check before per-vertex membership so contradictory H-reps
    // surface as EmptyInterior rather than as an arbitrary vertex violation.
    let centroid = {
        let mut c = vec![0.0; dim];
        for v in &vertices {
            for (ci, vi) in c.iter_mut().zip(v) {
                *ci += vi;
            }
        }
        let n = vertices.len() as f64;
        c.iter_mut().for_each(|ci| *ci /= n);
        c
    };
    for h in &halfspaces {
        if h.slack(&centroid) < GEOM_TOL {
            return Err(GeometryError::EmptyInterior);
        }
    }
    for (i, v) in vertices.iter().enumerate() {
        for (j, h) in halfspaces.iter().enumerate() {
            if h.slack(v) < -GEOM_TOL {
                return Err(GeometryError::VertexOutsideHalfspace {
                    vertex: i,
                    halfspace: j,
                    violation: -h.slack(v),
                });
            }
        }
    }
    let redundant = halfspaces
        .iter()
        .map(|h| {
            let scale = norm(&h.a).max(1.0);
            let tight = vertices
                .iter()
                .filter(|v| h.slack(v).abs() <= GEOM_TOL * scale.max(h.b.abs()).max(1.0))
                .count();
            tight < dim
        })
        .collect();
    Ok(Polytope {
        dim,
        vertices,
        halfspaces,
        redundant,
    })
}

/// Parse a polytope from its JSON form
/// `{"d": .., "vertices": [[..]], "halfspaces": [{"a": [..], "b": ..}]}`
/// and run full validation.
pub fn polytope_from_json(text: &str) -> Result<Polytope, GeometryError> {
    #[derive(Deserialize)]
    struct Raw {
        d: usize,
        vertices: Vec<Vec<f64>>,
        halfspaces: Vec<Halfspace>,
    }
    let raw: Raw =
        serde_json::from_str(text).map_err(|e| GeometryError::DimensionMismatch(e.to_string()))?;
    if raw.vertices.iter().any(|v| v.len() != raw.d) {
        return Err(GeometryError::DimensionMismatch(format!(
            "declared d = {} does not match vertex data",
            raw.d
        )));
    }
    validate_polytope(raw.vertices, raw.halfspaces)
}
