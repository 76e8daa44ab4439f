//! Exploration basis: the inscribed ellipsoid's center and semi-axes recast
//! as the orthogonal action set a learner explores with.
//!
//! All learner-side math happens in shifted coordinates `D' = D - s0` where
//! `s0` is the ellipsoid center; shifting changes every action's reward by
//! the same constant `<s0, theta>`, which affects neither argmaxes nor gaps.
//! Points are mapped back to the original frame before being submitted to an
//! environment.

use serde::Serialize;

use crate::linalg::{dot, norm, sub};

use super::ellipsoid::CertifiedEllipsoid;
use super::polytope::{Polytope, GEOM_TOL};
use super::GeometryError;

/// Orthogonal exploration basis with its certified containment factor.
#[derive(Debug, Clone, Serialize)]
pub struct ExplorationBasis {
    /// The ellipsoid center subtracted from all actions.
    pub origin_shift: Vec<f64>,
    /// Semi-axis vectors `s_1..s_d` (orthogonal, direction times length).
    pub axes: Vec<Vec<f64>>,
    /// Certified factor with `E ⊆ D' ⊆ kappa E`.
    pub kappa: f64,
}

/// Coefficients of a point expressed in an [`ExplorationBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub coefficients: Vec<f64>,
}

/// Derive the exploration basis from a certified inscribed ellipsoid.
///
/// Every axis endpoint is checked to lie inside the shifted polytope; the
/// semi-axes of an inscribed ellipsoid always do, so a failure means the
/// certificate was wrong.
pub fn exploration_basis(
    p: &Polytope,
    ce: &CertifiedEllipsoid,
) -> Result<ExplorationBasis, GeometryError> {
    let e = &ce.ellipsoid;
    for (j, s) in e.semi_axes.iter().enumerate() {
        if norm(s) < 1e-12 {
            return Err(GeometryError::DegenerateAxis { axis: j });
        }
    }
    for s in &e.semi_axes {
        let endpoint: Vec<f64> = e.center.iter().zip(s).map(|(c, si)| c + si).collect();
        if !p.contains(&endpoint, GEOM_TOL * 10.0) {
            return Err(GeometryError::SolverNonConvergence { iterations: 0 });
        }
    }
    Ok(ExplorationBasis {
        origin_shift: e.center.clone(),
        axes: e.semi_axes.clone(),
        kappa: ce.kappa,
    })
}

impl ExplorationBasis {
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Map a point of `D` into shifted coordinates.
    pub fn to_shifted(&self, x: &[f64]) -> Vec<f64> {
        sub(x, &self.origin_shift)
    }

    /// Map a shifted point back into `D`'s frame.
    pub fn from_shifted(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.origin_shift)
            .map(|(a, b)| a + b)
            .collect()
    }

    /// All polytope vertices re-expressed in shifted coordinates.
    pub fn shifted_vertices(&self, p: &Polytope) -> Vec<Vec<f64>> {
        p.vertices().iter().map(|v| self.to_shifted(v)).collect()
    }

    /// The exploration point for axis `j` in the original frame.
    pub fn exploration_point(&self, j: usize) -> Vec<f64> {
        self.from_shifted(&self.axes[j])
    }

    /// Bound on decomposition coefficients over `D'`: `2 kappa`
    /// (the classical `2d` when `kappa = d`).
    pub fn coefficient_bound(&self) -> f64 {
        2.0 * self.kappa
    }
}

/// Express `x` (shifted coordinates) in the basis: `a_j = <x, s_j> / ||s_j||^2`.
pub fn decompose(x: &[f64], basis: &ExplorationBasis) -> Decomposition {
    let coefficients = basis.axes.iter().map(|s| dot(x, s) / dot(s, s)).collect();
    Decomposition { coefficients }
}

/// Rebuild the point from its coefficients: `sum_j a_j s_j`.
pub fn reconstruct(basis: &ExplorationBasis, dec: &Decomposition) -> Vec<f64> {
    let d = basis.dim();
    let mut out = vec![0.0; d];
    for (a, s) in dec.coefficients.iter().zip(&basis.axes) {
        for (oi, si) in out.iter_mut().zip(s) {
            *oi += a * si;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ellipsoid::inscribed_ellipsoid;
    use crate::geometry::polytope::{validate_polytope, Halfspace};

    fn boxp(lo: f64, hi: f64) -> Polytope {
        validate_polytope(
            vec![vec![lo, lo], vec![hi, lo], vec![lo, hi], vec![hi, hi]],
            vec![
                Halfspace::new(vec![1.0, 0.0], hi),
                Halfspace::new(vec![-1.0, 0.0], -lo),
                Halfspace::new(vec![0.0, 1.0], hi),
                Halfspace::new(vec![0.0, -1.0], -lo),
            ],
        )
        .unwrap()
    }

    #[test]
    fn centered_box_has_zero_shift_and_axis_aligned_axes() {
        let p = boxp(-0.7, 0.7);
        let ce = inscribed_ellipsoid(&p, 1e-8).unwrap();
        let b = exploration_basis(&p, &ce).unwrap();
        assert!(norm(&b.origin_shift) < 1e-6);
        let mut lens: Vec<f64> = b.axes.iter().map(|s| norm(s)).collect();
        lens.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(lens.iter().all(|l| (l - 0.7).abs() < 1e-6));
    }

    #[test]
    fn translated_box_shifts_center_only() {
        let p = boxp(0.1, 0.5);
        let ce = inscribed_ellipsoid(&p, 1e-8).unwrap();
        let b = exploration_basis(&p, &ce).unwrap();
        assert!((b.origin_shift[0] - 0.3).abs() < 1e-6);
        assert!((b.origin_shift[1] - 0.3).abs() < 1e-6);
        for s in &b.axes {
            assert!((norm(s) - 0.2).abs() < 1e-6);
        }
        // Each axis endpoint satisfies all halfspaces of the shifted set.
        for j in 0..2 {
            let pt = b.exploration_point(j);
            assert!(p.contains(&pt, 1e-9));
        }
    }

    #[test]
    fn decompose_matches_hand_values() {
        let basis = ExplorationBasis {
            origin_shift: vec![0.0, 0.0],
            axes: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            kappa: 2f64.sqrt(),
        };
        let dec = decompose(&[0.3, -0.4], &basis);
        assert_eq!(dec.coefficients, vec![0.3, -0.4]);

        let scaled = ExplorationBasis {
            origin_shift: vec![0.0, 0.0],
            axes: vec![vec![2.0, 0.0], vec![0.0, 1.0]],
            kappa: 2f64.sqrt(),
        };
        let dec = decompose(&[1.0, 1.0], &scaled);
        assert!((dec.coefficients[0] - 0.5).abs() < 1e-15);
        assert!((dec.coefficients[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reconstruction_is_identity() {
        let p = boxp(-0.7, 0.7);
        let ce = inscribed_ellipsoid(&p, 1e-8).unwrap();
        let b = exploration_basis(&p, &ce).unwrap();
        let x = vec![0.31, -0.54];
        let shifted = b.to_shifted(&x);
        let back = reconstruct(&b, &decompose(&shifted, &b));
        assert!(norm(&sub(&back, &shifted)) < 1e-9);
    }
}
