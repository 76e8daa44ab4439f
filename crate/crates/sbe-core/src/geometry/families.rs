//! Built-in polytope families with exact paired representations, plus
//! closed-form inscribed ellipsoids used as golden values in tests.
//!
//! The three canonical families (box, cross-polytope, regular simplex) have
//! ball-shaped maximum-volume inscribed ellipsoids by symmetry. Random
//! instances are produced as invertible linear images of a canonical family
//! rescaled into the unit ball, which keeps both representations exact
//! without any hull computation.

use rand::Rng;

use crate::linalg::{dot, mat_t_vec, mat_vec, norm};

use super::ellipsoid::Ellipsoid;
use super::polytope::{validate_polytope, Halfspace, Polytope};
use super::GeometryError;

/// Canonical symmetric families with a known inscribed ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `[-half_width, half_width]^d`.
    Box { half_width: f64 },
    /// `{ ||x||_1 <= radius }`.
    CrossPolytope { radius: f64 },
    /// Regular simplex centered at the origin with the given circumradius.
    RegularSimplex { circumradius: f64 },
}

impl Family {
    /// Largest size parameter keeping every vertex inside the unit ball.
    pub fn unit_ball_size(self, d: usize) -> f64 {
        match self {
            Family::Box { .. } => 0.99 / (d as f64).sqrt(),
            Family::CrossPolytope { .. } => 0.99,
            Family::RegularSimplex { .. } => 0.9,
        }
    }

    /// The same family with a different size parameter.
    pub fn resized(self, size: f64) -> Family {
        match self {
            Family::Box { .. } => Family::Box { half_width: size },
            Family::CrossPolytope { .. } => Family::CrossPolytope { radius: size },
            Family::RegularSimplex { .. } => Family::RegularSimplex { circumradius: size },
        }
    }
}

/// Build the polytope of a canonical family.
pub fn family_polytope(family: Family, d: usize) -> Result<Polytope, GeometryError> {
    if d == 0 {
        return Err(GeometryError::DimensionMismatch(
            "dimension must be at least 1".into(),
        ));
    }
    match family {
        Family::Box { half_width: r } => {
            let vertices = sign_patterns(d)
                .into_iter()
                .map(|s| s.iter().map(|&si| si * r).collect())
                .collect();
            let mut halfspaces = Vec::with_capacity(2 * d);
            for i in 0..d {
                for sign in [1.0, -1.0] {
                    let mut a = vec![0.0; d];
                    a[i] = sign;
                    halfspaces.push(Halfspace::new(a, r));
                }
            }
            validate_polytope(vertices, halfspaces)
        }
        Family::CrossPolytope { radius: r } => {
            let mut vertices = Vec::with_capacity(2 * d);
            for i in 0..d {
                for sign in [1.0, -1.0] {
                    let mut v = vec![0.0; d];
                    v[i] = sign * r;
                    vertices.push(v);
                }
            }
            let halfspaces = sign_patterns(d)
                .into_iter()
                .map(|s| Halfspace::new(s, r))
                .collect();
            validate_polytope(vertices, halfspaces)
        }
        Family::RegularSimplex { circumradius: rho } => {
            let vertices = regular_simplex_vertices(d, rho);
            // Facet opposite vertex i: (-v_i / rho) . x <= rho / d.
            let halfspaces = vertices
                .iter()
                .map(|v| {
                    let a: Vec<f64> = v.iter().map(|vi| -vi / rho).collect();
                    Halfspace::new(a, rho / d as f64)
                })
                .collect();
            validate_polytope(vertices, halfspaces)
        }
    }
}

/// Closed-form maximum-volume inscribed ellipsoid of a canonical family
/// (a ball in all three cases, by symmetry).
pub fn reference_ellipsoid(family: Family, d: usize) -> Result<Ellipsoid, GeometryError> {
    if d == 0 {
        return Err(GeometryError::DimensionMismatch(
            "dimension must be at least 1".into(),
        ));
    }
    let radius = match family {
        Family::Box { half_width: r } => r,
        Family::CrossPolytope { radius: r } => r / (d as f64).sqrt(),
        Family::RegularSimplex { circumradius: rho } => rho / d as f64,
    };
    let semi_axes = (0..d)
        .map(|i| {
            let mut s = vec![0.0; d];
            s[i] = radius;
            s
        })
        .collect();
    Ok(Ellipsoid {
        center: vec![0.0; d],
        semi_axes,
    })
}

/// Vertices of a regular simplex in `R^d` centered at the origin with the
/// given circumradius. Built from the standard-basis embedding in `R^{d+1}`
/// reflected onto the hyperplane orthogonal to the all-ones vector.
pub fn regular_simplex_vertices(d: usize, circumradius: f64) -> Vec<Vec<f64>> {
    let n = d + 1;
    // Householder vector reflecting e_1 onto 1/sqrt(n).
    let mut w = vec![1.0 / (n as f64).sqrt(); n];
    w[0] -= 1.0;
    let wn = norm(&w);
    let w: Vec<f64> = if wn < 1e-12 {
        vec![0.0; n]
    } else {
        w.iter().map(|x| x / wn).collect()
    };
    let reflect = |x: &[f64]| -> Vec<f64> {
        let c = 2.0 * dot(x, &w);
        x.iter().zip(&w).map(|(xi, wi)| xi - c * wi).collect()
    };
    let centroid = 1.0 / n as f64;
    let scale = circumradius / (d as f64 / n as f64).sqrt();
    (0..n)
        .map(|i| {
            let mut u = vec![-centroid; n];
            u[i] += 1.0;
            let r = reflect(&u);
            // First coordinate is ~0 after reflection; drop it.
            r[1..].iter().map(|x| x * scale).collect()
        })
        .collect()
}

fn sign_patterns(d: usize) -> Vec<Vec<f64>> {
    (0..(1usize << d))
        .map(|mask| {
            (0..d)
                .map(|i| if mask & (1 << i) != 0 { 1.0 } else { -1.0 })
                .collect()
        })
        .collect()
}

/// A random invertible linear image of a canonical family, rescaled so the
/// farthest vertex sits at `norm_target` from the origin. The origin stays
/// the inscribed-ellipsoid center (linear images preserve it).
pub fn random_linear_image(
    family: Family,
    d: usize,
    norm_target: f64,
    rng: &mut impl Rng,
) -> Result<Polytope, GeometryError> {
    // The caller's size is irrelevant here; the image is rescaled to
    // `norm_target` below, so build the base at a size that validates.
    let base = family_polytope(family.resized(family.unit_ball_size(d)), d)?;
    // T = Q1 diag(s) Q2^T with random rotations and bounded stretches keeps
    // the map well-conditioned by construction.
    let q1 = random_orthogonal(d, rng);
    let q2 = random_orthogonal(d, rng);
    let stretch: Vec<f64> = (0..d).map(|_| rng.random_range(0.6..1.4)).collect();
    let apply = |x: &[f64]| -> Vec<f64> {
        let mut y = mat_t_vec(&q2, d, x);
        y.iter_mut().zip(&stretch).for_each(|(yi, s)| *yi *= s);
        mat_vec(&q1, d, &y)
    };
    // Normals map through T^{-T} = Q1 diag(1/s) Q2^T.
    let apply_inv_t = |x: &[f64]| -> Vec<f64> {
        let mut y = mat_t_vec(&q2, d, x);
        y.iter_mut().zip(&stretch).for_each(|(yi, s)| *yi /= s);
        mat_vec(&q1, d, &y)
    };
    let mapped: Vec<Vec<f64>> = base.vertices().iter().map(|v| apply(v)).collect();
    let max_norm = mapped.iter().map(|v| norm(v)).fold(0.0f64, f64::max);
    let scale = norm_target / max_norm;
    let vertices = mapped
        .into_iter()
        .map(|v| v.into_iter().map(|x| x * scale).collect())
        .collect();
    let halfspaces = base
        .halfspaces()
        .iter()
        .map(|h| Halfspace::new(apply_inv_t(&h.a), h.b * scale))
        .collect();
    validate_polytope(vertices, halfspaces)
}

fn random_orthogonal(d: usize, rng: &mut impl Rng) -> Vec<f64> {
    use rand_distr::{Distribution, StandardNormal};
    loop {
        let mut cols: Vec<Vec<f64>> = (0..d)
            .map(|_| (0..d).map(|_| StandardNormal.sample(rng)).collect())
            .collect();
        let mut ok = true;
        for i in 0..d {
            for j in 0..i {
                let proj = dot(&cols[i], &cols[j]);
                let prev = cols[j].clone();
                for (x, p) in cols[i].iter_mut().zip(&prev) {
                    *x -= proj * p;
                }
            }
            let n = norm(&cols[i]);
            if n < 1e-6 {
                ok = false;
                break;
            }
            cols[i].iter_mut().for_each(|x| *x /= n);
        }
        if !ok {
            continue;
        }
        let mut q = vec![0.0; d * d];
        for (j, col) in cols.iter().enumerate() {
            for i in 0..d {
                q[i * d + j] = col[i];
            }
        }
        return q;
    }
}
