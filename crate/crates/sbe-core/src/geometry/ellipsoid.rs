//! Maximum-volume inscribed ellipsoid of a polytope, with a per-instance
//! containment certificate.
//!
//! The solver maximizes log-volume over a parametrization `(c, L)` where `c`
//! is the center and `L` is a lower-triangular Cholesky factor of the shape
//! matrix, subject to one second-order constraint per facet:
//! `||L^T a_i|| + a_i . c <= b_i`. A logarithmic barrier with decreasing
//! weight is maximized by limited-memory BFGS with a feasibility-aware
//! backtracking line search. The barrier weight schedule pins the log-volume
//! suboptimality below the requested tolerance.
//!
//! Rather than trusting optimality, every solve is certified afterwards: the
//! support function along each facet normal proves `E` sits inside the
//! polytope, and the largest quadratic-form value over the vertices yields a
//! factor `kappa` with `E ⊆ D - c ⊆ kappa E`.

use serde::{Deserialize, Serialize};

use crate::linalg::{cholesky, dot, forward_sub, jacobi_eigen, norm};

use super::polytope::{Polytope, GEOM_TOL};
use super::GeometryError;

/// Iteration cap across all barrier stages of a single solve.
pub const SOLVER_ITERATION_CAP: usize = 10_000;

/// Default log-volume tolerance for [`inscribed_ellipsoid`].
pub const SOLVER_DEFAULT_TOL: f64 = 1e-8;

/// An ellipsoid `{ center + sum_j u_j s_j : ||u|| <= 1 }` given by its center
/// and mutually orthogonal semi-axis vectors (direction times length).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Ellipsoid {
    pub center: Vec<f64>,
    pub semi_axes: Vec<Vec<f64>>,
}

impl Ellipsoid {
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Orthogonality and positivity of the semi-axes.
    pub fn validate(&self) -> Result<(), GeometryError> {
        let d = self.dim();
        if self.semi_axes.len() != d || self.semi_axes.iter().any(|s| s.len() != d) {
            return Err(GeometryError::DimensionMismatch(
                "semi-axis count/length must match the dimension".into(),
            ));
        }
        for (j, s) in self.semi_axes.iter().enumerate() {
            if norm(s) <= 0.0 {
                return Err(GeometryError::DegenerateAxis { axis: j });
            }
        }
        for i in 0..d {
            for j in (i + 1)..d {
                let si = &self.semi_axes[i];
                let sj = &self.semi_axes[j];
                if dot(si, sj).abs() > GEOM_TOL * norm(si) * norm(sj) {
                    return Err(GeometryError::DimensionMismatch(format!(
                        "semi-axes {i} and {j} are not orthogonal"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Product of the semi-axis lengths (volume divided by the unit-ball
    /// volume of the same dimension).
    pub fn volume_factor(&self) -> f64 {
        self.semi_axes.iter().map(|s| norm(s)).product()
    }

    /// Euclidean volume.
    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()) * self.volume_factor()
    }

    /// Support function `max_{x in E} u . x`.
    pub fn support(&self, u: &[f64]) -> f64 {
        let radial: f64 = self
            .semi_axes
            .iter()
            .map(|s| dot(s, u).powi(2))
            .sum::<f64>()
            .sqrt();
        dot(&self.center, u) + radial
    }

    /// Smallest `k` with `x` inside the ellipsoid scaled by `k` about its
    /// center, i.e. the norm of `x - center` in the ellipsoid metric.
    pub fn scaling_to_contain(&self, x: &[f64]) -> f64 {
        let diff: Vec<f64> = x.iter().zip(&self.center).map(|(xi, ci)| xi - ci).collect();
        self.semi_axes
            .iter()
            .map(|s| {
                let len2 = dot(s, s);
                (dot(s, &diff) / len2).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Volume of the d-dimensional unit ball.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / d as f64 * unit_ball_volume(d - 2),
    }
}

/// Solver output: the ellipsoid together with its certified John factor.
///
/// `kappa` satisfies `E ⊆ D - center ⊆ kappa * E`, checked numerically per
/// instance (support functions along facet normals for the first inclusion,
/// quadratic-form values at the vertices for the second).
#[derive(Debug, Clone)]
pub struct CertifiedEllipsoid {
    pub ellipsoid: Ellipsoid,
    pub kappa: f64,
}

impl Serialize for CertifiedEllipsoid {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            center: &'a [f64],
            axes: &'a [Vec<f64>],
            kappa: f64,
        }
        Wire {
            center: &self.ellipsoid.center,
            axes: &self.ellipsoid.semi_axes,
            kappa: self.kappa,
        }
        .serialize(serializer)
    }
}

/// Containment/shape mode consumed by learners sizing their constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EllipsoidMode {
    /// Near-optimal inscribed ellipsoid: `kappa <= d`.
    #[serde(rename = "exact_ellipsoid")]
    Exact,
    /// Weak guarantee: `kappa <= 2 d^{3/2}`.
    #[serde(rename = "weak_ellipsoid")]
    Weak,
}

/// The `kappa` ceiling a certificate must meet in the given mode.
pub fn kappa_bound(mode: EllipsoidMode, d: usize) -> f64 {
    let d = d as f64;
    match mode {
        // The factor d is tight (simplices), so leave room for solver
        // tolerance in the certificate comparison.
        EllipsoidMode::Exact => d * (1.0 + 1e-6),
        EllipsoidMode::Weak => 2.0 * d.powf(1.5),
    }
}

/// Compute the maximum-volume inscribed ellipsoid of `p` to within `tol`
/// relative log-volume, and certify its John factor.
///
/// `tol` must lie in `(0, 1e-3]`; [`SOLVER_DEFAULT_TOL`] is the usual choice.
pub fn inscribed_ellipsoid(p: &Polytope, tol: f64) -> Result<CertifiedEllipsoid, GeometryError> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(GeometryError::DimensionMismatch(format!(
            "tolerance {tol} outside (0, 1e-3]"
        )));
    }
    let d = p.dim();
    let facets = p.halfspaces();
    let m = facets.len();

    // Strictly feasible start: vertex centroid with a ball that clears every
    // facet.
    let c0 = p.centroid();
    let r0 = facets
        .iter()
        .map(|h| h.slack(&c0) / norm(&h.a))
        .fold(f64::INFINITY, f64::min);
    if r0 <= GEOM_TOL {
        return Err(GeometryError::EmptyInterior);
    }

    // Parameter vector: center (d entries) then the lower triangle of L
    // (row-major, d(d+1)/2 entries).
    let n_lower = d * (d + 1) / 2;
    let n_params = d + n_lower;
    let mut x = vec![0.0; n_params];
    x[..d].copy_from_slice(&c0);
    {
        let mut idx = d;
        for i in 0..d {
            for j in 0..=i {
                x[idx] = if i == j { 0.9 * r0 } else { 0.0 };
                idx += 1;
            }
        }
    }

    let lower_index = |i: usize, j: usize| d + i * (i + 1) / 2 + j;

    // g_i(x) = b_i - a_i . c - ||L^T a_i||; returns None when infeasible.
    // Also returns the per-facet vectors w_i = L^T a_i needed for gradients.
    let eval_slacks = |x: &[f64]| -> Option<(Vec<f64>, Vec<Vec<f64>>)> {
        for i in 0..d {
            if x[lower_index(i, i)] <= 0.0 {
                return None;
            }
        }
        let c = &x[..d];
        let mut slacks = Vec::with_capacity(m);
        let mut ws = Vec::with_capacity(m);
        for h in facets {
            let mut w = vec![0.0; d];
            for (ii, ai) in h.a.iter().enumerate() {
                if *ai == 0.0 {
                    continue;
                }
                for j in 0..=ii {
                    w[j] += x[lower_index(ii, j)] * ai;
                }
            }
            let g = h.b - dot(&h.a, c) - norm(&w);
            if g <= 0.0 {
                return None;
            }
            slacks.push(g);
            ws.push(w);
        }
        Some((slacks, ws))
    };

    // Barrier objective F_mu = sum_k ln L_kk + mu * sum_i ln g_i (maximized).
    let objective = |x: &[f64], mu: f64| -> Option<f64> {
        let (slacks, _) = eval_slacks(x)?;
        let mut f = 0.0;
        for i in 0..d {
            f += x[lower_index(i, i)].ln();
        }
        f += mu * slacks.iter().map(|g| g.ln()).sum::<f64>();
        Some(f)
    };

    let gradient = |x: &[f64], mu: f64| -> Option<(f64, Vec<f64>)> {
        let (slacks, ws) = eval_slacks(x)?;
        let mut f = 0.0;
        let mut grad = vec![0.0; n_params];
        for i in 0..d {
            let l_ii = x[lower_index(i, i)];
            f += l_ii.ln();
            grad[lower_index(i, i)] += 1.0 / l_ii;
        }
        for (k, h) in facets.iter().enumerate() {
            let g = slacks[k];
            f += mu * g.ln();
            let coef = mu / g;
            for (ii, ai) in h.a.iter().enumerate() {
                grad[ii] -= coef * ai;
            }
            let w = &ws[k];
            let wn = norm(w).max(1e-300);
            for (ii, ai) in h.a.iter().enumerate() {
                if *ai == 0.0 {
                    continue;
                }
                for j in 0..=ii {
                    grad[lower_index(ii, j)] -= coef * ai * w[j] / wn;
                }
            }
        }
        Some((f, grad))
    };

    // L-BFGS (two-loop recursion) maximizing F_mu, restarted per stage.
    let mut total_iters = 0usize;
    let mut mu = 1.0f64;
    let mu_final = (tol / (4.0 * m as f64)).min(1e-9);
    loop {
        let grad_tol = (mu * 1e-3).max(1e-12);
        let hist = 10usize;
        let mut s_list: Vec<Vec<f64>> = Vec::new();
        let mut y_list: Vec<Vec<f64>> = Vec::new();
        let (mut f, mut g) = gradient(&x, mu).expect("iterate must stay feasible");
        for _ in 0..600 {
            if total_iters >= SOLVER_ITERATION_CAP {
                return Err(GeometryError::SolverNonConvergence {
                    iterations: total_iters,
                });
            }
            total_iters += 1;
            let gmax = g.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            if gmax <= grad_tol {
                break;
            }
            // Two-loop recursion on the ASCENT direction.
            let mut q = g.clone();
            let k = s_list.len();
            let mut alphas = vec![0.0; k];
            for i in (0..k).rev() {
                let rho = 1.0 / dot(&y_list[i], &s_list[i]);
                let a = rho * dot(&s_list[i], &q);
                alphas[i] = a;
                for (qv, yv) in q.iter_mut().zip(&y_list[i]) {
                    *qv -= a * yv;
                }
            }
            if k > 0 {
                let gamma =
                    dot(&s_list[k - 1], &y_list[k - 1]) / dot(&y_list[k - 1], &y_list[k - 1]);
                q.iter_mut().for_each(|v| *v *= gamma);
            }
            for i in 0..k {
                let rho = 1.0 / dot(&y_list[i], &s_list[i]);
                let b = rho * dot(&y_list[i], &q);
                for (qv, sv) in q.iter_mut().zip(&s_list[i]) {
                    *qv += (alphas[i] - b) * sv;
                }
            }
            let mut dir = q;
            let mut slope = dot(&g, &dir);
            if slope <= 0.0 || !slope.is_finite() {
                // Memory unreliable; fall back to steepest ascent.
                s_list.clear();
                y_list.clear();
                dir = g.clone();
                slope = dot(&g, &g);
            }
            // Backtracking line search with feasibility rejection.
            let mut step = 1.0f64;
            let mut accepted = None;
            for _ in 0..60 {
                let cand: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + step * di).collect();
                if let Some(fc) = objective(&cand, mu) {
                    if fc >= f + 1e-4 * step * slope {
                        accepted = Some((cand, fc));
                        break;
                    }
                }
                step *= 0.5;
            }
            let Some((x_new, _f_new)) = accepted else {
                break; // no further progress at this barrier weight
            };
            let (f_new, g_new) = gradient(&x_new, mu).expect("accepted point is feasible");
            let s_vec: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
            // Curvature pairs for a MAXIMIZATION: y = g_old - g_new.
            let y_vec: Vec<f64> = g.iter().zip(&g_new).map(|(a, b)| a - b).collect();
            if dot(&s_vec, &y_vec) > 1e-12 * norm(&s_vec) * norm(&y_vec) {
                s_list.push(s_vec);
                y_list.push(y_vec);
                if s_list.len() > hist {
                    s_list.remove(0);
                    y_list.remove(0);
                }
            }
            x = x_new;
            f = f_new;
            g = g_new;
        }
        if mu <= mu_final {
            break;
        }
        mu = (mu * 0.1).max(mu_final);
    }

    // Assemble the ellipsoid: A = L L^T, semi-axes from its eigenpairs.
    let center = x[..d].to_vec();
    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            l[i * d + j] = x[lower_index(i, j)];
        }
    }
    let mut a_mat = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            let mut s = 0.0;
            for k in 0..=i.min(j) {
                s += l[i * d + k] * l[j * d + k];
            }
            a_mat[i * d + j] = s;
        }
    }
    let (evals, evecs) = jacobi_eigen(&a_mat, d);
    let mut semi_axes = Vec::with_capacity(d);
    for k in 0..d {
        if evals[k] <= 0.0 {
            return Err(GeometryError::DegenerateAxis { axis: k });
        }
        let len = evals[k].sqrt();
        semi_axes.push((0..d).map(|i| evecs[i * d + k] * len).collect());
    }
    let ellipsoid = Ellipsoid { center, semi_axes };
    let kappa = certify(p, &ellipsoid, &l)?;
    Ok(CertifiedEllipsoid { ellipsoid, kappa })
}

/// Certify `E ⊆ D` (support function per facet) and compute the smallest
/// `kappa` with every vertex of `D - center` inside `kappa * E`.
fn certify(p: &Polytope, e: &Ellipsoid, l: &[f64]) -> Result<f64, GeometryError> {
    let d = p.dim();
    for h in p.halfspaces() {
        let tol = GEOM_TOL * norm(&h.a).max(h.b.abs()).max(1.0);
        if e.support(&h.a) > h.b + tol {
            return Err(GeometryError::SolverNonConvergence { iterations: 0 });
        }
    }
    let mut kappa = 1.0f64;
    for v in p.vertices() {
        let diff: Vec<f64> = v.iter().zip(&e.center).map(|(vi, ci)| vi - ci).collect();
        let y = forward_sub(l, d, &diff);
        kappa = kappa.max(norm(&y));
    }
    Ok(kappa)
}

/// Re-certify an ellipsoid against a polytope without access to the solver's
/// Cholesky factor (used by tests and by file-loaded geometry).
pub fn certify_ellipsoid(p: &Polytope, e: &Ellipsoid) -> Result<f64, GeometryError> {
    let d = p.dim();
    let mut a_mat = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            let mut s = 0.0;
            for axis in &e.semi_axes {
                s += axis[i] * axis[j];
            }
            a_mat[i * d + j] = s;
        }
    }
    let l = cholesky(&a_mat, d).ok_or(GeometryError::DegenerateAxis { axis: 0 })?;
    certify(p, e, &l)
}
