//! Independent oracles for the inscribed-ellipsoid solver.
//!
//! The brute-force oracle searches ellipse parameters directly: for a fixed
//! center and orientation the best squared semi-axes solve a tiny exact
//! subproblem (the facet constraints are linear in the squared axes), and the
//! outer parameters are found by dense grid search with window refinement.
//! Nothing here shares code with the barrier solver.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sbe_core::geometry::{
    decompose, exploration_basis, family_polytope, inscribed_ellipsoid, random_linear_image,
    reference_ellipsoid, validate_polytope, Family, Halfspace, Polytope,
};
use sbe_core::linalg::{dot, norm};

/// Max of `r1 * r2` for an axis-pair at fixed center/orientation.
///
/// Each facet gives a linear constraint `alpha^2 R1 + beta^2 R2 <= g^2` on
/// the squared semi-axes `(R1, R2)`. The product `R1 * R2` is maximized
/// either at a tangency point of a single constraint or at an intersection
/// of two constraints, so all candidates can be enumerated exactly.
fn best_axes_product(p: &Polytope, cx: f64, cy: f64, phi: f64) -> Option<f64> {
    let u1 = [phi.cos(), phi.sin()];
    let u2 = [-phi.sin(), phi.cos()];
    let mut rows: Vec<(f64, f64, f64)> = Vec::new(); // alpha^2, beta^2, g^2
    for h in p.halfspaces() {
        let g = h.b - (h.a[0] * cx + h.a[1] * cy);
        if g <= 0.0 {
            return None;
        }
        let alpha = h.a[0] * u1[0] + h.a[1] * u1[1];
        let beta = h.a[0] * u2[0] + h.a[1] * u2[1];
        rows.push((alpha * alpha, beta * beta, g * g));
    }
    let feasible = |r1: f64, r2: f64| -> bool {
        r1 > 0.0
            && r2 > 0.0
            && rows
                .iter()
                .all(|(a2, b2, g2)| a2 * r1 + b2 * r2 <= g2 * (1.0 + 1e-12))
    };
    let mut best: Option<f64> = None;
    let mut consider = |r1: f64, r2: f64| {
        if r1.is_finite() && r2.is_finite() && feasible(r1, r2) {
            let v = (r1 * r2).sqrt();
            if best.is_none_or(|b| v > b) {
                best = Some(v);
            }
        }
    };
    // Tangency of a single constraint: R1 = g^2 / (2 alpha^2), R2 = g^2 / (2 beta^2).
    for &(a2, b2, g2) in &rows {
        if a2 > 1e-18 && b2 > 1e-18 {
            consider(g2 / (2.0 * a2), g2 / (2.0 * b2));
        }
    }
    // Pairwise intersections (including degenerate one-sided constraints).
    for i in 0..rows.len() {
        for j in (i + 1)..rows.len() {
            let (a1, b1, c1) = rows[i];
            let (a2, b2, c2) = rows[j];
            let det = a1 * b2 - a2 * b1;
            if det.abs() < 1e-18 {
                continue;
            }
            let r1 = (c1 * b2 - c2 * b1) / det;
            let r2 = (a1 * c2 - a2 * c1) / det;
            consider(r1, r2);
        }
    }
    best
}

/// Dense grid over (center, orientation) with window refinement.
fn oracle_max_inscribed_area(p: &Polytope) -> f64 {
    let xs: Vec<f64> = p.vertices().iter().map(|v| v[0]).collect();
    let ys: Vec<f64> = p.vertices().iter().map(|v| v[1]).collect();
    let (mut cx, mut wx) = mid_width(&xs);
    let (mut cy, mut wy) = mid_width(&ys);
    let mut cphi = std::f64::consts::FRAC_PI_4;
    let mut wphi = std::f64::consts::FRAC_PI_2;
    let mut best = f64::NEG_INFINITY;
    let mut arg = (cx, cy, cphi);
    for _stage in 0..10 {
        let n = 14;
        for ix in 0..=n {
            let x = cx - wx / 2.0 + wx * ix as f64 / n as f64;
            for iy in 0..=n {
                let y = cy - wy / 2.0 + wy * iy as f64 / n as f64;
                for ip in 0..=n {
                    let phi = cphi - wphi / 2.0 + wphi * ip as f64 / n as f64;
                    if let Some(v) = best_axes_product(p, x, y, phi) {
                        if v > best {
                            best = v;
                            arg = (x, y, phi);
                        }
                    }
                }
            }
        }
        (cx, cy, cphi) = arg;
        wx *= 0.35;
        wy *= 0.35;
        wphi *= 0.35;
    }
    std::f64::consts::PI * best
}

fn mid_width(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    ((lo + hi) / 2.0, hi - lo)
}

fn right_triangle() -> Polytope {
    validate_polytope(
        vec![vec![0.0, 0.0], vec![0.9, 0.0], vec![0.0, 0.9]],
        vec![
            Halfspace::new(vec![-1.0, 0.0], 0.0),
            Halfspace::new(vec![0.0, -1.0], 0.0),
            Halfspace::new(vec![1.0, 1.0], 0.9),
        ],
    )
    .unwrap()
}

#[test]
fn triangle_volume_matches_brute_force_oracle() {
    let p = right_triangle();
    let oracle_area = oracle_max_inscribed_area(&p);
    let ce = inscribed_ellipsoid(&p, 1e-8).unwrap();
    let solver_area = ce.ellipsoid.volume();
    let rel = (solver_area - oracle_area).abs() / oracle_area;
    assert!(
        rel < 1e-4,
        "solver {solver_area} vs oracle {oracle_area} (rel {rel:.2e})"
    );
}

#[test]
fn triangle_oracle_agrees_with_steiner_inellipse_area() {
    // The maximal-area inscribed ellipse of a triangle is its Steiner
    // inellipse, with area pi/(3 sqrt 3) times the triangle area.
    let p = right_triangle();
    let steiner = std::f64::consts::PI / (3.0 * 3f64.sqrt()) * (0.9 * 0.9 / 2.0);
    let oracle_area = oracle_max_inscribed_area(&p);
    assert!(
        (oracle_area - steiner).abs() / steiner < 1e-5,
        "oracle {oracle_area} vs steiner {steiner}"
    );
}

#[test]
fn family_volumes_match_reference_ellipsoids() {
    for d in 2..=4usize {
        for fam in [
            Family::Box {
                half_width: 0.9 / (d as f64).sqrt(),
            },
            Family::CrossPolytope { radius: 0.9 },
            Family::RegularSimplex { circumradius: 0.9 },
        ] {
            let p = family_polytope(fam, d).unwrap();
            let ce = inscribed_ellipsoid(&p, 1e-8).unwrap();
            let reference = reference_ellipsoid(fam, d).unwrap();
            let rel = (ce.ellipsoid.volume() - reference.volume()).abs() / reference.volume();
            assert!(
                rel < 1e-6,
                "family {fam:?} d={d}: rel volume error {rel:.3e}"
            );
        }
    }
}

#[test]
fn john_condition_certified_on_random_polytopes() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for d in 2..=4usize {
        for i in 0..12 {
            let fam = match i % 3 {
                0 => Family::Box { half_width: 1.0 },
                1 => Family::CrossPolytope { radius: 1.0 },
                _ => Family::RegularSimplex { circumradius: 1.0 },
            };
            let p = random_linear_image(fam, d, 0.95, &mut rng).unwrap();
            let ce = inscribed_ellipsoid(&p, 1e-8).unwrap();
            let weak_bound = 2.0 * (d as f64).powf(1.5);
            assert!(
                ce.kappa <= weak_bound,
                "d={d} i={i}: kappa {} > {weak_bound}",
                ce.kappa
            );
            // Every vertex sits inside kappa * E.
            for v in p.vertices() {
                let k = ce.ellipsoid.scaling_to_contain(v);
                assert!(k <= ce.kappa + 1e-9);
            }
        }
    }
}

#[test]
fn translation_equivariance_of_the_solver() {
    let p = family_polytope(Family::Box { half_width: 0.3 }, 2).unwrap();
    let q = p.translated(&[0.25, -0.15]);
    let ce_p = inscribed_ellipsoid(&p, 1e-8).unwrap();
    let ce_q = inscribed_ellipsoid(&q, 1e-8).unwrap();
    assert!((ce_q.ellipsoid.center[0] - ce_p.ellipsoid.center[0] - 0.25).abs() < 1e-9);
    assert!((ce_q.ellipsoid.center[1] - ce_p.ellipsoid.center[1] + 0.15).abs() < 1e-9);
    for (a, b) in ce_p
        .ellipsoid
        .semi_axes
        .iter()
        .zip(&ce_q.ellipsoid.semi_axes)
    {
        // Axes may come out in either sign; compare spans.
        let same = norm(&sub2(a, b)).min(norm(&add2(a, b)));
        assert!(same < 1e-9, "axis moved: {a:?} vs {b:?}");
    }
}

fn sub2(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
fn add2(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[test]
fn decomposition_coefficients_respect_certified_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p = random_linear_image(Family::Box { half_width: 1.0 }, 3, 0.9, &mut rng).unwrap();
    let ce = inscribed_ellipsoid(&p, 1e-8).unwrap();
    let basis = exploration_basis(&p, &ce).unwrap();
    let bound = basis.coefficient_bound();
    let shifted = basis.shifted_vertices(&p);
    // Random convex combinations of shifted vertices stay in D'.
    use rand::Rng;
    for _ in 0..1000 {
        let mut weights: Vec<f64> = (0..shifted.len()).map(|_| rng.random::<f64>()).collect();
        let s: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= s);
        let mut x = vec![0.0; 3];
        for (w, v) in weights.iter().zip(&shifted) {
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += w * vi;
            }
        }
        let dec = decompose(&x, &basis);
        for c in &dec.coefficients {
            assert!(
                c.abs() <= bound + 1e-9,
                "coefficient {c} over bound {bound}"
            );
        }
        // Reconstruction is the identity on the span.
        let back = sbe_core::geometry::reconstruct(&basis, &dec);
        assert!(norm(&sub2(&back, &x)) < 1e-9);
    }
    let _ = dot(&[1.0], &[1.0]);
}
