//! Small dense linear algebra for low-dimensional geometry (d <= ~16).
//!
//! Square matrices are stored row-major in a flat `Vec<f64>`. Nothing here is
//! tuned for large systems; the solvers in this crate never exceed a few
//! hundred unknowns.

/// Inner product of two equal-length slices.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm.
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `y += s * x` in place.
pub fn axpy(y: &mut [f64], s: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

/// `m * x` for a row-major `d x d` matrix.
pub fn mat_vec(m: &[f64], d: usize, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; d];
    for i in 0..d {
        out[i] = dot(&m[i * d..(i + 1) * d], x);
    }
    out
}

/// `m^T * x` for a row-major `d x d` matrix.
pub fn mat_t_vec(m: &[f64], d: usize, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; d];
    for (i, xi) in x.iter().enumerate() {
        for j in 0..d {
            out[j] += m[i * d + j] * xi;
        }
    }
    out
}

/// Cholesky factor (lower triangular, row-major) of a symmetric matrix.
/// Returns `None` when the matrix is not numerically positive definite.
pub fn cholesky(a: &[f64], d: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut s = a[i * d + j];
            for k in 0..j {
                s -= l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return None;
                }
                l[i * d + i] = s.sqrt();
            } else {
                l[i * d + j] = s / l[j * d + j];
            }
        }
    }
    Some(l)
}

/// Solve `L y = b` with `L` lower triangular.
pub fn forward_sub(l: &[f64], d: usize, b: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; d];
    for i in 0..d {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * d + k] * y[k];
        }
        y[i] = s / l[i * d + i];
    }
    y
}

/// Solve `L^T x = b` with `L` lower triangular.
pub fn backward_sub_t(l: &[f64], d: usize, b: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; d];
    for i in (0..d).rev() {
        let mut s = b[i];
        for k in (i + 1)..d {
            s -= l[k * d + i] * x[k];
        }
        x[i] = s / l[i * d + i];
    }
    x
}

/// Solve `A x = b` given the Cholesky factor `L` of `A`.
pub fn chol_solve(l: &[f64], d: usize, b: &[f64]) -> Vec<f64> {
    backward_sub_t(l, d, &forward_sub(l, d, b))
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors stored as the
/// COLUMNS of the returned row-major matrix, i.e. `v[i*d + k]` is component
/// `i` of eigenvector `k`. Eigenvalues are sorted descending.
pub fn jacobi_eigen(a: &[f64], d: usize) -> (Vec<f64>, Vec<f64>) {
    let mut m = a.to_vec();
    let mut v = vec![0.0; d * d];
    for i in 0..d {
        v[i * d + i] = 1.0;
    }
    let scale_ref: f64 = (0..d).map(|i| m[i * d + i].abs()).fold(1e-300, f64::max);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..d {
            for q in (p + 1)..d {
                off = off.max(m[p * d + q].abs());
            }
        }
        if off <= 1e-15 * scale_ref {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = m[p * d + q];
                if apq.abs() <= 1e-18 * scale_ref {
                    continue;
                }
                let app = m[p * d + p];
                let aqq = m[q * d + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..d {
                    let mkp = m[k * d + p];
                    let mkq = m[k * d + q];
                    m[k * d + p] = c * mkp - s * mkq;
                    m[k * d + q] = s * mkp + c * mkq;
                }
                for k in 0..d {
                    let mpk = m[p * d + k];
                    let mqk = m[q * d + k];
                    m[p * d + k] = c * mpk - s * mqk;
                    m[q * d + k] = s * mpk + c * mqk;
                }
                for k in 0..d {
                    let vkp = v[k * d + p];
                    let vkq = v[k * d + q];
                    v[k * d + p] = c * vkp - s * vkq;
                    v[k * d + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| m[j * d + j].partial_cmp(&m[i * d + i]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| m[i * d + i]).collect();
    let mut vecs = vec![0.0; d * d];
    for (k, &src) in order.iter().enumerate() {
        for i in 0..d {
            vecs[i * d + k] = v[i * d + src];
        }
    }
    (vals, vecs)
}
