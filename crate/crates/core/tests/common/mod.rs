//! Reference computations shared by the integration tests. None of them go
//! through the solver's own kernels.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// `f_v(z_i, z_j) = ‖(z_i, z_j, z_i·z_j) − v‖²`.
pub fn triple_cost(v: [f64; 3], zi: f64, zj: f64) -> f64 {
    let d = [zi - v[0], zj - v[1], zi * zj - v[2]];
    d.iter().map(|e| e * e).sum()
}

/// Global minimum of `f_v` by brute force: for fixed `z_j` the cost is a
/// convex quadratic in `z_i`, so scanning `z_j` on a grid and minimizing
/// `z_i` in closed form is an exhaustive search over the plane. The best grid
/// cells are then refined with 2-D Newton steps.
///
/// Any minimizer has cost at most `‖v‖²` (the cost at the origin), hence
/// `|z_j − v_j| ≤ ‖v‖`; the scan covers that interval.
pub fn projection_oracle(v: [f64; 3], step: f64) -> (f64, f64, f64) {
    let radius = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt() + 1.0;
    let lo = v[1] - radius;
    let n = (2.0 * radius / step).ceil() as usize + 1;
    let profile = |zj: f64| {
        let zi = (v[0] + zj * v[2]) / (1.0 + zj * zj);
        (zi, triple_cost(v, zi, zj))
    };
    let mut values = Vec::with_capacity(n);
    for s in 0..n {
        values.push(profile(lo + s as f64 * step).1);
    }
    // refine every discrete local minimum of the profile
    let mut best = (0.0, 0.0, f64::INFINITY);
    for s in 0..n {
        let left = if s > 0 { values[s - 1] } else { f64::INFINITY };
        let right = if s + 1 < n { values[s + 1] } else { f64::INFINITY };
        if values[s] <= left && values[s] <= right {
            let zj0 = lo + s as f64 * step;
            let (zi0, _) = profile(zj0);
            let (zi, zj) = newton2(v, zi0, zj0);
            let c = triple_cost(v, zi, zj).min(values[s]);
            let (zi, zj) = if triple_cost(v, zi, zj) <= values[s] { (zi, zj) } else { (zi0, zj0) };
            if c < best.2 {
                best = (zi, zj, c);
            }
        }
    }
    best
}

fn newton2(v: [f64; 3], mut zi: f64, mut zj: f64) -> (f64, f64) {
    for _ in 0..50 {
        let r = zi * zj - v[2];
        let gi = 2.0 * (zi - v[0]) + 2.0 * r * zj;
        let gj = 2.0 * (zj - v[1]) + 2.0 * r * zi;
        let hii = 2.0 + 2.0 * zj * zj;
        let hjj = 2.0 + 2.0 * zi * zi;
        let hij = 2.0 * zi * zj + 2.0 * r;
        let det = hii * hjj - hij * hij;
        if det <= 0.0 {
            break;
        }
        let di = (hjj * gi - hij * gj) / det;
        let dj = (hii * gj - hij * gi) / det;
        zi -= di;
        zj -= dj;
        if di.abs().max(dj.abs()) < 1e-15 {
            break;
        }
    }
    (zi, zj)
}

/// Horner evaluation of `Σ c_k z^k` with `coeffs[k] = c_k`.
pub fn poly_eval(coeffs: &[f64], z: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
}

fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect()
}

fn bisect(coeffs: &[f64], mut a: f64, mut b: f64) -> f64 {
    let mut fa = poly_eval(coeffs, a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = poly_eval(coeffs, m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Real roots with odd multiplicity of a real polynomial (`coeffs[k]` is the
/// coefficient of `z^k`, leading coefficient non-zero), ascending.
///
/// The critical points (roots of the derivative, found recursively) split the
/// line into monotone pieces; each piece holds at most one root, located by
/// sign-change bisection.
pub fn bisection_real_roots(coeffs: &[f64]) -> Vec<f64> {
    let deg = coeffs.len() - 1;
    if deg == 1 {
        return vec![-coeffs[0] / coeffs[1]];
    }
    let lead = coeffs[deg];
    let bound = 1.0 + coeffs[..deg].iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
    let mut knots = vec![-bound];
    knots.extend(bisection_real_roots(&poly_derivative(coeffs)).into_iter().filter(|c| c.abs() < bound));
    knots.push(bound);
    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (fa, fb) = (poly_eval(coeffs, w[0]), poly_eval(coeffs, w[1]));
        if fa == 0.0 {
            roots.push(w[0]);
        } else if (fa < 0.0) != (fb < 0.0) && fb != 0.0 {
            roots.push(bisect(coeffs, w[0], w[1]));
        }
    }
    if poly_eval(coeffs, bound) == 0.0 {
        roots.push(bound);
    }
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    roots
}

/// Coefficients (ascending) of a product of polynomials (ascending).
pub fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Dual value of `min ½xᵀHx + fᵀx  s.t. Bx ≤ b, Cx = c` (H ≻ 0) maximized by
/// accelerated projected gradient with restarts. Weak duality makes the result
/// a certified lower bound on the primal optimum.
pub fn qp_dual_oracle(
    h: &DMatrix<f64>,
    f: &DVector<f64>,
    bm: &DMatrix<f64>,
    b: &DVector<f64>,
    cm: &DMatrix<f64>,
    c: &DVector<f64>,
    iterations: usize,
) -> f64 {
    let l = bm.nrows();
    let m = cm.nrows();
    let n = h.nrows();
    let mut g = DMatrix::zeros(l + m, n);
    if l > 0 {
        g.view_mut((0, 0), (l, n)).copy_from(bm);
    }
    if m > 0 {
        g.view_mut((l, 0), (m, n)).copy_from(cm);
    }
    let mut rhs = DVector::zeros(l + m);
    rhs.rows_mut(0, l).copy_from(b);
    rhs.rows_mut(l, m).copy_from(c);
    let hinv = h.clone().cholesky().expect("H is positive definite").inverse();
    // d(y) = −½(f + Gᵀy)ᵀH⁻¹(f + Gᵀy) − rhsᵀy, y_ineq ≥ 0
    let q = &g * &hinv * g.transpose();
    let lin = &g * &hinv * f + &rhs;
    let constant = -0.5 * f.dot(&(&hinv * f));
    let dual = |y: &DVector<f64>| -0.5 * y.dot(&(&q * y)) - lin.dot(y) + constant;
    let lips = q.symmetric_eigenvalues().max().max(1e-12);
    let project = |y: &mut DVector<f64>| {
        for i in 0..l {
            y[i] = y[i].max(0.0);
        }
    };
    let mut y = DVector::zeros(l + m);
    let mut y_prev = y.clone();
    let mut t = 1.0f64;
    let mut best = dual(&y);
    let mut last = best;
    for _ in 0..iterations {
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let mom = &y + (&y - &y_prev) * ((t - 1.0) / t_next);
        let grad = -(&q * &mom) - &lin;
        let mut next = &mom + grad / lips;
        project(&mut next);
        let val = dual(&next);
        if val < last {
            // adaptive restart
            t = 1.0;
            y_prev = y.clone();
        } else {
            t = t_next;
            y_prev = y;
            y = next;
            last = val;
            best = best.max(val);
            continue;
        }
        last = dual(&y);
    }
    best
}
