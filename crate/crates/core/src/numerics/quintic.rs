//! Real roots of monic quintics via companion-matrix eigenvalues.
//!
//! The companion matrix is built in its upper-Hessenberg (last-column) form,
//! balanced, and reduced to real Schur form with Francis double-shift QR
//! steps. Real eigenvalues are then polished with a few Newton steps on the
//! polynomial itself.

use num_complex::Complex64;

/// `z⁵ + c4·z⁴ + c3·z³ + c2·z² + c1·z + c0`, stored as `[c0, c1, c2, c3, c4]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuinticCoefficients(pub [f64; 5]);

impl QuinticCoefficients {
    /// Stationarity quintic in `z_j` for projecting `v = (v_i, v_j, v_k)` onto
    /// `{z : z_i·z_j = z_k}`. Always has `c3 = 2`.
    pub fn projection(v: [f64; 3]) -> Self {
        let [vi, vj, vk] = v;
        Self([
            -vj - vi * vk,
            vi * vi - vk * vk + 1.0,
            vi * vk - 2.0 * vj,
            2.0,
            -vj,
        ])
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.eval_with_derivative(z).0
    }

    /// Horner evaluation of `(p(z), p'(z))`.
    pub fn eval_with_derivative(&self, z: f64) -> (f64, f64) {
        let mut p = 1.0;
        let mut dp = 0.0;
        for &c in self.0.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0f64, |a, c| a.max(c.abs()))
    }

    /// Coefficients of `-p(-z)`, whose roots are the negated roots of `p`.
    pub fn reflected(&self) -> Self {
        let c = self.0;
        Self([-c[0], c[1], -c[2], c[3], -c[4]])
    }
}

/// Eigenvalues of the companion matrix, i.e. all five complex roots.
/// Complex roots come in exact conjugate pairs.
pub fn companion_eigenvalues(c: &QuinticCoefficients) -> [Complex64; 5] {
    let mut a = [[0.0f64; 5]; 5];
    for i in 0..4 {
        a[i + 1][i] = 1.0;
    }
    for i in 0..5 {
        a[i][4] = -c.0[i];
    }
    balance(&mut a);
    hqr(&mut a)
}

/// Distinct real roots in ascending order. At least one root is always
/// returned for finite input.
pub fn quintic_real_roots(c: &QuinticCoefficients) -> Vec<f64> {
    let eig = companion_eigenvalues(c);
    let mut roots: Vec<f64> = eig
        .iter()
        .filter(|z| z.im.abs() <= 1e-8 * (1.0 + z.re.abs()))
        .map(|z| newton_polish(c, z.re))
        .collect();
    if roots.is_empty() {
        roots.push(bisect_any_root(c));
    }
    dedup_sorted(roots)
}

/// Candidate real roots for a projection: every eigenvalue whose imaginary
/// part is small enough that a nearby real root may have been split into a
/// complex pair, after Newton polishing. A superset of the real roots.
pub(crate) fn real_root_candidates(c: &QuinticCoefficients) -> Vec<f64> {
    let eig = companion_eigenvalues(c);
    let mut roots: Vec<f64> = eig
        .iter()
        .filter(|z| z.im.abs() <= 1e-4 * (1.0 + z.re.abs()))
        .map(|z| newton_polish(c, z.re))
        .collect();
    if roots.is_empty() {
        roots.push(bisect_any_root(c));
    }
    dedup_sorted(roots)
}

fn dedup_sorted(mut roots: Vec<f64>) -> Vec<f64> {
    roots.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(roots.len());
    for r in roots {
        match out.last() {
            Some(&prev) if (r - prev).abs() <= 1e-9 * prev.abs().max(1.0) => {}
            _ => out.push(r),
        }
    }
    out
}

fn newton_polish(c: &QuinticCoefficients, mut r: f64) -> f64 {
    let (mut p, mut dp) = c.eval_with_derivative(r);
    for _ in 0..8 {
        if p == 0.0 || dp == 0.0 || !dp.is_finite() {
            break;
        }
        let next = r - p / dp;
        let (pn, dpn) = c.eval_with_derivative(next);
        if pn.abs() >= p.abs() {
            break;
        }
        let done = (next - r).abs() <= 4.0 * f64::EPSILON * next.abs().max(1.0);
        r = next;
        p = pn;
        dp = dpn;
        if done {
            break;
        }
    }
    r
}

/// Sign-change bisection on the Cauchy bound interval; only reached if the
/// QR iteration failed to deliver any real eigenvalue.
fn bisect_any_root(c: &QuinticCoefficients) -> f64 {
    let bound = 1.0 + c.max_abs();
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if c.eval(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Diagonal similarity scaling (radix 2) to even out row and column norms.
fn balance(a: &mut [[f64; 5]; 5]) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let n = a.len();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[i][j] *= g;
                    }
                    for row in a.iter_mut() {
                        row[i] *= f;
                    }
                }
            }
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by the Francis double-shift QR
/// algorithm, with exceptional shifts every tenth iteration on a stalled block.
fn hqr(a: &mut [[f64; 5]; 5]) -> [Complex64; 5] {
    const MAX_ITS: usize = 60;
    let n = a.len();
    let mut wr = [0.0f64; 5];
    let mut wi = [0.0f64; 5];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            // look for a single small subdiagonal element
            let mut l = nu;
            while l > 0 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() <= f64::EPSILON * s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nu][nu];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[nu - 1][nu - 1];
            let mut w = a[nu][nu - 1] * a[nu - 1][nu];
            if l + 1 == nu {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    let z = p + z.copysign(p);
                    wr[nu - 1] = x + z;
                    wr[nu] = if z != 0.0 { x - w / z } else { x + z };
                    wi[nu - 1] = 0.0;
                    wi[nu] = 0.0;
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = z;
                    wi[nu] = -z;
                }
                nn -= 2;
                break;
            }
            if its >= MAX_ITS {
                // give up on this block; report its diagonal
                for i in l..=nu {
                    wr[i] = a[i][i] + t;
                    wi[i] = 0.0;
                }
                nn = l as isize - 1;
                break;
            }
            if its > 0 && its % 10 == 0 {
                t += x;
                for i in 0..=nu {
                    a[i][i] -= x;
                }
                let s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            // form the shift and look for two consecutive small subdiagonals
            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[m][m];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - rr - ss;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u <= f64::EPSILON * v {
                    break;
                }
                m -= 1;
            }
            for i in m..nu - 1 {
                a[i + 2][i] = 0.0;
                if i != m {
                    a[i + 2][i - 1] = 0.0;
                }
            }
            // double QR step on rows l..=nn and columns m..=nn
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if k + 1 != nu { a[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[k][j] + q * a[k + 1][j];
                        if k + 1 != nu {
                            pp += r * a[k + 2][j];
                            a[k + 2][j] -= pp * z;
                        }
                        a[k + 1][j] -= pp * y;
                        a[k][j] -= pp * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = x * a[i][k] + y * a[i][k + 1];
                        if k + 1 != nu {
                            pp += z * a[i][k + 2];
                            a[i][k + 2] -= pp * r;
                        }
                        a[i][k + 1] -= pp * q;
                        a[i][k] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    std::array::from_fn(|i| Complex64::new(wr[i], wi[i]))
}
