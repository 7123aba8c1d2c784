//! The ADMM iteration over `min f(x) + 1_D(x) + 1_P(z)  s.t. x = z`:
//!
//! ```text
//! x ← argmin_{x∈D} ½xᵀAx + aᵀx + (ρ/2)‖x − z + u‖²
//! z ← Π_P(x + u)            (one three-variable projection per triple)
//! u ← u + x − z
//! ```
//!
//! In the relaxed variant the equality rows leave `D` and enter the cost as
//! `γ‖Cx − c‖²`, so the x-update is a single SPD solve.

use std::io::Write;
use std::time::Instant;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::quintic::real_root_candidates;
use crate::numerics::{solve_kkt, solve_qp, spectral_norm, KktSystem, NumericsError, QpOptions, QuinticCoefficients};
use crate::reduction::QopProblem;

/// Abort threshold on `‖x‖_∞`.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    #[default]
    Constrained,
    Relaxed,
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "constrained" => Ok(Self::Constrained),
            "relaxed" => Ok(Self::Relaxed),
            other => Err(format!("unknown variant `{other}` (expected constrained or relaxed)")),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Constrained => "constrained",
            Self::Relaxed => "relaxed",
        })
    }
}

/// How the per-triple projections of one z-update are scheduled. Both give
/// bit-identical results.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ProjectionSchedule {
    #[default]
    Sequential,
    Parallel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdmmConfig {
    pub rho: f64,
    /// Weight of `‖Cx − c‖²`; used by the relaxed variant only.
    pub gamma: f64,
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub variant: Variant,
    pub schedule: ProjectionSchedule,
    pub record_trace: bool,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self {
            rho: 1.0,
            gamma: 1.0,
            eps_abs: 1e-8,
            eps_rel: 1e-6,
            max_iter: 50_000,
            seed: 0,
            variant: Variant::Constrained,
            schedule: ProjectionSchedule::Sequential,
            record_trace: false,
        }
    }
}

impl AdmmConfig {
    pub fn validate(&self) -> Result<(), AdmmError> {
        let bad = |msg: String| Err(AdmmError::InvalidConfig(msg));
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return bad(format!("rho must be positive and finite, got {}", self.rho));
        }
        if self.variant == Variant::Relaxed && !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be positive and finite, got {}", self.gamma));
        }
        if !(self.eps_abs > 0.0 && self.eps_abs.is_finite()) {
            return bad(format!("eps_abs must be positive, got {}", self.eps_abs));
        }
        if !(self.eps_rel > 0.0 && self.eps_rel.is_finite()) {
            return bad(format!("eps_rel must be positive, got {}", self.eps_rel));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdmmError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("the relaxed variant requires a problem without inequality rows ({0} present)")]
    RelaxedWithInequalities(usize),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("iterates diverged at iteration {iteration}")]
    Divergence { iteration: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Converged,
    MaxIter,
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub r_primal: f64,
    pub r_dual: f64,
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub variant: Variant,
    pub seed: u64,
    pub rho: f64,
    pub gamma: f64,
    pub rho_lower_bound: f64,
    pub iterations: usize,
    pub r_primal: f64,
    pub r_dual: f64,
    /// Original objective evaluated at `x_original`.
    pub objective: f64,
    pub x_original: Vec<f64>,
    pub x_final: Vec<f64>,
    /// `‖Cx − c‖_∞` at `x_final`.
    pub equality_violation: f64,
    /// `max (Bx − b)_+` at `x_final`.
    pub inequality_violation: f64,
    pub runtime_ms: f64,
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRow>>,
}

impl SolveReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Writes `iter,r_primal,r_dual,objective` rows.
pub fn write_trace_csv<W: Write>(rows: &[TraceRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Iterates after `iter` completed steps.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmmState {
    pub x: DVector<f64>,
    pub z: DVector<f64>,
    pub u: DVector<f64>,
    pub iter: usize,
    pub r_primal: f64,
    pub r_dual: f64,
}

impl AdmmState {
    /// `x = z₀`, with `z₀` and `u₀` i.i.d. standard Gaussian.
    pub fn initial(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = DVector::from_fn(dim, |_, _| StandardNormal.sample(&mut rng));
        let u = DVector::from_fn(dim, |_, _| StandardNormal.sample(&mut rng));
        Self {
            x: z.clone(),
            z,
            u,
            iter: 0,
            r_primal: f64::INFINITY,
            r_dual: f64::INFINITY,
        }
    }
}

/// Exact minimizer of `½xᵀAx + aᵀx + (ρ/2)‖x − z + u‖²` over `D`.
pub fn x_update_constrained(
    q: &QopProblem,
    z: &DVector<f64>,
    u: &DVector<f64>,
    rho: f64,
) -> Result<DVector<f64>, AdmmError> {
    let h = shifted(&q.quad, rho);
    let top = (z - u) * rho - &q.lin;
    if q.num_ineq() == 0 {
        Ok(solve_kkt(&h, &q.eq_mat, &top, &q.eq_rhs)?.x)
    } else {
        let sol = solve_qp(&h, &-top, &q.ineq_mat, &q.ineq_rhs, &q.eq_mat, &q.eq_rhs, &QpOptions::default())?;
        Ok(sol.x)
    }
}

/// Minimizer of `½xᵀAx + aᵀx + γ‖Cx − c‖² + (ρ/2)‖x − z + u‖²`.
pub fn x_update_relaxed(
    q: &QopProblem,
    z: &DVector<f64>,
    u: &DVector<f64>,
    rho: f64,
    gamma: f64,
) -> Result<DVector<f64>, AdmmError> {
    if q.num_ineq() > 0 {
        return Err(AdmmError::RelaxedWithInequalities(q.num_ineq()));
    }
    let chol = relaxed_factor(q, rho, gamma)?;
    Ok(chol.solve(&relaxed_rhs(q, z, u, rho, gamma)))
}

fn shifted(a: &DMatrix<f64>, rho: f64) -> DMatrix<f64> {
    let mut h = a.clone();
    for i in 0..h.nrows() {
        h[(i, i)] += rho;
    }
    h
}

fn relaxed_hessian(q: &QopProblem, gamma: f64) -> DMatrix<f64> {
    if q.num_eq() == 0 {
        q.quad.clone()
    } else {
        &q.quad + q.eq_mat.transpose() * &q.eq_mat * (2.0 * gamma)
    }
}

fn relaxed_factor(q: &QopProblem, rho: f64, gamma: f64) -> Result<Cholesky<f64, Dyn>, AdmmError> {
    let h = shifted(&relaxed_hessian(q, gamma), rho);
    Cholesky::new(h).ok_or(AdmmError::Numerics(NumericsError::Singular { index: 0, pivot: 0.0 }))
}

fn relaxed_rhs(q: &QopProblem, z: &DVector<f64>, u: &DVector<f64>, rho: f64, gamma: f64) -> DVector<f64> {
    let mut rhs = (z - u) * rho - &q.lin;
    if q.num_eq() > 0 {
        rhs += q.eq_mat.transpose() * &q.eq_rhs * (2.0 * gamma);
    }
    rhs
}

/// `f_v(z) = ‖(z_i, z_j, z_i·z_j) − v‖²`.
pub fn projection_cost(v: [f64; 3], zi: f64, zj: f64) -> f64 {
    let d = [zi - v[0], zj - v[1], zi * zj - v[2]];
    d.iter().map(|e| e * e).sum()
}

/// Gradient of `f_v` with respect to `(z_i, z_j)`.
pub fn projection_gradient(v: [f64; 3], zi: f64, zj: f64) -> [f64; 2] {
    let r = zi * zj - v[2];
    [2.0 * (zi - v[0]) + 2.0 * r * zj, 2.0 * (zj - v[1]) + 2.0 * r * zi]
}

/// Euclidean projection of `v` onto `{z : z_i·z_j = z_k}`. The third
/// component of the result is exactly the product of the first two.
pub fn project_triple(v: [f64; 3]) -> [f64; 3] {
    let coeffs = QuinticCoefficients::projection(v);
    let mut best: Option<(f64, f64, f64)> = None;
    for zj in real_root_candidates(&coeffs) {
        let zi = (v[0] + zj * v[2]) / (1.0 + zj * zj);
        let cost = projection_cost(v, zi, zj);
        // candidates arrive in ascending z_j, so ties keep the smaller one
        match best {
            Some((_, _, c)) if cost >= c - 1e-12 * (1.0 + c) => {}
            _ => best = Some((zi, zj, cost)),
        }
    }
    let (zi, zj, _) = best.expect("a quintic always has a real root");
    let (zi, zj) = newton_polish(v, zi, zj);
    [zi, zj, zi * zj]
}

/// A few safeguarded Newton steps on `f_v`; a step is kept only if it
/// shrinks the gradient without raising the cost.
fn newton_polish(v: [f64; 3], mut zi: f64, mut zj: f64) -> (f64, f64) {
    let norm = |g: [f64; 2]| g[0].hypot(g[1]);
    let mut g = projection_gradient(v, zi, zj);
    let mut cost = projection_cost(v, zi, zj);
    for _ in 0..4 {
        if norm(g) == 0.0 {
            break;
        }
        let r = zi * zj - v[2];
        let hii = 2.0 + 2.0 * zj * zj;
        let hjj = 2.0 + 2.0 * zi * zi;
        let hij = 2.0 * zi * zj + 2.0 * r;
        let det = hii * hjj - hij * hij;
        if !(det > 0.0) {
            break;
        }
        let di = (hjj * g[0] - hij * g[1]) / det;
        let dj = (hii * g[1] - hij * g[0]) / det;
        let (ni, nj) = (zi - di, zj - dj);
        let ng = projection_gradient(v, ni, nj);
        let nc = projection_cost(v, ni, nj);
        if norm(ng) >= norm(g) || nc > cost + 1e-15 * (1.0 + cost) {
            break;
        }
        zi = ni;
        zj = nj;
        g = ng;
        cost = nc;
    }
    (zi, zj)
}

/// Projects `x_new + u` onto P triple by triple; uncovered coordinates pass
/// through unchanged.
pub fn z_update(q: &QopProblem, x_new: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
    z_update_with(q, x_new, u, ProjectionSchedule::Sequential)
}

pub fn z_update_with(
    q: &QopProblem,
    x_new: &DVector<f64>,
    u: &DVector<f64>,
    schedule: ProjectionSchedule,
) -> DVector<f64> {
    let mut z = x_new + u;
    let input = |t: &crate::reduction::Triple| [z[t.i], z[t.j], z[t.k]];
    let projected: Vec<[f64; 3]> = match schedule {
        ProjectionSchedule::Sequential => q.triples.iter().map(|t| project_triple(input(t))).collect(),
        ProjectionSchedule::Parallel => q.triples.par_iter().map(|t| project_triple(input(t))).collect(),
    };
    for (t, p) in q.triples.iter().zip(projected) {
        z[t.i] = p[0];
        z[t.j] = p[1];
        z[t.k] = p[2];
    }
    z
}

pub fn u_update(u: &DVector<f64>, x_new: &DVector<f64>, z_new: &DVector<f64>) -> DVector<f64> {
    u + (x_new - z_new)
}

/// `√2·‖H‖₂` with `H = A + 2γCᵀC` the Hessian of the smooth part of the
/// relaxed cost.
pub fn rho_lower_bound(q: &QopProblem, gamma: f64) -> f64 {
    if q.dim() == 0 {
        return 0.0;
    }
    std::f64::consts::SQRT_2 * spectral_norm(&relaxed_hessian(q, gamma))
}

enum XSolver {
    Kkt(KktSystem),
    Qp(DMatrix<f64>),
    Relaxed(Cholesky<f64, Dyn>),
}

/// A prepared iteration: the x-update matrix is factored once.
pub struct Admm<'a> {
    q: &'a QopProblem,
    cfg: AdmmConfig,
    solver: XSolver,
}

impl<'a> Admm<'a> {
    pub fn new(q: &'a QopProblem, cfg: &AdmmConfig) -> Result<Self, AdmmError> {
        cfg.validate()?;
        let violations = q.validate();
        if !violations.is_empty() {
            let msgs: Vec<String> = violations.iter().map(ToString::to_string).collect();
            return Err(AdmmError::InvalidProblem(msgs.join("; ")));
        }
        let solver = match cfg.variant {
            Variant::Relaxed => {
                if q.num_ineq() > 0 {
                    return Err(AdmmError::RelaxedWithInequalities(q.num_ineq()));
                }
                XSolver::Relaxed(relaxed_factor(q, cfg.rho, cfg.gamma)?)
            }
            Variant::Constrained if q.num_ineq() == 0 => XSolver::Kkt(KktSystem::new(&shifted(&q.quad, cfg.rho), &q.eq_mat)?),
            Variant::Constrained => XSolver::Qp(shifted(&q.quad, cfg.rho)),
        };
        Ok(Self { q, cfg: cfg.clone(), solver })
    }

    fn x_update(&self, z: &DVector<f64>, u: &DVector<f64>) -> Result<DVector<f64>, AdmmError> {
        let (q, rho) = (self.q, self.cfg.rho);
        match &self.solver {
            XSolver::Kkt(k) => Ok(k.solve(&((z - u) * rho - &q.lin), &q.eq_rhs).x),
            XSolver::Qp(h) => {
                let f = &q.lin - (z - u) * rho;
                let sol = solve_qp(h, &f, &q.ineq_mat, &q.ineq_rhs, &q.eq_mat, &q.eq_rhs, &QpOptions::default())?;
                Ok(sol.x)
            }
            XSolver::Relaxed(chol) => Ok(chol.solve(&relaxed_rhs(q, z, u, rho, self.cfg.gamma))),
        }
    }

    /// One full x/z/u sweep.
    pub fn step(&self, s: &mut AdmmState) -> Result<(), AdmmError> {
        let x = self.x_update(&s.z, &s.u)?;
        if !x.iter().all(|v| v.is_finite()) || x.amax() > DIVERGENCE_LIMIT {
            return Err(AdmmError::Divergence { iteration: s.iter + 1 });
        }
        let z = z_update_with(self.q, &x, &s.u, self.cfg.schedule);
        s.u = u_update(&s.u, &x, &z);
        s.r_primal = (&x - &z).norm();
        s.r_dual = ((&s.z - &z) * self.cfg.rho).norm();
        s.x = x;
        s.z = z;
        s.iter += 1;
        Ok(())
    }

    /// `ε = eps_abs·√ñ + eps_rel·max(‖x‖, ‖z‖, ‖ρu‖)`.
    pub fn threshold(&self, s: &AdmmState) -> f64 {
        let scale = s.x.norm().max(s.z.norm()).max(s.u.norm() * self.cfg.rho);
        self.cfg.eps_abs * (self.q.dim() as f64).sqrt() + self.cfg.eps_rel * scale
    }

    pub fn converged(&self, s: &AdmmState) -> bool {
        let eps = self.threshold(s);
        s.r_primal <= eps && s.r_dual <= eps
    }
}

/// Runs the iteration from the seeded Gaussian start until both residuals
/// are below the threshold or `max_iter` is reached.
pub fn run(q: &QopProblem, cfg: &AdmmConfig) -> Result<SolveReport, AdmmError> {
    let start = Instant::now();
    let admm = Admm::new(q, cfg)?;
    let gamma = if cfg.variant == Variant::Relaxed { cfg.gamma } else { 0.0 };
    let bound = rho_lower_bound(q, gamma);
    let mut warnings = Vec::new();
    if cfg.rho <= bound {
        let msg = format!("rho = {} is below the convergence bound {bound:.6}", cfg.rho);
        log::debug!("{msg}");
        warnings.push(msg);
    }

    let objective_at = |x: &DVector<f64>| -> f64 {
        let xo: Vec<f64> = x.iter().take(q.n_original).copied().collect();
        match &q.source_objective {
            Some(p) => p.evaluate(&xo).expect("objective arity matches n_original"),
            None => q.cost_polynomial().evaluate(x.as_slice()).expect("cost arity matches dimension"),
        }
    };

    let mut state = AdmmState::initial(q.dim(), cfg.seed);
    let mut trace = cfg.record_trace.then(Vec::new);
    let mut status = SolveStatus::MaxIter;
    while state.iter < cfg.max_iter {
        admm.step(&mut state)?;
        if let Some(t) = trace.as_mut() {
            t.push(TraceRow {
                iter: state.iter,
                r_primal: state.r_primal,
                r_dual: state.r_dual,
                objective: objective_at(&state.x),
            });
        }
        if admm.converged(&state) {
            status = SolveStatus::Converged;
            break;
        }
    }

    let (ineq, eq) = q.linear_violation(&state.x);
    let x_original: Vec<f64> = state.x.iter().take(q.n_original).copied().collect();
    Ok(SolveReport {
        status,
        variant: cfg.variant,
        seed: cfg.seed,
        rho: cfg.rho,
        gamma,
        rho_lower_bound: bound,
        iterations: state.iter,
        r_primal: state.r_primal,
        r_dual: state.r_dual,
        objective: objective_at(&state.x),
        x_original,
        x_final: state.x.iter().copied().collect(),
        equality_violation: eq,
        inequality_violation: ineq,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        warnings,
        error: None,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{Polynomial, PopProblem};
    use crate::reduction::{reduce_to_qop, Lineage, Triple};
    use rand::Rng;

    fn bare(n: usize, quad: DMatrix<f64>) -> QopProblem {
        QopProblem {
            n_original: n,
            quad,
            lin: DVector::zeros(n),
            offset: 0.0,
            ineq_mat: DMatrix::zeros(0, n),
            ineq_rhs: DVector::zeros(0),
            eq_mat: DMatrix::zeros(0, n),
            eq_rhs: DVector::zeros(0),
            triples: vec![],
            lineage: vec![Lineage::Original; n],
            source_objective: None,
        }
    }

    fn exp1_qop() -> QopProblem {
        let p = |s: &str| Polynomial::parse(s, 3).unwrap();
        let pop = PopProblem::new(
            p("x1^2*x2^2 + x1^2 + 5*x1 + x2^2 + x2*x3 - 7*x2 + x3^2 + 2*x3"),
            vec![],
            vec![p("x2*x3 + x1 - 10")],
        )
        .unwrap();
        reduce_to_qop(&pop)
    }

    fn rand_vec(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
        DVector::from_fn(n, |_, _| rng.random_range(-3.0..3.0))
    }

    #[test]
    fn proximal_point_cases() {
        let w = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let zero = DVector::zeros(3);
        let q = bare(3, DMatrix::zeros(3, 3));
        assert!((x_update_constrained(&q, &w, &zero, 1.7).unwrap() - &w).amax() < 1e-14);
        let q = bare(3, DMatrix::identity(3, 3) * 2.0);
        assert!((x_update_constrained(&q, &w, &zero, 2.0).unwrap() - &w / 2.0).amax() < 1e-14);
        let relaxed = x_update_relaxed(&q, &w, &zero, 2.0, 1e-12).unwrap();
        assert!((relaxed - &w / 2.0).amax() < 1e-14);
    }

    #[test]
    fn penalty_dominates() {
        let mut q = bare(2, DMatrix::zeros(2, 2));
        q.eq_mat = DMatrix::identity(2, 2);
        q.eq_rhs = DVector::from_vec(vec![3.0, -1.0]);
        let x = x_update_relaxed(&q, &DVector::zeros(2), &DVector::zeros(2), 1e-9, 1e8).unwrap();
        assert!((x - &q.eq_rhs).amax() < 1e-6);
    }

    #[test]
    fn constrained_update_on_exp1() {
        let q = exp1_qop();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (z, u) = (rand_vec(&mut rng, 6), rand_vec(&mut rng, 6));
        let x = x_update_constrained(&q, &z, &u, 2.0).unwrap();
        assert!((&q.eq_mat * &x - &q.eq_rhs).amax() < 1e-10);
        // stationarity: (A+ρI)x + a − ρ(z−u) lies in the row space of C
        let g = shifted(&q.quad, 2.0) * &x + &q.lin - (&z - &u) * 2.0;
        let ct = q.eq_mat.transpose();
        let mu = (ct.transpose() * &ct).lu().solve(&(ct.transpose() * &g)).unwrap();
        assert!((g - ct * mu).amax() < 1e-10);
    }

    #[test]
    fn relaxed_rejects_inequalities() {
        let mut q = bare(2, DMatrix::identity(2, 2));
        q.ineq_mat = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        q.ineq_rhs = DVector::from_vec(vec![1.0]);
        let z = DVector::zeros(2);
        assert_eq!(x_update_relaxed(&q, &z, &z, 1.0, 1.0), Err(AdmmError::RelaxedWithInequalities(1)));
        let cfg = AdmmConfig { variant: Variant::Relaxed, ..Default::default() };
        assert!(matches!(run(&q, &cfg), Err(AdmmError::RelaxedWithInequalities(1))));
    }

    #[test]
    fn inequality_x_update_respects_bound() {
        let mut q = bare(2, DMatrix::identity(2, 2));
        q.ineq_mat = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        q.ineq_rhs = DVector::from_vec(vec![1.0]);
        let z = DVector::from_vec(vec![3.0, 3.0]);
        let x = x_update_constrained(&q, &z, &DVector::zeros(2), 1.0).unwrap();
        assert!((x - DVector::from_vec(vec![0.5, 0.5])).amax() < 1e-10);
    }

    #[test]
    fn projection_examples() {
        assert_eq!(project_triple([2.0, 3.0, 6.0]), [2.0, 3.0, 6.0]);
        assert_eq!(project_triple([0.0, 0.0, 0.0]), [0.0, 0.0, 0.0]);
        let p = project_triple([1.0, 1.0, 2.0]);
        assert_eq!(p[2], p[0] * p[1]);
        let g = projection_gradient([1.0, 1.0, 2.0], p[0], p[1]);
        assert!(g[0].hypot(g[1]) < 1e-8 * (1.0 + 6f64.sqrt()));
        // the symmetric case has two equal-cost minimizers; the smaller z_j wins
        let v = [1.0, -1.0, 0.0];
        let p = project_triple(v);
        let q = project_triple([-1.0, 1.0, 0.0]);
        assert!(p[1] <= q[1] + 1e-12 || (p[1] - q[1]).abs() < 1e-9);
    }

    #[test]
    fn projection_beats_random_feasible_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let v = [rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)];
            let p = project_triple(v);
            let best = projection_cost(v, p[0], p[1]);
            for _ in 0..2000 {
                let (a, b) = (rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
                assert!(best <= projection_cost(v, a, b) + 1e-12);
            }
        }
    }

    #[test]
    fn z_update_properties() {
        let q = exp1_qop();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (x, u) = (rand_vec(&mut rng, 6), rand_vec(&mut rng, 6));
        let z = z_update(&q, &x, &u);
        assert_eq!(q.bilinear_violation(&z), 0.0);
        let v = &x + &u;
        for t in &q.triples {
            let p = project_triple([v[t.i], v[t.j], v[t.k]]);
            assert_eq!([z[t.i], z[t.j], z[t.k]], p);
        }
        assert_eq!(z_update_with(&q, &x, &u, ProjectionSchedule::Parallel), z);

        let empty = bare(3, DMatrix::zeros(3, 3));
        let (x, u) = (rand_vec(&mut rng, 3), rand_vec(&mut rng, 3));
        assert_eq!(z_update(&empty, &x, &u), &x + &u);

        let mut feasible = bare(3, DMatrix::zeros(3, 3));
        feasible.triples = vec![Triple::new(0, 1, 2)];
        let x = DVector::from_vec(vec![2.0, 3.0, 6.0]);
        assert_eq!(z_update(&feasible, &x, &DVector::zeros(3)), x);
    }

    #[test]
    fn u_update_telescopes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u0 = rand_vec(&mut rng, 4);
        let x = rand_vec(&mut rng, 4);
        assert_eq!(u_update(&u0, &x, &x), u0);
        assert_eq!(u_update(&DVector::zeros(4), &x, &DVector::zeros(4)), x);
        let pairs: Vec<_> = (0..3).map(|_| (rand_vec(&mut rng, 4), rand_vec(&mut rng, 4))).collect();
        let mut u = u0.clone();
        let mut total = DVector::zeros(4);
        for (a, b) in &pairs {
            u = u_update(&u, a, b);
            total += a - b;
        }
        assert!((u - (u0 + total)).amax() < 1e-14);
    }

    #[test]
    fn rho_bound_cases() {
        assert_eq!(rho_lower_bound(&bare(3, DMatrix::zeros(3, 3)), 5.0), 0.0);
        let b = rho_lower_bound(&bare(3, DMatrix::identity(3, 3)), 0.0);
        assert!((b - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn trivial_problem_converges() {
        let q = bare(4, DMatrix::identity(4, 4));
        let report = run(&q, &AdmmConfig::default()).unwrap();
        assert_eq!(report.status, SolveStatus::Converged);
        assert!(report.iterations <= 50);
        assert!(report.x_final.iter().all(|v| v.abs() < 1e-6));
    }

    #[test]
    fn exp1_instance_converges() {
        let q = exp1_qop();
        let cfg = AdmmConfig { rho: 2.0, seed: 1, record_trace: true, ..Default::default() };
        let report = run(&q, &cfg).unwrap();
        assert_eq!(report.status, SolveStatus::Converged);
        assert!(report.equality_violation < 1e-8);
        assert_eq!(report.trace.as_ref().unwrap().len(), report.iterations);
        assert!(!report.warnings.is_empty());

        let relaxed = AdmmConfig { variant: Variant::Relaxed, gamma: 1e3, ..cfg };
        let r = run(&q, &relaxed).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert!(r.equality_violation < 1e-2);
        assert!((r.objective - report.objective).abs() < 1e-2, "{} vs {}", r.objective, report.objective);
    }

    #[test]
    fn max_iter_and_config_errors() {
        let q = exp1_qop();
        let r = run(&q, &AdmmConfig { max_iter: 1, ..Default::default() }).unwrap();
        assert_eq!((r.status, r.iterations), (SolveStatus::MaxIter, 1));
        for cfg in [
            AdmmConfig { rho: 0.0, ..Default::default() },
            AdmmConfig { eps_abs: -1.0, ..Default::default() },
            AdmmConfig { max_iter: 0, ..Default::default() },
            AdmmConfig { variant: Variant::Relaxed, gamma: 0.0, ..Default::default() },
        ] {
            assert!(matches!(cfg.validate(), Err(AdmmError::InvalidConfig(_))));
        }
    }

    #[test]
    fn trace_csv_header() {
        let rows = [TraceRow { iter: 1, r_primal: 0.5, r_dual: 0.25, objective: -1.0 }];
        let mut buf = Vec::new();
        write_trace_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "iter,r_primal,r_dual,objective\n1,0.5,0.25,-1.0\n");
    }
}
