//! Benchmark instances, a reference minimizer and the run harness.
//!
//! Experiment 1 is a random three-variable quartic with one bilinear equality.
//! Experiment 2 identifies `(α, β)` of `y(k+1) = α·y(k) + β·u(k+1)` from noisy
//! outputs; its QOP is assembled directly in the layout
//! `θ = (α, β, y_1..y_K, ψ_1..ψ_{K−1}, ξ_1..ξ_{K−1})` with `ψ_h = α` and
//! `ξ_h = y_h·ψ_h`.

use std::io::Write;
use std::time::Instant;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::admm::{self, AdmmConfig, SolveStatus, Variant};
use crate::poly::{Monomial, Polynomial, PopProblem};
use crate::reduction::{reduce_to_qop, Lineage, QopProblem, Triple};

pub const EXP2_NOISE_VARIANCE: f64 = 1e-4;
pub const EXP2_DEFAULT_K: usize = 50;
pub const EXP2_FULL_K: usize = 500;
pub const DEFAULT_RUNS: usize = 100;
pub const FULL_RUNS: usize = 500;

#[derive(Clone, Debug, PartialEq)]
pub struct Experiment1Instance {
    pub seed: u64,
    pub q: [f64; 3],
    pub pop: PopProblem,
}

/// `x1²x2² + x1² + q1·x1 + x2² + x2·x3 + q2·x2 + x3² + q3·x3` subject to
/// `x2·x3 + x1 = 10`.
pub fn experiment1_pop(q: [f64; 3]) -> PopProblem {
    let m = |f: &[usize]| Monomial::from_factors(f);
    let objective = Polynomial::from_terms(
        3,
        [
            (m(&[0, 0, 1, 1]), 1.0),
            (m(&[0, 0]), 1.0),
            (m(&[0]), q[0]),
            (m(&[1, 1]), 1.0),
            (m(&[1, 2]), 1.0),
            (m(&[1]), q[1]),
            (m(&[2, 2]), 1.0),
            (m(&[2]), q[2]),
        ],
    );
    let eq = Polynomial::from_terms(3, [(m(&[1, 2]), 1.0), (m(&[0]), 1.0), (Monomial::one(), -10.0)]);
    PopProblem::new(objective, vec![], vec![eq]).expect("consistent arity")
}

pub fn gen_experiment1(seed: u64) -> Experiment1Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = [rng.random_range(4.0..=6.0), rng.random_range(-8.0..=-6.0), rng.random_range(1.0..=3.0)];
    Experiment1Instance { seed, q, pop: experiment1_pop(q) }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Experiment2Instance {
    pub seed: u64,
    pub alpha: f64,
    pub beta: f64,
    /// `u(1..K)`.
    pub input: Vec<f64>,
    /// Noiseless `y(1..K)` with `y(0) = 0`.
    pub output: Vec<f64>,
    /// `w = y + η`.
    pub measured: Vec<f64>,
    pub noise_variance: f64,
}

impl Experiment2Instance {
    pub fn horizon(&self) -> usize {
        self.output.len()
    }

    /// QOP in the `θ` layout; the original variables are `(α, β, y)`.
    pub fn to_qop(&self) -> QopProblem {
        let k = self.horizon();
        let n_orig = 2 + k;
        let dim = 3 * k;
        let y = |h: usize| 1 + h; // y_h, h = 1..K
        let psi = |h: usize| 1 + k + h; // ψ_h, h = 1..K−1
        let xi = |h: usize| 2 * k + h; // ξ_h, h = 1..K−1

        let mut quad = DMatrix::zeros(dim, dim);
        let mut lin = DVector::zeros(dim);
        for h in 1..=k {
            quad[(y(h), y(h))] = 2.0;
            lin[y(h)] = -2.0 * self.measured[h - 1];
        }
        let offset = self.measured.iter().map(|w| w * w).sum();

        let rows = 2 * k - 1;
        let mut eq_mat = DMatrix::zeros(rows, dim);
        let eq_rhs = DVector::zeros(rows);
        // y_1 = β·u_1, y_{h+1} = ξ_h + β·u_{h+1}
        eq_mat[(0, y(1))] = 1.0;
        eq_mat[(0, 1)] = -self.input[0];
        for h in 1..k {
            eq_mat[(h, y(h + 1))] = 1.0;
            eq_mat[(h, xi(h))] = -1.0;
            eq_mat[(h, 1)] = -self.input[h];
        }
        for h in 1..k {
            eq_mat[(k - 1 + h, psi(h))] = 1.0;
            eq_mat[(k - 1 + h, 0)] = -1.0;
        }

        let triples = (1..k).map(|h| Triple::new(y(h), psi(h), xi(h))).collect();
        let mut lineage = vec![Lineage::Original; n_orig];
        lineage.extend((1..k).map(|_| Lineage::Alias { of: 0 }));
        lineage.extend((1..k).map(|h| Lineage::Product { of: [y(h), psi(h)] }));

        let mut objective = Polynomial::zero(n_orig);
        for h in 1..=k {
            let w = self.measured[h - 1];
            objective.add_term(Monomial::from_factors(&[y(h), y(h)]), 1.0);
            objective.add_term(Monomial::var(y(h)), -2.0 * w);
            objective.add_term(Monomial::one(), w * w);
        }

        QopProblem {
            n_original: n_orig,
            quad,
            lin,
            offset,
            ineq_mat: DMatrix::zeros(0, dim),
            ineq_rhs: DVector::zeros(0),
            eq_mat,
            eq_rhs,
            triples,
            lineage,
            source_objective: Some(objective),
        }
    }
}

/// `y(k+1) = α·y(k) + β·u(k+1)` from `y(0) = 0`.
pub fn simulate(alpha: f64, beta: f64, input: &[f64]) -> Vec<f64> {
    let mut prev = 0.0;
    input
        .iter()
        .map(|&u| {
            prev = alpha * prev + beta * u;
            prev
        })
        .collect()
}

fn draw_parameter(rng: &mut ChaCha8Rng) -> f64 {
    let magnitude = rng.random_range(0.5..1.0);
    if rng.random_bool(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

pub fn gen_experiment2(seed: u64, k: usize) -> Experiment2Instance {
    gen_experiment2_with_noise(seed, k, EXP2_NOISE_VARIANCE)
}

/// As [`gen_experiment2`] with a chosen noise variance; variance 0 gives
/// `w == y`.
pub fn gen_experiment2_with_noise(seed: u64, k: usize, noise_variance: f64) -> Experiment2Instance {
    assert!(k >= 2, "horizon must be at least 2");
    assert!(noise_variance >= 0.0, "noise variance must be non-negative");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = draw_parameter(&mut rng);
    let beta = draw_parameter(&mut rng);
    let input: Vec<f64> = (0..k).map(|_| StandardNormal.sample(&mut rng)).collect();
    let output = simulate(alpha, beta, &input);
    let noise = Normal::new(0.0, noise_variance.sqrt()).expect("finite standard deviation");
    let measured = output.iter().map(|y| y + noise.sample(&mut rng)).collect();
    Experiment2Instance { seed, alpha, beta, input, output, measured, noise_variance }
}

/// Gradient and Hessian of a polynomial, precomputed as polynomials.
struct Derivatives {
    value: Polynomial,
    grad: Vec<Polynomial>,
    hess: Vec<Vec<Polynomial>>,
}

impl Derivatives {
    fn new(p: &Polynomial) -> Self {
        let n = p.nvars();
        let grad: Vec<Polynomial> = (0..n).map(|i| p.partial_derivative(i)).collect();
        let hess = grad.iter().map(|g| (0..n).map(|j| g.partial_derivative(j)).collect()).collect();
        Self { value: p.clone(), grad, hess }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.value.evaluate(x).expect("arity checked")
    }

    fn gradient(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.grad.len(), self.grad.iter().map(|g| g.evaluate(x).expect("arity checked")))
    }

    fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.grad.len();
        DMatrix::from_fn(n, n, |i, j| self.hess[i][j].evaluate(x).expect("arity checked"))
    }
}

/// Augmented Lagrangian of a POP with fixed multipliers and penalty.
struct Merit<'a> {
    f: &'a Derivatives,
    eqs: &'a [Derivatives],
    ineqs: &'a [Derivatives],
    mu_eq: &'a [f64],
    mu_ineq: &'a [f64],
    penalty: f64,
}

impl Merit<'_> {
    fn value(&self, x: &[f64]) -> f64 {
        let mut v = self.f.eval(x);
        for (h, &m) in self.eqs.iter().zip(self.mu_eq) {
            let hv = h.eval(x);
            v += m * hv + 0.5 * self.penalty * hv * hv;
        }
        for (g, &m) in self.ineqs.iter().zip(self.mu_ineq) {
            let s = (m + self.penalty * g.eval(x)).max(0.0);
            v += (s * s - m * m) / (2.0 * self.penalty);
        }
        v
    }

    fn grad_hess(&self, x: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let mut g = self.f.gradient(x);
        let mut h = self.f.hessian(x);
        for (c, &m) in self.eqs.iter().zip(self.mu_eq) {
            let w = m + self.penalty * c.eval(x);
            let cg = c.gradient(x);
            g += &cg * w;
            h += c.hessian(x) * w + &cg * cg.transpose() * self.penalty;
        }
        for (c, &m) in self.ineqs.iter().zip(self.mu_ineq) {
            let w = m + self.penalty * c.eval(x);
            if w > 0.0 {
                let cg = c.gradient(x);
                g += &cg * w;
                h += c.hessian(x) * w + &cg * cg.transpose() * self.penalty;
            }
        }
        (g, h)
    }

    /// Damped Newton with a Levenberg shift and Armijo backtracking.
    fn minimize(&self, mut x: Vec<f64>, max_iter: usize) -> Vec<f64> {
        let n = x.len();
        let mut value = self.value(&x);
        for _ in 0..max_iter {
            let (g, h) = self.grad_hess(&x);
            if g.amax() <= 1e-13 * (1.0 + value.abs()) {
                break;
            }
            let mut shift = 0.0;
            let dir = loop {
                let shifted = &h + DMatrix::identity(n, n) * shift;
                if let Some(ch) = Cholesky::new(shifted) {
                    break ch.solve(&-&g);
                }
                shift = if shift == 0.0 { 1e-8 * (1.0 + h.amax()) } else { shift * 10.0 };
            };
            let slope = g.dot(&dir);
            let mut step = 1.0;
            let mut improved = false;
            while step > 1e-16 {
                let trial: Vec<f64> = x.iter().zip(dir.iter()).map(|(a, d)| a + step * d).collect();
                let tv = self.value(&trial);
                if tv.is_finite() && tv <= value + 1e-4 * step * slope {
                    x = trial;
                    value = tv;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        x
    }
}

/// Newton's method on the Lagrange system of the active constraints;
/// returns the refined point only when it is at least as good.
fn kkt_polish(p: &PopProblem, f: &Derivatives, active: &[&Derivatives], x: Vec<f64>) -> Vec<f64> {
    let n = x.len();
    let m = active.len();
    let mut xk = DVector::from_vec(x.clone());
    let mut lam = DVector::zeros(m);
    if m > 0 {
        // least-squares multipliers at the start
        let j = DMatrix::from_fn(m, n, |r, c| active[r].gradient(xk.as_slice())[c]);
        let g = f.gradient(xk.as_slice());
        if let Some(sol) = (&j * j.transpose()).lu().solve(&(-(&j * g))) {
            lam = sol;
        }
    }
    for _ in 0..20 {
        let xs = xk.as_slice();
        let mut grad = f.gradient(xs);
        let mut hess = f.hessian(xs);
        let mut jac = DMatrix::zeros(m, n);
        let mut cval = DVector::zeros(m);
        for (r, c) in active.iter().enumerate() {
            let cg = c.gradient(xs);
            grad += &cg * lam[r];
            hess += c.hessian(xs) * lam[r];
            jac.row_mut(r).copy_from(&cg.transpose());
            cval[r] = c.eval(xs);
        }
        let resid = grad.amax().max(cval.amax());
        if resid <= 1e-15 {
            break;
        }
        let mut k = DMatrix::zeros(n + m, n + m);
        k.view_mut((0, 0), (n, n)).copy_from(&hess);
        k.view_mut((n, 0), (m, n)).copy_from(&jac);
        k.view_mut((0, n), (n, m)).copy_from(&jac.transpose());
        let mut rhs = DVector::zeros(n + m);
        rhs.rows_mut(0, n).copy_from(&-grad);
        rhs.rows_mut(n, m).copy_from(&-cval);
        let Some(d) = k.lu().solve(&rhs) else { break };
        let step = d.rows(0, n).amax();
        xk += d.rows(0, n);
        lam += d.rows(n, m);
        if step <= 1e-15 * (1.0 + xk.amax()) {
            break;
        }
    }
    let polished: Vec<f64> = xk.iter().copied().collect();
    let ok = |y: &[f64]| p.violation(y).map(|v| v.is_finite()).unwrap_or(false);
    if !ok(&polished) {
        return x;
    }
    let before = (p.violation(&x).unwrap(), f.eval(&x));
    let after = (p.violation(&polished).unwrap(), f.eval(&polished));
    let drift = (&xk - DVector::from_vec(x.clone())).amax();
    if after.0 <= before.0.max(1e-12) && after.1 <= before.1 + 1e-9 * (1.0 + before.1.abs()) && drift < 1e-3 {
        polished
    } else {
        x
    }
}

/// Result of [`oracle_minimize`].
#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub violation: f64,
}

/// Multi-start augmented-Lagrangian minimization with Newton inner solves.
/// Starts are i.i.d. `N(0, 3²)` from `seed`; the best point with constraint
/// violation ≤ 1e-10 is returned (or the least violating one if none is).
pub fn oracle_minimize(p: &PopProblem, budget: usize, seed: u64) -> OracleResult {
    let n = p.nvars;
    let f = Derivatives::new(&p.objective);
    let eqs: Vec<Derivatives> = p.equalities.iter().map(Derivatives::new).collect();
    let ineqs: Vec<Derivatives> = p.inequalities.iter().map(Derivatives::new).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start_dist = Normal::new(0.0, 3.0).expect("valid scale");

    let mut best: Option<OracleResult> = None;
    for _ in 0..budget.max(1) {
        let mut x: Vec<f64> = (0..n).map(|_| start_dist.sample(&mut rng)).collect();
        let mut mu_eq = vec![0.0; eqs.len()];
        let mut mu_ineq = vec![0.0; ineqs.len()];
        let mut penalty = 10.0;
        let mut last_violation = f64::INFINITY;
        for _ in 0..60 {
            let merit = Merit { f: &f, eqs: &eqs, ineqs: &ineqs, mu_eq: &mu_eq, mu_ineq: &mu_ineq, penalty };
            x = merit.minimize(x, 200);
            let violation = p.violation(&x).unwrap_or(f64::INFINITY);
            if !violation.is_finite() {
                break;
            }
            for (m, h) in mu_eq.iter_mut().zip(&eqs) {
                *m += penalty * h.eval(&x);
            }
            for (m, g) in mu_ineq.iter_mut().zip(&ineqs) {
                *m = (*m + penalty * g.eval(&x)).max(0.0);
            }
            if violation <= 1e-12 {
                break;
            }
            if violation > 0.25 * last_violation {
                penalty = (penalty * 10.0).min(1e12);
            }
            last_violation = violation;
        }
        let active: Vec<&Derivatives> = eqs
            .iter()
            .chain(ineqs.iter().filter(|g| g.eval(&x) >= -1e-8))
            .collect();
        x = kkt_polish(p, &f, &active, x);
        let violation = p.violation(&x).unwrap_or(f64::INFINITY);
        let value = f.eval(&x);
        if !value.is_finite() || !violation.is_finite() {
            continue;
        }
        let candidate = OracleResult { point: x, value, violation };
        let better = match &best {
            None => true,
            Some(b) => {
                let (cf, bf) = (candidate.violation <= 1e-10, b.violation <= 1e-10);
                match (cf, bf) {
                    (true, false) => true,
                    (false, true) => false,
                    (true, true) => candidate.value < b.value,
                    (false, false) => candidate.violation < b.violation,
                }
            }
        };
        if better {
            best = Some(candidate);
        }
    }
    best.expect("at least one start yields a finite point")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentId {
    Exp1,
    Exp2,
}

impl std::str::FromStr for ExperimentId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exp1" => Ok(Self::Exp1),
            "exp2" => Ok(Self::Exp2),
            other => Err(format!("unknown experiment `{other}` (expected exp1 or exp2)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub experiment: ExperimentId,
    pub runs: usize,
    /// Run `r` uses seed `base_seed + r` for both the instance and the solver.
    pub base_seed: u64,
    pub admm: AdmmConfig,
    pub horizon: usize,
    pub noise_variance: f64,
    pub oracle_budget: usize,
    /// Execute runs concurrently; records are identical either way.
    pub parallel_runs: bool,
}

impl BenchConfig {
    /// Settings used for the published experiments: ρ = 2, γ = 10³ for
    /// experiment 1 and ρ = 1, γ = 10 for experiment 2.
    pub fn new(experiment: ExperimentId, variant: Variant) -> Self {
        let (rho, gamma) = match experiment {
            ExperimentId::Exp1 => (2.0, 1e3),
            ExperimentId::Exp2 => (1.0, 10.0),
        };
        Self {
            experiment,
            runs: DEFAULT_RUNS,
            base_seed: 0,
            admm: AdmmConfig { rho, gamma, variant, ..AdmmConfig::default() },
            horizon: EXP2_DEFAULT_K,
            noise_variance: EXP2_NOISE_VARIANCE,
            oracle_budget: 20,
            parallel_runs: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: usize,
    pub seed: u64,
    pub variant: Variant,
    pub error: f64,
    pub iterations: usize,
    pub r_primal: f64,
    pub r_dual: f64,
    pub runtime_ms: f64,
    pub status: SolveStatus,
    /// Solver objective minus oracle objective (experiment 1 only).
    #[serde(skip)]
    pub objective_gap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub experiment: ExperimentId,
    pub variant: Variant,
    pub runs: usize,
    pub seeds: Vec<u64>,
    pub converged: usize,
    pub failed: usize,
    pub mean_error: f64,
    pub min_error: f64,
    pub max_error: f64,
    pub mean_runtime_ms: f64,
    pub min_runtime_ms: f64,
    pub max_runtime_ms: f64,
    pub mean_iterations: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunStats {
    pub records: Vec<RunRecord>,
    pub aggregate: Aggregate,
}

impl RunStats {
    fn from_records(experiment: ExperimentId, variant: Variant, records: Vec<RunRecord>) -> Self {
        let ok: Vec<&RunRecord> = records.iter().filter(|r| r.status != SolveStatus::Error).collect();
        let stat = |vals: Vec<f64>| -> (f64, f64, f64) {
            if vals.is_empty() {
                return (f64::NAN, f64::NAN, f64::NAN);
            }
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (mean, min, max)
        };
        let (mean_error, min_error, max_error) = stat(ok.iter().map(|r| r.error).collect());
        let (mean_runtime_ms, min_runtime_ms, max_runtime_ms) = stat(ok.iter().map(|r| r.runtime_ms).collect());
        let (mean_iterations, _, _) = stat(ok.iter().map(|r| r.iterations as f64).collect());
        let aggregate = Aggregate {
            experiment,
            variant,
            runs: records.len(),
            seeds: records.iter().map(|r| r.seed).collect(),
            converged: records.iter().filter(|r| r.status == SolveStatus::Converged).count(),
            failed: records.len() - ok.len(),
            mean_error,
            min_error,
            max_error,
            mean_runtime_ms,
            min_runtime_ms,
            max_runtime_ms,
            mean_iterations,
        };
        Self { records, aggregate }
    }

    /// Columns `run_id, seed, variant, error, iterations, r_primal, r_dual,
    /// runtime_ms, status`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.records {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn aggregate_json(&self) -> String {
        serde_json::to_string_pretty(&self.aggregate).expect("aggregate serializes")
    }
}

fn error_record(run_id: usize, seed: u64, variant: Variant, runtime_ms: f64) -> RunRecord {
    RunRecord {
        run_id,
        seed,
        variant,
        error: f64::NAN,
        iterations: 0,
        r_primal: f64::NAN,
        r_dual: f64::NAN,
        runtime_ms,
        status: SolveStatus::Error,
        objective_gap: None,
    }
}

fn single_run(cfg: &BenchConfig, run_id: usize) -> RunRecord {
    let seed = cfg.base_seed + run_id as u64;
    let admm_cfg = AdmmConfig { seed, ..cfg.admm.clone() };
    let variant = admm_cfg.variant;
    let start = Instant::now();
    let (qop, reference, oracle_value) = match cfg.experiment {
        ExperimentId::Exp1 => {
            let inst = gen_experiment1(seed);
            let oracle = oracle_minimize(&inst.pop, cfg.oracle_budget, seed);
            (reduce_to_qop(&inst.pop), oracle.point, Some(oracle.value))
        }
        ExperimentId::Exp2 => {
            let inst = gen_experiment2_with_noise(seed, cfg.horizon, cfg.noise_variance);
            (inst.to_qop(), vec![inst.alpha, inst.beta], None)
        }
    };
    let solve_start = Instant::now();
    let report = match admm::run(&qop, &admm_cfg) {
        Ok(r) => r,
        Err(e) => {
            log::warn!("run {run_id} (seed {seed}) failed: {e}");
            return error_record(run_id, seed, variant, start.elapsed().as_secs_f64() * 1e3);
        }
    };
    let runtime_ms = solve_start.elapsed().as_secs_f64() * 1e3;
    let estimate = &report.x_original[..reference.len()];
    let error = estimate.iter().zip(&reference).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    RunRecord {
        run_id,
        seed,
        variant,
        error,
        iterations: report.iterations,
        r_primal: report.r_primal,
        r_dual: report.r_dual,
        runtime_ms,
        status: report.status,
        objective_gap: oracle_value.map(|o| report.objective - o),
    }
}

/// Runs every seed; a failing run becomes an `error` row, never an abort.
/// The error is the ℓ₂ distance from the oracle optimum (experiment 1) or
/// from the true `(α, β)` (experiment 2), in original variables.
pub fn run_benchmark(cfg: &BenchConfig) -> RunStats {
    log::info!(
        "benchmark {:?} {} runs, seeds {}..{}",
        cfg.experiment,
        cfg.runs,
        cfg.base_seed,
        cfg.base_seed + cfg.runs as u64
    );
    let records: Vec<RunRecord> = if cfg.parallel_runs {
        (0..cfg.runs).into_par_iter().map(|r| single_run(cfg, r)).collect()
    } else {
        (0..cfg.runs).map(|r| single_run(cfg, r)).collect()
    };
    RunStats::from_records(cfg.experiment, cfg.admm.variant, records)
}
