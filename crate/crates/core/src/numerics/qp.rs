//! Dense primal active-set solver for strictly convex QPs
//!
//! ```text
//! min ½xᵀHx + fᵀx   s.t.  Bx ≤ b,  Cx = c
//! ```
//!
//! A feasible starting point is obtained in elastic mode: every inequality
//! row gets a slack `s ≥ 0` priced at `M·1ᵀs` (plus a small quadratic term so
//! the problem stays strictly convex). For `M` above the largest multiplier the
//! elastic optimum has `s = 0` and coincides with the QP optimum; `M` is raised
//! until that happens, and the constraint set is declared infeasible when the
//! slacks stay positive for every admissible `M`.

use nalgebra::{DMatrix, DVector};

use super::kkt::{KktSystem, Ldlt};
use super::NumericsError;

#[derive(Clone, Debug)]
pub struct QpOptions {
    pub max_iter: usize,
    /// Relative tolerance for primal feasibility and for zero steps.
    pub tol: f64,
}

impl Default for QpOptions {
    fn default() -> Self {
        Self { max_iter: 0, tol: 1e-12 }
    }
}

#[derive(Clone, Debug)]
pub struct QpSolution {
    pub x: DVector<f64>,
    /// Multipliers of `Bx ≤ b` (non-negative at optimality).
    pub lambda: DVector<f64>,
    /// Multipliers of `Cx = c`.
    pub mu: DVector<f64>,
    pub iterations: usize,
}

/// KKT quality of a candidate QP solution, all in ∞-norm.
#[derive(Clone, Copy, Debug)]
pub struct KktReport {
    pub stationarity: f64,
    pub primal_infeasibility: f64,
    pub min_multiplier: f64,
    pub complementarity: f64,
}

pub fn kkt_report(
    h: &DMatrix<f64>,
    f: &DVector<f64>,
    b_ineq: &DMatrix<f64>,
    b: &DVector<f64>,
    c_eq: &DMatrix<f64>,
    c: &DVector<f64>,
    sol: &QpSolution,
) -> KktReport {
    let mut grad = h * &sol.x + f;
    if b_ineq.nrows() > 0 {
        grad += b_ineq.transpose() * &sol.lambda;
    }
    if c_eq.nrows() > 0 {
        grad += c_eq.transpose() * &sol.mu;
    }
    let slack = if b_ineq.nrows() > 0 { b_ineq * &sol.x - b } else { DVector::zeros(0) };
    let eq = if c_eq.nrows() > 0 { c_eq * &sol.x - c } else { DVector::zeros(0) };
    KktReport {
        stationarity: grad.amax(),
        primal_infeasibility: slack.iter().fold(0.0f64, |a, &v| a.max(v)).max(eq.amax()),
        min_multiplier: sol.lambda.iter().copied().fold(0.0, f64::min),
        complementarity: slack
            .iter()
            .zip(sol.lambda.iter())
            .fold(0.0f64, |a, (&s, &l)| a.max((s * l).abs())),
    }
}

/// Solves the QP. `H` must be symmetric positive definite.
pub fn solve_qp(
    h: &DMatrix<f64>,
    f: &DVector<f64>,
    b_ineq: &DMatrix<f64>,
    b: &DVector<f64>,
    c_eq: &DMatrix<f64>,
    c: &DVector<f64>,
    opts: &QpOptions,
) -> Result<QpSolution, NumericsError> {
    let n = h.nrows();
    let l = b_ineq.nrows();
    let m = c_eq.nrows();
    if h.ncols() != n
        || f.len() != n
        || b.len() != l
        || c.len() != m
        || (l > 0 && b_ineq.ncols() != n)
        || (m > 0 && c_eq.ncols() != n)
    {
        return Err(NumericsError::DimensionMismatch("inconsistent QP data".into()));
    }

    let start = KktSystem::new(h, c_eq)?.solve(&-f, c);
    if l == 0 {
        return Ok(QpSolution {
            x: start.x,
            lambda: DVector::zeros(0),
            mu: start.mu,
            iterations: 0,
        });
    }
    let feas_tol = 1e-9 * (1.0 + b.amax());
    let viol = b_ineq * &start.x - b;
    if viol.max() <= 0.0 {
        return Ok(QpSolution {
            x: start.x,
            lambda: DVector::zeros(l),
            mu: start.mu,
            iterations: 0,
        });
    }

    let mut elastic = Elastic::new(h, f, b_ineq, b, c_eq);
    let mut y = DVector::zeros(n + l);
    y.rows_mut(0, n).copy_from(&start.x);
    for i in 0..l {
        y[n + i] = viol[i].max(0.0);
    }
    let max_iter = if opts.max_iter > 0 { opts.max_iter } else { 50 * (n + 3 * l + m) + 100 };

    let base_penalty = 1e2 * (1.0 + h.amax() * (1.0 + start.x.amax()) + f.amax());
    let mut penalty = base_penalty;
    let mut working: Vec<usize> = Vec::new();
    let mut iterations = 0;
    loop {
        elastic.set_penalty(penalty);
        let (mults, its) = elastic.active_set(&mut y, &mut working, max_iter - iterations.min(max_iter), opts.tol)?;
        iterations += its;
        let worst_slack = y.rows(n, l).max();
        if worst_slack <= feas_tol {
            let x = y.rows(0, n).into_owned();
            return Ok(polish(h, f, b_ineq, b, c_eq, c, &working, x, &mults, l, iterations, feas_tol));
        }
        if penalty > 1e12 * base_penalty {
            let x = y.rows(0, n).into_owned();
            let violation = (b_ineq * x - b).max().max(0.0);
            return Err(NumericsError::Infeasible { violation });
        }
        penalty *= 100.0;
    }
}

/// Re-solves the equality problem on the identified active rows for clean
/// multipliers; falls back to the elastic multipliers if that fails.
#[allow(clippy::too_many_arguments)]
fn polish(
    h: &DMatrix<f64>,
    f: &DVector<f64>,
    b_ineq: &DMatrix<f64>,
    b: &DVector<f64>,
    c_eq: &DMatrix<f64>,
    c: &DVector<f64>,
    working: &[usize],
    x_elastic: DVector<f64>,
    mults: &Multipliers,
    l: usize,
    iterations: usize,
    feas_tol: f64,
) -> QpSolution {
    let n = h.nrows();
    let m = c_eq.nrows();
    let active: Vec<usize> = working.iter().copied().filter(|&i| i < l).collect();
    let rows = m + active.len();
    let mut a = DMatrix::zeros(rows, n);
    let mut rhs = DVector::zeros(rows);
    for r in 0..m {
        a.row_mut(r).copy_from(&c_eq.row(r));
        rhs[r] = c[r];
    }
    for (k, &i) in active.iter().enumerate() {
        a.row_mut(m + k).copy_from(&b_ineq.row(i));
        rhs[m + k] = b[i];
    }
    if let Ok(sys) = KktSystem::new(h, &a) {
        let sol = sys.solve(&-f, &rhs);
        let feasible = (b_ineq * &sol.x - b).max() <= feas_tol;
        let dual_ok = sol.mu.rows(m, active.len()).iter().all(|&v| v >= -1e-10);
        if feasible && dual_ok {
            let mut lambda = DVector::zeros(l);
            for (k, &i) in active.iter().enumerate() {
                lambda[i] = sol.mu[m + k].max(0.0);
            }
            return QpSolution {
                x: sol.x,
                lambda,
                mu: sol.mu.rows(0, m).into_owned(),
                iterations,
            };
        }
    }
    QpSolution {
        x: x_elastic,
        lambda: DVector::from_iterator(l, (0..l).map(|i| mults.ineq[i].max(0.0))),
        mu: mults.eq.clone(),
        iterations,
    }
}

struct Multipliers {
    eq: DVector<f64>,
    ineq: Vec<f64>,
}

/// Elastic problem in `y = (x, s)`:
/// rows `0..l` are `B_i x - s_i ≤ b_i`, rows `l..2l` are `-s_i ≤ 0`.
/// `x` starts on `Cx = c` and every step stays in the null space of `C`.
struct Elastic<'a> {
    n: usize,
    l: usize,
    h: &'a DMatrix<f64>,
    f: &'a DVector<f64>,
    b_ineq: &'a DMatrix<f64>,
    b: &'a DVector<f64>,
    c_eq: &'a DMatrix<f64>,
    penalty: f64,
}

impl<'a> Elastic<'a> {
    fn new(
        h: &'a DMatrix<f64>,
        f: &'a DVector<f64>,
        b_ineq: &'a DMatrix<f64>,
        b: &'a DVector<f64>,
        c_eq: &'a DMatrix<f64>,
    ) -> Self {
        Self {
            n: h.nrows(),
            l: b_ineq.nrows(),
            h,
            f,
            b_ineq,
            b,
            c_eq,
            penalty: 1.0,
        }
    }

    fn set_penalty(&mut self, penalty: f64) {
        self.penalty = penalty;
    }

    fn dim(&self) -> usize {
        self.n + self.l
    }

    fn gradient(&self, y: &DVector<f64>) -> DVector<f64> {
        let (n, l) = (self.n, self.l);
        let mut g = DVector::zeros(n + l);
        let x = y.rows(0, n);
        g.rows_mut(0, n).copy_from(&(self.h * x + self.f));
        for i in 0..l {
            g[n + i] = y[n + i] + self.penalty;
        }
        g
    }

    /// Row `i` of the inequality system as (dense gradient, rhs).
    fn ineq_row(&self, i: usize) -> (DVector<f64>, f64) {
        let (n, l) = (self.n, self.l);
        let mut row = DVector::zeros(n + l);
        if i < l {
            row.rows_mut(0, n).copy_from(&self.b_ineq.row(i).transpose());
            row[n + i] = -1.0;
            (row, self.b[i])
        } else {
            row[n + i - l] = -1.0;
            (row, 0.0)
        }
    }

    fn ineq_value(&self, i: usize, y: &DVector<f64>) -> f64 {
        let (n, l) = (self.n, self.l);
        if i < l {
            let mut v = -y[n + i];
            for j in 0..n {
                v += self.b_ineq[(i, j)] * y[j];
            }
            v
        } else {
            -y[n + i - l]
        }
    }

    fn ineq_dot(&self, i: usize, p: &DVector<f64>) -> f64 {
        self.ineq_value(i, p)
    }

    /// Equality-constrained step `min ½pᵀQp + gᵀp` with the equality rows and
    /// the working set held at zero. Returns the step and the multipliers
    /// (equalities first, then the working set in order).
    fn eqp(&self, y: &DVector<f64>, working: &[usize]) -> Result<(DVector<f64>, DVector<f64>), NumericsError> {
        let (n, l) = (self.n, self.l);
        let dim = self.dim();
        let m = self.c_eq.nrows();
        let rows = m + working.len();
        let size = dim + rows;
        let mut k = DMatrix::zeros(size, size);
        k.view_mut((0, 0), (n, n)).copy_from(self.h);
        for i in 0..l {
            k[(n + i, n + i)] = 1.0;
        }
        for r in 0..m {
            for j in 0..n {
                k[(dim + r, j)] = self.c_eq[(r, j)];
                k[(j, dim + r)] = self.c_eq[(r, j)];
            }
        }
        for (w, &i) in working.iter().enumerate() {
            let (row, _) = self.ineq_row(i);
            for j in 0..dim {
                k[(dim + m + w, j)] = row[j];
                k[(j, dim + m + w)] = row[j];
            }
        }
        let mut rhs = DVector::zeros(size);
        rhs.rows_mut(0, dim).copy_from(&-self.gradient(y));
        let sol = Ldlt::factor(&k)?.solve(&rhs);
        Ok((sol.rows(0, dim).into_owned(), sol.rows(dim, rows).into_owned()))
    }

    fn active_set(
        &self,
        y: &mut DVector<f64>,
        working: &mut Vec<usize>,
        max_iter: usize,
        tol: f64,
    ) -> Result<(Multipliers, usize), NumericsError> {
        let m = self.c_eq.nrows();
        let nineq = 2 * self.l;
        // set after an unblocked full step: y is then the minimizer on the
        // current working set and any remaining step is roundoff
        let mut at_minimizer = false;
        for it in 0..max_iter {
            let (p, mults) = self.eqp(y, working)?;
            let step_tol = tol * (1.0 + y.amax());
            if at_minimizer || p.amax() <= step_tol {
                at_minimizer = false;
                // lowest-index constraint with a negative multiplier leaves
                let mut leave: Option<(usize, usize)> = None;
                let mult_tol = 1e-10 * (1.0 + self.penalty);
                for (w, &i) in working.iter().enumerate() {
                    if mults[m + w] < -mult_tol && leave.is_none_or(|(_, j)| i < j) {
                        leave = Some((w, i));
                    }
                }
                match leave {
                    Some((w, _)) => {
                        working.remove(w);
                    }
                    None => {
                        let mut ineq = vec![0.0; self.l];
                        for (w, &i) in working.iter().enumerate() {
                            if i < self.l {
                                ineq[i] = mults[m + w];
                            }
                        }
                        let eq = mults.rows(0, m).into_owned();
                        return Ok((Multipliers { eq, ineq }, it + 1));
                    }
                }
                continue;
            }
            let mut alpha = 1.0;
            let mut blocking = None;
            for i in 0..nineq {
                if working.contains(&i) {
                    continue;
                }
                let gp = self.ineq_dot(i, &p);
                if gp > 1e-14 * (1.0 + p.amax()) {
                    let rhs = if i < self.l { self.b[i] } else { 0.0 };
                    let t = ((rhs - self.ineq_value(i, y)) / gp).max(0.0);
                    if t < alpha {
                        alpha = t;
                        blocking = Some(i);
                    }
                }
            }
            y.axpy(alpha, &p, 1.0);
            match blocking {
                Some(i) => {
                    working.push(i);
                    working.sort_unstable();
                }
                None => at_minimizer = true,
            }
        }
        Err(NumericsError::NonConvergence { iterations: max_iter })
    }
}
