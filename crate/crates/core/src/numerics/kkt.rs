//! Symmetric indefinite LDLᵀ (Bunch–Kaufman pivoting) and the equality
//! constrained KKT solve built on top of it.

use nalgebra::{DMatrix, DVector};

use super::NumericsError;

/// Bunch–Kaufman pivot threshold `(1 + sqrt(17)) / 8`.
const BK_ALPHA: f64 = 0.640_388_203_202_208_4;

#[derive(Clone, Copy, Debug)]
enum Block {
    One(f64),
    /// `[[d11, d21], [d21, d22]]`
    Two(f64, f64, f64),
}

/// `P K Pᵀ = L D Lᵀ` with unit lower-triangular `L` and 1x1/2x2 blocks in `D`.
#[derive(Clone, Debug)]
pub struct Ldlt {
    n: usize,
    l: DMatrix<f64>,
    blocks: Vec<(usize, Block)>,
    swaps: Vec<(usize, usize)>,
}

impl Ldlt {
    /// Factors a symmetric matrix. Only the lower triangle is read.
    pub fn factor(k: &DMatrix<f64>) -> Result<Self, NumericsError> {
        let n = k.nrows();
        if k.ncols() != n {
            return Err(NumericsError::DimensionMismatch(format!(
                "LDLT needs a square matrix, got {}x{}",
                n,
                k.ncols()
            )));
        }
        let mut w = DMatrix::zeros(n, n);
        for j in 0..n {
            for i in j..n {
                w[(i, j)] = k[(i, j)];
                w[(j, i)] = k[(i, j)];
            }
        }
        let scale = w.amax().max(f64::MIN_POSITIVE);
        let tiny = 1e-14 * scale;
        let mut l = DMatrix::identity(n, n);
        let mut blocks = Vec::with_capacity(n);
        let mut swaps = Vec::new();

        let mut k0 = 0;
        while k0 < n {
            let absakk = w[(k0, k0)].abs();
            let (imax, colmax) = (k0 + 1..n)
                .map(|i| (i, w[(i, k0)].abs()))
                .fold((k0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if absakk.max(colmax) <= tiny {
                return Err(NumericsError::Singular { index: k0, pivot: absakk.max(colmax) });
            }
            let (kp, kstep) = if absakk >= BK_ALPHA * colmax {
                (k0, 1)
            } else {
                let rowmax = (k0..n)
                    .filter(|&j| j != imax)
                    .map(|j| w[(imax, j)].abs())
                    .fold(0.0, f64::max);
                if absakk * rowmax >= BK_ALPHA * colmax * colmax {
                    (k0, 1)
                } else if w[(imax, imax)].abs() >= BK_ALPHA * rowmax {
                    (imax, 1)
                } else {
                    (imax, 2)
                }
            };
            let kk = k0 + kstep - 1;
            if kp != kk {
                w.swap_rows(kk, kp);
                w.swap_columns(kk, kp);
                for j in 0..k0 {
                    l.swap((kk, j), (kp, j));
                }
                swaps.push((kk, kp));
            }
            if kstep == 1 {
                let d = w[(k0, k0)];
                if d.abs() <= tiny {
                    return Err(NumericsError::Singular { index: k0, pivot: d.abs() });
                }
                for i in k0 + 1..n {
                    l[(i, k0)] = w[(i, k0)] / d;
                }
                for j in k0 + 1..n {
                    let f = w[(j, k0)] / d;
                    if f != 0.0 {
                        for i in j..n {
                            w[(i, j)] -= w[(i, k0)] * f;
                        }
                    }
                }
                blocks.push((k0, Block::One(d)));
            } else {
                let (d11, d21, d22) = (w[(k0, k0)], w[(k0 + 1, k0)], w[(k0 + 1, k0 + 1)]);
                let det = d11 * d22 - d21 * d21;
                if det.abs() <= tiny * tiny {
                    return Err(NumericsError::Singular { index: k0, pivot: det.abs().sqrt() });
                }
                for i in k0 + 2..n {
                    let (a, b) = (w[(i, k0)], w[(i, k0 + 1)]);
                    l[(i, k0)] = (a * d22 - b * d21) / det;
                    l[(i, k0 + 1)] = (b * d11 - a * d21) / det;
                }
                for j in k0 + 2..n {
                    let (lj0, lj1) = (l[(j, k0)], l[(j, k0 + 1)]);
                    for i in j..n {
                        w[(i, j)] -= w[(i, k0)] * lj0 + w[(i, k0 + 1)] * lj1;
                    }
                }
                blocks.push((k0, Block::Two(d11, d21, d22)));
            }
            // keep the trailing block symmetric for the next pivot search
            for j in k0 + kstep..n {
                for i in j + 1..n {
                    w[(j, i)] = w[(i, j)];
                }
            }
            k0 += kstep;
        }
        Ok(Self { n, l, blocks, swaps })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        assert_eq!(rhs.len(), self.n, "rhs length must match the factored matrix");
        let mut y = rhs.clone();
        for &(a, b) in &self.swaps {
            y.swap_rows(a, b);
        }
        for j in 0..self.n {
            let yj = y[j];
            if yj != 0.0 {
                for i in j + 1..self.n {
                    y[i] -= self.l[(i, j)] * yj;
                }
            }
        }
        for &(k, block) in &self.blocks {
            match block {
                Block::One(d) => y[k] /= d,
                Block::Two(d11, d21, d22) => {
                    let det = d11 * d22 - d21 * d21;
                    let (a, b) = (y[k], y[k + 1]);
                    y[k] = (a * d22 - b * d21) / det;
                    y[k + 1] = (b * d11 - a * d21) / det;
                }
            }
        }
        for j in (0..self.n).rev() {
            let mut s = y[j];
            for i in j + 1..self.n {
                s -= self.l[(i, j)] * y[i];
            }
            y[j] = s;
        }
        for &(a, b) in self.swaps.iter().rev() {
            y.swap_rows(a, b);
        }
        y
    }
}

/// Row rank of `c` by Gaussian elimination with complete pivoting; pivots
/// below `rel_tol * ‖c‖_F` count as zero.
pub fn row_rank(c: &DMatrix<f64>, rel_tol: f64) -> usize {
    let mut w = c.clone();
    let (m, n) = w.shape();
    let tol = rel_tol * c.norm();
    let mut rank = 0;
    for r in 0..m.min(n) {
        let mut best = (r, r, 0.0);
        for i in r..m {
            for j in r..n {
                let v = w[(i, j)].abs();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if best.2 <= tol || best.2 == 0.0 {
            break;
        }
        w.swap_rows(r, best.0);
        w.swap_columns(r, best.1);
        let p = w[(r, r)];
        for i in r + 1..m {
            let f = w[(i, r)] / p;
            if f != 0.0 {
                for j in r..n {
                    w[(i, j)] -= f * w[(r, j)];
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Solution of `[H Cᵀ; C 0] [x; mu] = [top; bot]`.
#[derive(Clone, Debug)]
pub struct KktSolution {
    pub x: DVector<f64>,
    pub mu: DVector<f64>,
    /// ∞-norm of the assembled-system residual, recomputed after the solve.
    pub residual: f64,
}

/// A factored KKT matrix, reusable for any number of right-hand sides.
#[derive(Clone, Debug)]
pub struct KktSystem {
    n: usize,
    m: usize,
    matrix: DMatrix<f64>,
    factor: Ldlt,
}

impl KktSystem {
    pub fn new(h: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<Self, NumericsError> {
        let n = h.nrows();
        let m = c.nrows();
        if h.ncols() != n || (m > 0 && c.ncols() != n) {
            return Err(NumericsError::DimensionMismatch(format!(
                "H is {}x{}, C is {}x{}",
                h.nrows(),
                h.ncols(),
                c.nrows(),
                c.ncols()
            )));
        }
        if m > 0 {
            let rank = row_rank(c, 1e-12);
            if rank < m {
                return Err(NumericsError::RankDeficient { rank, rows: m });
            }
        }
        let mut k = DMatrix::zeros(n + m, n + m);
        k.view_mut((0, 0), (n, n)).copy_from(h);
        if m > 0 {
            k.view_mut((n, 0), (m, n)).copy_from(c);
            k.view_mut((0, n), (n, m)).copy_from(&c.transpose());
        }
        let factor = Ldlt::factor(&k)?;
        Ok(Self { n, m, matrix: k, factor })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn solve(&self, top: &DVector<f64>, bot: &DVector<f64>) -> KktSolution {
        assert_eq!(top.len(), self.n, "rhs_top length");
        assert_eq!(bot.len(), self.m, "rhs_bot length");
        let mut rhs = DVector::zeros(self.n + self.m);
        rhs.rows_mut(0, self.n).copy_from(top);
        rhs.rows_mut(self.n, self.m).copy_from(bot);
        let mut sol = self.factor.solve(&rhs);
        // iterative refinement while it keeps reducing the residual
        let mut r = &rhs - &self.matrix * &sol;
        let mut residual = r.amax();
        for _ in 0..4 {
            if residual == 0.0 {
                break;
            }
            let next = &sol + self.factor.solve(&r);
            let r_next = &rhs - &self.matrix * &next;
            let res_next = r_next.amax();
            if res_next >= residual {
                break;
            }
            sol = next;
            r = r_next;
            residual = res_next;
        }
        KktSolution {
            x: sol.rows(0, self.n).into_owned(),
            mu: sol.rows(self.n, self.m).into_owned(),
            residual,
        }
    }
}

/// One-shot KKT solve; see [`KktSystem`] for the reusable factorization.
pub fn solve_kkt(
    h: &DMatrix<f64>,
    c: &DMatrix<f64>,
    rhs_top: &DVector<f64>,
    rhs_bot: &DVector<f64>,
) -> Result<KktSolution, NumericsError> {
    Ok(KktSystem::new(h, c)?.solve(rhs_top, rhs_bot))
}
