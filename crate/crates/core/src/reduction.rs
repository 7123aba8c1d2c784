//! Rewriting a polynomial problem as a QOP
//!
//! ```text
//! min ½xᵀAx + aᵀx + offset   s.t.  Bx ≤ b,  Cx = c,  x_i·x_j = x_k for (i, j, k) in the triple set
//! ```
//!
//! with `A ⪰ 0`, pairwise index-disjoint triples and mutually distinct
//! indices inside every triple.
//!
//! The reduction works monomial by monomial:
//!
//! * a monomial of degree ≥ 3 is collapsed by repeatedly replacing its two
//!   lowest-indexed factors with a product slack (a monomial that is a perfect
//!   square is first reduced to `s²` with `s` standing for its square root);
//!   the newest slack is kept in front of the remaining factors;
//! * in the constraints every remaining degree-2 monomial becomes a product
//!   slack, so all constraint rows are linear;
//! * in the cost, bilinear terms and squares with a negative coefficient become
//!   product slacks, while positive squares stay in `A`;
//! * identical factor pairs reuse the same slack.
//!
//! Constraints are linearized before the objective. Square triples
//! `(i, i, k)` get an alias `x_j = x_i`, then overlapping indices across
//! triples are replaced by aliases in triple order; every alias adds a row
//! `x_alias - x_orig = 0` to `C`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{Monomial, Polynomial, PopProblem};

/// A bilinear coupling `x_i·x_j = x_k` (0-based indices).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl Triple {
    pub fn new(i: usize, j: usize, k: usize) -> Self {
        Self { i, j, k }
    }

    pub fn indices(&self) -> [usize; 3] {
        [self.i, self.j, self.k]
    }

    pub fn one_based(&self) -> (usize, usize, usize) {
        (self.i + 1, self.j + 1, self.k + 1)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j, k) = self.one_based();
        write!(f, "({i},{j},{k})")
    }
}

/// How an augmented variable is defined in terms of earlier ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Lineage {
    Original,
    Alias { of: usize },
    Product { of: [usize; 2] },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QopError {
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid QOP file: {0}")]
    Format(String),
}

/// Structural problems reported by [`QopProblem::validate`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Dimension(String),
    NonFinite(&'static str),
    NotSymmetric { max_asymmetry: f64 },
    NotPsd { min_eigenvalue: f64, tolerance: f64 },
    IndexOutOfRange { triple: Triple, index: usize },
    RepeatedIndexInTriple { triple: Triple },
    OverlappingTriples { index: usize, first: Triple, second: Triple },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Dimension(s) => write!(f, "dimension: {s}"),
            Self::NonFinite(what) => write!(f, "non-finite entry in {what}"),
            Self::NotSymmetric { max_asymmetry } => write!(f, "A is not symmetric (max |A - Aᵀ| = {max_asymmetry:e})"),
            Self::NotPsd { min_eigenvalue, tolerance } => {
                write!(f, "A is not PSD (min eigenvalue {min_eigenvalue:e} < -{tolerance:e})")
            }
            Self::IndexOutOfRange { triple, index } => write!(f, "triple {triple} references x{}", index + 1),
            Self::RepeatedIndexInTriple { triple } => write!(f, "triple {triple} repeats an index"),
            Self::OverlappingTriples { index, first, second } => {
                write!(f, "x{} appears in triples {first} and {second}", index + 1)
            }
        }
    }
}

/// Quadratic problem with linear and bilinear constraints.
#[derive(Clone, Debug, PartialEq)]
pub struct QopProblem {
    /// Number of original POP variables; they occupy the first coordinates.
    pub n_original: usize,
    /// `A`, symmetric PSD.
    pub quad: DMatrix<f64>,
    /// `a`.
    pub lin: DVector<f64>,
    /// Constant part of the cost.
    pub offset: f64,
    /// `B` (one row per inequality `Bx ≤ b`).
    pub ineq_mat: DMatrix<f64>,
    pub ineq_rhs: DVector<f64>,
    /// `C` (one row per equality `Cx = c`).
    pub eq_mat: DMatrix<f64>,
    pub eq_rhs: DVector<f64>,
    pub triples: Vec<Triple>,
    pub lineage: Vec<Lineage>,
    /// Objective of the source problem, over the first `n_original` variables.
    pub source_objective: Option<Polynomial>,
}

impl QopProblem {
    /// Augmented dimension ñ.
    pub fn dim(&self) -> usize {
        self.lin.len()
    }

    pub fn num_ineq(&self) -> usize {
        self.ineq_mat.nrows()
    }

    pub fn num_eq(&self) -> usize {
        self.eq_mat.nrows()
    }

    /// `½xᵀAx + aᵀx + offset`.
    pub fn cost(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.quad * x)) + self.lin.dot(x) + self.offset
    }

    /// The cost as a polynomial in ñ variables.
    pub fn cost_polynomial(&self) -> Polynomial {
        let n = self.dim();
        let mut p = Polynomial::constant(n, self.offset);
        for i in 0..n {
            p.add_term(Monomial::var(i), self.lin[i]);
            p.add_term(Monomial::from_factors(&[i, i]), 0.5 * self.quad[(i, i)]);
            for j in i + 1..n {
                p.add_term(Monomial::from_factors(&[i, j]), self.quad[(i, j)]);
            }
        }
        p
    }

    /// `max |x_i·x_j - x_k|` over the triples (membership in P).
    pub fn bilinear_violation(&self, x: &DVector<f64>) -> f64 {
        self.triples
            .iter()
            .map(|t| (x[t.i] * x[t.j] - x[t.k]).abs())
            .fold(0.0, f64::max)
    }

    /// `(max (Bx - b)_+, ‖Cx - c‖_∞)` (membership in D).
    pub fn linear_violation(&self, x: &DVector<f64>) -> (f64, f64) {
        let ineq = if self.num_ineq() > 0 {
            (&self.ineq_mat * x - &self.ineq_rhs).max().max(0.0)
        } else {
            0.0
        };
        let eq = if self.num_eq() > 0 {
            (&self.eq_mat * x - &self.eq_rhs).amax()
        } else {
            0.0
        };
        (ineq, eq)
    }

    /// Augmented point consistent with the lineage: products are computed and
    /// aliases copied, so the result lies exactly in P.
    pub fn lift_point(&self, x: &[f64]) -> Result<DVector<f64>, QopError> {
        if x.len() != self.n_original {
            return Err(QopError::DimensionMismatch {
                expected: self.n_original,
                got: x.len(),
            });
        }
        let mut out = DVector::zeros(self.dim());
        for (idx, lin) in self.lineage.iter().enumerate() {
            out[idx] = match *lin {
                Lineage::Original => x[idx],
                Lineage::Alias { of } => out[of],
                Lineage::Product { of: [a, b] } => out[a] * out[b],
            };
        }
        Ok(out)
    }

    /// The original coordinates of an augmented point.
    pub fn project_solution(&self, x_aug: &DVector<f64>) -> Result<Vec<f64>, QopError> {
        if x_aug.len() != self.dim() {
            return Err(QopError::DimensionMismatch {
                expected: self.dim(),
                got: x_aug.len(),
            });
        }
        Ok(x_aug.iter().take(self.n_original).copied().collect())
    }

    /// Every structural assumption the ADMM iteration relies on. Empty means
    /// the problem is usable.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.dim();
        let dims = [
            ("A", self.quad.nrows() == n && self.quad.ncols() == n),
            ("B", self.ineq_mat.ncols() == n || self.ineq_mat.nrows() == 0),
            ("b", self.ineq_rhs.len() == self.ineq_mat.nrows()),
            ("C", self.eq_mat.ncols() == n || self.eq_mat.nrows() == 0),
            ("c", self.eq_rhs.len() == self.eq_mat.nrows()),
            ("lineage", self.lineage.len() == n),
            ("n_original", self.n_original <= n),
        ];
        for (what, ok) in dims {
            if !ok {
                out.push(Violation::Dimension(format!("{what} does not match ñ = {n}")));
            }
        }
        if !out.is_empty() {
            return out;
        }
        let finite = [
            ("A", self.quad.iter().all(|v| v.is_finite())),
            ("a", self.lin.iter().all(|v| v.is_finite())),
            ("B", self.ineq_mat.iter().all(|v| v.is_finite())),
            ("b", self.ineq_rhs.iter().all(|v| v.is_finite())),
            ("C", self.eq_mat.iter().all(|v| v.is_finite())),
            ("c", self.eq_rhs.iter().all(|v| v.is_finite())),
        ];
        for (what, ok) in finite {
            if !ok {
                out.push(Violation::NonFinite(what));
            }
        }
        if !out.is_empty() {
            return out;
        }

        let asym = (&self.quad - self.quad.transpose()).amax();
        if asym > 1e-12 * (1.0 + self.quad.amax()) {
            out.push(Violation::NotSymmetric { max_asymmetry: asym });
        } else if n > 0 {
            let sym = (&self.quad + self.quad.transpose()) * 0.5;
            let eig = sym.symmetric_eigenvalues();
            let min = eig.min();
            let norm = eig.amax();
            let tolerance = 1e-9 * norm;
            if min < -tolerance {
                out.push(Violation::NotPsd { min_eigenvalue: min, tolerance });
            }
        }

        let mut owner: BTreeMap<usize, Triple> = BTreeMap::new();
        for &t in &self.triples {
            let idx = t.indices();
            let mut in_range = true;
            for &v in &idx {
                if v >= n {
                    out.push(Violation::IndexOutOfRange { triple: t, index: v });
                    in_range = false;
                }
            }
            if !in_range {
                continue;
            }
            if t.i == t.j || t.i == t.k || t.j == t.k {
                out.push(Violation::RepeatedIndexInTriple { triple: t });
            }
            let distinct: BTreeSet<usize> = idx.into_iter().collect();
            for v in distinct {
                if let Some(&first) = owner.get(&v) {
                    out.push(Violation::OverlappingTriples { index: v, first, second: t });
                } else {
                    owner.insert(v, t);
                }
            }
        }
        out
    }

    /// Human-readable lineage table, 1-based like the text input.
    pub fn explain(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("augmented variables: {} (original {})\n", self.dim(), self.n_original));
        for (idx, lin) in self.lineage.iter().enumerate() {
            let def = match *lin {
                Lineage::Original => "original".to_string(),
                Lineage::Alias { of } => format!("= x{}", of + 1),
                Lineage::Product { of: [a, b] } => format!("= x{}*x{}", a + 1, b + 1),
            };
            s.push_str(&format!("  x{:<4} {def}\n", idx + 1));
        }
        let list: Vec<String> = self.triples.iter().map(ToString::to_string).collect();
        s.push_str(&format!("triples: {{{}}}\n", list.join(", ")));
        s.push_str(&format!("inequality rows: {}, equality rows: {}\n", self.num_ineq(), self.num_eq()));
        s
    }

    pub fn to_json_value(&self) -> QopJson {
        let rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect()
        };
        QopJson {
            n_original: self.n_original,
            quad: rows(&self.quad),
            lin: self.lin.iter().copied().collect(),
            offset: self.offset,
            ineq_mat: rows(&self.ineq_mat),
            ineq_rhs: self.ineq_rhs.iter().copied().collect(),
            eq_mat: rows(&self.eq_mat),
            eq_rhs: self.eq_rhs.iter().copied().collect(),
            triples: self.triples.iter().map(Triple::indices).collect(),
            lineage: self.lineage.clone(),
            objective: self.source_objective.as_ref().map(ToString::to_string),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("QOP serializes")
    }

    pub fn from_json_value(doc: QopJson) -> Result<Self, QopError> {
        let n = doc.lin.len();
        let matrix = |name: &str, rows: &[Vec<f64>]| -> Result<DMatrix<f64>, QopError> {
            for (r, row) in rows.iter().enumerate() {
                if row.len() != n {
                    return Err(QopError::Format(format!("{name} row {r} has {} entries, expected {n}", row.len())));
                }
            }
            Ok(DMatrix::from_fn(rows.len(), n, |r, c| rows[r][c]))
        };
        let quad = matrix("A", &doc.quad)?;
        if quad.nrows() != n {
            return Err(QopError::Format(format!("A has {} rows, expected {n}", quad.nrows())));
        }
        let ineq_mat = matrix("B", &doc.ineq_mat)?;
        let eq_mat = matrix("C", &doc.eq_mat)?;
        if doc.ineq_rhs.len() != ineq_mat.nrows() || doc.eq_rhs.len() != eq_mat.nrows() {
            return Err(QopError::Format("right-hand side length does not match its matrix".into()));
        }
        let lineage = if doc.lineage.is_empty() {
            vec![Lineage::Original; n]
        } else {
            doc.lineage
        };
        if lineage.len() != n {
            return Err(QopError::Format(format!("lineage has {} entries, expected {n}", lineage.len())));
        }
        for (idx, lin) in lineage.iter().enumerate() {
            let ok = match *lin {
                Lineage::Original => true,
                Lineage::Alias { of } => of < idx,
                Lineage::Product { of: [a, b] } => a < idx && b < idx,
            };
            if !ok {
                return Err(QopError::Format(format!("lineage of x{} refers forward", idx + 1)));
            }
        }
        if doc.n_original > n {
            return Err(QopError::Format("n_original exceeds the augmented dimension".into()));
        }
        let source_objective = match doc.objective {
            Some(text) => Some(
                Polynomial::parse(&text, doc.n_original).map_err(|e| QopError::Format(format!("objective: {e}")))?,
            ),
            None => None,
        };
        Ok(Self {
            n_original: doc.n_original,
            quad,
            lin: DVector::from_vec(doc.lin),
            offset: doc.offset,
            ineq_mat,
            ineq_rhs: DVector::from_vec(doc.ineq_rhs),
            eq_mat,
            eq_rhs: DVector::from_vec(doc.eq_rhs),
            triples: doc.triples.into_iter().map(|[i, j, k]| Triple::new(i, j, k)).collect(),
            lineage,
            source_objective,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, QopError> {
        let doc: QopJson = serde_json::from_str(text).map_err(|e| QopError::Format(e.to_string()))?;
        Self::from_json_value(doc)
    }
}

/// On-disk JSON layout of a [`QopProblem`]: dense row-major matrices,
/// 0-based triples.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QopJson {
    pub n_original: usize,
    #[serde(rename = "A")]
    pub quad: Vec<Vec<f64>>,
    #[serde(rename = "a")]
    pub lin: Vec<f64>,
    #[serde(default)]
    pub offset: f64,
    #[serde(rename = "B", default)]
    pub ineq_mat: Vec<Vec<f64>>,
    #[serde(rename = "b", default)]
    pub ineq_rhs: Vec<f64>,
    #[serde(rename = "C", default)]
    pub eq_mat: Vec<Vec<f64>>,
    #[serde(rename = "c", default)]
    pub eq_rhs: Vec<f64>,
    #[serde(default)]
    pub triples: Vec<[usize; 3]>,
    #[serde(default)]
    pub lineage: Vec<Lineage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<String>,
}

/// A linear form over the growing set of augmented variables.
#[derive(Default)]
struct LinearRow {
    coeffs: BTreeMap<usize, f64>,
    constant: f64,
}

impl LinearRow {
    fn add(&mut self, var: usize, c: f64) {
        *self.coeffs.entry(var).or_insert(0.0) += c;
    }
}

struct Builder {
    lineage: Vec<Lineage>,
    products: BTreeMap<(usize, usize), usize>,
    // (a, b, k) in creation order, a == b allowed
    raw_triples: Vec<(usize, usize, usize)>,
}

impl Builder {
    fn new(n: usize) -> Self {
        Self {
            lineage: vec![Lineage::Original; n],
            products: BTreeMap::new(),
            raw_triples: Vec::new(),
        }
    }

    fn fresh(&mut self, lin: Lineage) -> usize {
        self.lineage.push(lin);
        self.lineage.len() - 1
    }

    /// Slack for `x_a·x_b`, reused across identical unordered pairs.
    fn product(&mut self, a: usize, b: usize) -> usize {
        let key = (a.min(b), a.max(b));
        if let Some(&k) = self.products.get(&key) {
            return k;
        }
        let k = self.fresh(Lineage::Product { of: [a, b] });
        self.products.insert(key, k);
        self.raw_triples.push((a, b, k));
        k
    }

    /// Collapses a factor multiset to at most two factors.
    fn to_degree_two(&mut self, factors: Vec<usize>) -> Vec<usize> {
        let mut work = factors;
        loop {
            if work.len() <= 2 {
                return work;
            }
            let mut sorted = work.clone();
            sorted.sort_unstable();
            if let Some(root) = square_root(&sorted) {
                let v = self.to_single(root);
                return vec![v, v];
            }
            let s = self.product(sorted[0], sorted[1]);
            work = std::iter::once(s).chain(sorted[2..].iter().copied()).collect();
        }
    }

    /// Collapses a non-empty factor multiset to a single variable.
    fn to_single(&mut self, factors: Vec<usize>) -> usize {
        let r = self.to_degree_two(factors);
        match r.as_slice() {
            [v] => *v,
            [a, b] => self.product(*a, *b),
            _ => unreachable!("to_degree_two returns one or two factors for non-empty input"),
        }
    }

    fn linearize(&mut self, p: &Polynomial) -> LinearRow {
        let mut row = LinearRow::default();
        for (m, c) in p.terms().rev() {
            match m.degree() {
                0 => row.constant += c,
                1 => row.add(m.factors()[0], c),
                _ => {
                    let v = self.to_single(m.factors());
                    row.add(v, c);
                }
            }
        }
        row
    }
}

/// Multiset square root of a sorted factor list, if every multiplicity is even.
fn square_root(sorted: &[usize]) -> Option<Vec<usize>> {
    if sorted.len() % 2 != 0 {
        return None;
    }
    let mut root = Vec::with_capacity(sorted.len() / 2);
    for pair in sorted.chunks(2) {
        if pair[0] != pair[1] {
            return None;
        }
        root.push(pair[0]);
    }
    Some(root)
}

/// Reduces a POP to an equivalent QOP; see the module docs for the rules.
pub fn reduce_to_qop(pop: &PopProblem) -> QopProblem {
    let n = pop.nvars;
    let mut builder = Builder::new(n);

    let ineq_rows: Vec<LinearRow> = pop.inequalities.iter().map(|g| builder.linearize(g)).collect();
    let mut eq_rows: Vec<LinearRow> = pop.equalities.iter().map(|h| builder.linearize(h)).collect();

    let mut lin_cost = LinearRow::default();
    let mut squares: Vec<(usize, f64)> = Vec::new();
    for (m, c) in pop.objective.terms().rev() {
        match m.degree() {
            0 => lin_cost.constant += c,
            1 => lin_cost.add(m.factors()[0], c),
            _ => {
                let r = builder.to_degree_two(m.factors());
                if r[0] == r[1] && c > 0.0 {
                    squares.push((r[0], c));
                } else {
                    let s = builder.product(r[0], r[1]);
                    lin_cost.add(s, c);
                }
            }
        }
    }

    // square couplings get an alias for their repeated factor, and are listed
    // after the proper bilinear ones
    let raw = std::mem::take(&mut builder.raw_triples);
    let mut triples: Vec<Triple> = raw
        .iter()
        .filter(|&&(a, b, _)| a != b)
        .map(|&(a, b, k)| Triple::new(a, b, k))
        .collect();
    let mut alias_rows: Vec<(usize, usize)> = Vec::new();
    for &(a, b, k) in raw.iter().filter(|&&(a, b, _)| a == b) {
        let j = builder.fresh(Lineage::Alias { of: b });
        alias_rows.push((j, b));
        triples.push(Triple::new(a, j, k));
    }

    let mut used: BTreeSet<usize> = BTreeSet::new();
    for t in &mut triples {
        for slot in [&mut t.i, &mut t.j, &mut t.k] {
            if used.contains(slot) {
                let h = builder.fresh(Lineage::Alias { of: *slot });
                alias_rows.push((h, *slot));
                *slot = h;
            }
        }
        used.extend(t.indices());
    }

    for (alias, orig) in alias_rows {
        let mut row = LinearRow::default();
        row.add(alias, 1.0);
        row.add(orig, -1.0);
        eq_rows.push(row);
    }

    let dim = builder.lineage.len();
    let mut quad = DMatrix::zeros(dim, dim);
    for (v, c) in squares {
        quad[(v, v)] += 2.0 * c;
    }
    let mut lin = DVector::zeros(dim);
    for (&v, &c) in &lin_cost.coeffs {
        lin[v] += c;
    }
    let to_matrix = |rows: &[LinearRow]| -> (DMatrix<f64>, DVector<f64>) {
        let mut m = DMatrix::zeros(rows.len(), dim);
        let mut rhs = DVector::zeros(rows.len());
        for (r, row) in rows.iter().enumerate() {
            for (&v, &c) in &row.coeffs {
                m[(r, v)] += c;
            }
            rhs[r] = -row.constant;
        }
        (m, rhs)
    };
    let (ineq_mat, ineq_rhs) = to_matrix(&ineq_rows);
    let (eq_mat, eq_rhs) = to_matrix(&eq_rows);

    QopProblem {
        n_original: n,
        quad,
        lin,
        offset: lin_cost.constant,
        ineq_mat,
        ineq_rhs,
        eq_mat,
        eq_rhs,
        triples,
        lineage: builder.lineage,
        source_objective: Some(pop.objective.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pop(obj: &str, n: usize, ineq: &[&str], eq: &[&str]) -> PopProblem {
        let p = |s: &str| Polynomial::parse(s, n).unwrap();
        PopProblem::new(p(obj), ineq.iter().map(|s| p(s)).collect(), eq.iter().map(|s| p(s)).collect()).unwrap()
    }

    fn one_based(q: &QopProblem) -> Vec<(usize, usize, usize)> {
        q.triples.iter().map(Triple::one_based).collect()
    }

    #[test]
    fn cubic_example_layout() {
        let q = reduce_to_qop(&pop("x1^2*x2", 2, &[], &[]));
        assert_eq!(q.dim(), 6);
        assert_eq!(one_based(&q), vec![(3, 2, 4), (1, 5, 6)]);
        assert_eq!(q.quad, DMatrix::zeros(6, 6));
        assert_eq!(q.lin, DVector::from_vec(vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0]));
        // x5 - x1 = 0, x6 - x3 = 0
        let c = DMatrix::from_row_slice(2, 6, &[
            -1.0, 0.0, 0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, -1.0, 0.0, 0.0, 1.0,
        ]);
        assert_eq!(q.eq_mat, c);
        assert_eq!(q.eq_rhs, DVector::zeros(2));
        assert_eq!(
            q.lineage,
            vec![
                Lineage::Original,
                Lineage::Original,
                Lineage::Product { of: [0, 0] },
                Lineage::Product { of: [2, 1] },
                Lineage::Alias { of: 0 },
                Lineage::Alias { of: 2 },
            ]
        );
        assert!(q.validate().is_empty());
    }

    #[test]
    fn first_experiment_layout() {
        let q = reduce_to_qop(&pop(
            "x1^2*x2^2 + x1^2 + 5*x1 + x2^2 + x2*x3 - 7*x2 + x3^2 + 2*x3",
            3,
            &[],
            &["x2*x3 + x1 - 10"],
        ));
        assert_eq!(q.dim(), 6);
        assert_eq!(one_based(&q), vec![(2, 3, 4), (1, 6, 5)]);
        let c = DMatrix::from_row_slice(2, 6, &[
            1.0, 0.0, 0.0, 1.0, 0.0, 0.0, //
            0.0, -1.0, 0.0, 0.0, 0.0, 1.0,
        ]);
        assert_eq!(q.eq_mat, c);
        assert_eq!(q.eq_rhs, DVector::from_vec(vec![10.0, 0.0]));
        // cost x5² + x1² + 5x1 + x2² + x4 - 7x2 + x3² + 2x3
        let diag: Vec<f64> = (0..6).map(|i| q.quad[(i, i)]).collect();
        assert_eq!(diag, vec![2.0, 2.0, 2.0, 0.0, 2.0, 0.0]);
        assert_eq!(q.lin, DVector::from_vec(vec![5.0, -7.0, 2.0, 1.0, 0.0, 0.0]));
        assert!(q.validate().is_empty());
    }

    #[test]
    fn convex_quadratic_is_fixed_point() {
        let q = reduce_to_qop(&pop("0.5*x1^2 + 0.5*x2^2", 2, &["x1 + x2 - 1"], &["x1 - x2"]));
        assert_eq!(q.dim(), 2);
        assert!(q.triples.is_empty());
        assert_eq!(q.quad, DMatrix::identity(2, 2));
        assert_eq!(q.lift_point(&[0.3, -2.0]).unwrap().as_slice(), &[0.3, -2.0]);
        assert_eq!(q.ineq_rhs[0], 1.0);
    }

    #[test]
    fn lift_and_project() {
        let q = reduce_to_qop(&pop("x1^2*x2", 2, &[], &[]));
        let lifted = q.lift_point(&[2.0, 3.0]).unwrap();
        assert_eq!(lifted.as_slice(), &[2.0, 3.0, 4.0, 12.0, 2.0, 4.0]);
        assert_eq!(q.bilinear_violation(&lifted), 0.0);
        assert_eq!(q.linear_violation(&lifted), (0.0, 0.0));
        assert_eq!(q.project_solution(&lifted).unwrap(), vec![2.0, 3.0]);
        assert_eq!(q.lift_point(&[0.0, 0.0]).unwrap(), DVector::zeros(6));
        assert_eq!(q.project_solution(&DVector::zeros(6)).unwrap(), vec![0.0, 0.0]);
        assert!(q.project_solution(&DVector::zeros(5)).is_err());
        assert!(q.lift_point(&[1.0]).is_err());
    }

    #[test]
    fn negative_square_and_higher_degree() {
        let q = reduce_to_qop(&pop("-x1^2 + x1*x2*x3*x4 + x2^4", 4, &["x1^3 - 2"], &[]));
        assert!(q.validate().is_empty(), "{:?}", q.validate());
        let x = [0.7, -1.2, 0.4, 2.0];
        let lifted = q.lift_point(&x).unwrap();
        let f = q.source_objective.as_ref().unwrap().evaluate(&x).unwrap();
        assert!((q.cost(&lifted) - f).abs() < 1e-12);
        let g = 0.7f64.powi(3) - 2.0;
        assert!(((&q.ineq_mat * &lifted - &q.ineq_rhs)[0] - g).abs() < 1e-12);
    }

    #[test]
    fn validation_catches_overlap_and_indefinite() {
        let mut q = reduce_to_qop(&pop("x1*x2 + x3*x4 + x5", 6, &[], &[]));
        q.triples = vec![Triple::new(0, 1, 2), Triple::new(2, 3, 4)];
        let v = q.validate();
        assert!(v.iter().any(|e| matches!(e, Violation::OverlappingTriples { index: 2, .. })), "{v:?}");

        let mut q = reduce_to_qop(&pop("x1^2 + x2^2", 2, &[], &[]));
        q.quad[(1, 1)] = -1.0;
        let v = q.validate();
        assert!(matches!(v.as_slice(), [Violation::NotPsd { .. }]), "{v:?}");

        let mut q = reduce_to_qop(&pop("x1 + x2 + x3", 3, &[], &[]));
        q.triples = vec![Triple::new(0, 0, 2)];
        assert!(matches!(q.validate().as_slice(), [Violation::RepeatedIndexInTriple { .. }]));
        q.triples = vec![Triple::new(0, 1, 7)];
        assert!(matches!(q.validate().as_slice(), [Violation::IndexOutOfRange { index: 7, .. }]));
    }

    #[test]
    fn json_round_trip() {
        let q = reduce_to_qop(&pop("x1^2*x2 - x2", 2, &["x1 - 4"], &["x1*x2 - 1"]));
        let back = QopProblem::from_json(&q.to_json()).unwrap();
        assert_eq!(back, q);
        assert!(QopProblem::from_json(r#"{"n_original": 1, "A": [[1.0, 0.0]], "a": [0.0]}"#).is_err());
    }

    #[test]
    fn deterministic() {
        let p = pop("x1^3*x2 - 2*x1*x2^2 + x3^4", 3, &["x1*x3 - 1"], &["x2^3 + x1"]);
        assert_eq!(reduce_to_qop(&p), reduce_to_qop(&p));
    }
}
