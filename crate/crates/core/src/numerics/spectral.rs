//! Largest singular value by power iteration on `MᵀM`.

use nalgebra::{DMatrix, DVector};

const MAX_ITER: usize = 100_000;

/// `‖M‖₂`. The start vector is a fixed quasi-random sequence, so the result
/// is deterministic.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    let n = m.ncols();
    if n == 0 || m.nrows() == 0 || m.amax() == 0.0 {
        return 0.0;
    }
    let golden = 0.618_033_988_749_894_9_f64;
    let mut v = DVector::from_fn(n, |i, _| 0.5 + ((i + 1) as f64 * golden).fract());
    v.normalize_mut();
    let mut lambda = 0.0f64;
    let mut calm = 0;
    for _ in 0..MAX_ITER {
        let mv = m * &v;
        let w = m.tr_mul(&mv);
        let next = mv.norm_squared();
        let wn = w.norm();
        if wn == 0.0 {
            break;
        }
        v = w / wn;
        if (next - lambda).abs() <= 1e-15 * next {
            calm += 1;
            if calm >= 3 {
                lambda = next;
                break;
            }
        } else {
            calm = 0;
        }
        lambda = next;
    }
    lambda.sqrt()
}
