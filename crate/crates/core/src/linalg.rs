//! Small dense linear-algebra helpers: modified Gram–Schmidt, a cyclic Jacobi
//! eigensolver for symmetric matrices, and singular-value rank checks.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative pivot below which a vector is treated as dependent on its
/// predecessors.
pub const DEGENERACY_PIVOT: f64 = 1e-8;

/// Modified Gram–Schmidt. Fails when some vector loses more than all but
/// `DEGENERACY_PIVOT` of its norm to the earlier ones.
pub fn orthonormalize(vectors: &[DVector<f64>]) -> Result<Vec<DVector<f64>>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let scale = v.norm();
        let mut w = v.clone();
        for u in &out {
            let proj = u.dot(&w);
            w.axpy(-proj, u, 1.0);
        }
        let norm = w.norm();
        let pivot = if scale > 0.0 { norm / scale } else { 0.0 };
        if pivot < DEGENERACY_PIVOT {
            return Err(Error::DegeneratePlane { pivot });
        }
        out.push(w / norm);
    }
    Ok(out)
}

/// Extends orthonormal vectors to an orthonormal basis of `R^n` by sweeping
/// the coordinate vectors; the given vectors come first.
pub fn complete_frame(orthonormal: &[DVector<f64>], n: usize) -> DMatrix<f64> {
    let mut frame: Vec<DVector<f64>> = orthonormal.to_vec();
    for i in 0..n {
        if frame.len() == n {
            break;
        }
        let mut w = DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 });
        // twice is enough
        for _ in 0..2 {
            for u in &frame {
                let proj = u.dot(&w);
                w.axpy(-proj, u, 1.0);
            }
        }
        let norm = w.norm();
        if norm > 1e-6 {
            frame.push(w / norm);
        }
    }
    DMatrix::from_columns(&frame)
}

/// Result of the cyclic Jacobi iteration.
#[derive(Debug, Clone)]
pub struct JacobiResult {
    /// Eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    pub sweeps: usize,
    /// Off-diagonal Frobenius norm at exit.
    pub off_diagonal: f64,
}

/// Off-diagonal target for the Jacobi iteration, relative to the matrix norm.
pub const JACOBI_TOLERANCE: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                acc += a[(r, c)] * a[(r, c)];
            }
        }
    }
    acc.sqrt()
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, iterated
/// until the off-diagonal norm drops below `JACOBI_TOLERANCE · ‖A‖`.
pub fn jacobi_eigenvalues(matrix: &DMatrix<f64>) -> JacobiResult {
    assert!(matrix.is_square(), "Jacobi iteration needs a square matrix");
    let n = matrix.nrows();
    let mut a = matrix.clone();
    let target = JACOBI_TOLERANCE * a.norm();
    let mut sweeps = 0;
    let mut off = off_diagonal_norm(&a);
    while off > target && sweeps < MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
        off = off_diagonal_norm(&a);
    }
    let mut eigenvalues: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    eigenvalues.sort_by(f64::total_cmp);
    JacobiResult { eigenvalues, sweeps, off_diagonal: off }
}

/// `σ_min / σ_max` over the `min(rows, cols)` singular values; zero for an
/// all-zero matrix.
pub fn singular_value_ratio(matrix: &DMatrix<f64>) -> f64 {
    let sv = matrix.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if max > 0.0 {
        min / max
    } else {
        0.0
    }
}

/// Number of singular values above `rel_tol · σ_max`.
pub fn numerical_rank(matrix: &DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = matrix.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}
