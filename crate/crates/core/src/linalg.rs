//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

/// One-sided Jacobi (Hestenes) SVD. Returns singular values in decreasing order,
/// the matching left vectors (m×n, zero columns where σ = 0) and the full right
/// factor V (n×n).
///
/// nalgebra's bidiagonal SVD occasionally stalls on matrices with clustered
/// singular values (reconstruction errors near 1e−5 were observed on Lie-algebra
/// design matrices), so everything rank- or kernel-related goes through this.
pub fn hestenes_svd(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>, DMatrix<f64>) {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..m {
                    let (x, y) = (w[(i, p)], w[(i, q)]);
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (x, y) = (w[(i, p)], w[(i, q)]);
                    w[(i, p)] = c * x - s * y;
                    w[(i, q)] = s * x + c * y;
                }
                for i in 0..n {
                    let (x, y) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * x - s * y;
                    v[(i, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let mut u = DMatrix::zeros(m, n);
    let mut vs = DMatrix::zeros(n, n);
    for (col, &j) in order.iter().enumerate() {
        if norms[j] > 0.0 {
            u.set_column(col, &(w.column(j) / norms[j]));
        }
        vs.set_column(col, &v.column(j));
    }
    (order.iter().map(|&j| norms[j]).collect(), u, vs)
}

/// Singular values in decreasing order.
pub fn singular_values(a: &DMatrix<f64>) -> DVector<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return DVector::zeros(0);
    }
    // Fewer columns means fewer rotation pairs.
    let (s, _, _) = if a.ncols() > a.nrows() {
        hestenes_svd(&a.transpose())
    } else {
        hestenes_svd(a)
    };
    DVector::from_vec(s)
}

pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    singular_values(a).iter().cloned().fold(0.0, f64::max)
}

/// Singular values and the full right factor V, columns sorted by decreasing
/// singular value. When `a` has fewer rows than columns the trailing values are zero.
pub fn full_right_svd(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    if a.ncols() == 0 {
        return (vec![], DMatrix::zeros(0, 0));
    }
    let (s, _, v) = hestenes_svd(a);
    (s, v)
}

/// Orthonormal basis of the kernel of `a`, using the threshold `tol * σ_max`
/// (or the whole domain when `a` vanishes below `floor`).
pub fn null_space(a: &DMatrix<f64>, tol: f64, floor: f64) -> DMatrix<f64> {
    let (s, v) = full_right_svd(a);
    let n = s.len();
    let smax = s.first().cloned().unwrap_or(0.0);
    if smax <= floor {
        return DMatrix::identity(n, n);
    }
    let cut = tol * smax;
    let keep: Vec<usize> = (0..n).filter(|&i| s[i] <= cut).collect();
    select_columns(&v, &keep)
}

/// Orthonormal basis of the column space of `a` (threshold `tol * σ_max`).
pub fn column_space(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    if a.ncols() == 0 || a.nrows() == 0 {
        return DMatrix::zeros(a.nrows(), 0);
    }
    let (s, u, _) = hestenes_svd(a);
    let smax = s.first().cloned().unwrap_or(0.0);
    if smax == 0.0 {
        return DMatrix::zeros(a.nrows(), 0);
    }
    let keep: Vec<usize> = (0..s.len()).filter(|&i| s[i] > tol * smax).collect();
    select_columns(&u, &keep)
}

pub fn select_columns(a: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows(), cols.len());
    for (k, &c) in cols.iter().enumerate() {
        out.set_column(k, &a.column(c));
    }
    out
}

pub fn projector(basis: &DMatrix<f64>) -> DMatrix<f64> {
    basis * basis.transpose()
}

/// ‖P_a − P_b‖₂ for orthonormal bases `a` and `b` of subspaces of the same space.
pub fn subspace_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    spectral_norm(&(projector(a) - projector(b)))
}

/// Modified Gram–Schmidt on the columns; drops columns that become smaller than `tol`.
pub fn orthonormalize(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for j in 0..a.ncols() {
        let mut v = a.column(j).into_owned();
        for _ in 0..2 {
            for q in &cols {
                let d = q.dot(&v);
                v.axpy(-d, q, 1.0);
            }
        }
        let nv = v.norm();
        if nv > tol {
            cols.push(v / nv);
        }
    }
    if cols.is_empty() {
        return DMatrix::zeros(a.nrows(), 0);
    }
    DMatrix::from_columns(&cols)
}

pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}
