// Shared helpers for the integration tests: an adaptive Dormand–Prince
// integrator and Jacobi operators rebuilt directly from brackets.
#![allow(dead_code)]

pub mod tables;

use homogeodesy::{Part, ReductiveSpace};
use nalgebra::{DMatrix, DVector};

/// T_u x = −[u,x]_𝔪 and R_u x = [[u,x]_𝔨, u]_𝔪 in 𝔪-coordinates, assembled
/// column by column from the algebra bracket.
pub fn operators_from_brackets(space: &ReductiveSpace, u: &DVector<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = space.dim();
    let k_idx = space.indices(Part::K).unwrap().to_vec();
    let uf = space.embed(u);
    let alg = space.algebra();
    let mut t = DMatrix::zeros(n, n);
    let mut r = DMatrix::zeros(n, n);
    for b in 0..n {
        let mut x = DVector::zeros(n);
        x[b] = 1.0;
        let ux = alg.bracket(&uf, &space.embed(&x));
        t.set_column(b, &(-space.restrict(&ux)));
        let mut ux_k = DVector::zeros(ux.len());
        for &i in &k_idx {
            ux_k[i] = ux[i];
        }
        r.set_column(b, &space.restrict(&alg.bracket(&ux_k, &uf)));
    }
    (t, r)
}

// Dormand–Prince 5(4) tableau; the system is autonomous so the nodes are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates Y' = M·Y from t = 0 and returns Y at each requested (increasing) time.
pub fn integrate_linear(m: &DMatrix<f64>, y0: &DMatrix<f64>, times: &[f64], rtol: f64, atol: f64) -> Vec<DMatrix<f64>> {
    let mut out = Vec::with_capacity(times.len());
    let mut t = 0.0_f64;
    let mut y = y0.clone();
    let mut h = 1e-3_f64;
    for &target in times {
        while t < target {
            let step = h.min(target - t);
            let mut k: Vec<DMatrix<f64>> = Vec::with_capacity(7);
            for row in &A {
                let mut yi = y.clone();
                for (kj, &a) in k.iter().zip(row) {
                    if a != 0.0 {
                        yi += kj * (step * a);
                    }
                }
                k.push(m * yi);
            }
            let mut y5 = y.clone();
            let mut err = DMatrix::zeros(y.nrows(), y.ncols());
            for i in 0..7 {
                y5 += &k[i] * (step * B5[i]);
                err += &k[i] * (step * (B5[i] - B4[i]));
            }
            let mut e = 0.0f64;
            for (ei, (a, b)) in err.iter().zip(y.iter().zip(y5.iter())) {
                let sc = atol + rtol * a.abs().max(b.abs());
                e = e.max((ei / sc).abs());
            }
            if e <= 1.0 {
                t += step;
                y = y5;
            }
            let factor = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
            h = step * factor;
        }
        out.push(y.clone());
    }
    out
}

/// J(t) (X'(0) ↦ X(t), 𝔪-coordinates) from X'' − T X' + R X = 0 at the given times.
pub fn jacobi_by_ode(t_op: &DMatrix<f64>, r_op: &DMatrix<f64>, times: &[f64]) -> Vec<DMatrix<f64>> {
    let n = t_op.nrows();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, n), (n, n)).fill_with_identity();
    m.view_mut((n, 0), (n, n)).copy_from(&(-r_op));
    m.view_mut((n, n), (n, n)).copy_from(t_op);
    let mut y0 = DMatrix::zeros(2 * n, n);
    y0.view_mut((n, 0), (n, n)).fill_with_identity();
    integrate_linear(&m, &y0, times, 1e-12, 1e-13)
        .into_iter()
        .map(|y| y.view((0, 0), (n, n)).into_owned())
        .collect()
}

/// Frobenius norm of P_a − P_b for orthonormal bases; bounds the spectral distance from above.
pub fn subspace_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a * a.transpose() - b * b.transpose()).norm()
}

/// Orthonormal basis of the column span by Gram–Schmidt with column pivoting
/// (largest remaining column first, two orthogonalization passes), stopping
/// once the remaining columns fall below `tol` times the largest column.
pub fn orthonormal_span(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let mut rest: Vec<DVector<f64>> = a.column_iter().map(|c| c.into_owned()).collect();
    let scale = rest.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut basis: Vec<DVector<f64>> = Vec::new();
    while let Some((i, n)) = rest
        .iter()
        .map(|c| c.norm())
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(&y.1))
    {
        if n <= tol * scale || n == 0.0 {
            break;
        }
        let q = rest.swap_remove(i) / n;
        for c in rest.iter_mut() {
            for _ in 0..2 {
                let d = q.dot(c);
                c.axpy(-d, &q, 1.0);
            }
        }
        basis.push(q);
    }
    if basis.is_empty() {
        DMatrix::zeros(a.nrows(), 0)
    } else {
        DMatrix::from_columns(&basis)
    }
}

/// Orthonormal basis (orthonormal 𝔪-coordinates) of [𝔨, u] from brackets with each 𝔨 basis vector.
pub fn isotropy_orbit_tangent(space: &ReductiveSpace, u: &DVector<f64>) -> DMatrix<f64> {
    let alg = space.algebra();
    let uf = space.embed(u);
    let cols: Vec<DVector<f64>> = space
        .indices(Part::K)
        .unwrap()
        .iter()
        .map(|&z| space.to_orthonormal() * space.restrict(&alg.bracket(&alg.basis_vector(z), &uf)))
        .collect();
    if cols.is_empty() {
        return DMatrix::zeros(space.dim(), 0);
    }
    orthonormal_span(&DMatrix::from_columns(&cols), 1e-6)
}
