//! Multistart projected-gradient search over orthonormal pairs (the Stiefel
//! manifold V₂(ℝⁿ)), used for curvature extremes and the rank-one test.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

/// Quadratic form on bivectors: f(x, y) = ‖rows · (x ∧ y)‖², with x ∧ y listed
/// over index pairs i < j.
#[derive(Debug, Clone)]
pub struct BivectorForm {
    n: usize,
    pairs: Vec<(usize, usize)>,
    rows: nalgebra::DMatrix<f64>,
}

impl BivectorForm {
    pub fn new(n: usize, rows: nalgebra::DMatrix<f64>) -> Self {
        let pairs = wedge_pairs(n);
        assert_eq!(rows.ncols(), pairs.len());
        Self { n, pairs, rows }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn wedge(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.pairs.len(),
            self.pairs.iter().map(|&(i, j)| x[i] * y[j] - x[j] * y[i]),
        )
    }

    pub fn value(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (&self.rows * self.wedge(x, y)).norm_squared()
    }

    /// f(x, y) / |x ∧ y|².
    pub fn ratio(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let w = self.wedge(x, y);
        (&self.rows * &w).norm_squared() / w.norm_squared()
    }

    /// Exact gradient of `value` with respect to x and y.
    pub fn gradient(&self, x: &DVector<f64>, y: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let w = self.wedge(x, y);
        let q = self.rows.transpose() * (&self.rows * &w) * 2.0;
        let mut gx = DVector::zeros(self.n);
        let mut gy = DVector::zeros(self.n);
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            gx[i] += q[p] * y[j];
            gx[j] -= q[p] * y[i];
            gy[j] += q[p] * x[i];
            gy[i] -= q[p] * x[j];
        }
        (gx, gy)
    }
}

pub fn wedge_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            out.push((i, j));
        }
    }
    out
}

pub enum Gradient<'a> {
    /// Central differences with the given step.
    FiniteDifference(f64),
    Exact(&'a (dyn Fn(&DVector<f64>, &DVector<f64>) -> (DVector<f64>, DVector<f64>) + Sync)),
}

#[derive(Debug, Clone, Copy)]
pub struct DescentOptions {
    pub max_iter: usize,
    pub grad_tol: f64,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self {
            max_iter: 4000,
            grad_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DescentResult {
    pub value: f64,
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    pub iterations: usize,
}

pub fn random_pair<R: Rng>(n: usize, rng: &mut R) -> (DVector<f64>, DVector<f64>) {
    loop {
        let x = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        if let Some(p) = orthonormal_pair(&x, &y) {
            return p;
        }
    }
}

pub fn orthonormal_pair(x: &DVector<f64>, y: &DVector<f64>) -> Option<(DVector<f64>, DVector<f64>)> {
    let nx = x.norm();
    if nx < 1e-12 {
        return None;
    }
    let x = x / nx;
    let mut y = y - &x * x.dot(y);
    y -= &x * x.dot(&y);
    let ny = y.norm();
    if ny < 1e-12 {
        return None;
    }
    Some((x, y / ny))
}

fn fd_gradient<F>(f: &F, x: &DVector<f64>, y: &DVector<f64>, h: f64) -> (DVector<f64>, DVector<f64>)
where
    F: Fn(&DVector<f64>, &DVector<f64>) -> f64,
{
    let n = x.len();
    let mut gx = DVector::zeros(n);
    let mut gy = DVector::zeros(n);
    let mut xp = x.clone();
    let mut yp = y.clone();
    for i in 0..n {
        xp[i] = x[i] + h;
        let a = f(&xp, y);
        xp[i] = x[i] - h;
        let b = f(&xp, y);
        xp[i] = x[i];
        gx[i] = (a - b) / (2.0 * h);

        yp[i] = y[i] + h;
        let a = f(x, &yp);
        yp[i] = y[i] - h;
        let b = f(x, &yp);
        yp[i] = y[i];
        gy[i] = (a - b) / (2.0 * h);
    }
    (gx, gy)
}

/// Minimizes `f` over orthonormal pairs from the given start.
pub fn descend<F>(
    f: &F,
    gradient: &Gradient<'_>,
    start: (DVector<f64>, DVector<f64>),
    opts: DescentOptions,
) -> DescentResult
where
    F: Fn(&DVector<f64>, &DVector<f64>) -> f64,
{
    let (mut x, mut y) = start;
    let mut fx = f(&x, &y);
    let mut step = 0.1;
    let mut iterations = 0;
    let mut stalls = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let (gx, gy) = match gradient {
            Gradient::FiniteDifference(h) => fd_gradient(f, &x, &y, *h),
            Gradient::Exact(g) => g(&x, &y),
        };
        // Tangent projection at the pair (x, y): G − X·sym(XᵀG).
        let xx = x.dot(&gx);
        let yy = y.dot(&gy);
        let xy = 0.5 * (x.dot(&gy) + y.dot(&gx));
        let zx = &gx - &x * xx - &y * xy;
        let zy = &gy - &x * xy - &y * yy;
        let gnorm2 = zx.norm_squared() + zy.norm_squared();
        if gnorm2.sqrt() < opts.grad_tol {
            break;
        }
        let mut accepted = false;
        while step > 1e-16 {
            let cand = orthonormal_pair(&(&x - &zx * step), &(&y - &zy * step));
            if let Some((cx, cy)) = cand {
                let fc = f(&cx, &cy);
                if fc <= fx - 1e-4 * step * gnorm2 {
                    let gain = fx - fc;
                    x = cx;
                    y = cy;
                    fx = fc;
                    step = (step * 2.0).min(1e4);
                    accepted = true;
                    if gain <= 1e-15 * fx.abs().max(1e-300) {
                        stalls += 1;
                    } else {
                        stalls = 0;
                    }
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted || stalls >= 5 {
            break;
        }
    }
    DescentResult {
        value: fx,
        x,
        y,
        iterations,
    }
}
