//! Numerical pinching constant δ = k_min / k_max of a normal homogeneous metric.
//!
//! Sectional curvature of the plane x ∧ y is the ratio
//! (‖[x,y]_𝔨‖² + ¼‖[x,y]_𝔪‖²) / |x ∧ y|², minimized and maximized by multistart
//! projected gradient descent over orthonormal pairs (central finite-difference
//! gradients, re-orthonormalization as retraction), then audited on random planes.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog::SpaceDescriptor;
use crate::error::{Error, Result};
use crate::homogeneous::ReductiveSpace;
use crate::par::{self, Execution};
use crate::stiefel::{self, BivectorForm, DescentOptions, Gradient};

#[derive(Debug, Clone, Copy)]
pub struct PinchingOptions {
    pub starts: usize,
    pub seed: u64,
    pub audit_planes: usize,
    pub fd_step: f64,
    pub descent: DescentOptions,
    pub execution: Execution,
}

impl Default for PinchingOptions {
    fn default() -> Self {
        Self {
            starts: 256,
            seed: 0x5eed,
            audit_planes: 10_000,
            fd_step: 1e-5,
            descent: DescentOptions {
                max_iter: 3000,
                grad_tol: 1e-9,
            },
            execution: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PinchingReport {
    pub space: String,
    pub k_min: f64,
    pub k_max: f64,
    pub delta: f64,
    /// Orthonormal pairs (𝔪-coordinates) attaining the extremes.
    #[serde(skip)]
    pub argmin: (DVector<f64>, DVector<f64>),
    #[serde(skip)]
    pub argmax: (DVector<f64>, DVector<f64>),
    /// Number of starts agreeing with the best value to 1e−6 (min, max).
    pub agreeing_starts: (usize, usize),
    pub audit_violations: usize,
    pub converged: bool,
}

/// Sectional curvature form of a space in orthonormal coordinates of 𝔪.
pub fn curvature_form(space: &ReductiveSpace) -> BivectorForm {
    space.bivector_form(1.0, 0.25)
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn estimate_pinching(space: &ReductiveSpace, opts: &PinchingOptions) -> Result<PinchingReport> {
    let n = space.dim();
    if n < 2 {
        return Err(Error::BadParams("pinching needs dim 𝔪 ≥ 2".into()));
    }
    if opts.starts == 0 {
        return Err(Error::BadParams("at least one start is required".into()));
    }
    let form = curvature_form(space);
    let curvature = |x: &DVector<f64>, y: &DVector<f64>| form.ratio(x, y);
    let negated = |x: &DVector<f64>, y: &DVector<f64>| -form.ratio(x, y);
    let grad = Gradient::FiniteDifference(opts.fd_step);

    let runs = par::map_indexed(2 * opts.starts, opts.execution, |i| {
        let mut rng = stream_rng(opts.seed, i as u64);
        let start = stiefel::random_pair(n, &mut rng);
        if i < opts.starts {
            stiefel::descend(&curvature, &grad, start, opts.descent)
        } else {
            let mut r = stiefel::descend(&negated, &grad, start, opts.descent);
            r.value = -r.value;
            r
        }
    });
    let (mins, maxs) = runs.split_at(opts.starts);
    let best_min = mins.iter().min_by(|a, b| a.value.total_cmp(&b.value)).expect("nonempty");
    let best_max = maxs.iter().max_by(|a, b| a.value.total_cmp(&b.value)).expect("nonempty");
    let (k_min, k_max) = (best_min.value, best_max.value);
    let agree = |vals: &[stiefel::DescentResult], best: f64| {
        vals.iter()
            .filter(|r| (r.value - best).abs() <= 1e-6 * best.abs().max(1e-12))
            .count()
    };
    let agreeing = (agree(mins, k_min), agree(maxs, k_max));

    let audit = par::map_indexed(opts.audit_planes, opts.execution, |i| {
        let mut rng = stream_rng(opts.seed ^ 0xa0d1, i as u64);
        let (x, y) = stiefel::random_pair(n, &mut rng);
        form.ratio(&x, &y)
    });
    let slack = 1e-6 * k_max.abs().max(1e-12);
    let audit_violations = audit
        .iter()
        .filter(|&&k| k < k_min - slack || k > k_max + slack)
        .count();

    let to_m = space.from_orthonormal();
    Ok(PinchingReport {
        space: space.name().to_string(),
        k_min,
        k_max,
        delta: k_min / k_max,
        argmin: (to_m * &best_min.x, to_m * &best_min.y),
        argmax: (to_m * &best_max.x, to_m * &best_max.y),
        agreeing_starts: agreeing,
        audit_violations,
        converged: agreeing.0 >= 3 && agreeing.1 >= 3 && audit_violations == 0 && k_min > 0.0,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PinchingRow {
    pub s: f64,
    pub delta_measured: f64,
    pub delta_formula: f64,
    pub rel_error: f64,
    pub converged: bool,
}

/// Families with an s-parametrized pinching law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PinchingFamily {
    Berger { m: usize },
    SpSphere { m: usize },
}

impl PinchingFamily {
    pub fn descriptor(self, s: f64) -> SpaceDescriptor {
        match self {
            PinchingFamily::Berger { m } => SpaceDescriptor::Berger { m, s, kappa: 1.0 },
            PinchingFamily::SpSphere { m } => SpaceDescriptor::SpSphere { m, s, kappa: 1.0 },
        }
    }
}

pub fn pinching_curve(family: PinchingFamily, grid: &[f64], opts: &PinchingOptions) -> Result<Vec<PinchingRow>> {
    let mut rows = Vec::with_capacity(grid.len());
    for &s in grid {
        let d = family.descriptor(s);
        let space = d.build()?;
        let report = estimate_pinching(&space, opts)?;
        let formula = d.pinching_formula().expect("family has a formula");
        rows.push(PinchingRow {
            s,
            delta_measured: report.delta,
            delta_formula: formula,
            rel_error: (report.delta - formula).abs() / formula,
            converged: report.converged,
        });
    }
    Ok(rows)
}
