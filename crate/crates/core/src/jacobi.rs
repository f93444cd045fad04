//! Jacobi fields along geodesics γ(t) = exp(tu)·o of a naturally reductive space.
//!
//! Along γ the canonical-connection frame turns the Jacobi equation into the
//! constant-coefficient system X'' − T_u X' + R_u X = 0 on 𝔪. Its fundamental
//! solution with X(0) = 0, X'(0) = I is the upper-right block of exp(t·C) with
//! C = [[0, I], [−R_u, T_u]]. Conjugate points are the zeros of σ_min(J(t)).

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::catalog::SpaceDescriptor;
use crate::error::{Error, Result};
use crate::homogeneous::{Part, ReductiveSpace};
use crate::linalg;

/// Threshold for counting a singular value of J(t) as zero, relative to σ_max.
pub const MULTIPLICITY_TOL: f64 = 1e-7;
/// Threshold for kernel/range decisions in the isotropy classification.
pub const ISOTROPY_TOL: f64 = 1e-8;
const REFINE_TOL: f64 = 1e-10;
const DEDUP_TOL: f64 = 1e-8;
const SUBDIVISIONS: usize = 8;
/// Recursion stops once candidate intervals are this short.
const FINEST_INTERVAL: f64 = 1e-4;

fn may_vanish(s0: f64, s1: f64, l0: f64, l1: f64, h: f64) -> bool {
    s0 + s1 <= 1.25 * l0.max(l1) * h
}

#[derive(Debug, Clone)]
pub struct JacobiSystem {
    u: DVector<f64>,
    torsion: DMatrix<f64>,
    jacobi: DMatrix<f64>,
    torsion_hat: DMatrix<f64>,
    jacobi_hat: DMatrix<f64>,
    companion: DMatrix<f64>,
    to_ortho: DMatrix<f64>,
    from_ortho: DMatrix<f64>,
}

/// A zero of σ_min(J(t)).
#[derive(Debug, Clone, Serialize)]
pub struct ConjugateEvent {
    pub t: f64,
    pub multiplicity: usize,
    /// Initial derivatives X'(0) (columns, 𝔪-coordinates) of Jacobi fields vanishing at t.
    #[serde(skip)]
    pub kernel: DMatrix<f64>,
    pub sigma_min: f64,
    pub isotropic_exists: bool,
    pub strictly_isotropic: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    pub t_max: f64,
    /// Grid step; `None` picks 0.25/√(‖R‖ + ‖T‖² + 1).
    pub step: Option<f64>,
}

impl ScanOptions {
    pub fn new(t_max: f64) -> Self {
        Self { t_max, step: None }
    }
}

impl JacobiSystem {
    /// Builds the system for the unit direction u/‖u‖ (u in 𝔪-coordinates).
    pub fn new(space: &ReductiveSpace, u: &DVector<f64>) -> Result<Self> {
        let u = space.normalize_m(u)?;
        let torsion = space.torsion_op(&u);
        let jacobi = space.jacobi_op(&u);
        let torsion_hat = space.operator_to_orthonormal(&torsion);
        let jacobi_hat = space.operator_to_orthonormal(&jacobi);
        let n = u.len();
        let mut companion = DMatrix::zeros(2 * n, 2 * n);
        companion.view_mut((0, n), (n, n)).fill_with_identity();
        companion.view_mut((n, 0), (n, n)).copy_from(&(-&jacobi_hat));
        companion.view_mut((n, n), (n, n)).copy_from(&torsion_hat);
        Ok(Self {
            u,
            torsion,
            jacobi,
            torsion_hat,
            jacobi_hat,
            companion,
            to_ortho: space.to_orthonormal().clone(),
            from_ortho: space.from_orthonormal().clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn direction(&self) -> &DVector<f64> {
        &self.u
    }

    /// T_u in 𝔪-coordinates.
    pub fn torsion(&self) -> &DMatrix<f64> {
        &self.torsion
    }

    /// R_u in 𝔪-coordinates.
    pub fn jacobi(&self) -> &DMatrix<f64> {
        &self.jacobi
    }

    /// T_u and R_u in orthonormal coordinates.
    pub fn orthonormal_operators(&self) -> (&DMatrix<f64>, &DMatrix<f64>) {
        (&self.torsion_hat, &self.jacobi_hat)
    }

    /// ‖R‖₂ + ‖T‖₂², the squared frequency scale of the system.
    pub fn operator_scale(&self) -> f64 {
        let t = linalg::spectral_norm(&self.torsion_hat);
        linalg::spectral_norm(&self.jacobi_hat) + t * t
    }

    pub fn default_step(&self) -> f64 {
        0.25 / (self.operator_scale() + 1.0).sqrt()
    }

    fn block_hat(&self, t: f64) -> DMatrix<f64> {
        let n = self.dim();
        let e = (&self.companion * t).exp();
        e.view((0, n), (n, n)).into_owned()
    }

    /// J(t): X'(0) ↦ X(t) in 𝔪-coordinates.
    pub fn fundamental_block(&self, t: f64) -> DMatrix<f64> {
        &self.from_ortho * self.block_hat(t) * &self.to_ortho
    }

    /// Smallest singular value of J(t) in orthonormal coordinates.
    pub fn sigma_min(&self, t: f64) -> f64 {
        let s = linalg::singular_values(&self.block_hat(t));
        s[s.len() - 1]
    }

    /// Finds all conjugate times in (0, t_max].
    pub fn scan_conjugate_times(&self, opts: ScanOptions) -> Result<Vec<ConjugateEvent>> {
        if !(opts.t_max.is_finite()) {
            return Err(Error::BadParams("t_max must be finite".into()));
        }
        let scale = self.operator_scale();
        let step = opts.step.unwrap_or_else(|| self.default_step());
        if !(step > 0.0) {
            return Err(Error::BadParams("step must be positive".into()));
        }
        if scale.sqrt() * step > 0.5 {
            return Err(Error::StepTooCoarse { step, scale });
        }
        if opts.t_max <= 0.0 {
            return Ok(Vec::new());
        }
        let n = self.dim();
        let stepper = (&self.companion * step).exp();
        let mut times = Vec::new();
        let mut sigmas = Vec::new();
        let mut slopes = Vec::new();
        let mut t = step / 2.0;
        let mut state = (&self.companion * t).exp().columns(n, n).into_owned();
        let mut count = 0usize;
        while t <= opts.t_max + step {
            // Rows 0..n hold J(t), rows n..2n hold J'(t).
            let s = linalg::singular_values(&state.view((0, 0), (n, n)).into_owned());
            times.push(t);
            sigmas.push(s[n - 1]);
            slopes.push(linalg::spectral_norm(&state.view((n, 0), (n, n)).into_owned()));
            count += 1;
            t = step / 2.0 + count as f64 * step;
            state = if count.is_multiple_of(64) {
                (&self.companion * t).exp().columns(n, n).into_owned()
            } else {
                &stepper * state
            };
        }

        // |dσ_min/dt| ≤ ‖J'(t)‖, so a zero inside [t_k, t_k+1] forces
        // σ_k + σ_k+1 ≤ L·h. Intervals passing this test are searched recursively.
        let mut events: Vec<ConjugateEvent> = Vec::new();
        for k in 0..times.len().saturating_sub(1) {
            if may_vanish(sigmas[k], sigmas[k + 1], slopes[k], slopes[k + 1], step) {
                self.search(times[k], times[k + 1], opts.t_max, &mut events);
            }
        }
        events.sort_by(|a, b| a.t.total_cmp(&b.t));
        Ok(events)
    }

    /// Scan followed by isotropy classification of every event.
    pub fn scan_and_classify(&self, opts: ScanOptions) -> Result<Vec<ConjugateEvent>> {
        let mut events = self.scan_conjugate_times(opts)?;
        for e in &mut events {
            self.classify_isotropy(e);
        }
        Ok(events)
    }

    /// σ_min(J(t)) and ‖J'(t)‖₂.
    fn sigma_and_slope(&self, t: f64) -> (f64, f64) {
        let n = self.dim();
        let e = (&self.companion * t).exp();
        let s = linalg::singular_values(&e.view((0, n), (n, n)).into_owned());
        (s[n - 1], linalg::spectral_norm(&e.view((n, n), (n, n)).into_owned()))
    }

    fn search(&self, a: f64, b: f64, t_max: f64, events: &mut Vec<ConjugateEvent>) {
        let h = (b - a) / SUBDIVISIONS as f64;
        let samples: Vec<(f64, f64, f64)> = (0..=SUBDIVISIONS)
            .map(|j| {
                let t = a + j as f64 * h;
                let (s, l) = self.sigma_and_slope(t);
                (t, s, l)
            })
            .collect();
        for w in samples.windows(2) {
            let ((lo, s0, l0), (hi, s1, l1)) = (w[0], w[1]);
            if !may_vanish(s0, s1, l0, l1, h) {
                continue;
            }
            if h > FINEST_INTERVAL {
                self.search(lo, hi, t_max, events);
                continue;
            }
            let t_star = self.golden_section((lo - h).max(f64::MIN_POSITIVE), hi + h);
            if t_star > t_max {
                continue;
            }
            if let Some(ev) = self.event_at(t_star) {
                if !events.iter().any(|e| (e.t - ev.t).abs() < DEDUP_TOL) {
                    events.push(ev);
                }
            }
        }
    }

    fn golden_section(&self, mut a: f64, mut b: f64) -> f64 {
        let r = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - r * (b - a);
        let mut d = a + r * (b - a);
        let mut fc = self.sigma_min(c);
        let mut fd = self.sigma_min(d);
        while b - a > REFINE_TOL {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - r * (b - a);
                fc = self.sigma_min(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + r * (b - a);
                fd = self.sigma_min(d);
            }
        }
        0.5 * (a + b)
    }

    /// Builds an event at t when J(t) is numerically singular.
    fn event_at(&self, t: f64) -> Option<ConjugateEvent> {
        let block = self.block_hat(t);
        let (s, v) = linalg::full_right_svd(&block);
        let smax = s[0];
        let small: Vec<usize> = (0..s.len()).filter(|&i| s[i] < MULTIPLICITY_TOL * smax).collect();
        if small.is_empty() {
            return None;
        }
        let kernel_hat = linalg::select_columns(&v, &small);
        Some(ConjugateEvent {
            t,
            multiplicity: small.len(),
            kernel: &self.from_ortho * kernel_hat,
            sigma_min: s[s.len() - 1],
            isotropic_exists: false,
            strictly_isotropic: false,
        })
    }

    /// Orthonormal basis (orthonormal coordinates) of Ker R_u.
    fn jacobi_kernel_hat(&self) -> DMatrix<f64> {
        let t = linalg::spectral_norm(&self.torsion_hat);
        let floor = 1e-12 * (t * t).max(1.0);
        let r = &self.jacobi_hat;
        let rmax = linalg::spectral_norm(r);
        if rmax <= floor {
            return DMatrix::identity(self.dim(), self.dim());
        }
        linalg::null_space(r, ISOTROPY_TOL, 0.0)
    }

    /// Sets the isotropy flags of an event.
    ///
    /// Isotropic Jacobi fields vanishing at the origin have X'(0) in
    /// (Ker R_u)^⊥ = [𝔨, u]. An isotropic field vanishing at t exists iff the
    /// event kernel meets that space; the event is strictly isotropic iff the
    /// whole kernel lies in it.
    pub fn classify_isotropy(&self, event: &mut ConjugateEvent) {
        let kernel_hat = linalg::orthonormalize(&(&self.to_ortho * &event.kernel), 1e-10);
        let d = kernel_hat.ncols();
        if d == 0 {
            event.isotropic_exists = false;
            event.strictly_isotropic = false;
            return;
        }
        let null_r = self.jacobi_kernel_hat();
        if null_r.ncols() == 0 {
            event.isotropic_exists = true;
            event.strictly_isotropic = true;
            return;
        }
        let m = null_r.transpose() * &kernel_hat;
        let s = linalg::singular_values(&m);
        let smax = s[0];
        event.strictly_isotropic = smax < ISOTROPY_TOL;
        event.isotropic_exists = d > null_r.ncols() || s[s.len() - 1] < ISOTROPY_TOL;
    }

    /// (Ker R_u)^⊥ as an orthonormal basis in 𝔪-coordinates (columns orthonormal in the metric).
    pub fn isotropic_initial_space(&self) -> DMatrix<f64> {
        let null_r = self.jacobi_kernel_hat();
        let n = self.dim();
        let p = DMatrix::identity(n, n) - linalg::projector(&null_r);
        let range = linalg::column_space(&p, 1e-8);
        &self.from_ortho * range
    }
}

/// Extra data selecting a direction within the slope-angle family.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionAux {
    /// Azimuth φ (ℂP^{2m+1}) or first spherical angle φ₁ (Sp-sphere).
    pub phi: f64,
    /// Second spherical angle φ₂ (Sp-sphere).
    pub phi2: f64,
    /// Index α of the horizontal vector, 1 ≤ α ≤ m.
    pub alpha: usize,
    /// Explicit 𝔪₀ coefficients overriding the default vertical vector.
    pub vertical: Option<Vec<f64>>,
}

impl Default for DirectionAux {
    fn default() -> Self {
        Self {
            phi: 0.0,
            phi2: 0.0,
            alpha: 1,
            vertical: None,
        }
    }
}

/// A unit direction u = cos θ·x + sin θ·y with x ∈ 𝔪₀, y ∈ 𝔪₁ unit, and the
/// companion v = cos θ·y − sin θ·x.
#[derive(Debug, Clone)]
pub struct GeodesicDirection {
    pub theta: f64,
    pub u: DVector<f64>,
    pub v: DVector<f64>,
    pub vertical: DVector<f64>,
    pub horizontal: DVector<f64>,
}

/// Angles within 1e−4 outside [0, π/2] are clamped (so that "1.5708" means π/2).
pub fn normalize_theta(theta: f64) -> Result<f64> {
    if !theta.is_finite() || !(-1e-4..=FRAC_PI_2 + 1e-4).contains(&theta) {
        return Err(Error::BadAngle(theta));
    }
    Ok(theta.clamp(0.0, FRAC_PI_2))
}

pub fn geodesic_direction(space: &ReductiveSpace, theta: f64, aux: &DirectionAux) -> Result<GeodesicDirection> {
    let theta = normalize_theta(theta)?;
    if !space.has_split() {
        return Err(Error::MissingSplit);
    }
    let descriptor = space.descriptor().ok_or(Error::MissingSplit)?;
    let m = match *descriptor {
        SpaceDescriptor::Berger { m, .. } | SpaceDescriptor::SpSphere { m, .. } | SpaceDescriptor::CpOdd { m, .. } => m,
        SpaceDescriptor::B13 => 4,
        SpaceDescriptor::W7 { .. } => 2,
        _ => return Err(Error::MissingSplit),
    };
    if aux.alpha == 0 || aux.alpha > m {
        return Err(Error::BadAux(format!("alpha must be in 1..={m}")));
    }
    let a = aux.alpha;
    let m0_dim = space.m_positions(Part::M0)?.len();
    let vertical = match &aux.vertical {
        Some(coeffs) => {
            if coeffs.len() != m0_dim {
                return Err(Error::BadAux(format!("vertical vector needs {m0_dim} coefficients")));
            }
            let mut v = DVector::zeros(space.dim());
            for (i, c) in coeffs.iter().enumerate() {
                v[i] = *c;
            }
            v
        }
        None => match *descriptor {
            SpaceDescriptor::Berger { .. } => space.m_basis("d_s")?,
            SpaceDescriptor::SpSphere { .. } => {
                let (p1, p2) = (aux.phi, aux.phi2);
                space.m_vector(&[
                    ("d_1s", p1.sin() * p2.cos()),
                    ("d_2s", p1.sin() * p2.sin()),
                    ("d_3s", p1.cos()),
                ])?
            }
            SpaceDescriptor::CpOdd { .. } => space.m_vector(&[("X_2", aux.phi.cos()), ("X_3", aux.phi.sin())])?,
            SpaceDescriptor::B13 => space.m_basis("u_1")?,
            SpaceDescriptor::W7 { .. } => space.m_basis("u_1s")?,
            _ => unreachable!(),
        },
    };
    let horizontal = match *descriptor {
        SpaceDescriptor::SpSphere { .. } | SpaceDescriptor::CpOdd { .. } => space.m_basis(&format!("Y_{a}"))?,
        _ => space.m_basis(&format!("e_{a}"))?,
    };
    let x = space.normalize_m(&vertical)?;
    let y = space.normalize_m(&horizontal)?;
    let (c, s) = (theta.cos(), theta.sin());
    let u = &x * c + &y * s;
    let v = &y * c - &x * s;
    Ok(GeodesicDirection {
        theta,
        u,
        v,
        vertical: x,
        horizontal: y,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn berger(m: usize, s: f64) -> ReductiveSpace {
        SpaceDescriptor::Berger { m, s, kappa: 1.0 }.build().unwrap()
    }

    #[test]
    fn block_at_zero_and_small_t() {
        let space = berger(2, 0.5);
        let dir = geodesic_direction(&space, 0.7, &DirectionAux::default()).unwrap();
        let sys = JacobiSystem::new(&space, &dir.u).unwrap();
        assert!(sys.fundamental_block(0.0).amax() < 1e-15);
        let t = 1e-4;
        let j = sys.fundamental_block(t) / t;
        assert!((j - DMatrix::identity(5, 5)).amax() < 1e-3);
    }

    #[test]
    fn round_three_sphere_conjugate_at_multiples_of_pi() {
        let space = berger(1, 1.0);
        let u = space.m_vector(&[("d_s", 0.3), ("e_1", 0.8), ("f_1", -0.5)]).unwrap();
        let sys = JacobiSystem::new(&space, &u).unwrap();
        let events = sys.scan_and_classify(ScanOptions::new(7.0)).unwrap();
        assert_eq!(events.len(), 2);
        for (p, e) in events.iter().enumerate() {
            assert!((e.t - (p + 1) as f64 * PI).abs() < 1e-7);
            assert_eq!(e.multiplicity, 2);
            // SU(2) acting on itself has trivial isotropy.
            assert!(!e.isotropic_exists);
        }
    }

    #[test]
    fn coarse_step_is_refused() {
        let space = berger(2, 0.5);
        let sys = JacobiSystem::new(&space, &space.m_basis("e_1").unwrap()).unwrap();
        let err = sys
            .scan_conjugate_times(ScanOptions { t_max: 5.0, step: Some(1.0) })
            .unwrap_err();
        assert!(matches!(err, Error::StepTooCoarse { .. }));
    }

    #[test]
    fn short_window_has_no_events() {
        let space = berger(2, 0.5);
        let sys = JacobiSystem::new(&space, &space.m_basis("e_1").unwrap()).unwrap();
        assert!(sys.scan_conjugate_times(ScanOptions::new(0.1)).unwrap().is_empty());
    }

    #[test]
    fn zero_direction_is_refused() {
        let space = berger(1, 0.5);
        let err = JacobiSystem::new(&space, &DVector::zeros(3)).unwrap_err();
        assert!(matches!(err, Error::ZeroVector));
    }

    #[test]
    fn angle_and_aux_validation() {
        let space = berger(2, 0.5);
        assert!(matches!(
            geodesic_direction(&space, 2.0, &DirectionAux::default()),
            Err(Error::BadAngle(_))
        ));
        let aux = DirectionAux {
            alpha: 3,
            ..Default::default()
        };
        assert!(matches!(geodesic_direction(&space, 0.5, &aux), Err(Error::BadAux(_))));
        // A typed-in π/2 is clamped to the exact value.
        #[allow(clippy::approx_constant)]
        let dir = geodesic_direction(&space, 1.5708, &DirectionAux::default()).unwrap();
        assert_eq!(dir.theta, FRAC_PI_2);
    }

    #[test]
    fn slope_angle_is_recovered() {
        let space = SpaceDescriptor::CpOdd { m: 1, kappa: 2.0 }.build().unwrap();
        let aux = DirectionAux {
            phi: 0.4,
            ..Default::default()
        };
        let dir = geodesic_direction(&space, 0.3, &aux).unwrap();
        assert!((space.norm_m(&dir.u) - 1.0).abs() < 1e-14);
        assert!(space.inner_m(&dir.u, &dir.v).abs() < 1e-14);
        let r = space.m_positions(Part::M0).unwrap();
        let mut vert = DVector::zeros(space.dim());
        vert.rows_mut(r.start, r.len()).copy_from(&dir.u.rows(r.start, r.len()));
        let cos = space.norm_m(&vert);
        assert!((cos.acos() - 0.3).abs() < 1e-12);
    }
}
