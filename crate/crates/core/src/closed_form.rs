//! Closed-form conjugate times for geodesics γ(t) = exp(tu)·o along which an
//! orthonormal pair (u, v) spans a plane invariant under the Jacobi operator.
//!
//! With λ = ⟨[[u,v],u]_𝔪, v⟩:
//! * [u,v]_𝔪 = 0: conjugate points at pπ/√λ, all isotropic;
//! * [u,v] ∈ 𝔪 and ρ = ‖[u,[u,v]/√λ]_𝔨‖² = 0: points at 2pπ/√λ, not strictly isotropic;
//! * ρ > 0: points at s/√(λ+ρ) with tan(s/2) = −ρs/(2λ) (not strictly isotropic)
//!   and at 2pπ/√(λ+ρ) (isotropic).

use std::f64::consts::PI;

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::homogeneous::{Part, ReductiveSpace};
use crate::jacobi::{ConjugateEvent, JacobiSystem, ScanOptions};

const HYPOTHESIS_TOL: f64 = 1e-9;
/// Scan events must lie this close to a predicted time.
pub const MATCH_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// [u,v]_𝔪 = 0.
    CommutingM,
    /// [u,v] ∈ 𝔪, ρ = 0.
    RhoZero,
    /// [u,v] ∈ 𝔪, ρ > 0.
    RhoPositive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeClass {
    Isotropic,
    NotStrictlyIsotropic,
}

impl TimeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            TimeClass::Isotropic => "isotropic",
            TimeClass::NotStrictlyIsotropic => "not_strictly_isotropic",
        }
    }

    /// Whether a classified scan event is compatible with this prediction.
    pub fn admits(self, event: &ConjugateEvent) -> bool {
        match self {
            TimeClass::Isotropic => event.isotropic_exists,
            TimeClass::NotStrictlyIsotropic => !event.strictly_isotropic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// pπ/√λ.
    Commuting,
    /// 2pπ/√λ.
    DoublePeriod,
    /// s/√(λ+ρ), tan(s/2) = −ρs/(2λ).
    Tangent,
    /// 2pπ/√(λ+ρ).
    DoublePeriodShifted,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CpData {
    pub lambda: f64,
    pub rho: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ClosedFormTime {
    pub t: f64,
    pub class: TimeClass,
    pub family: Family,
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Computes (λ, ρ) and the branch for an orthonormal pair u, v ∈ 𝔪 (𝔪-coordinates),
/// verifying every hypothesis the closed form relies on.
pub fn extract_cp_data(space: &ReductiveSpace, u: &DVector<f64>, v: &DVector<f64>) -> Result<CpData> {
    let violated = |msg: String| Err(Error::HypothesisViolated(msg));
    let uu = space.inner_m(u, u);
    let vv = space.inner_m(v, v);
    let uv = space.inner_m(u, v);
    if (uu - 1.0).abs() > HYPOTHESIS_TOL || (vv - 1.0).abs() > HYPOTHESIS_TOL || uv.abs() > HYPOTHESIS_TOL {
        return violated(format!("u, v not orthonormal (|u|²={uu:.3e}, |v|²={vv:.3e}, ⟨u,v⟩={uv:.3e})"));
    }
    let fu = space.embed(u);
    let fv = space.embed(v);
    let b = space.bracket(&fu, &fv);
    let bm = space.project(&b, Part::M)?;
    let bk = space.project(&b, Part::K)?;
    let c = space.project(&space.bracket(&b, &fu), Part::M)?;
    let lambda = space.inner(&c, &fv);
    if !(lambda > HYPOTHESIS_TOL) {
        return violated(format!("λ = {lambda:.3e} is not positive"));
    }
    let resid = space.norm(&(&c - &fv * lambda));
    if resid > HYPOTHESIS_TOL * lambda.max(1.0) {
        return violated(format!("[[u,v],u]_𝔪 is not a multiple of v (residual {resid:.3e})"));
    }
    let bm_norm = space.norm(&bm);
    if bm_norm < HYPOTHESIS_TOL {
        return Ok(CpData {
            lambda,
            rho: 0.0,
            branch: Branch::CommutingM,
        });
    }
    let bk_norm = space.norm(&bk);
    if bk_norm > HYPOTHESIS_TOL {
        return violated(format!("[u,v] has 𝔨-component of norm {bk_norm:.3e} and 𝔪-component of norm {bm_norm:.3e}"));
    }
    let b_sq = space.inner(&b, &b);
    if rel_err(b_sq, lambda) > HYPOTHESIS_TOL {
        return violated(format!("‖[u,v]‖² = {b_sq} differs from λ = {lambda}"));
    }
    let w = &b / lambda.sqrt();
    let uw_k = space.project(&space.bracket(&fu, &w), Part::K)?;
    let rho = space.inner(&uw_k, &uw_k);
    // [[u,[u,v]]_𝔨, u] = ρ[u,v] keeps the plane span{v, [u,v]} invariant.
    let uub_k = space.project(&space.bracket(&fu, &b), Part::K)?;
    let lhs = space.bracket(&uub_k, &fu);
    let resid = space.norm(&(&lhs - &b * rho));
    if resid > HYPOTHESIS_TOL * rho.max(1.0) {
        return violated(format!("[[u,[u,v]]_𝔨,u] ≠ ρ[u,v] (residual {resid:.3e})"));
    }
    let branch = if rho <= 1e-12 * lambda { Branch::RhoZero } else { Branch::RhoPositive };
    Ok(CpData {
        lambda,
        rho: if branch == Branch::RhoZero { 0.0 } else { rho },
        branch,
    })
}

/// The k-th positive root (k ≥ 1) of tan(s/2) = μs for μ < 0. It lies in
/// ](2k−1)π, 2kπ[; the first one is in ]π, 2π[.
pub fn tan_root(mu: f64, k: usize) -> Result<f64> {
    if !(mu < 0.0 && mu.is_finite()) {
        return Err(Error::BadParams(format!("tan-family slope must be negative, got {mu}")));
    }
    if k == 0 {
        return Err(Error::BadParams("root index starts at 1".into()));
    }
    // With x = s/2 the equation becomes h(x) = sin x − 2μx·cos x = 0, which has
    // no poles and changes sign exactly once on [(k − ½)π, kπ].
    let h = |x: f64| x.sin() - 2.0 * mu * x * x.cos();
    let mut a = (k as f64 - 0.5) * PI;
    let mut b = k as f64 * PI;
    let mut ha = h(a);
    let hb = h(b);
    if ha == 0.0 {
        return Ok(2.0 * a);
    }
    if ha.signum() == hb.signum() {
        return Err(Error::BadParams(format!("no sign change for μ = {mu}, k = {k}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let hm = h(mid);
        if hm == 0.0 {
            return Ok(2.0 * mid);
        }
        if hm.signum() == ha.signum() {
            a = mid;
            ha = hm;
        } else {
            b = mid;
        }
    }
    Ok(a + b)
}

/// All roots of tan(s/2) = μs with 0 < s ≤ s_max, in increasing order.
pub fn solve_tan_family(mu: f64, s_max: f64) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let mut k = 1;
    while (2.0 * k as f64 - 1.0) * PI < s_max {
        let s = tan_root(mu, k)?;
        if s <= s_max {
            out.push(s);
        }
        k += 1;
    }
    Ok(out)
}

/// Predicted conjugate times in ]0, t_max], sorted.
pub fn closed_form_times(data: &CpData, t_max: f64) -> Result<Vec<ClosedFormTime>> {
    let mut out = Vec::new();
    let mut push_multiples = |period: f64, class: TimeClass, family: Family| {
        let mut p = 1;
        while p as f64 * period <= t_max {
            out.push(ClosedFormTime {
                t: p as f64 * period,
                class,
                family,
            });
            p += 1;
        }
    };
    match data.branch {
        Branch::CommutingM => push_multiples(PI / data.lambda.sqrt(), TimeClass::Isotropic, Family::Commuting),
        Branch::RhoZero => push_multiples(
            2.0 * PI / data.lambda.sqrt(),
            TimeClass::NotStrictlyIsotropic,
            Family::DoublePeriod,
        ),
        Branch::RhoPositive => {
            let omega = (data.lambda + data.rho).sqrt();
            push_multiples(2.0 * PI / omega, TimeClass::Isotropic, Family::DoublePeriodShifted);
            let mu = -data.rho / (2.0 * data.lambda);
            for s in solve_tan_family(mu, t_max * omega)? {
                out.push(ClosedFormTime {
                    t: s / omega,
                    class: TimeClass::NotStrictlyIsotropic,
                    family: Family::Tangent,
                });
            }
        }
    }
    out.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScannedEvent {
    pub t: f64,
    pub mult: usize,
    pub isotropic_exists: bool,
    pub strictly_isotropic: bool,
    pub matched: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PredictionCheck {
    pub t: f64,
    pub class: TimeClass,
    pub family: Family,
    /// Time of the matching scan event, if any.
    pub scanned_t: Option<f64>,
    pub class_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossValidation {
    pub data: CpData,
    pub closed_form: Vec<PredictionCheck>,
    pub scanned: Vec<ScannedEvent>,
    pub matched: bool,
}

impl CrossValidation {
    pub fn into_result(self) -> Result<Self> {
        if let Some(p) = self
            .closed_form
            .iter()
            .find(|p| p.scanned_t.is_none() || !p.class_ok)
        {
            return Err(Error::Mismatch {
                t: p.t,
                class: p.class.as_str().to_string(),
            });
        }
        Ok(self)
    }
}

/// Compares closed-form predictions against an already classified scan.
pub fn compare(data: CpData, predictions: &[ClosedFormTime], events: &[ConjugateEvent]) -> CrossValidation {
    let mut used = vec![false; events.len()];
    let closed_form: Vec<PredictionCheck> = predictions
        .iter()
        .map(|p| {
            let hit = events
                .iter()
                .enumerate()
                .filter(|(_, e)| (e.t - p.t).abs() < MATCH_TOL)
                .min_by(|a, b| (a.1.t - p.t).abs().total_cmp(&(b.1.t - p.t).abs()));
            match hit {
                Some((i, e)) => {
                    used[i] = true;
                    PredictionCheck {
                        t: p.t,
                        class: p.class,
                        family: p.family,
                        scanned_t: Some(e.t),
                        class_ok: p.class.admits(e),
                    }
                }
                None => PredictionCheck {
                    t: p.t,
                    class: p.class,
                    family: p.family,
                    scanned_t: None,
                    class_ok: false,
                },
            }
        })
        .collect();
    let scanned = events
        .iter()
        .zip(used)
        .map(|(e, matched)| ScannedEvent {
            t: e.t,
            mult: e.multiplicity,
            isotropic_exists: e.isotropic_exists,
            strictly_isotropic: e.strictly_isotropic,
            matched,
        })
        .collect();
    let matched = closed_form.iter().all(|p| p.scanned_t.is_some() && p.class_ok);
    CrossValidation {
        data,
        closed_form,
        scanned,
        matched,
    }
}

/// Runs the closed form and an independent scan along u and reports agreement
/// without failing on mismatches.
pub fn cross_validate_report(
    space: &ReductiveSpace,
    u: &DVector<f64>,
    v: &DVector<f64>,
    t_max: f64,
) -> Result<CrossValidation> {
    let data = extract_cp_data(space, u, v)?;
    let predictions = closed_form_times(&data, t_max)?;
    let system = JacobiSystem::new(space, u)?;
    let events = system.scan_and_classify(ScanOptions::new(t_max))?;
    Ok(compare(data, &predictions, &events))
}

/// Like [`cross_validate_report`], failing with `Mismatch` when a prediction is
/// missing from the scan or carries an incompatible isotropy class.
pub fn cross_validate(space: &ReductiveSpace, u: &DVector<f64>, v: &DVector<f64>, t_max: f64) -> Result<CrossValidation> {
    cross_validate_report(space, u, v, t_max)?.into_result()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_root_of_tan_x_equals_minus_x() {
        // tan(s/2) = −s/2, i.e. tan x = −x with x ≈ 2.028757838.
        let s = tan_root(-0.5, 1).unwrap();
        assert!((s / 2.0 - 2.028_757_838_110_434_5).abs() < 1e-10);
        assert!(((s / 2.0).tan() + s / 2.0).abs() < 1e-9);
    }

    #[test]
    fn roots_lie_in_expected_branches() {
        for &mu in &[-1e-6, -0.01, -0.3, -2.0, -50.0, -1e4] {
            let roots = solve_tan_family(mu, 40.0).unwrap();
            for (k, s) in roots.iter().enumerate() {
                let k = (k + 1) as f64;
                assert!(*s > (2.0 * k - 1.0) * PI && *s < 2.0 * k * PI, "mu={mu} s={s}");
            }
        }
    }

    #[test]
    fn non_negative_slope_is_rejected() {
        assert!(tan_root(0.0, 1).is_err());
        assert!(tan_root(0.5, 1).is_err());
        assert!(tan_root(-1.0, 0).is_err());
    }

    #[test]
    fn families_stay_separated_for_small_rho() {
        let data = CpData {
            lambda: 3.0,
            rho: 1e-4,
            branch: Branch::RhoPositive,
        };
        let times = closed_form_times(&data, 30.0).unwrap();
        for w in times.windows(2) {
            assert!(w[1].t - w[0].t > 1e-6);
        }
    }
}
