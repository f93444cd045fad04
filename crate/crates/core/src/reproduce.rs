//! Batch sweeps comparing three things per grid cell: the published formulas for
//! conjugate times and (λ, ρ), the closed-form solver, and the ODE scan.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use serde::Serialize;

use crate::catalog::{symmetric_conjugate_times, SpaceDescriptor, S_GRID};
use crate::closed_form::{self, CrossValidation, Family, MATCH_TOL};
use crate::error::{Error, Result};
use crate::homogeneous::ReductiveSpace;
use crate::jacobi::{geodesic_direction, ConjugateEvent, DirectionAux, JacobiSystem, ScanOptions};
use crate::par::{self, Execution};
use crate::pinching::{estimate_pinching, PinchingOptions};
use crate::report::{csv_field, fmt_num, params_string, sig12};

pub const THETA_GRID: [f64; 5] = [0.0, FRAC_PI_8, FRAC_PI_4, 3.0 * FRAC_PI_8, FRAC_PI_2];

/// Relative tolerance for (λ, ρ) and for formula times against the closed form.
const FORMULA_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Conj,
    ConjB13,
    ConjW7,
    Cimp1,
    PinchingTable,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Conj, Suite::ConjB13, Suite::ConjW7, Suite::Cimp1, Suite::PinchingTable];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Conj => "conj",
            Suite::ConjB13 => "conjB13",
            Suite::ConjW7 => "conjW7",
            Suite::Cimp1 => "cimp1",
            Suite::PinchingTable => "pinching-table",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Parse {
                input: s.to_string(),
                reason: "expected conj, conjB13, conjW7, cimp1 or pinching-table".into(),
            })
    }
}

/// One cell of the pass/fail matrix.
#[derive(Debug, Clone, Serialize)]
pub struct ReproRow {
    pub suite: String,
    pub space: String,
    pub params: String,
    pub theta: f64,
    pub quantity: String,
    pub expected: f64,
    pub observed: f64,
    pub pass: bool,
    /// Informational rows are reported but do not affect the overall verdict.
    pub gating: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproReport {
    pub suite: String,
    pub rows: Vec<ReproRow>,
    pub pass: bool,
}

impl ReproReport {
    fn new(suite: Suite, rows: Vec<ReproRow>) -> Self {
        let pass = rows.iter().all(|r| r.pass || !r.gating);
        Self {
            suite: suite.name().to_string(),
            rows,
            pass,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReproRow> {
        self.rows.iter().filter(|r| r.gating && !r.pass)
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("suite,space,params,theta,quantity,expected,observed,pass,gating\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.suite,
                csv_field(&r.space),
                r.params,
                fmt_num(r.theta),
                csv_field(&r.quantity),
                fmt_num(r.expected),
                fmt_num(r.observed),
                r.pass,
                r.gating
            ));
        }
        out
    }
}

struct Cell<'a> {
    suite: Suite,
    space: &'a ReductiveSpace,
    theta: f64,
    rows: Vec<ReproRow>,
}

impl<'a> Cell<'a> {
    fn new(suite: Suite, space: &'a ReductiveSpace, theta: f64) -> Self {
        Self {
            suite,
            space,
            theta,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, quantity: impl Into<String>, expected: f64, observed: f64, pass: bool, gating: bool) {
        self.rows.push(ReproRow {
            suite: self.suite.name().to_string(),
            space: self.space.name().to_string(),
            params: params_string(self.space.params()),
            theta: sig12(self.theta),
            quantity: quantity.into(),
            expected: sig12(expected),
            observed: sig12(observed),
            pass,
            gating,
        });
    }

    fn relative(&mut self, quantity: &str, expected: f64, observed: f64) {
        let pass = (expected - observed).abs() <= FORMULA_TOL * expected.abs().max(1.0);
        self.push(quantity, expected, observed, pass, true);
    }

    fn error(&mut self, quantity: &str, err: &Error) {
        self.push(format!("{quantity}: {err}"), f64::NAN, f64::NAN, false, true);
    }

    /// Every closed-form time must appear in the scan with a compatible class.
    fn scan_rows(&mut self, cv: &CrossValidation) {
        for p in &cv.closed_form {
            let name = format!("scan[{}:{}]", family_name(p.family), p.class.as_str());
            self.push(name, p.t, p.scanned_t.unwrap_or(f64::NAN), p.scanned_t.is_some() && p.class_ok, true);
        }
    }

    /// Formula times must coincide with closed-form times of the given family.
    fn formula_rows(&mut self, label: &str, times: &[f64], cv: &CrossValidation, family: Family) {
        for &t in times {
            let nearest = cv
                .closed_form
                .iter()
                .filter(|p| p.family == family)
                .map(|p| p.t)
                .min_by(|a, b| (a - t).abs().total_cmp(&(b - t).abs()))
                .unwrap_or(f64::NAN);
            let pass = (nearest - t).abs() <= FORMULA_TOL * t.max(1.0);
            self.push(label, t, nearest, pass, true);
        }
    }

    /// Looks up the scan event at time t and checks a predicate on it.
    fn event_rows(
        &mut self,
        label: &str,
        times: &[f64],
        events: &[ConjugateEvent],
        gating: bool,
        ok: impl Fn(&ConjugateEvent) -> bool,
    ) {
        for &t in times {
            let hit = events.iter().find(|e| (e.t - t).abs() < MATCH_TOL);
            let pass = hit.is_some_and(&ok);
            self.push(label, t, hit.map_or(f64::NAN, |e| e.t), pass, gating);
        }
    }

    /// Fibration consistency: isotropic events of a horizontal geodesic occur at
    /// conjugate times of the symmetric base.
    fn base_rows(&mut self, cv: &CrossValidation, t_max: f64) {
        let Some(base) = self.space.descriptor().and_then(|d| d.fibration_base()) else {
            return;
        };
        let base_times = symmetric_conjugate_times(base, t_max + 1.0);
        for e in cv.scanned.iter().filter(|e| e.isotropic_exists) {
            let nearest = base_times
                .iter()
                .copied()
                .min_by(|a, b| (a - e.t).abs().total_cmp(&(b - e.t).abs()))
                .unwrap_or(f64::NAN);
            self.push("isotropic_at_base_time", nearest, e.t, (nearest - e.t).abs() < MATCH_TOL, true);
        }
    }

    /// Horizontal tan-family events carry no isotropic Jacobi field.
    fn horizontal_rows(&mut self, cv: &CrossValidation) {
        for p in cv.closed_form.iter().filter(|p| p.family == Family::Tangent) {
            let event = p
                .scanned_t
                .and_then(|t| cv.scanned.iter().find(|e| e.t == t));
            let pass = event.is_some_and(|e| !e.isotropic_exists);
            self.push("horizontal_not_isotropic", p.t, p.scanned_t.unwrap_or(f64::NAN), pass, true);
        }
    }
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Commuting => "commuting",
        Family::DoublePeriod => "double_period",
        Family::Tangent => "tangent",
        Family::DoublePeriodShifted => "double_period_shifted",
    }
}

fn multiples(period: f64, t_max: f64) -> Vec<f64> {
    (1..).map(|p| p as f64 * period).take_while(|&t| t <= t_max).collect()
}

/// Published tangent family: t = s / ω with tan(s/2) = μs.
fn tangent_times(mu: f64, omega: f64, t_max: f64) -> Result<Vec<f64>> {
    if mu > -1e-12 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for k in 1.. {
        let s = closed_form::tan_root(mu, k)?;
        if s / omega > t_max {
            break;
        }
        out.push(s / omega);
    }
    Ok(out)
}

/// Scan window covering a little more than two periods of the slowest family.
fn window(lambda: f64, rho: f64) -> f64 {
    2.2 * 2.0 * PI / (lambda + rho).sqrt()
}

struct CellRun {
    cv: CrossValidation,
    events: Vec<ConjugateEvent>,
    t_max: f64,
}

fn run_pair(space: &ReductiveSpace, u: &DVector<f64>, v: &DVector<f64>, t_max: f64) -> Result<CellRun> {
    let data = closed_form::extract_cp_data(space, u, v)?;
    let predictions = closed_form::closed_form_times(&data, t_max)?;
    let system = JacobiSystem::new(space, u)?;
    // Scan past the last prediction so that events at the window edge are resolved.
    let events = system.scan_and_classify(ScanOptions::new(1.02 * t_max + 0.1))?;
    let cv = closed_form::compare(data, &predictions, &events);
    Ok(CellRun {
        cv,
        events,
        t_max,
    })
}

/// Builds (u, v) for slope angle θ and scans long enough for the expected (λ, ρ).
fn run_theta(space: &ReductiveSpace, theta: f64, lambda: f64, rho: f64, extra: f64) -> Result<CellRun> {
    let dir = geodesic_direction(space, theta, &DirectionAux::default())?;
    run_pair(space, &dir.u, &dir.v, window(lambda, rho).max(extra))
}

/// Rows shared by all slope-angle suites: (λ, ρ), scan agreement, horizontal checks.
fn common_rows(cell: &mut Cell, run: &CellRun, lambda: f64, rho: f64) {
    cell.relative("lambda", lambda, run.cv.data.lambda);
    cell.relative("rho", rho, run.cv.data.rho);
    cell.scan_rows(&run.cv);
    if cell.theta == FRAC_PI_2 {
        cell.horizontal_rows(&run.cv);
        cell.base_rows(&run.cv, run.t_max);
    }
}

fn sphere_cell(d: SpaceDescriptor, theta: f64) -> Result<Vec<ReproRow>> {
    let space = d.build()?;
    let mut cell = Cell::new(Suite::Conj, &space, theta);
    let (kappa, tau, m) = match d {
        SpaceDescriptor::Berger { m, s, kappa } => (kappa, kappa * s * (m as f64 + 1.0) / (2.0 * m as f64), m),
        SpaceDescriptor::SpSphere { m, s, kappa } => (kappa, kappa * s / 2.0, m),
        SpaceDescriptor::CpOdd { m, kappa } => (kappa, kappa / 2.0, m),
        _ => unreachable!("not a slope-angle sphere"),
    };
    let sin2 = theta.sin().powi(2);
    let lambda = 4.0 * tau;
    let rho = 4.0 * (kappa - tau) * sin2;
    let run = match run_theta(&space, theta, lambda, rho, 0.0) {
        Ok(r) => r,
        Err(e) => {
            cell.error("closed_form", &e);
            return Ok(cell.rows);
        }
    };
    common_rows(&mut cell, &run, lambda, rho);
    let t_max = run.t_max;
    if theta == 0.0 {
        let times = multiples(PI / tau.sqrt(), t_max);
        let family = if run.cv.data.branch == closed_form::Branch::RhoZero {
            Family::DoublePeriod
        } else {
            Family::Commuting
        };
        cell.formula_rows("vertical_time", &times, &run.cv, family);
        cell.event_rows("vertical_not_strict", &times, &run.events, true, |e| !e.strictly_isotropic);
        if matches!(d, SpaceDescriptor::Berger { .. }) {
            cell.event_rows("vertical_not_isotropic", &times, &run.events, true, |e| !e.isotropic_exists);
            let all: Vec<f64> = run.events.iter().map(|e| e.t).collect();
            cell.event_rows(
                &format!("vertical_multiplicity_{}", 2 * m),
                &all,
                &run.events,
                true,
                |e| e.multiplicity == 2 * m,
            );
        }
    } else {
        let omega2 = 2.0 * (kappa * sin2 + tau * (1.0 - sin2)).sqrt();
        let mu = (tau - kappa) * sin2 / (2.0 * tau);
        match tangent_times(mu, omega2, t_max) {
            Ok(times) => cell.formula_rows("tangent_time", &times, &run.cv, Family::Tangent),
            Err(e) => cell.error("tangent_time", &e),
        }
        let family = if run.cv.data.branch == closed_form::Branch::RhoZero {
            Family::DoublePeriod
        } else {
            Family::DoublePeriodShifted
        };
        let iso = multiples(2.0 * PI / omega2, t_max);
        cell.formula_rows("isotropic_time", &iso, &run.cv, family);
        if run.cv.data.branch == closed_form::Branch::RhoPositive {
            cell.event_rows("isotropic_event", &iso, &run.events, true, |e| e.isotropic_exists);
        }
    }
    Ok(cell.rows)
}

fn b13_cell(theta: f64) -> Result<Vec<ReproRow>> {
    let space = SpaceDescriptor::B13.build()?;
    let mut cell = Cell::new(Suite::ConjB13, &space, theta);
    let sin2 = theta.sin().powi(2);
    let (lambda, rho) = (1.0, sin2);
    let run = match run_theta(&space, theta, lambda, rho, 0.0) {
        Ok(r) => r,
        Err(e) => {
            cell.error("closed_form", &e);
            return Ok(cell.rows);
        }
    };
    common_rows(&mut cell, &run, lambda, rho);
    let t_max = run.t_max;
    if theta == 0.0 {
        let halves = multiples(FRAC_PI_2, t_max);
        cell.event_rows("vertical_isotropic", &halves, &run.events, true, |e| e.isotropic_exists);
        let (even, odd): (Vec<f64>, Vec<f64>) = multiples(2.0 * PI, t_max)
            .into_iter()
            .map(|t| (t, t - PI))
            .unzip();
        cell.event_rows("vertical_not_strict", &even, &run.events, true, |e| !e.strictly_isotropic);
        // At odd multiples of π the scan finds only isotropic Jacobi fields.
        cell.event_rows("vertical_not_strict", &odd, &run.events, false, |e| !e.strictly_isotropic);
    } else {
        let omega = (1.0 + sin2).sqrt();
        match tangent_times(-sin2 / 2.0, omega, t_max) {
            Ok(times) => cell.formula_rows("tangent_time", &times, &run.cv, Family::Tangent),
            Err(e) => cell.error("tangent_time", &e),
        }
        let iso = multiples(2.0 * PI / omega, t_max);
        cell.formula_rows("isotropic_time", &iso, &run.cv, Family::DoublePeriodShifted);
    }
    Ok(cell.rows)
}

fn w7_cell(s: f64, theta: f64) -> Result<Vec<ReproRow>> {
    let space = SpaceDescriptor::W7 { s }.build()?;
    let mut cell = Cell::new(Suite::ConjW7, &space, theta);
    let sin2 = theta.sin().powi(2);
    let (lambda, rho) = (s / (1.0 + s), sin2 / (1.0 + s));
    let run = match run_theta(&space, theta, lambda, rho, 0.0) {
        Ok(r) => r,
        Err(e) => {
            cell.error("closed_form", &e);
            return Ok(cell.rows);
        }
    };
    common_rows(&mut cell, &run, lambda, rho);
    let t_max = run.t_max;
    if theta == 0.0 {
        let iso = multiples(2.0 * (s / (1.0 + s)).sqrt() * PI, t_max);
        cell.event_rows("vertical_isotropic", &iso, &run.events, true, |e| e.isotropic_exists);
        let non_strict = multiples(2.0 * ((1.0 + s) / s).sqrt() * PI, t_max);
        cell.formula_rows("vertical_time", &non_strict, &run.cv, Family::DoublePeriod);
        cell.event_rows("vertical_not_strict", &non_strict, &run.events, true, |e| !e.strictly_isotropic);
    } else {
        let omega = ((s + sin2) / (1.0 + s)).sqrt();
        match tangent_times(-sin2 / (2.0 * s), omega, t_max) {
            Ok(times) => cell.formula_rows("tangent_time", &times, &run.cv, Family::Tangent),
            Err(e) => cell.error("tangent_time", &e),
        }
        let iso = multiples(2.0 * PI / omega, t_max);
        cell.formula_rows("isotropic_time", &iso, &run.cv, Family::DoublePeriodShifted);
    }
    Ok(cell.rows)
}

fn cimp1_cell(m: usize, kappa: f64) -> Result<Vec<ReproRow>> {
    let space = SpaceDescriptor::CpOdd { m, kappa }.build()?;
    let mut cell = Cell::new(Suite::Cimp1, &space, 0.0);
    let x2 = space.normalize_m(&space.m_basis("X_2")?)?;
    let x3 = space.normalize_m(&space.m_basis("X_3")?)?;
    let y = space.normalize_m(&space.m_basis("Y_1")?)?;
    let slow = 2.0_f64.sqrt() * (2.0 * kappa).sqrt() * PI / kappa;
    let t_max = 2.2 * slow;

    match run_pair(&space, &x2, &x3, t_max) {
        Ok(run) => {
            cell.relative("lambda_vertical_pair", 8.0 * kappa, run.cv.data.lambda);
            cell.scan_rows(&run.cv);
            let iso = multiples((2.0 * kappa).sqrt() * PI / (4.0 * kappa), t_max);
            cell.formula_rows("isotropic_time", &iso, &run.cv, Family::Commuting);
            cell.event_rows("isotropic_event", &iso, &run.events, true, |e| e.isotropic_exists);
        }
        Err(e) => cell.error("vertical_pair", &e),
    }
    match run_pair(&space, &x2, &y, t_max) {
        Ok(run) => {
            cell.relative("lambda_mixed_pair", 2.0 * kappa, run.cv.data.lambda);
            cell.relative("rho_mixed_pair", 0.0, run.cv.data.rho);
            cell.scan_rows(&run.cv);
            let ns = multiples((2.0 * kappa).sqrt() * PI / kappa, t_max);
            cell.formula_rows("not_strict_time", &ns, &run.cv, Family::DoublePeriod);
            cell.event_rows("isotropic_not_strict_event", &ns, &run.events, true, |e| {
                e.isotropic_exists && !e.strictly_isotropic
            });
        }
        Err(e) => cell.error("mixed_pair", &e),
    }
    Ok(cell.rows)
}

fn pinching_rows(opts: &PinchingOptions) -> Result<Vec<ReproRow>> {
    let mut descriptors = Vec::new();
    for m in [1, 2] {
        for s in S_GRID {
            descriptors.push(SpaceDescriptor::Berger { m, s, kappa: 1.0 });
        }
    }
    for s in S_GRID {
        descriptors.push(SpaceDescriptor::SpSphere { m: 1, s, kappa: 1.0 });
    }
    descriptors.push(SpaceDescriptor::CpOdd { m: 1, kappa: 1.0 });
    let mut rows = Vec::new();
    for d in descriptors {
        let space = d.build()?;
        let report = estimate_pinching(&space, opts)?;
        let formula = d.pinching_formula().expect("formula");
        let mut cell = Cell::new(Suite::PinchingTable, &space, 0.0);
        let rel = (report.delta - formula).abs() / formula;
        let round = matches!(d, SpaceDescriptor::Berger { m: 1, s, .. } if s == 1.0);
        let tol = if round { 1e-6 } else { 1e-2 };
        cell.push("delta", formula, report.delta, rel <= tol, true);
        cell.push("converged", 1.0, if report.converged { 1.0 } else { 0.0 }, report.converged, true);
        rows.extend(cell.rows);
    }
    Ok(rows)
}

/// Runs a suite over its full parameter grid. Cells run in parallel; row order is fixed.
pub fn reproduce(suite: Suite, exec: Execution, pinching: &PinchingOptions) -> Result<ReproReport> {
    let cells: Vec<Result<Vec<ReproRow>>> = match suite {
        Suite::Conj => {
            let mut ds = Vec::new();
            for m in [1, 2] {
                for s in S_GRID {
                    ds.push(SpaceDescriptor::Berger { m, s, kappa: 1.0 });
                }
                for s in S_GRID {
                    ds.push(SpaceDescriptor::SpSphere { m, s, kappa: 1.0 });
                }
                ds.push(SpaceDescriptor::CpOdd { m, kappa: 1.0 });
            }
            let jobs: Vec<(SpaceDescriptor, f64)> =
                ds.iter().flat_map(|&d| THETA_GRID.map(|t| (d, t))).collect();
            par::map_slice(&jobs, exec, |&(d, t)| sphere_cell(d, t))
        }
        Suite::ConjB13 => par::map_slice(&THETA_GRID, exec, |&t| b13_cell(t)),
        Suite::ConjW7 => {
            let jobs: Vec<(f64, f64)> = S_GRID.iter().flat_map(|&s| THETA_GRID.map(|t| (s, t))).collect();
            par::map_slice(&jobs, exec, |&(s, t)| w7_cell(s, t))
        }
        Suite::Cimp1 => {
            let jobs = [(1, 1.0), (2, 1.0), (1, 2.0)];
            par::map_slice(&jobs, exec, |&(m, k)| cimp1_cell(m, k))
        }
        Suite::PinchingTable => vec![pinching_rows(pinching)],
    };
    let mut rows = Vec::new();
    for c in cells {
        rows.extend(c?);
    }
    Ok(ReproReport::new(suite, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("conj13".parse::<Suite>().is_err());
    }

    #[test]
    fn berger_vertical_cell_passes() {
        let rows = sphere_cell(SpaceDescriptor::Berger { m: 2, s: 0.5, kappa: 1.0 }, 0.0).unwrap();
        assert!(rows.iter().any(|r| r.quantity == "vertical_multiplicity_4"));
        for r in &rows {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn tangent_formula_times_ascend() {
        let t = tangent_times(-0.5, 2.0, 20.0).unwrap();
        // s₁ ∈ ]π, 2π[ so t₁ = s₁/2 ∈ ]π/2, π[.
        assert!(t.windows(2).all(|w| w[0] < w[1]));
        assert!(t[0] > PI / 2.0 && t[0] < PI);
    }
}
