//! Validation reports and the JSON/CSV shapes written by the command-line tool.
//! Floating-point output is rounded to 12 significant digits.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DVector;
use serde::Serialize;

use crate::closed_form::{self, MATCH_TOL};
use crate::error::Result;
use crate::homogeneous::{Part, ReductiveSpace};
use crate::jacobi::{geodesic_direction, ConjugateEvent, DirectionAux, JacobiSystem, ScanOptions};
use crate::par::Execution;
use crate::pinching::PinchingRow;

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Number formatting for CSV: 12 significant digits, exponent form for tiny or huge values.
pub fn fmt_num(x: f64) -> String {
    let r = sig12(x);
    if r != 0.0 && r.is_finite() && (r.abs() < 1e-4 || r.abs() >= 1e15) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

/// Quotes a CSV field when it contains a separator or quote.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn round_map(m: BTreeMap<String, f64>) -> BTreeMap<String, f64> {
    m.into_iter().map(|(k, v)| (k, sig12(v))).collect()
}

/// Parameters as `key=value` pairs joined by semicolons.
pub fn params_string(params: &BTreeMap<String, f64>) -> String {
    params
        .iter()
        .map(|(k, v)| format!("{k}={}", fmt_num(*v)))
        .collect::<Vec<_>>()
        .join(";")
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub space: String,
    pub params: BTreeMap<String, f64>,
    pub pass: bool,
    pub residuals: BTreeMap<String, f64>,
    pub witnesses: Vec<String>,
}

pub const CHECKS: [&str; 8] = [
    "jacobi-identity",
    "bi-invariance",
    "reductivity",
    "m0-lts",
    "rank-one",
    "m-transitivity",
    "m0-transitivity",
    "m1-transitivity",
];

const VALIDATION_TOL: f64 = 1e-10;

/// Runs the named check (or all applicable checks) on a space.
pub fn verify_space(space: &ReductiveSpace, only: Option<&str>) -> Result<Vec<CheckReport>> {
    if let Some(name) = only {
        if !CHECKS.contains(&name) {
            return Err(crate::Error::BadParams(format!(
                "unknown check {name}; expected one of {}",
                CHECKS.join(", ")
            )));
        }
    }
    let wanted = |name: &str| only.is_none_or(|o| o == name);
    let base = |check: &str, pass: bool, residuals: BTreeMap<String, f64>, witnesses: Vec<String>| CheckReport {
        check: check.to_string(),
        space: space.name().to_string(),
        params: space.params().clone(),
        pass,
        residuals: round_map(residuals),
        witnesses,
    };
    let alg = space.algebra();
    let mut out = Vec::new();
    if wanted("jacobi-identity") {
        let (r, [i, j, k]) = alg.jacobi_identity_residual();
        let mut res = BTreeMap::new();
        res.insert("max".to_string(), r);
        let w = vec![alg.label(i).to_string(), alg.label(j).to_string(), alg.label(k).to_string()];
        out.push(base("jacobi-identity", r < VALIDATION_TOL, res, w));
    }
    if wanted("bi-invariance") {
        let (r, [i, j, k]) = alg.biinvariance_residual();
        let mut res = BTreeMap::new();
        res.insert("max".to_string(), r);
        let w = vec![alg.label(i).to_string(), alg.label(j).to_string(), alg.label(k).to_string()];
        out.push(base("bi-invariance", r < VALIDATION_TOL, res, w));
    }
    if wanted("reductivity") {
        let res = space.reductive_residuals();
        let pass = res.values().all(|&r| r < VALIDATION_TOL);
        out.push(base("reductivity", pass, res, vec![]));
    }
    if wanted("m0-lts") && space.has_split() {
        let r = space.m_positions(Part::M0)?;
        let nu: Vec<DVector<f64>> = r
            .map(|i| {
                let mut v = DVector::zeros(space.dim());
                v[i] = 1.0;
                v
            })
            .collect();
        let lts = space.lts_check(&nu)?;
        let pass = lts.lie_triple && lts.connection_invariant && lts.subalgebra;
        out.push(base("m0-lts", pass, lts.residuals, vec![]));
    }
    if wanted("rank-one") {
        let r = space.rank_one_check(64, 0x0a11, Execution::Parallel);
        let mut res = BTreeMap::new();
        res.insert("min_bracket_sq".to_string(), r.min_bracket_sq);
        out.push(base("rank-one", r.rank_one, res, vec![]));
    }
    let parts: &[(&str, Part)] = if space.has_split() {
        &[("m0-transitivity", Part::M0), ("m1-transitivity", Part::M1)]
    } else {
        &[("m-transitivity", Part::M)]
    };
    for &(name, part) in parts {
        if !wanted(name) {
            continue;
        }
        let t = space.isotropy_transitivity_check(part)?;
        let mut res = BTreeMap::new();
        res.insert("kernel_dim".to_string(), t.kernel_dim as f64);
        res.insert("part_dim".to_string(), t.part_dim as f64);
        res.insert("transitive".to_string(), if t.transitive { 1.0 } else { 0.0 });
        let pass = t.expected.is_none_or(|e| e == t.transitive);
        out.push(base(name, pass, res, vec![t.witness]));
    }
    Ok(out)
}

/// One line of the conjugate-event table.
#[derive(Debug, Clone, Serialize)]
pub struct EventRow {
    pub space: String,
    pub params: String,
    pub theta: f64,
    pub t: f64,
    pub multiplicity: usize,
    pub isotropic_exists: bool,
    pub strictly_isotropic: bool,
    pub closed_form_match: bool,
}

pub const EVENT_COLUMNS: &str =
    "space,params,theta,t,multiplicity,isotropic_exists,strictly_isotropic,closed_form_match";

/// Scans the geodesic with slope angle θ and tags events predicted by the closed form.
pub fn conjugate_table(
    space: &ReductiveSpace,
    theta: f64,
    aux: &DirectionAux,
    scan: ScanOptions,
) -> Result<Vec<EventRow>> {
    let (u, v, theta) = if space.has_split() {
        let dir = geodesic_direction(space, theta, aux)?;
        (dir.u, Some(dir.v), dir.theta)
    } else {
        let label = space.witness(Part::M).map(str::to_string).unwrap_or_else(|| space.m_label(0).to_string());
        (space.m_basis(&label)?, None, 0.0)
    };
    let system = JacobiSystem::new(space, &u)?;
    let events = system.scan_and_classify(scan)?;
    let predicted: Vec<f64> = match v {
        Some(v) => match closed_form::extract_cp_data(space, &system.direction().clone(), &v) {
            Ok(data) => closed_form::closed_form_times(&data, scan.t_max)?.iter().map(|p| p.t).collect(),
            Err(_) => Vec::new(),
        },
        None => Vec::new(),
    };
    Ok(events
        .iter()
        .map(|e| event_row(space, theta, e, &predicted))
        .collect())
}

fn event_row(space: &ReductiveSpace, theta: f64, e: &ConjugateEvent, predicted: &[f64]) -> EventRow {
    EventRow {
        space: space.name().to_string(),
        params: params_string(space.params()),
        theta: sig12(theta),
        t: sig12(e.t),
        multiplicity: e.multiplicity,
        isotropic_exists: e.isotropic_exists,
        strictly_isotropic: e.strictly_isotropic,
        closed_form_match: predicted.iter().any(|p| (p - e.t).abs() < MATCH_TOL),
    }
}

pub fn events_csv(rows: &[EventRow]) -> String {
    let mut out = format!("{EVENT_COLUMNS}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            csv_field(&r.space),
            r.params,
            fmt_num(r.theta),
            fmt_num(r.t),
            r.multiplicity,
            r.isotropic_exists,
            r.strictly_isotropic,
            r.closed_form_match
        );
    }
    out
}

pub const PINCHING_COLUMNS: &str = "s,delta_measured,delta_formula,rel_error,converged";

pub fn pinching_csv(rows: &[PinchingRow]) -> String {
    let mut out = format!("{PINCHING_COLUMNS}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_num(r.s),
            fmt_num(r.delta_measured),
            fmt_num(r.delta_formula),
            fmt_num(r.rel_error),
            r.converged
        );
    }
    out
}

/// JSON shape of a closed-form versus scan comparison.
#[derive(Debug, Clone, Serialize)]
pub struct CrossValidationJson {
    pub space: String,
    pub params: BTreeMap<String, f64>,
    pub theta: f64,
    pub lambda: f64,
    pub rho: f64,
    pub branch: closed_form::Branch,
    pub closed_form: Vec<ClosedFormJson>,
    pub scanned: Vec<ScannedJson>,
    pub matched: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormJson {
    pub t: f64,
    pub class: closed_form::TimeClass,
    pub family: closed_form::Family,
    pub scanned_t: Option<f64>,
    pub class_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScannedJson {
    pub t: f64,
    pub mult: usize,
    pub flags: ScanFlags,
    pub matched: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanFlags {
    pub isotropic_exists: bool,
    pub strictly_isotropic: bool,
}

impl CrossValidationJson {
    pub fn new(space: &ReductiveSpace, theta: f64, cv: &closed_form::CrossValidation) -> Self {
        Self {
            space: space.name().to_string(),
            params: space.params().clone(),
            theta: sig12(theta),
            lambda: sig12(cv.data.lambda),
            rho: sig12(cv.data.rho),
            branch: cv.data.branch,
            closed_form: cv
                .closed_form
                .iter()
                .map(|p| ClosedFormJson {
                    t: sig12(p.t),
                    class: p.class,
                    family: p.family,
                    scanned_t: p.scanned_t.map(sig12),
                    class_ok: p.class_ok,
                })
                .collect(),
            scanned: cv
                .scanned
                .iter()
                .map(|e| ScannedJson {
                    t: sig12(e.t),
                    mult: e.mult,
                    flags: ScanFlags {
                        isotropic_exists: e.isotropic_exists,
                        strictly_isotropic: e.strictly_isotropic,
                    },
                    matched: e.matched,
                })
                .collect(),
            matched: cv.matched,
        }
    }
}
