// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use homogeodesy::catalog::{build_b13, standard_grid, S_GRID};
use homogeodesy::closed_form::tan_root;
use homogeodesy::homogeneous::CurvatureMode;
use homogeodesy::par::map_slice;
use homogeodesy::report::verify_space;
use homogeodesy::reproduce::ReproRow;
use homogeodesy::{
    estimate_pinching, reproduce, Execution, JacobiSystem, Part, PinchingOptions, ScanOptions, SpaceDescriptor, Suite,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

/// `shared` is time already spent on work common to several criteria.
fn run(n: usize, limit: Duration, shared: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed() + shared;
    let pass = out.pass && elapsed <= limit;
    println!(
        "criterion {n}: {} ({}; {:.2}s of {}s)",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

fn bracket_tables() -> Outcome {
    let rows = common::tables::all_residuals();
    let (name, worst) = rows
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .cloned()
        .unwrap();
    Outcome {
        pass: worst < 1e-10,
        detail: format!("{} identities, worst {worst:.1e} in {name}", rows.len()),
    }
}

fn validation_grid() -> Outcome {
    let grid = standard_grid();
    let mut failures = Vec::new();
    let mut count = 0;
    for d in &grid {
        let space = d.build().unwrap();
        for check in ["jacobi-identity", "bi-invariance", "reductivity", "m0-lts"] {
            for r in verify_space(&space, Some(check)).unwrap() {
                count += 1;
                if !r.pass {
                    failures.push(format!("{d} {check}"));
                }
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("{count} checks on {} spaces, failures {failures:?}", grid.len()),
    }
}

fn isotropy_identity() -> Outcome {
    let grid = standard_grid();
    let worst = map_slice(&grid, Execution::Parallel, |d| {
        let space = d.build().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0x150);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let u = space.random_unit(Part::M, &mut rng).unwrap();
            let ku = common::isotropy_orbit_tangent(&space, &u);
            let system = JacobiSystem::new(&space, &u).unwrap();
            let iso = space.to_orthonormal() * system.isotropic_initial_space();
            worst = worst.max(common::subspace_distance(&ku, &iso));
        }
        worst
    })
    .into_iter()
    .fold(0.0f64, f64::max);
    Outcome {
        pass: worst < 1e-8,
        detail: format!("100 directions on {} spaces, worst distance {worst:.1e}", grid.len()),
    }
}

fn oracle_equivalence() -> Outcome {
    let grid = standard_grid();
    let times: Vec<f64> = (1..=20).map(|i| 0.5 * i as f64).collect();
    let worst = map_slice(&grid, Execution::Parallel, |d| {
        let space = d.build().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0x0de);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let u = space.random_unit(Part::M, &mut rng).unwrap();
            let system = JacobiSystem::new(&space, &u).unwrap();
            let (t_op, r_op) = common::operators_from_brackets(&space, system.direction());
            let ode = common::jacobi_by_ode(&t_op, &r_op, &times);
            for (t, j) in times.iter().zip(&ode) {
                let err = (system.fundamental_block(*t) - j).amax() / j.amax().max(1.0);
                worst = worst.max(err);
            }
        }
        worst
    })
    .into_iter()
    .fold(0.0f64, f64::max);
    Outcome {
        pass: worst < 1e-8,
        detail: format!("20 directions on {} spaces over [0,10], worst {worst:.1e}", grid.len()),
    }
}

fn conjugate_suite_rows() -> Vec<ReproRow> {
    let opts = PinchingOptions::default();
    let mut rows = Vec::new();
    for suite in [Suite::Conj, Suite::ConjB13, Suite::ConjW7] {
        rows.extend(reproduce(suite, Execution::Parallel, &opts).unwrap().rows);
    }
    rows
}

fn summarize(rows: &[&ReproRow]) -> Outcome {
    let failed: Vec<String> = rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{} {} θ={:.4} {}", r.space, r.params, r.theta, r.quantity))
        .collect();
    Outcome {
        pass: failed.is_empty() && !rows.is_empty(),
        detail: format!("{} rows, {} failed {:?}", rows.len(), failed.len(), failed.iter().take(5).collect::<Vec<_>>()),
    }
}

fn berger_vertical() -> Outcome {
    let mut count = 0;
    let mut bad = Vec::new();
    for m in 1..=2 {
        for s in S_GRID.into_iter().filter(|&s| s < 1.0) {
            let space = SpaceDescriptor::Berger { m, s, kappa: 1.0 }.build().unwrap();
            let tau = s * (m as f64 + 1.0) / (2.0 * m as f64);
            let system = JacobiSystem::new(&space, &space.m_basis("d_s").unwrap()).unwrap();
            let t_max = 12.0;
            let events = system.scan_and_classify(ScanOptions::new(t_max)).unwrap();
            let mut p = 1;
            while p as f64 * PI / tau.sqrt() <= t_max {
                let t = p as f64 * PI / tau.sqrt();
                count += 1;
                match events.iter().find(|e| (e.t - t).abs() < 1e-7) {
                    Some(e) if e.multiplicity == 2 * m && !e.isotropic_exists => {}
                    _ => bad.push(format!("m={m} s={s} t={t:.6}")),
                }
                p += 1;
            }
            if events.len() != p - 1 {
                bad.push(format!("m={m} s={s}: {} events", events.len()));
            }
        }
    }
    Outcome {
        pass: bad.is_empty() && count > 0,
        detail: format!("{count} vertical events, problems {bad:?}"),
    }
}

fn tangent_roots() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a9);
    let mut worst = 0.0f64;
    let mut inside = true;
    for _ in 0..50 {
        let mu = -(rng.gen_range(-4.0..4.0f64)).exp();
        let s = tan_root(mu, 1).unwrap();
        inside &= s > PI && s < 2.0 * PI;
        worst = worst.max(((s / 2.0).tan() - mu * s).abs());
    }
    Outcome {
        pass: inside && worst < 1e-9,
        detail: format!("50 slopes, all in ]π,2π[: {inside}, worst residual {worst:.1e}"),
    }
}

fn pinching() -> Outcome {
    let table = reproduce(Suite::PinchingTable, Execution::Parallel, &PinchingOptions::default()).unwrap();
    let failed: Vec<String> = table.failures().map(|r| format!("{} {} {}", r.space, r.params, r.quantity)).collect();
    let b13 = build_b13().unwrap();
    let e = b13.m_basis("e_1").unwrap();
    let f = b13.m_basis("f_1").unwrap();
    let k = b13.sectional_curvature(&e, &f, CurvatureMode::Normal).unwrap();
    let exact = (k - 29.0 / 4.0).abs() < 1e-12;
    let report = estimate_pinching(&b13, &PinchingOptions::default()).unwrap();
    let slack = 1e-8;
    let contains = report.k_min <= 4.0 + slack && report.k_max >= 29.0 / 4.0 - slack;
    Outcome {
        pass: failed.is_empty() && exact && contains,
        detail: format!(
            "{} table rows, failed {failed:?}; B13 K(e,f) = {k}, range [{:.6}, {:.6}]",
            table.rows.len(),
            report.k_min,
            report.k_max
        ),
    }
}

fn main() {
    let mut all = true;
    all &= run(1, Duration::from_secs(1), Duration::ZERO, bracket_tables);
    all &= run(2, Duration::from_secs(10), Duration::ZERO, validation_grid);
    all &= run(3, Duration::from_secs(30), Duration::ZERO, isotropy_identity);
    all &= run(4, Duration::from_secs(120), Duration::ZERO, oracle_equivalence);
    let start = Instant::now();
    let rows = conjugate_suite_rows();
    let shared = start.elapsed();
    let (base, rest): (Vec<&ReproRow>, Vec<&ReproRow>) = rows
        .iter()
        .filter(|r| r.gating)
        .partition(|r| r.quantity == "isotropic_at_base_time");
    all &= run(5, Duration::from_secs(300), shared, || summarize(&rest));
    all &= run(6, Duration::from_secs(30), Duration::ZERO, berger_vertical);
    all &= run(7, Duration::from_secs(1), Duration::ZERO, tangent_roots);
    all &= run(8, Duration::from_secs(600), Duration::ZERO, pinching);
    all &= run(9, Duration::from_secs(300), shared, || summarize(&base));
    if !all {
        std::process::exit(1);
    }
}
