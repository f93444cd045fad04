use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use homogeodesy::catalog::{standard_grid, SpaceDescriptor};
use homogeodesy::closed_form;
use homogeodesy::jacobi::{geodesic_direction, normalize_theta, DirectionAux, ScanOptions};
use homogeodesy::par::Execution;
use homogeodesy::pinching::{estimate_pinching, pinching_curve, PinchingFamily, PinchingOptions};
use homogeodesy::report::{self, csv_field, fmt_num, CrossValidationJson};
use homogeodesy::reproduce::{reproduce, Suite};
use homogeodesy::Error;

const EXIT_VALIDATION: u8 = 1;
const EXIT_MISMATCH: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(name = "homogeodesy", version, about = "Conjugate points and curvature of normal homogeneous spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run without the thread pool.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Catalog of supported spaces.
    List,
    /// Algebraic validation of a space.
    Verify {
        space: String,
        #[arg(long)]
        check: Option<String>,
    },
    /// Structure constants as sparse triples i,j,k,value.
    Brackets { space: String },
    /// Conjugate-event table along the geodesic with slope angle θ.
    Conjugate {
        space: String,
        #[command(flatten)]
        geo: GeodesicArgs,
    },
    /// Closed-form conjugate times cross-checked against the scan.
    Closedform {
        space: String,
        #[command(flatten)]
        geo: GeodesicArgs,
    },
    /// Pinching constant, or the δ(s) curve of a family with --curve.
    Pinching {
        space: String,
        #[arg(long)]
        curve: bool,
        #[arg(long, default_value_t = 256)]
        starts: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
    /// Full parameter sweep for one suite: conj, conjB13, conjW7, cimp1, pinching-table.
    Reproduce {
        suite: String,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
}

#[derive(clap::Args)]
struct GeodesicArgs {
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    #[arg(long, default_value_t = 10.0)]
    tmax: f64,
    #[arg(long)]
    step: Option<f64>,
    /// Azimuth of the vertical direction (ℂP and Sp-spheres).
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    #[arg(long, default_value_t = 0.0)]
    phi2: f64,
    /// Index of the horizontal basis vector.
    #[arg(long, default_value_t = 1)]
    alpha: usize,
}

impl GeodesicArgs {
    fn scan(&self) -> Result<ScanOptions, Error> {
        if !(self.tmax > 0.0) || !self.tmax.is_finite() {
            return Err(Error::BadParams(format!("tmax must be positive, got {}", self.tmax)));
        }
        if let Some(h) = self.step {
            if !(h > 0.0) {
                return Err(Error::BadParams(format!("step must be positive, got {h}")));
            }
        }
        Ok(ScanOptions {
            t_max: self.tmax,
            step: self.step,
        })
    }

    fn aux(&self) -> DirectionAux {
        DirectionAux {
            phi: self.phi,
            phi2: self.phi2,
            alpha: self.alpha,
            vertical: None,
        }
    }
}

enum Failure {
    Validation(String),
    Mismatch(String),
    Config(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Mismatch { .. } => Failure::Mismatch(e.to_string()),
            Error::Parse { .. }
            | Error::BadParams(_)
            | Error::BadAngle(_)
            | Error::BadAux(_)
            | Error::StepTooCoarse { .. }
            | Error::MissingSplit
            | Error::Io(_) => Failure::Config(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

fn parse_space(s: &str) -> Result<SpaceDescriptor, Failure> {
    s.parse().map_err(Failure::from)
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

struct Output {
    text: String,
    failure: Option<Failure>,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, failure: None }
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match &cli.command {
        Command::List => {
            let grid = standard_grid();
            Ok(Output::ok(match cli.format {
                Format::Json => {
                    let rows: Vec<_> = grid
                        .iter()
                        .map(|d| {
                            serde_json::json!({
                                "descriptor": d.to_string(),
                                "family": d.family_name(),
                                "params": d.params(),
                                "pinching": d.pinching_formula().map(report::sig12),
                            })
                        })
                        .collect();
                    json(&rows)
                }
                Format::Csv => {
                    let mut s = String::from("descriptor,family\n");
                    for d in &grid {
                        s.push_str(&format!("{},{}\n", csv_field(&d.to_string()), d.family_name()));
                    }
                    s
                }
            }))
        }
        Command::Verify { space, check } => {
            let space = parse_space(space)?.build()?;
            let reports = report::verify_space(&space, check.as_deref())?;
            let text = match cli.format {
                Format::Json => json(&reports),
                Format::Csv => {
                    let mut s = String::from("check,space,pass,residuals,witnesses\n");
                    for r in &reports {
                        let res: Vec<String> = r.residuals.iter().map(|(k, v)| format!("{k}={}", fmt_num(*v))).collect();
                        s.push_str(&format!(
                            "{},{},{},{},{}\n",
                            r.check,
                            csv_field(&r.space),
                            r.pass,
                            res.join(";"),
                            r.witnesses.join(";")
                        ));
                    }
                    s
                }
            };
            let failure = reports
                .iter()
                .find(|r| !r.pass)
                .map(|r| Failure::Validation(format!("check {} failed", r.check)));
            Ok(Output { text, failure })
        }
        Command::Brackets { space } => {
            let space = parse_space(space)?.build()?;
            let alg = space.algebra();
            Ok(Output::ok(match cli.format {
                Format::Csv => alg.structure_csv(),
                Format::Json => {
                    let triples: Vec<_> = alg
                        .structure_triples()
                        .iter()
                        .map(|&(i, j, k, c)| {
                            serde_json::json!({
                                "i": alg.label(i), "j": alg.label(j), "k": alg.label(k), "value": report::sig12(c)
                            })
                        })
                        .collect();
                    json(&triples)
                }
            }))
        }
        Command::Conjugate { space, geo } => {
            let scan = geo.scan()?;
            let space = parse_space(space)?.build()?;
            let rows = report::conjugate_table(&space, geo.theta, &geo.aux(), scan)?;
            Ok(Output::ok(match cli.format {
                Format::Json => json(&rows),
                Format::Csv => report::events_csv(&rows),
            }))
        }
        Command::Closedform { space, geo } => {
            let scan = geo.scan()?;
            let theta = normalize_theta(geo.theta)?;
            let space = parse_space(space)?.build()?;
            let dir = geodesic_direction(&space, theta, &geo.aux())?;
            let cv = closed_form::cross_validate_report(&space, &dir.u, &dir.v, scan.t_max)?;
            let out = CrossValidationJson::new(&space, theta, &cv);
            let text = match cli.format {
                Format::Json => json(&out),
                Format::Csv => {
                    let mut s = String::from("t,class,family,scanned_t,class_ok\n");
                    for p in &out.closed_form {
                        s.push_str(&format!(
                            "{},{},{},{},{}\n",
                            fmt_num(p.t),
                            p.class.as_str(),
                            serde_json::to_value(p.family).expect("enum").as_str().unwrap_or_default(),
                            p.scanned_t.map(fmt_num).unwrap_or_default(),
                            p.class_ok
                        ));
                    }
                    s
                }
            };
            let failure = cv.into_result().err().map(Failure::from);
            Ok(Output { text, failure })
        }
        Command::Pinching { space, curve, starts, seed } => {
            let d = parse_space(space)?;
            let opts = PinchingOptions {
                starts: *starts,
                seed: *seed,
                execution: exec,
                ..Default::default()
            };
            if *curve {
                let family = match d {
                    SpaceDescriptor::Berger { m, .. } => PinchingFamily::Berger { m },
                    SpaceDescriptor::SpSphere { m, .. } => PinchingFamily::SpSphere { m },
                    _ => return Err(Failure::Config("--curve needs a berger or spsphere descriptor".into())),
                };
                let rows = pinching_curve(family, &homogeodesy::catalog::S_GRID, &opts)?;
                Ok(Output::ok(match cli.format {
                    Format::Json => json(&rows),
                    Format::Csv => report::pinching_csv(&rows),
                }))
            } else {
                let r = estimate_pinching(&d.build()?, &opts)?;
                let row = serde_json::json!({
                    "space": r.space,
                    "k_min": report::sig12(r.k_min),
                    "k_max": report::sig12(r.k_max),
                    "delta": report::sig12(r.delta),
                    "delta_formula": d.pinching_formula().map(report::sig12),
                    "agreeing_starts": [r.agreeing_starts.0, r.agreeing_starts.1],
                    "audit_violations": r.audit_violations,
                    "converged": r.converged,
                });
                Ok(Output::ok(match cli.format {
                    Format::Json => json(&row),
                    Format::Csv => format!(
                        "space,k_min,k_max,delta,converged\n{},{},{},{},{}\n",
                        csv_field(&r.space),
                        fmt_num(r.k_min),
                        fmt_num(r.k_max),
                        fmt_num(r.delta),
                        r.converged
                    ),
                }))
            }
        }
        Command::Reproduce { suite, seed } => {
            let suite: Suite = suite.parse()?;
            let opts = PinchingOptions {
                seed: *seed,
                execution: exec,
                ..Default::default()
            };
            let report = reproduce(suite, exec, &opts)?;
            let text = match cli.format {
                Format::Json => json(&report),
                Format::Csv => report.csv(),
            };
            let failure = report.failures().next().map(|r| {
                Failure::Mismatch(format!("{} {} theta={}: {}", r.space, r.params, r.theta, r.quantity))
            });
            Ok(Output { text, failure })
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("HOMOGEODESY_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::Config(format!("HOMOGEODESY_THREADS must be a positive integer, got {v}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| run(&cli));
    let (output, failure) = match result {
        Ok(o) => (Some(o.text), o.failure),
        Err(f) => (None, Some(f)),
    };
    if let Some(text) = output {
        let written = match &cli.out {
            Some(path) => fs::write(path, &text).map_err(|e| e.to_string()),
            None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
        };
        if let Err(e) = written {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    match failure {
        None => ExitCode::SUCCESS,
        Some(Failure::Validation(msg)) => {
            eprintln!("validation failure: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Some(Failure::Mismatch(msg)) => {
            eprintln!("mismatch: {msg}");
            ExitCode::from(EXIT_MISMATCH)
        }
        Some(Failure::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
