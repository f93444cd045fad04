//! Builders for the normal homogeneous spaces of positive curvature handled by
//! this crate, and for the compact rank-one symmetric spaces used as references.
//!
//! Basis matrices use A_jk = i(E_jj − E_kk), B_jk = E_jk − E_kj and
//! C_jk = i(E_jk + E_kj) with 1-based indices.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{a_mat, b_mat, c_mat, BasisMatrix, ComplexMatrix, GramRule, StructuredAlgebra, TraceBlock};
use crate::error::{Error, Result};
use crate::homogeneous::{Part, ReductiveSpace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SpaceDescriptor {
    /// S^n = SO(n+1)/SO(n) with constant curvature κ.
    RoundSphere { n: usize, kappa: f64 },
    /// S^{2m+1} = SU(m+1)×U(1)/SU(m)×U(1) (s < 1) or SU(m+1)/SU(m) (s = 1).
    Berger { m: usize, s: f64, kappa: f64 },
    /// S^{4m+3} = Sp(m+1)×Sp(1)/Sp(m)×Sp(1) (s < 1) or Sp(m+1)/Sp(m) (s = 1).
    SpSphere { m: usize, s: f64, kappa: f64 },
    /// ℂP^{2m+1} = Sp(m+1)/Sp(m)×U(1).
    CpOdd { m: usize, kappa: f64 },
    /// B¹³ = SU(5)/Sp(2)×S¹.
    B13,
    /// W⁷ = SU(3)×SO(3)/U•(2).
    W7 { s: f64 },
    /// ℂP^m with holomorphic curvature 4κ.
    SymCp { m: usize, kappa: f64 },
    /// ℍP^m with quaternionic curvature 4κ.
    SymHp { m: usize, kappa: f64 },
}

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::BadParams("m must be at least 1".into()));
    }
    if m > 8 {
        return Err(Error::BadParams("m larger than 8 is not supported".into()));
    }
    Ok(())
}

fn check_s(s: f64) -> Result<()> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::BadParams(format!("s must lie in ]0, 1], got {s}")));
    }
    Ok(())
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::BadParams(format!("kappa must be positive, got {kappa}")));
    }
    Ok(())
}

impl SpaceDescriptor {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SpaceDescriptor::RoundSphere { n, kappa } => {
                if !(2..=12).contains(&n) {
                    return Err(Error::BadParams(format!("sphere dimension must be in 2..=12, got {n}")));
                }
                check_kappa(kappa)
            }
            SpaceDescriptor::Berger { m, s, kappa } | SpaceDescriptor::SpSphere { m, s, kappa } => {
                check_m(m)?;
                check_s(s)?;
                check_kappa(kappa)
            }
            SpaceDescriptor::CpOdd { m, kappa }
            | SpaceDescriptor::SymCp { m, kappa }
            | SpaceDescriptor::SymHp { m, kappa } => {
                check_m(m)?;
                check_kappa(kappa)
            }
            SpaceDescriptor::B13 => Ok(()),
            SpaceDescriptor::W7 { s } => check_s(s),
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            SpaceDescriptor::RoundSphere { .. } => "sphere",
            SpaceDescriptor::Berger { .. } => "berger",
            SpaceDescriptor::SpSphere { .. } => "spsphere",
            SpaceDescriptor::CpOdd { .. } => "cpodd",
            SpaceDescriptor::B13 => "b13",
            SpaceDescriptor::W7 { .. } => "w7",
            SpaceDescriptor::SymCp { .. } => "cp",
            SpaceDescriptor::SymHp { .. } => "hp",
        }
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        let mut p = BTreeMap::new();
        match *self {
            SpaceDescriptor::RoundSphere { n, kappa } => {
                p.insert("n".into(), n as f64);
                p.insert("kappa".into(), kappa);
            }
            SpaceDescriptor::Berger { m, s, kappa } | SpaceDescriptor::SpSphere { m, s, kappa } => {
                p.insert("m".into(), m as f64);
                p.insert("s".into(), s);
                p.insert("kappa".into(), kappa);
            }
            SpaceDescriptor::CpOdd { m, kappa }
            | SpaceDescriptor::SymCp { m, kappa }
            | SpaceDescriptor::SymHp { m, kappa } => {
                p.insert("m".into(), m as f64);
                p.insert("kappa".into(), kappa);
            }
            SpaceDescriptor::B13 => {}
            SpaceDescriptor::W7 { s } => {
                p.insert("s".into(), s);
            }
        }
        p
    }

    pub fn kappa(&self) -> f64 {
        match *self {
            SpaceDescriptor::RoundSphere { kappa, .. }
            | SpaceDescriptor::Berger { kappa, .. }
            | SpaceDescriptor::SpSphere { kappa, .. }
            | SpaceDescriptor::CpOdd { kappa, .. }
            | SpaceDescriptor::SymCp { kappa, .. }
            | SpaceDescriptor::SymHp { kappa, .. } => kappa,
            SpaceDescriptor::B13 | SpaceDescriptor::W7 { .. } => 1.0,
        }
    }

    pub fn build(&self) -> Result<ReductiveSpace> {
        self.validate()?;
        let space = match *self {
            SpaceDescriptor::RoundSphere { n, kappa } => build_round_sphere(n, kappa)?,
            SpaceDescriptor::Berger { m, s, kappa } => build_berger(m, s, kappa)?,
            SpaceDescriptor::SpSphere { m, s, kappa } => build_sp_sphere(m, s, kappa)?,
            SpaceDescriptor::CpOdd { m, kappa } => build_cp_odd(m, kappa)?,
            SpaceDescriptor::B13 => build_b13()?,
            SpaceDescriptor::W7 { s } => build_w7(s)?,
            SpaceDescriptor::SymCp { m, kappa } => build_sym_cp(m, kappa)?,
            SpaceDescriptor::SymHp { m, kappa } => build_sym_hp(m, kappa)?,
        };
        space.check_reductive()?;
        Ok(space.named(self.to_string(), self.params()).with_descriptor(*self))
    }

    /// Base of the homogeneous fibration whose fibers are generated by 𝔪₀.
    pub fn fibration_base(&self) -> Option<SymmetricReference> {
        match *self {
            SpaceDescriptor::Berger { kappa, .. } => Some(SymmetricReference::ProjectiveSpace { kappa }),
            SpaceDescriptor::SpSphere { kappa, .. } | SpaceDescriptor::CpOdd { kappa, .. } => {
                Some(SymmetricReference::ProjectiveSpace { kappa })
            }
            SpaceDescriptor::B13 => Some(SymmetricReference::ProjectiveSpace { kappa: 2.0 }),
            SpaceDescriptor::W7 { .. } => Some(SymmetricReference::ProjectiveSpace { kappa: 1.0 }),
            _ => None,
        }
    }

    /// Closed-form pinching constant where one is known.
    pub fn pinching_formula(&self) -> Option<f64> {
        match *self {
            SpaceDescriptor::RoundSphere { .. } => Some(1.0),
            SpaceDescriptor::Berger { m, s, .. } => Some(berger_pinching(m, s)),
            SpaceDescriptor::SpSphere { s, .. } => Some(sp_sphere_pinching(s)),
            SpaceDescriptor::CpOdd { .. } => Some(1.0 / 16.0),
            SpaceDescriptor::SymCp { m, .. } | SpaceDescriptor::SymHp { m, .. } => {
                Some(if m == 1 { 1.0 } else { 0.25 })
            }
            SpaceDescriptor::B13 => Some(16.0 / (29.0 * 37.0)),
            SpaceDescriptor::W7 { .. } => None,
        }
    }
}

/// δ(s) = s(m+1) / (8m − 3s(m+1)) for the Berger sphere g_s on S^{2m+1}.
pub fn berger_pinching(m: usize, s: f64) -> f64 {
    let m = m as f64;
    s * (m + 1.0) / (8.0 * m - 3.0 * s * (m + 1.0))
}

/// δ(s) for the metric g_s on S^{4m+3}: s/(8 − 3s) when s ≥ 2/3, s²/4 below.
pub fn sp_sphere_pinching(s: f64) -> f64 {
    if s >= 2.0 / 3.0 {
        s / (8.0 - 3.0 * s)
    } else {
        s * s / 4.0
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SpaceDescriptor::RoundSphere { n, kappa } => write!(f, "sphere:n={n},kappa={kappa}"),
            SpaceDescriptor::Berger { m, s, kappa } => write!(f, "berger:m={m},s={s},kappa={kappa}"),
            SpaceDescriptor::SpSphere { m, s, kappa } => write!(f, "spsphere:m={m},s={s},kappa={kappa}"),
            SpaceDescriptor::CpOdd { m, kappa } => write!(f, "cpodd:m={m},kappa={kappa}"),
            SpaceDescriptor::B13 => write!(f, "b13"),
            SpaceDescriptor::W7 { s } => write!(f, "w7:s={s}"),
            SpaceDescriptor::SymCp { m, kappa } => write!(f, "cp:m={m},kappa={kappa}"),
            SpaceDescriptor::SymHp { m, kappa } => write!(f, "hp:m={m},kappa={kappa}"),
        }
    }
}

impl FromStr for SpaceDescriptor {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let fail = |reason: &str| Error::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let (family, rest) = match input.split_once(':') {
            Some((f, r)) => (f.trim(), r.trim()),
            None => (input.trim(), ""),
        };
        let mut kv = BTreeMap::new();
        if !rest.is_empty() {
            for item in rest.split(',') {
                let (k, v) = item.split_once('=').ok_or_else(|| fail("expected key=value"))?;
                let v: f64 = v.trim().parse().map_err(|_| fail("value is not a number"))?;
                if kv.insert(k.trim().to_string(), v).is_some() {
                    return Err(fail("repeated key"));
                }
            }
        }
        let allowed: &[&str] = match family {
            "sphere" => &["n", "kappa"],
            "berger" | "spsphere" => &["m", "s", "kappa"],
            "cpodd" | "cp" | "hp" => &["m", "kappa"],
            "b13" => &[],
            "w7" => &["s"],
            _ => return Err(fail("unknown family")),
        };
        if let Some(k) = kv.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(fail(&format!("{family} does not take parameter {k}")));
        }
        let int = |key: &str, default: usize| -> Result<usize> {
            match kv.get(key) {
                None => Ok(default),
                Some(&v) if v >= 0.0 && v.fract() == 0.0 => Ok(v as usize),
                Some(_) => Err(fail(&format!("{key} must be a non-negative integer"))),
            }
        };
        let real = |key: &str, default: f64| kv.get(key).cloned().unwrap_or(default);
        let d = match family {
            "sphere" => SpaceDescriptor::RoundSphere {
                n: int("n", 3)?,
                kappa: real("kappa", 1.0),
            },
            "berger" => SpaceDescriptor::Berger {
                m: int("m", 1)?,
                s: real("s", 1.0),
                kappa: real("kappa", 1.0),
            },
            "spsphere" => SpaceDescriptor::SpSphere {
                m: int("m", 1)?,
                s: real("s", 1.0),
                kappa: real("kappa", 1.0),
            },
            "cpodd" => SpaceDescriptor::CpOdd {
                m: int("m", 1)?,
                kappa: real("kappa", 1.0),
            },
            "cp" => SpaceDescriptor::SymCp {
                m: int("m", 1)?,
                kappa: real("kappa", 1.0),
            },
            "hp" => SpaceDescriptor::SymHp {
                m: int("m", 1)?,
                kappa: real("kappa", 1.0),
            },
            "b13" => SpaceDescriptor::B13,
            _ => SpaceDescriptor::W7 { s: real("s", 1.0) },
        };
        d.validate()?;
        Ok(d)
    }
}

/// Compact rank-one symmetric spaces used as references for conjugate times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymmetricReference {
    /// Constant curvature κ.
    Sphere { kappa: f64 },
    /// ℂP^m or ℍP^m with curvature between κ and 4κ.
    ProjectiveSpace { kappa: f64 },
}

/// Conjugate times to the origin along unit geodesics of a symmetric reference.
pub fn symmetric_conjugate_times(reference: SymmetricReference, t_max: f64) -> Vec<f64> {
    let base = match reference {
        SymmetricReference::Sphere { kappa } => PI / kappa.sqrt(),
        SymmetricReference::ProjectiveSpace { kappa } => PI / (2.0 * kappa.sqrt()),
    };
    (1..)
        .map(|p| p as f64 * base)
        .take_while(|&t| t <= t_max)
        .collect()
}

struct Builder {
    size: usize,
    basis: Vec<BasisMatrix>,
    k: Vec<usize>,
    m0: Vec<usize>,
    m1: Vec<usize>,
}

impl Builder {
    fn new(size: usize) -> Self {
        Self {
            size,
            basis: Vec::new(),
            k: Vec::new(),
            m0: Vec::new(),
            m1: Vec::new(),
        }
    }

    fn push(&mut self, part: Part, label: String, matrix: ComplexMatrix) {
        let i = self.basis.len();
        self.basis.push(BasisMatrix::new(label, matrix));
        match part {
            Part::K => self.k.push(i),
            Part::M0 => self.m0.push(i),
            Part::M1 | Part::M => self.m1.push(i),
        }
    }

    fn a(&self, j: usize, k: usize) -> ComplexMatrix {
        a_mat(self.size, j, k)
    }

    fn b(&self, j: usize, k: usize) -> ComplexMatrix {
        b_mat(self.size, j, k)
    }

    fn c(&self, j: usize, k: usize) -> ComplexMatrix {
        c_mat(self.size, j, k)
    }

    /// S_j = (1/α_j) Σ_{l ≤ j} l·A_{l,l+1}, α_j = √(j(j+1)/2).
    fn s(&self, j: usize) -> ComplexMatrix {
        let alpha = ((j * (j + 1)) as f64 / 2.0).sqrt();
        let mut out = ComplexMatrix::zeros(self.size);
        for l in 1..=j {
            out = out + self.a(l, l + 1) * l as f64;
        }
        out * (1.0 / alpha)
    }

    fn finish(self, name: &str, rule: GramRule, kappa: f64, split: bool) -> Result<ReductiveSpace> {
        let algebra = Arc::new(StructuredAlgebra::assemble(name, self.basis, rule)?);
        if split {
            let m: Vec<usize> = self.m0.iter().chain(self.m1.iter()).cloned().collect();
            ReductiveSpace::new(algebra, self.k, m, kappa)?.with_split(self.m0, self.m1)
        } else {
            ReductiveSpace::new(algebra, self.k, self.m1, kappa)
        }
    }
}

/// Quaternionic pieces of 𝔰𝔭(m+1) ⊂ 𝔰𝔲(2m+2) placed in the top-left 2(m+1) block.
struct SpParts {
    x: [ComplexMatrix; 3],
    y: Vec<(String, ComplexMatrix)>,
    z: Vec<(String, ComplexMatrix)>,
}

fn sp_parts(b: &Builder, m: usize) -> SpParts {
    let (p, q) = (2 * m + 1, 2 * m + 2);
    let x = [b.a(p, q), b.b(p, q), b.c(p, q)];
    let mut y = Vec::new();
    for al in 1..=m {
        let ya = &b.b(al, p) + &b.b(m + al, q);
        y.push((format!("Y_{al}"), ya.clone()));
        for (i, xp) in x.iter().enumerate() {
            let yap = ya.commutator(xp);
            y.push((format!("Y_{{{al}{}}}", i + 1), yap));
        }
    }
    let mut z = Vec::new();
    for al in 1..=m {
        for be in (al + 1)..=m {
            z.push((format!("Z_{{{al},{be}}}"), &b.b(al, be) + &b.b(m + al, m + be)));
        }
    }
    for al in 1..=m {
        z.push((format!("Z_{{{al}1}}"), b.a(al, m + al)));
        z.push((format!("Z_{{{al}2}}"), b.b(al, m + al)));
        z.push((format!("Z_{{{al}3}}"), b.c(al, m + al)));
    }
    for al in 1..=m {
        for be in (al + 1)..=m {
            z.push((format!("Z_{{({al},{be})1}}"), &b.c(al, be) - &b.c(m + al, m + be)));
            z.push((format!("Z_{{({al},{be})2}}"), &b.b(al, m + be) + &b.b(be, m + al)));
            z.push((format!("Z_{{({al},{be})3}}"), &b.c(al, m + be) + &b.c(m + al, be)));
        }
    }
    SpParts { x, y, z }
}

pub fn build_round_sphere(n: usize, kappa: f64) -> Result<ReductiveSpace> {
    let mut b = Builder::new(n + 1);
    for j in 1..=n {
        for k in (j + 1)..=n {
            let mat = b.b(j, k);
            b.push(Part::K, format!("B_{{{j},{k}}}"), mat);
        }
    }
    for j in 1..=n {
        let mat = b.b(j, n + 1);
        b.push(Part::M, format!("B_{{{j},{}}}", n + 1), mat);
    }
    let first = format!("B_{{1,{}}}", n + 1);
    Ok(b.finish(&format!("so({})", n + 1), GramRule::Trace { factor: 0.5 }, kappa, false)?
        .with_witness(Part::M, &first, true))
}

pub fn build_berger(m: usize, s: f64, kappa: f64) -> Result<ReductiveSpace> {
    check_m(m)?;
    check_s(s)?;
    let n = m + 1;
    let extra = s < 1.0;
    let mut b = Builder::new(if extra { n + 2 } else { n });
    let z0 = b.s(m);
    let d = if extra { b.a(n + 1, n + 2) } else { ComplexMatrix::zeros(n) };
    if extra {
        b.push(Part::K, "h_s".into(), (&z0 + &d) * (1.0 - s).sqrt());
    }
    for j in 1..m {
        let sj = b.s(j);
        b.push(Part::K, format!("S_{j}"), sj);
    }
    for r in 1..=m {
        for j in (r + 1)..=m {
            let (bm, cm) = (b.b(r, j), b.c(r, j));
            b.push(Part::K, format!("B_{{{r},{j}}}"), bm);
            b.push(Part::K, format!("C_{{{r},{j}}}"), cm);
        }
    }
    let ds = if extra { (&z0 + &(&d * ((s - 1.0) / s))) * s.sqrt() } else { z0 };
    b.push(Part::M0, "d_s".into(), ds);
    for r in 1..=m {
        let e = b.b(r, n);
        b.push(Part::M1, format!("e_{r}"), e);
    }
    for r in 1..=m {
        let f = b.c(r, n);
        b.push(Part::M1, format!("f_{r}"), f);
    }
    let rule = if extra {
        GramRule::Blocks {
            blocks: vec![
                TraceBlock { start: 0, end: n, factor: 0.5 },
                TraceBlock { start: n, end: n + 2, factor: s / (2.0 * (1.0 - s)) },
            ],
        }
    } else {
        GramRule::Trace { factor: 0.5 }
    };
    let name = if extra { format!("su({n})+u(1)") } else { format!("su({n})") };
    let em = format!("e_{m}");
    Ok(b.finish(&name, rule, kappa, true)?
        .with_witness(Part::M0, "d_s", true)
        .with_witness(Part::M1, &em, !(m == 1 && !extra)))
}

pub fn build_sp_sphere(m: usize, s: f64, kappa: f64) -> Result<ReductiveSpace> {
    check_m(m)?;
    check_s(s)?;
    let n = 2 * m + 2;
    let extra = s < 1.0;
    let mut b = Builder::new(if extra { n + 2 } else { n });
    let parts = sp_parts(&b, m);
    let dd = if extra {
        [b.a(n + 1, n + 2), b.b(n + 1, n + 2), b.c(n + 1, n + 2)]
    } else {
        [ComplexMatrix::zeros(n), ComplexMatrix::zeros(n), ComplexMatrix::zeros(n)]
    };
    for (label, mat) in &parts.z {
        b.push(Part::K, label.clone(), mat.clone());
    }
    if extra {
        for p in 0..3 {
            b.push(Part::K, format!("h_{}s", p + 1), (&parts.x[p] + &dd[p]) * (2.0 * (1.0 - s)).sqrt());
        }
    }
    for p in 0..3 {
        let mat = if extra {
            (&parts.x[p] + &(&dd[p] * ((s - 1.0) / s))) * (2.0 * s).sqrt()
        } else {
            &parts.x[p] * 2f64.sqrt()
        };
        b.push(Part::M0, format!("d_{}s", p + 1), mat);
    }
    for (label, mat) in &parts.y {
        b.push(Part::M1, label.clone(), mat.clone());
    }
    let rule = if extra {
        GramRule::Blocks {
            blocks: vec![
                TraceBlock { start: 0, end: n, factor: 0.25 },
                TraceBlock { start: n, end: n + 2, factor: 0.25 * s / (1.0 - s) },
            ],
        }
    } else {
        GramRule::Trace { factor: 0.25 }
    };
    let name = if extra { format!("sp({})+sp(1)", m + 1) } else { format!("sp({})", m + 1) };
    Ok(b.finish(&name, rule, kappa, true)?
        .with_witness(Part::M0, "d_1s", extra)
        .with_witness(Part::M1, "Y_1", true))
}

pub fn build_cp_odd(m: usize, kappa: f64) -> Result<ReductiveSpace> {
    check_m(m)?;
    let mut b = Builder::new(2 * m + 2);
    let parts = sp_parts(&b, m);
    for (label, mat) in &parts.z {
        b.push(Part::K, label.clone(), mat.clone());
    }
    b.push(Part::K, "X_1".into(), parts.x[0].clone());
    b.push(Part::M0, "X_2".into(), parts.x[1].clone());
    b.push(Part::M0, "X_3".into(), parts.x[2].clone());
    for (label, mat) in &parts.y {
        b.push(Part::M1, label.clone(), mat.clone());
    }
    Ok(b.finish(&format!("sp({})", m + 1), GramRule::Trace { factor: 0.25 }, kappa, true)?
        .with_witness(Part::M0, "X_2", true)
        .with_witness(Part::M1, "Y_1", true))
}

pub fn build_b13() -> Result<ReductiveSpace> {
    let mut b = Builder::new(5);
    let r2 = 2f64.sqrt();
    let h = [
        &(&b.a(1, 2) + &(b.a(2, 3) * 2.0)) + &b.a(3, 4),
        &b.b(1, 3) + &b.b(2, 4),
        &b.c(1, 3) + &b.c(2, 4),
        &b.a(1, 2) - &b.a(3, 4),
        &b.b(1, 3) - &b.b(2, 4),
        &b.c(1, 3) - &b.c(2, 4),
        &b.c(1, 2) - &b.c(3, 4),
        &b.b(1, 4) + &b.b(2, 3),
        &b.c(1, 4) + &b.c(2, 3),
        &b.b(1, 2) + &b.b(3, 4),
        b.s(4) * r2,
    ];
    for (i, mat) in h.into_iter().enumerate() {
        b.push(Part::K, format!("H_{}", i + 1), mat);
    }
    let m0 = [
        ("u_0", &b.a(1, 2) + &b.a(3, 4)),
        ("u_1", &b.b(1, 2) - &b.b(3, 4)),
        ("u_2", &b.b(1, 4) - &b.b(2, 3)),
        ("v_1", &b.c(1, 2) + &b.c(3, 4)),
        ("v_2", &b.c(1, 4) - &b.c(2, 3)),
    ];
    for (label, mat) in m0 {
        b.push(Part::M0, label.into(), mat);
    }
    for r in 1..=4 {
        let e = b.b(r, 5) * r2;
        b.push(Part::M1, format!("e_{r}"), e);
    }
    for r in 1..=4 {
        let f = b.c(r, 5) * r2;
        b.push(Part::M1, format!("f_{r}"), f);
    }
    Ok(b.finish("su(5)", GramRule::Trace { factor: 0.25 }, 1.0, true)?
        .with_witness(Part::M0, "u_0", true)
        .with_witness(Part::M1, "e_1", true))
}

pub fn build_w7(s: f64) -> Result<ReductiveSpace> {
    check_s(s)?;
    let mut b = Builder::new(5);
    let k = 1.0 / (1.0 + s).sqrt();
    let w = 1.0 / (s * (1.0 + s)).sqrt();
    let ks = [
        (&b.a(1, 2) + &b.a(3, 4)) * k,
        (&b.b(1, 2) + &b.b(3, 4)) * k,
        (&b.c(1, 2) + &b.c(3, 4)) * k,
        (&b.a(3, 4) + &(b.a(4, 5) * 2.0)) * (1.0 / 3f64.sqrt()),
    ];
    for (i, mat) in ks.into_iter().enumerate() {
        b.push(Part::K, format!("K_{}", i + 1), mat);
    }
    let m0 = [
        ("u_0s", (&b.a(1, 2) - &(b.a(3, 4) * s)) * w),
        ("u_1s", (&b.b(1, 2) - &(b.b(3, 4) * s)) * w),
        ("v_1s", (&b.c(1, 2) - &(b.c(3, 4) * s)) * w),
    ];
    for (label, mat) in m0 {
        b.push(Part::M0, label.into(), mat);
    }
    for i in 1..=2 {
        let e = b.b(i + 2, 5);
        b.push(Part::M1, format!("e_{i}"), e);
    }
    for i in 1..=2 {
        let f = b.c(i + 2, 5);
        b.push(Part::M1, format!("f_{i}"), f);
    }
    let rule = GramRule::Blocks {
        blocks: vec![
            TraceBlock { start: 0, end: 2, factor: 0.5 * s },
            TraceBlock { start: 2, end: 5, factor: 0.5 },
        ],
    };
    Ok(b.finish("su(2)+su(3)", rule, 1.0, true)?
        .with_witness(Part::M0, "u_0s", true)
        .with_witness(Part::M1, "e_1", true))
}

pub fn build_sym_cp(m: usize, kappa: f64) -> Result<ReductiveSpace> {
    check_m(m)?;
    let n = m + 1;
    let mut b = Builder::new(n);
    for j in 1..=m {
        let sj = b.s(j);
        b.push(Part::K, format!("S_{j}"), sj);
    }
    for r in 1..=m {
        for j in (r + 1)..=m {
            let (bm, cm) = (b.b(r, j), b.c(r, j));
            b.push(Part::K, format!("B_{{{r},{j}}}"), bm);
            b.push(Part::K, format!("C_{{{r},{j}}}"), cm);
        }
    }
    for r in 1..=m {
        let e = b.b(r, n);
        b.push(Part::M, format!("e_{r}"), e);
        let f = b.c(r, n);
        b.push(Part::M, format!("f_{r}"), f);
    }
    Ok(b.finish(&format!("su({n})"), GramRule::Trace { factor: 0.5 }, kappa, false)?
        .with_witness(Part::M, "e_1", true))
}

pub fn build_sym_hp(m: usize, kappa: f64) -> Result<ReductiveSpace> {
    check_m(m)?;
    let mut b = Builder::new(2 * m + 2);
    let parts = sp_parts(&b, m);
    for (label, mat) in &parts.z {
        b.push(Part::K, label.clone(), mat.clone());
    }
    for p in 0..3 {
        b.push(Part::K, format!("X_{}", p + 1), parts.x[p].clone());
    }
    for (label, mat) in &parts.y {
        b.push(Part::M, label.clone(), mat.clone());
    }
    Ok(b.finish(&format!("sp({})", m + 1), GramRule::Trace { factor: 0.25 }, kappa, false)?
        .with_witness(Part::M, "Y_1", true))
}

/// Every catalog space on the standard parameter grid (m ∈ {1,2},
/// s ∈ {1/4, 1/2, 2/3, 9/10, 1}, κ = 1) plus the symmetric references.
pub fn standard_grid() -> Vec<SpaceDescriptor> {
    let mut out = Vec::new();
    for m in 1..=2 {
        for &s in &S_GRID {
            out.push(SpaceDescriptor::Berger { m, s, kappa: 1.0 });
        }
    }
    for m in 1..=2 {
        for &s in &S_GRID {
            out.push(SpaceDescriptor::SpSphere { m, s, kappa: 1.0 });
        }
    }
    for m in 1..=2 {
        out.push(SpaceDescriptor::CpOdd { m, kappa: 1.0 });
    }
    out.push(SpaceDescriptor::B13);
    for &s in &S_GRID {
        out.push(SpaceDescriptor::W7 { s });
    }
    out.push(SpaceDescriptor::RoundSphere { n: 3, kappa: 1.0 });
    out.push(SpaceDescriptor::RoundSphere { n: 5, kappa: 2.0 });
    for m in 1..=2 {
        out.push(SpaceDescriptor::SymCp { m, kappa: 1.0 });
        out.push(SpaceDescriptor::SymHp { m, kappa: 1.0 });
    }
    out
}

pub const S_GRID: [f64; 5] = [0.25, 0.5, 2.0 / 3.0, 0.9, 1.0];
