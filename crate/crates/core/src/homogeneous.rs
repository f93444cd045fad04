//! Reductive splits 𝔤 = 𝔨 ⊕ 𝔪 (optionally 𝔪 = 𝔪₀ ⊕ 𝔪₁) of a structured algebra,
//! together with the curvature and Jacobi operators of the normal metric.
//!
//! Vectors of 𝔪 are handled in "𝔪-coordinates": the i-th entry is the
//! coefficient of the i-th basis element of 𝔪 (𝔪₀ first when a split exists).
//! The metric on the space is the algebra's gram divided by κ.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::algebra::StructuredAlgebra;
use crate::catalog::SpaceDescriptor;
use crate::error::{Error, Result};
use crate::linalg;
use crate::par::{self, Execution};
use crate::stiefel::{self, BivectorForm, DescentOptions, Gradient};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Part {
    K,
    M,
    M0,
    M1,
}

impl std::fmt::Display for Part {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Part::K => "k",
            Part::M => "m",
            Part::M0 => "m0",
            Part::M1 => "m1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureMode {
    /// ‖[x,y]_𝔨‖² + ¼‖[x,y]_𝔪‖², valid for normal metrics.
    Normal,
    /// ⟨[[x,y]_𝔨,x]_𝔪, y⟩ + ¼‖[x,y]_𝔪‖², valid for naturally reductive metrics.
    NaturallyReductive,
}

const SPLIT_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct ReductiveSpace {
    name: String,
    params: BTreeMap<String, f64>,
    algebra: Arc<StructuredAlgebra>,
    k: Vec<usize>,
    m: Vec<usize>,
    split: Option<usize>,
    kappa: f64,
    witnesses: Vec<(Part, String)>,
    expected_transitive: Vec<(Part, bool)>,
    descriptor: Option<SpaceDescriptor>,
    metric_m: DMatrix<f64>,
    /// Lᵀ with metric_m = L Lᵀ: maps 𝔪-coordinates to orthonormal coordinates.
    to_ortho: DMatrix<f64>,
    /// L⁻ᵀ: maps orthonormal coordinates back to 𝔪-coordinates.
    from_ortho: DMatrix<f64>,
}

impl ReductiveSpace {
    pub fn new(algebra: Arc<StructuredAlgebra>, k: Vec<usize>, m: Vec<usize>, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::BadParams(format!("kappa must be positive, got {kappa}")));
        }
        let d = algebra.dim();
        let mut seen = vec![false; d];
        for &i in k.iter().chain(m.iter()) {
            if i >= d || seen[i] {
                return Err(Error::InvalidSplit(format!("index {i} repeated or out of range")));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidSplit("𝔨 and 𝔪 do not cover the basis".into()));
        }
        if m.is_empty() {
            return Err(Error::InvalidSplit("𝔪 is empty".into()));
        }
        let g = algebra.gram();
        let mut cross = 0.0f64;
        for &i in &k {
            for &j in &m {
                cross = cross.max(g[(i, j)].abs());
            }
        }
        if cross > 1e-12 {
            return Err(Error::InvalidSplit(format!("𝔨 and 𝔪 are not orthogonal ({cross:.3e})")));
        }
        let metric_m = DMatrix::from_fn(m.len(), m.len(), |a, b| g[(m[a], m[b])] / kappa);
        let chol = Cholesky::new(metric_m.clone()).ok_or(Error::DegenerateGram { min_eigenvalue: 0.0 })?;
        let l = chol.l();
        let to_ortho = l.transpose();
        let from_ortho = to_ortho
            .clone()
            .try_inverse()
            .ok_or(Error::DegenerateGram { min_eigenvalue: 0.0 })?;
        Ok(Self {
            name: algebra.name().to_string(),
            params: BTreeMap::new(),
            algebra,
            k,
            m,
            split: None,
            kappa,
            witnesses: Vec::new(),
            expected_transitive: Vec::new(),
            descriptor: None,
            metric_m,
            to_ortho,
            from_ortho,
        })
    }

    /// Builds a space from basis labels.
    pub fn from_labels(algebra: Arc<StructuredAlgebra>, k: &[&str], m: &[&str], kappa: f64) -> Result<Self> {
        let lookup = |labels: &[&str]| -> Result<Vec<usize>> {
            labels
                .iter()
                .map(|l| {
                    algebra
                        .index_of(l)
                        .ok_or_else(|| Error::InvalidSplit(format!("unknown label {l}")))
                })
                .collect()
        };
        let k = lookup(k)?;
        let m = lookup(m)?;
        Self::new(algebra, k, m, kappa)
    }

    /// Declares 𝔪 = 𝔪₀ ⊕ 𝔪₁ (given by algebra indices); 𝔪-coordinates are reordered
    /// with 𝔪₀ first.
    pub fn with_split(self, m0: Vec<usize>, m1: Vec<usize>) -> Result<Self> {
        let mut all: Vec<usize> = m0.iter().chain(m1.iter()).cloned().collect();
        all.sort_unstable();
        let mut current = self.m.clone();
        current.sort_unstable();
        if all != current || m0.is_empty() || m1.is_empty() {
            return Err(Error::InvalidSplit("𝔪₀ ⊕ 𝔪₁ must partition 𝔪 into nonempty parts".into()));
        }
        let g = self.algebra.gram();
        for &i in &m0 {
            for &j in &m1 {
                if g[(i, j)].abs() > 1e-12 {
                    return Err(Error::InvalidSplit("𝔪₀ and 𝔪₁ are not orthogonal".into()));
                }
            }
        }
        let split = m0.len();
        let m: Vec<usize> = m0.into_iter().chain(m1).collect();
        let mut out = Self::new(self.algebra.clone(), self.k.clone(), m, self.kappa)?;
        out.split = Some(split);
        out.name = self.name;
        out.params = self.params;
        out.witnesses = self.witnesses;
        out.expected_transitive = self.expected_transitive;
        out.descriptor = self.descriptor;
        Ok(out)
    }

    pub fn with_split_labels(self, m0: &[&str], m1: &[&str]) -> Result<Self> {
        let find = |l: &&str| {
            self.algebra
                .index_of(l)
                .ok_or_else(|| Error::InvalidSplit(format!("unknown label {l}")))
        };
        let m0 = m0.iter().map(find).collect::<Result<Vec<_>>>()?;
        let m1 = m1.iter().map(find).collect::<Result<Vec<_>>>()?;
        self.with_split(m0, m1)
    }

    pub fn named(mut self, name: impl Into<String>, params: BTreeMap<String, f64>) -> Self {
        self.name = name.into();
        self.params = params;
        self
    }

    pub fn with_witness(mut self, part: Part, label: &str, expected_transitive: bool) -> Self {
        self.witnesses.push((part, label.to_string()));
        self.expected_transitive.push((part, expected_transitive));
        self
    }

    pub(crate) fn with_descriptor(mut self, d: SpaceDescriptor) -> Self {
        self.descriptor = Some(d);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn algebra(&self) -> &Arc<StructuredAlgebra> {
        &self.algebra
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn descriptor(&self) -> Option<&SpaceDescriptor> {
        self.descriptor.as_ref()
    }

    pub fn has_split(&self) -> bool {
        self.split.is_some()
    }

    /// Dimension of 𝔪 (the dimension of the homogeneous space).
    pub fn dim(&self) -> usize {
        self.m.len()
    }

    /// Algebra indices of a part.
    pub fn indices(&self, part: Part) -> Result<&[usize]> {
        match (part, self.split) {
            (Part::K, _) => Ok(&self.k),
            (Part::M, _) => Ok(&self.m),
            (Part::M0, Some(s)) => Ok(&self.m[..s]),
            (Part::M1, Some(s)) => Ok(&self.m[s..]),
            _ => Err(Error::MissingSplit),
        }
    }

    /// Positions of a part of 𝔪 within 𝔪-coordinates.
    pub fn m_positions(&self, part: Part) -> Result<std::ops::Range<usize>> {
        match (part, self.split) {
            (Part::M, _) => Ok(0..self.m.len()),
            (Part::M0, Some(s)) => Ok(0..s),
            (Part::M1, Some(s)) => Ok(s..self.m.len()),
            (Part::K, _) => Err(Error::InvalidSplit("𝔨 has no 𝔪-coordinates".into())),
            _ => Err(Error::MissingSplit),
        }
    }

    pub fn m_label(&self, i: usize) -> &str {
        self.algebra.label(self.m[i])
    }

    /// 𝔪-coordinate vector of a single basis label.
    pub fn m_basis(&self, label: &str) -> Result<DVector<f64>> {
        let idx = self
            .algebra
            .index_of(label)
            .ok_or_else(|| Error::BadAux(format!("unknown label {label}")))?;
        let pos = self
            .m
            .iter()
            .position(|&i| i == idx)
            .ok_or_else(|| Error::BadAux(format!("{label} is not in 𝔪")))?;
        let mut v = DVector::zeros(self.dim());
        v[pos] = 1.0;
        Ok(v)
    }

    /// 𝔪-coordinate vector from (label, coefficient) pairs.
    pub fn m_vector(&self, terms: &[(&str, f64)]) -> Result<DVector<f64>> {
        let mut v = DVector::zeros(self.dim());
        for (label, c) in terms {
            v += self.m_basis(label)? * *c;
        }
        Ok(v)
    }

    pub fn embed(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.algebra.dim());
        for (pos, &i) in self.m.iter().enumerate() {
            out[i] = x[pos];
        }
        out
    }

    /// 𝔪-coordinates of the 𝔪-component of a full coefficient vector.
    pub fn restrict(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.m.len(), self.m.iter().map(|&i| x[i]))
    }

    /// Orthogonal projection (coordinate masking, valid because the basis is adapted).
    pub fn project(&self, x: &DVector<f64>, part: Part) -> Result<DVector<f64>> {
        let mut out = DVector::zeros(x.len());
        for &i in self.indices(part)? {
            out[i] = x[i];
        }
        Ok(out)
    }

    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        self.algebra.bracket(x, y)
    }

    /// Inner product of full coefficient vectors in the scaled metric.
    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.algebra.inner(x, y) / self.kappa
    }

    pub fn norm(&self, x: &DVector<f64>) -> f64 {
        self.inner(x, x).max(0.0).sqrt()
    }

    pub fn metric_m(&self) -> &DMatrix<f64> {
        &self.metric_m
    }

    pub fn inner_m(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.metric_m * y))
    }

    pub fn norm_m(&self, x: &DVector<f64>) -> f64 {
        self.inner_m(x, x).max(0.0).sqrt()
    }

    pub fn normalize_m(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let n = self.norm_m(x);
        if n < 1e-14 {
            return Err(Error::ZeroVector);
        }
        Ok(x / n)
    }

    /// Lᵀ: 𝔪-coordinates → orthonormal coordinates.
    pub fn to_orthonormal(&self) -> &DMatrix<f64> {
        &self.to_ortho
    }

    /// L⁻ᵀ: orthonormal coordinates → 𝔪-coordinates.
    pub fn from_orthonormal(&self) -> &DMatrix<f64> {
        &self.from_ortho
    }

    /// Expresses an operator on 𝔪-coordinates in orthonormal coordinates.
    pub fn operator_to_orthonormal(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        &self.to_ortho * a * &self.from_ortho
    }

    /// Uniformly distributed unit vector of 𝔪 (or of a part of it).
    pub fn random_unit<R: Rng>(&self, part: Part, rng: &mut R) -> Result<DVector<f64>> {
        let range = self.m_positions(part)?;
        loop {
            let mut hat = DVector::zeros(self.dim());
            // Orthonormal coordinates respect the split because 𝔪₀ ⊥ 𝔪₁ and L is block triangular.
            for i in range.clone() {
                hat[i] = rng.sample::<f64, _>(StandardNormal);
            }
            let n = hat.norm();
            if n > 1e-8 {
                return Ok(&self.from_ortho * (hat / n));
            }
        }
    }

    fn ad_full(&self, u: &DVector<f64>) -> DMatrix<f64> {
        self.algebra.ad(&self.embed(u))
    }

    /// T_u x = −[u, x]_𝔪 as a matrix on 𝔪-coordinates.
    pub fn torsion_op(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let ad = self.ad_full(u);
        DMatrix::from_fn(self.dim(), self.dim(), |a, b| -ad[(self.m[a], self.m[b])])
    }

    /// R_u x = [[u, x]_𝔨, u] as a matrix on 𝔪-coordinates.
    pub fn jacobi_op(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let ad = self.ad_full(u);
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let mut acc = 0.0;
                for &z in &self.k {
                    acc += ad[(self.m[a], z)] * ad[(z, self.m[b])];
                }
                out[(a, b)] = -acc;
            }
        }
        out
    }

    /// Sectional curvature of the plane spanned by x, y ∈ 𝔪 (𝔪-coordinates).
    pub fn sectional_curvature(&self, x: &DVector<f64>, y: &DVector<f64>, mode: CurvatureMode) -> Result<f64> {
        let xx = self.inner_m(x, x);
        let yy = self.inner_m(y, y);
        let xy = self.inner_m(x, y);
        let area_sq = xx * yy - xy * xy;
        if area_sq < 1e-14 * xx * yy || xx * yy == 0.0 {
            return Err(Error::DegeneratePlane { area_sq });
        }
        let fx = self.embed(x);
        let fy = self.embed(y);
        let b = self.bracket(&fx, &fy);
        let bk = self.project(&b, Part::K)?;
        let bm = self.project(&b, Part::M)?;
        let num = match mode {
            CurvatureMode::Normal => self.inner(&bk, &bk) + 0.25 * self.inner(&bm, &bm),
            CurvatureMode::NaturallyReductive => {
                let c = self.project(&self.bracket(&bk, &fx), Part::M)?;
                self.inner(&c, &fy) + 0.25 * self.inner(&bm, &bm)
            }
        };
        Ok(num / area_sq)
    }

    /// Quadratic form wk‖[x,y]_𝔨‖² + wm‖[x,y]_𝔪‖² on bivectors of 𝔪 in orthonormal coordinates.
    pub fn bivector_form(&self, weight_k: f64, weight_m: f64) -> BivectorForm {
        let n = self.dim();
        let pairs = stiefel::wedge_pairs(n);
        let frame: Vec<DVector<f64>> = (0..n)
            .map(|i| self.embed(&self.from_ortho.column(i).into_owned()))
            .collect();
        let gram = self.algebra.gram() / self.kappa;
        let block_root = |idx: &[usize]| -> DMatrix<f64> {
            if idx.is_empty() {
                return DMatrix::zeros(0, 0);
            }
            let g = DMatrix::from_fn(idx.len(), idx.len(), |a, b| gram[(idx[a], idx[b])]);
            Cholesky::new(g).expect("gram blocks are positive").l().transpose()
        };
        let rk = block_root(&self.k);
        let rm = block_root(&self.m);
        let mut rows = DMatrix::zeros(self.k.len() + self.m.len(), pairs.len());
        for (p, &(i, j)) in pairs.iter().enumerate() {
            let b = self.bracket(&frame[i], &frame[j]);
            let bk = DVector::from_iterator(self.k.len(), self.k.iter().map(|&a| b[a]));
            let bm = DVector::from_iterator(self.m.len(), self.m.iter().map(|&a| b[a]));
            let ck = &rk * bk * weight_k.sqrt();
            let cm = &rm * bm * weight_m.sqrt();
            for a in 0..self.k.len() {
                rows[(a, p)] = ck[a];
            }
            for a in 0..self.m.len() {
                rows[(self.k.len() + a, p)] = cm[a];
            }
        }
        BivectorForm::new(n, rows)
    }

    /// Reductivity and split residuals (all should vanish for a valid space).
    pub fn reductive_residuals(&self) -> BTreeMap<String, f64> {
        let d = self.algebra.dim();
        let basis: Vec<DVector<f64>> = (0..d).map(|i| self.algebra.basis_vector(i)).collect();
        let worst = |xs: &[usize], ys: &[usize], out: Part| -> f64 {
            let mut r = 0.0f64;
            for &i in xs {
                for &j in ys {
                    let b = self.bracket(&basis[i], &basis[j]);
                    if let Ok(p) = self.project(&b, out) {
                        r = r.max(self.norm(&p));
                    }
                }
            }
            r
        };
        let mut out = BTreeMap::new();
        out.insert("k_closed".to_string(), worst(&self.k, &self.k, Part::M));
        out.insert("ad_k_preserves_m".to_string(), worst(&self.k, &self.m, Part::K));
        if let Some(s) = self.split {
            let m0 = &self.m[..s];
            let m1 = &self.m[s..];
            out.insert("ad_k_preserves_m0".to_string(), worst(&self.k, m0, Part::M1));
            out.insert("ad_k_preserves_m1".to_string(), worst(&self.k, m1, Part::M0));
        }
        let g = self.algebra.gram();
        let mut cross = 0.0f64;
        for &i in &self.k {
            for &j in &self.m {
                cross = cross.max(g[(i, j)].abs());
            }
        }
        out.insert("gram_block_diagonal".to_string(), cross);
        out
    }

    pub fn check_reductive(&self) -> Result<()> {
        for (name, r) in self.reductive_residuals() {
            if r > SPLIT_TOL {
                return Err(Error::InvalidSplit(format!("{name} residual {r:.3e}")));
            }
        }
        Ok(())
    }

    /// Tests whether ν ⊂ 𝔪 is a Lie triple system invariant under the canonical
    /// connection, and whether ν + [ν,ν]_𝔨 is a subalgebra.
    pub fn lts_check(&self, nu: &[DVector<f64>]) -> Result<LtsReport> {
        let hat: Vec<DVector<f64>> = nu.iter().map(|v| &self.to_ortho * v).collect();
        if hat.is_empty() {
            return Err(Error::ZeroVector);
        }
        let q = linalg::orthonormalize(&DMatrix::from_columns(&hat), 1e-10);
        if q.ncols() == 0 {
            return Err(Error::ZeroVector);
        }
        let basis: Vec<DVector<f64>> = (0..q.ncols())
            .map(|i| self.embed(&(&self.from_ortho * q.column(i))))
            .collect();
        let proj = linalg::projector(&q);
        // Distance of a full vector's 𝔪-part from ν, in the metric.
        let off_nu = |v: &DVector<f64>| -> f64 {
            let h = &self.to_ortho * self.restrict(v);
            (&h - &proj * &h).norm()
        };
        let mut triple = 0.0f64;
        let mut invariant = 0.0f64;
        let mut k_parts = Vec::new();
        for a in 0..basis.len() {
            for b in (a + 1)..basis.len() {
                let br = self.bracket(&basis[a], &basis[b]);
                triple = triple.max(off_nu(&br));
                let bk = self.project(&br, Part::K)?;
                for c in &basis {
                    invariant = invariant.max(off_nu(&self.bracket(&bk, c)));
                }
                k_parts.push(bk);
            }
        }
        // Subalgebra test for ν ⊕ span [ν,ν]_𝔨 in full orthonormal coordinates.
        let chol = Cholesky::new(self.algebra.gram() / self.kappa).expect("positive gram");
        let lt = chol.l().transpose();
        let lt_inv = lt.clone().try_inverse().expect("invertible");
        let mut gen: Vec<DVector<f64>> = basis.iter().map(|v| &lt * v).collect();
        gen.extend(k_parts.iter().map(|v| &lt * v));
        let s = linalg::orthonormalize(&DMatrix::from_columns(&gen), 1e-9);
        let ps = linalg::projector(&s);
        let mut closure = 0.0f64;
        for i in 0..s.ncols() {
            for j in (i + 1)..s.ncols() {
                let x = &lt_inv * s.column(i);
                let y = &lt_inv * s.column(j);
                let h = &lt * self.bracket(&x, &y);
                closure = closure.max((&h - &ps * &h).norm());
            }
        }
        let mut residuals = BTreeMap::new();
        residuals.insert("lie_triple".to_string(), triple);
        residuals.insert("connection_invariant".to_string(), invariant);
        residuals.insert("subalgebra".to_string(), closure);
        Ok(LtsReport {
            dim: q.ncols(),
            lie_triple: triple < SPLIT_TOL,
            connection_invariant: invariant < SPLIT_TOL,
            subalgebra: closure < SPLIT_TOL,
            residuals,
        })
    }

    /// Minimizes ‖[x, y]‖² over orthonormal pairs of 𝔪; the space has rank one
    /// in the sense of the bracket criterion when the minimum stays positive.
    pub fn rank_one_check(&self, starts: usize, seed: u64, exec: Execution) -> RankOneReport {
        let form = self.bivector_form(1.0, 1.0);
        let n = self.dim();
        if n < 2 {
            return RankOneReport {
                min_bracket_sq: f64::INFINITY,
                rank_one: true,
                argmin: (DVector::zeros(n), DVector::zeros(n)),
            };
        }
        let f = |x: &DVector<f64>, y: &DVector<f64>| form.value(x, y);
        let g = |x: &DVector<f64>, y: &DVector<f64>| form.gradient(x, y);
        let runs = par::map_indexed(starts.max(1), exec, |i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let start = stiefel::random_pair(n, &mut rng);
            stiefel::descend(&f, &Gradient::Exact(&g), start, DescentOptions::default())
        });
        let best = runs
            .into_iter()
            .min_by(|a, b| a.value.total_cmp(&b.value))
            .expect("at least one start");
        RankOneReport {
            min_bracket_sq: best.value,
            rank_one: best.value > 1e-6,
            argmin: (&self.from_ortho * best.x, &self.from_ortho * best.y),
        }
    }

    /// Registered isotropy witness for a part, if any.
    pub fn witness(&self, part: Part) -> Option<&str> {
        self.witnesses.iter().find(|(p, _)| *p == part).map(|(_, l)| l.as_str())
    }

    pub fn expected_transitive(&self, part: Part) -> Option<bool> {
        self.expected_transitive.iter().find(|(p, _)| *p == part).map(|(_, b)| *b)
    }

    /// Dimension of {v ∈ part : [u, v]_𝔨 = 0} for u in 𝔪-coordinates.
    fn isotropy_kernel_dim(&self, u: &DVector<f64>, part: Part) -> Result<usize> {
        let range = self.m_positions(part)?;
        let ad = self.ad_full(u);
        let cols: Vec<usize> = range.map(|p| self.m[p]).collect();
        let a = DMatrix::from_fn(self.k.len(), cols.len(), |r, c| ad[(self.k[r], cols[c])]);
        Ok(linalg::null_space(&a, 1e-8, 1e-14).ncols())
    }

    /// Transitivity of the isotropy action on the unit sphere of a part of 𝔪:
    /// it holds iff some u in the part has {v : [u,v]_𝔨 = 0} = ℝu.
    pub fn isotropy_transitivity_check(&self, part: Part) -> Result<TransitivityReport> {
        let range = self.m_positions(part)?;
        let (u, witness) = match self.witness(part) {
            Some(label) => (self.m_basis(label)?, label.to_string()),
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(0x7a11);
                let mut found = None;
                for _ in 0..16 {
                    let u = self.random_unit(part, &mut rng)?;
                    if self.isotropy_kernel_dim(&u, part)? == 1 {
                        found = Some(u);
                        break;
                    }
                }
                match found {
                    Some(u) => (u, "random".to_string()),
                    None => return Err(Error::NoWitness(part.to_string())),
                }
            }
        };
        let kernel_dim = self.isotropy_kernel_dim(&u, part)?;
        Ok(TransitivityReport {
            part,
            witness,
            part_dim: range.len(),
            kernel_dim,
            transitive: kernel_dim == 1,
            expected: self.expected_transitive(part),
        })
    }

    /// exp(t ad_Z)·u restricted to 𝔪, for Z ∈ 𝔨 (full coefficients) and u ∈ 𝔪.
    pub fn ad_orbit_direction(&self, z: &DVector<f64>, u: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
        let zk = self.project(z, Part::K)?;
        if (z - &zk).amax() > 1e-12 {
            return Err(Error::BadAux("generator must lie in 𝔨".into()));
        }
        let ad = self.algebra.ad(&zk);
        let a = DMatrix::from_fn(self.dim(), self.dim(), |r, c| ad[(self.m[r], self.m[c])]);
        Ok((a * t).exp() * u)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LtsReport {
    pub dim: usize,
    pub lie_triple: bool,
    pub connection_invariant: bool,
    pub subalgebra: bool,
    pub residuals: BTreeMap<String, f64>,
}

#[derive(Debug, Clone)]
pub struct RankOneReport {
    pub min_bracket_sq: f64,
    pub rank_one: bool,
    pub argmin: (DVector<f64>, DVector<f64>),
}

#[derive(Debug, Clone, Serialize)]
pub struct TransitivityReport {
    pub part: Part,
    pub witness: String,
    pub part_dim: usize,
    pub kernel_dim: usize,
    pub transitive: bool,
    pub expected: Option<bool>,
}
