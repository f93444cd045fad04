//! Matrix Lie algebras given by an explicit basis of complex matrices, with
//! structure constants and a block-scaled trace form.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Square complex matrix stored as separate real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    pub re: DMatrix<f64>,
    pub im: DMatrix<f64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            re: DMatrix::zeros(n, n),
            im: DMatrix::zeros(n, n),
        }
    }

    pub fn size(&self) -> usize {
        self.re.nrows()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        Self {
            re: &self.re * &other.re - &self.im * &other.im,
            im: &self.re * &other.im + &self.im * &other.re,
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// Re tr(XY) restricted to the diagonal block `[start, end)`.
    pub fn re_trace_product(&self, other: &Self, start: usize, end: usize) -> f64 {
        let mut acc = 0.0;
        for i in start..end {
            for j in start..end {
                acc += self.re[(i, j)] * other.re[(j, i)] - self.im[(i, j)] * other.im[(j, i)];
            }
        }
        acc
    }

    /// Largest entry of X + X† (zero for skew-Hermitian X).
    pub fn skew_hermitian_defect(&self) -> f64 {
        let r = &self.re + self.re.transpose();
        let i = &self.im - self.im.transpose();
        linalg::max_abs(&r).max(linalg::max_abs(&i))
    }

    pub fn trace(&self) -> (f64, f64) {
        (self.re.trace(), self.im.trace())
    }

    fn flatten_into(&self, out: &mut [f64]) {
        let n2 = self.re.len();
        out[..n2].copy_from_slice(self.re.as_slice());
        out[n2..2 * n2].copy_from_slice(self.im.as_slice());
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.re).max(linalg::max_abs(&self.im))
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: f64) -> ComplexMatrix {
        ComplexMatrix {
            re: &self.re * rhs,
            im: &self.im * rhs,
        }
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: ComplexMatrix) -> ComplexMatrix {
        &self + &rhs
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: ComplexMatrix) -> ComplexMatrix {
        &self - &rhs
    }
}

impl Mul<f64> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: f64) -> ComplexMatrix {
        &self * rhs
    }
}

/// A_jk = i(E_jj − E_kk), 1-based indices.
pub fn a_mat(n: usize, j: usize, k: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n);
    m.im[(j - 1, j - 1)] = 1.0;
    m.im[(k - 1, k - 1)] -= 1.0;
    m
}

/// B_jk = E_jk − E_kj, 1-based indices.
pub fn b_mat(n: usize, j: usize, k: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n);
    m.re[(j - 1, k - 1)] = 1.0;
    m.re[(k - 1, j - 1)] -= 1.0;
    m
}

/// C_jk = i(E_jk + E_kj), 1-based indices.
pub fn c_mat(n: usize, j: usize, k: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n);
    m.im[(j - 1, k - 1)] = 1.0;
    m.im[(k - 1, j - 1)] += 1.0;
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisMatrix {
    pub label: String,
    pub matrix: ComplexMatrix,
}

impl BasisMatrix {
    pub fn new(label: impl Into<String>, matrix: ComplexMatrix) -> Self {
        Self {
            label: label.into(),
            matrix,
        }
    }
}

/// Diagonal block `[start, end)` of the matrix with its trace-form factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceBlock {
    pub start: usize,
    pub end: usize,
    pub factor: f64,
}

/// How the inner product of two basis matrices is computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GramRule {
    /// ⟨X, Y⟩ = −factor · Re tr(XY).
    Trace { factor: f64 },
    /// Sum of per-block trace forms.
    Blocks { blocks: Vec<TraceBlock> },
    /// Gram matrix given directly in the basis.
    Explicit { rows: Vec<Vec<f64>> },
}

impl GramRule {
    fn evaluate(&self, x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
        match self {
            GramRule::Trace { factor } => -factor * x.re_trace_product(y, 0, x.size()),
            GramRule::Blocks { blocks } => blocks
                .iter()
                .map(|b| -b.factor * x.re_trace_product(y, b.start, b.end))
                .sum(),
            GramRule::Explicit { .. } => unreachable!("explicit gram has no matrix form"),
        }
    }
}

const CLOSURE_TOL: f64 = 1e-10;

/// A Lie algebra with a fixed basis, its structure constants and an inner product.
#[derive(Debug, Clone)]
pub struct StructuredAlgebra {
    name: String,
    basis: Vec<BasisMatrix>,
    gram_rule: GramRule,
    gram: DMatrix<f64>,
    structure: Vec<f64>,
    triples: Vec<(usize, usize, usize, f64)>,
}

impl StructuredAlgebra {
    /// Computes structure constants by expanding every commutator in the basis
    /// and evaluates the gram matrix from `gram_rule`.
    pub fn assemble(name: impl Into<String>, basis: Vec<BasisMatrix>, gram_rule: GramRule) -> Result<Self> {
        let d = basis.len();
        if d == 0 {
            return Err(Error::InvalidBasis("empty basis".into()));
        }
        let n = basis[0].matrix.size();
        let mut seen = HashSet::new();
        for b in &basis {
            if b.matrix.re.shape() != (n, n) || b.matrix.im.shape() != (n, n) {
                return Err(Error::InvalidBasis(format!("{} has the wrong shape", b.label)));
            }
            if !seen.insert(b.label.clone()) {
                return Err(Error::InvalidBasis(format!("duplicate label {}", b.label)));
            }
            if b.matrix.skew_hermitian_defect() > 1e-12 {
                return Err(Error::InvalidBasis(format!("{} is not skew-Hermitian", b.label)));
            }
            if b.matrix.trace().1.abs() > 1e-12 {
                return Err(Error::InvalidBasis(format!("{} is not traceless", b.label)));
            }
        }
        if let GramRule::Blocks { blocks } = &gram_rule {
            for blk in blocks {
                if blk.start >= blk.end || blk.end > n {
                    return Err(Error::InvalidBasis(format!(
                        "trace block [{}, {}) outside {n}×{n}",
                        blk.start, blk.end
                    )));
                }
            }
        }

        let rows = 2 * n * n;
        let mut design = DMatrix::zeros(rows, d);
        let mut buf = vec![0.0; rows];
        for (j, b) in basis.iter().enumerate() {
            b.matrix.flatten_into(&mut buf);
            design.set_column(j, &DVector::from_column_slice(&buf));
        }
        let sv = linalg::singular_values(&design);
        if sv.min() <= 1e-10 * sv.max() {
            return Err(Error::InvalidBasis("basis matrices are linearly dependent".into()));
        }
        let qr = design.clone().qr();
        let (q, r) = (qr.q(), qr.r());

        let mut structure = vec![0.0; d * d * d];
        for i in 0..d {
            for j in (i + 1)..d {
                let comm = basis[i].matrix.commutator(&basis[j].matrix);
                comm.flatten_into(&mut buf);
                let target = DVector::from_column_slice(&buf);
                let coords = r
                    .solve_upper_triangular(&(q.transpose() * &target))
                    .ok_or_else(|| Error::InvalidBasis("singular basis".into()))?;
                let residual = (&design * &coords - &target).amax();
                if residual > CLOSURE_TOL * comm.max_abs().max(1.0) {
                    return Err(Error::NotClosed {
                        left: basis[i].label.clone(),
                        right: basis[j].label.clone(),
                        residual,
                    });
                }
                for k in 0..d {
                    let c = if coords[k].abs() < 1e-13 { 0.0 } else { coords[k] };
                    structure[(i * d + j) * d + k] = c;
                    structure[(j * d + i) * d + k] = -c;
                }
            }
        }

        let gram = match &gram_rule {
            GramRule::Explicit { rows } => explicit_gram(rows, d)?,
            rule => {
                let mut g = DMatrix::zeros(d, d);
                for i in 0..d {
                    for j in i..d {
                        let v = rule.evaluate(&basis[i].matrix, &basis[j].matrix);
                        g[(i, j)] = v;
                        g[(j, i)] = v;
                    }
                }
                g
            }
        };
        check_positive(&gram)?;

        Ok(Self::from_parts(name.into(), basis, gram_rule, gram, structure))
    }

    fn from_parts(
        name: String,
        basis: Vec<BasisMatrix>,
        gram_rule: GramRule,
        gram: DMatrix<f64>,
        structure: Vec<f64>,
    ) -> Self {
        let d = basis.len();
        let mut triples = Vec::new();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let c = structure[(i * d + j) * d + k];
                    if c != 0.0 {
                        triples.push((i, j, k, c));
                    }
                }
            }
        }
        Self {
            name,
            basis,
            gram_rule,
            gram,
            structure,
            triples,
        }
    }

    /// Same algebra with a different inner product.
    pub fn with_gram(&self, gram: DMatrix<f64>) -> Result<Self> {
        let d = self.dim();
        if gram.shape() != (d, d) {
            return Err(Error::InvalidBasis(format!("gram must be {d}×{d}")));
        }
        let gram = (&gram + gram.transpose()) * 0.5;
        check_positive(&gram)?;
        let rows = (0..d).map(|i| gram.row(i).iter().cloned().collect()).collect();
        Ok(Self::from_parts(
            self.name.clone(),
            self.basis.clone(),
            GramRule::Explicit { rows },
            gram,
            self.structure.clone(),
        ))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisMatrix] {
        &self.basis
    }

    pub fn label(&self, i: usize) -> &str {
        &self.basis[i].label
    }

    pub fn labels(&self) -> Vec<&str> {
        self.basis.iter().map(|b| b.label.as_str()).collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.label == label)
    }

    pub fn gram_rule(&self) -> &GramRule {
        &self.gram_rule
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Coefficient of b_k in [b_i, b_j].
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        let d = self.dim();
        self.structure[(i * d + j) * d + k]
    }

    /// Nonzero structure constants as (i, j, k, c_ij^k).
    pub fn structure_triples(&self) -> &[(usize, usize, usize, f64)] {
        &self.triples
    }

    /// Bracket of two coefficient vectors.
    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        for &(i, j, k, c) in &self.triples {
            let xi = x[i];
            if xi != 0.0 {
                out[k] += c * xi * y[j];
            }
        }
        out
    }

    /// Matrix of ad_x acting on coefficient vectors.
    pub fn ad(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        for &(i, j, k, c) in &self.triples {
            out[(k, j)] += c * x[i];
        }
        out
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.gram * y))
    }

    pub fn norm(&self, x: &DVector<f64>) -> f64 {
        self.inner(x, x).max(0.0).sqrt()
    }

    pub fn basis_vector(&self, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim());
        v[i] = 1.0;
        v
    }

    /// Σ xᵢ bᵢ as a matrix.
    pub fn matrix_of(&self, x: &DVector<f64>) -> ComplexMatrix {
        let n = self.basis[0].matrix.size();
        let mut m = ComplexMatrix::zeros(n);
        for (i, b) in self.basis.iter().enumerate() {
            if x[i] != 0.0 {
                m.re += &b.matrix.re * x[i];
                m.im += &b.matrix.im * x[i];
            }
        }
        m
    }

    /// Max over i<j<k of the Jacobi-identity defect, with the worst triple.
    pub fn jacobi_identity_residual(&self) -> (f64, [usize; 3]) {
        let d = self.dim();
        let mut worst = (0.0, [0, 0, 0]);
        let basis: Vec<DVector<f64>> = (0..d).map(|i| self.basis_vector(i)).collect();
        let brackets: Vec<Vec<DVector<f64>>> = (0..d)
            .map(|i| (0..d).map(|j| self.bracket(&basis[i], &basis[j])).collect())
            .collect();
        for i in 0..d {
            for j in (i + 1)..d {
                for k in (j + 1)..d {
                    let r = self.bracket(&brackets[i][j], &basis[k])
                        + self.bracket(&brackets[j][k], &basis[i])
                        + self.bracket(&brackets[k][i], &basis[j]);
                    let v = r.amax();
                    if v > worst.0 {
                        worst = (v, [i, j, k]);
                    }
                }
            }
        }
        worst
    }

    /// |⟨[bᵢ,bⱼ],bₖ⟩ + ⟨[bᵢ,bₖ],bⱼ⟩|.
    pub fn biinvariance_triple(&self, i: usize, j: usize, k: usize) -> f64 {
        let d = self.dim();
        let mut a = 0.0;
        let mut b = 0.0;
        for l in 0..d {
            a += self.structure_constant(i, j, l) * self.gram[(l, k)];
            b += self.structure_constant(i, k, l) * self.gram[(l, j)];
        }
        (a + b).abs()
    }

    /// Max bi-invariance defect over all basis triples, with the worst triple.
    pub fn biinvariance_residual(&self) -> (f64, [usize; 3]) {
        let d = self.dim();
        // t[i][j][k] = ⟨[bᵢ,bⱼ],bₖ⟩
        let mut t = vec![0.0; d * d * d];
        for &(i, j, l, c) in &self.triples {
            for k in 0..d {
                t[(i * d + j) * d + k] += c * self.gram[(l, k)];
            }
        }
        let mut worst = (0.0, [0, 0, 0]);
        for i in 0..d {
            for j in 0..d {
                for k in j..d {
                    let v = (t[(i * d + j) * d + k] + t[(i * d + k) * d + j]).abs();
                    if v > worst.0 {
                        worst = (v, [i, j, k]);
                    }
                }
            }
        }
        worst
    }

    /// Sparse structure tensor as CSV with header `i,j,k,value` (0-based indices).
    pub fn structure_csv(&self) -> String {
        let mut out = String::from("i,j,k,value\n");
        for &(i, j, k, c) in &self.triples {
            let _ = writeln!(out, "{i},{j},{k},{}", crate::report::sig12(c));
        }
        out
    }

    pub fn to_spec(&self) -> AlgebraSpec {
        AlgebraSpec {
            name: self.name.clone(),
            dim: self.dim(),
            basis: self
                .basis
                .iter()
                .map(|b| BasisEntry {
                    label: b.label.clone(),
                    re: matrix_rows(&b.matrix.re),
                    im: matrix_rows(&b.matrix.im),
                })
                .collect(),
            gram_rule: self.gram_rule.clone(),
        }
    }

    pub fn from_spec(spec: &AlgebraSpec) -> Result<Self> {
        if spec.basis.len() != spec.dim {
            return Err(Error::InvalidBasis(format!(
                "dim {} but {} basis entries",
                spec.dim,
                spec.basis.len()
            )));
        }
        let basis = spec
            .basis
            .iter()
            .map(|e| {
                Ok(BasisMatrix::new(
                    e.label.clone(),
                    ComplexMatrix {
                        re: rows_matrix(&e.re)?,
                        im: rows_matrix(&e.im)?,
                    },
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::assemble(spec.name.clone(), basis, spec.gram_rule.clone())
    }
}

fn explicit_gram(rows: &[Vec<f64>], d: usize) -> Result<DMatrix<f64>> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(Error::InvalidBasis(format!("explicit gram must be {d}×{d}")));
    }
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

fn check_positive(gram: &DMatrix<f64>) -> Result<()> {
    let asym = linalg::max_abs(&(gram - gram.transpose()));
    // For a positive definite matrix the eigenvalues are the singular values;
    // indefiniteness is caught by the Cholesky attempt.
    let min = linalg::singular_values(gram).iter().cloned().fold(f64::INFINITY, f64::min);
    if asym > 1e-12 || min <= 1e-12 || Cholesky::new(gram.clone()).is_none() {
        return Err(Error::DegenerateGram { min_eigenvalue: min });
    }
    Ok(())
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().cloned().collect()).collect()
}

fn rows_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidBasis("basis matrix is not square".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Serialized form of an algebra: `{name, dim, basis: [{label, re, im}], gram_rule}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub name: String,
    pub dim: usize,
    pub basis: Vec<BasisEntry>,
    pub gram_rule: GramRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisEntry {
    pub label: String,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// An element of a particular algebra, tagged so brackets across algebras are refused.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    algebra: Arc<StructuredAlgebra>,
    coeffs: DVector<f64>,
}

impl AlgebraElement {
    pub fn new(algebra: Arc<StructuredAlgebra>, coeffs: DVector<f64>) -> Result<Self> {
        if coeffs.len() != algebra.dim() {
            return Err(Error::InvalidBasis(format!(
                "expected {} coefficients, got {}",
                algebra.dim(),
                coeffs.len()
            )));
        }
        Ok(Self { algebra, coeffs })
    }

    pub fn basis(algebra: Arc<StructuredAlgebra>, label: &str) -> Result<Self> {
        let i = algebra
            .index_of(label)
            .ok_or_else(|| Error::InvalidBasis(format!("no basis element {label}")))?;
        let coeffs = algebra.basis_vector(i);
        Ok(Self { algebra, coeffs })
    }

    pub fn algebra(&self) -> &Arc<StructuredAlgebra> {
        &self.algebra
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }

    fn same_algebra(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.algebra, &other.algebra) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.same_algebra(other)?;
        Ok(Self {
            algebra: self.algebra.clone(),
            coeffs: self.algebra.bracket(&self.coeffs, &other.coeffs),
        })
    }

    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.same_algebra(other)?;
        Ok(self.algebra.inner(&self.coeffs, &other.coeffs))
    }

    pub fn norm(&self) -> f64 {
        self.algebra.norm(&self.coeffs)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_algebra(other)?;
        Ok(Self {
            algebra: self.algebra.clone(),
            coeffs: &self.coeffs + &other.coeffs,
        })
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            algebra: self.algebra.clone(),
            coeffs: &self.coeffs * a,
        }
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        self.algebra.matrix_of(&self.coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn su2() -> StructuredAlgebra {
        StructuredAlgebra::assemble(
            "su(2)",
            vec![
                BasisMatrix::new("A", a_mat(2, 1, 2)),
                BasisMatrix::new("B", b_mat(2, 1, 2)),
                BasisMatrix::new("C", c_mat(2, 1, 2)),
            ],
            GramRule::Trace { factor: 0.5 },
        )
        .unwrap()
    }

    #[test]
    fn su2_brackets_and_gram() {
        let g = su2();
        assert!((g.gram() - DMatrix::identity(3, 3)).amax() < 1e-15);
        // [A, B] = 2C, [B, C] = 2A, [C, A] = 2B
        assert!((g.structure_constant(0, 1, 2) - 2.0).abs() < 1e-14);
        assert!((g.structure_constant(1, 2, 0) - 2.0).abs() < 1e-14);
        assert!((g.structure_constant(2, 0, 1) - 2.0).abs() < 1e-14);
        assert!(g.jacobi_identity_residual().0 < 1e-13);
        assert!(g.biinvariance_residual().0 < 1e-13);
    }

    #[test]
    fn reconstruction_matches_commutator() {
        let g = su2();
        let x = DVector::from_vec(vec![0.3, -1.2, 0.7]);
        let y = DVector::from_vec(vec![1.1, 0.4, -0.5]);
        let lhs = g.matrix_of(&g.bracket(&x, &y));
        let rhs = g.matrix_of(&x).commutator(&g.matrix_of(&y));
        assert!((&lhs - &rhs).max_abs() < 1e-13);
    }

    #[test]
    fn non_closed_span_is_rejected() {
        let err = StructuredAlgebra::assemble(
            "partial",
            vec![BasisMatrix::new("A", a_mat(2, 1, 2)), BasisMatrix::new("B", b_mat(2, 1, 2))],
            GramRule::Trace { factor: 0.5 },
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotClosed { .. }));
    }

    #[test]
    fn indefinite_gram_is_rejected() {
        let err = StructuredAlgebra::assemble(
            "su(2)",
            vec![
                BasisMatrix::new("A", a_mat(2, 1, 2)),
                BasisMatrix::new("B", b_mat(2, 1, 2)),
                BasisMatrix::new("C", c_mat(2, 1, 2)),
            ],
            GramRule::Trace { factor: -0.5 },
        )
        .unwrap_err();
        assert!(matches!(err, Error::DegenerateGram { .. }));
    }

    #[test]
    fn dependent_or_duplicate_basis_is_rejected() {
        let dep = StructuredAlgebra::assemble(
            "dep",
            vec![BasisMatrix::new("A", a_mat(2, 1, 2)), BasisMatrix::new("A2", a_mat(2, 1, 2) * 2.0)],
            GramRule::Trace { factor: 0.5 },
        );
        assert!(matches!(dep, Err(Error::InvalidBasis(_))));
        let dup = StructuredAlgebra::assemble(
            "dup",
            vec![BasisMatrix::new("A", a_mat(2, 1, 2)), BasisMatrix::new("A", b_mat(2, 1, 2))],
            GramRule::Trace { factor: 0.5 },
        );
        assert!(matches!(dup, Err(Error::InvalidBasis(_))));
    }

    #[test]
    fn cross_algebra_bracket_is_refused() {
        let a = Arc::new(su2());
        let b = Arc::new(su2());
        let x = AlgebraElement::basis(a.clone(), "A").unwrap();
        let y = AlgebraElement::basis(b, "B").unwrap();
        assert!(matches!(x.bracket(&y), Err(Error::AlgebraMismatch)));
        let z = AlgebraElement::basis(a, "B").unwrap();
        let w = x.bracket(&z).unwrap();
        assert!((w.norm() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn json_round_trip() {
        let g = su2();
        let text = serde_json::to_string(&g.to_spec()).unwrap();
        let spec: AlgebraSpec = serde_json::from_str(&text).unwrap();
        let h = StructuredAlgebra::from_spec(&spec).unwrap();
        assert_eq!(g.structure_triples(), h.structure_triples());
        assert_eq!(g.gram(), h.gram());
    }
}
