// Multiplication tables and norm identities, each reduced to a maximum residual.

use homogeodesy::algebra::{a_mat, b_mat, c_mat, BasisMatrix};
use homogeodesy::catalog::{build_b13, build_berger, build_cp_odd, build_w7};
use homogeodesy::{ComplexMatrix, GramRule, Part, ReductiveSpace, StructuredAlgebra};
use nalgebra::DVector;

fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

fn combo(terms: &[(f64, ComplexMatrix)], n: usize) -> ComplexMatrix {
    terms
        .iter()
        .fold(ComplexMatrix::zeros(n), |acc, (c, m)| acc + m.clone() * *c)
}

fn bracket_matrix(alg: &StructuredAlgebra, x: &DVector<f64>, y: &DVector<f64>) -> ComplexMatrix {
    alg.matrix_of(&alg.bracket(x, y))
}

fn label_vec(alg: &StructuredAlgebra, label: &str) -> DVector<f64> {
    alg.basis_vector(alg.index_of(label).unwrap_or_else(|| panic!("no basis element {label}")))
}

fn label_mat(alg: &StructuredAlgebra, label: &str) -> ComplexMatrix {
    alg.matrix_of(&label_vec(alg, label))
}

#[derive(Clone, Copy)]
enum Kind {
    A,
    B,
    C,
}

/// [A,A], [A,B], …, [C,C] on 𝔰𝔲(4) in the basis A_{l,l+1}, B_{rj}, C_{rj}; the
/// general A_{rj} is the telescoping sum of consecutive A's.
pub fn abc_table() -> f64 {
    let n = 4;
    let mut basis = Vec::new();
    for l in 1..n {
        basis.push(BasisMatrix::new(format!("A_{l}"), a_mat(n, l, l + 1)));
    }
    let mut pairs = Vec::new();
    for r in 1..=n {
        for j in (r + 1)..=n {
            pairs.push((r, j));
            basis.push(BasisMatrix::new(format!("B_{r}{j}"), b_mat(n, r, j)));
            basis.push(BasisMatrix::new(format!("C_{r}{j}"), c_mat(n, r, j)));
        }
    }
    let alg = StructuredAlgebra::assemble("su(4)", basis, GramRule::Trace { factor: 0.5 }).unwrap();
    let coords = |kind: Kind, r: usize, j: usize| -> DVector<f64> {
        match kind {
            Kind::A => (r..j).fold(DVector::zeros(alg.dim()), |acc, l| acc + alg.basis_vector(l - 1)),
            Kind::B => label_vec(&alg, &format!("B_{r}{j}")),
            Kind::C => label_vec(&alg, &format!("C_{r}{j}")),
        }
    };
    let b = |j, k| b_mat(n, j, k);
    let c = |j, k| c_mat(n, j, k);
    let d = delta;
    let mut worst = 0.0f64;
    for &(r, j) in &pairs {
        for &(k, l) in &pairs {
            let expected = [
                (Kind::A, Kind::A, ComplexMatrix::zeros(n)),
                (
                    Kind::A,
                    Kind::B,
                    combo(
                        &[(d(r, k), c(r, l)), (-d(r, l), c(r, k)), (-d(j, k), c(j, l)), (d(j, l), c(j, k))],
                        n,
                    ),
                ),
                (
                    Kind::A,
                    Kind::C,
                    combo(
                        &[(-d(r, k), b(r, l)), (-d(r, l), b(r, k)), (d(j, k), b(j, l)), (d(j, l), b(j, k))],
                        n,
                    ),
                ),
                (
                    Kind::B,
                    Kind::B,
                    combo(
                        &[(d(j, k), b(r, l)), (-d(j, l), b(r, k)), (-d(r, k), b(j, l)), (d(r, l), b(j, k))],
                        n,
                    ),
                ),
                (
                    Kind::B,
                    Kind::C,
                    combo(
                        &[(d(j, l), c(r, k)), (d(j, k), c(r, l)), (-d(r, l), c(j, k)), (-d(r, k), c(j, l))],
                        n,
                    ),
                ),
                (
                    Kind::C,
                    Kind::C,
                    combo(
                        &[(-d(j, k), b(r, l)), (-d(j, l), b(r, k)), (-d(r, k), b(j, l)), (-d(r, l), b(j, k))],
                        n,
                    ),
                ),
            ];
            for (x, y, rhs) in expected {
                let lhs = bracket_matrix(&alg, &coords(x, r, j), &coords(y, k, l));
                worst = worst.max((&lhs - &rhs).max_abs());
            }
        }
    }
    worst
}

/// Brackets of X_p, Y_α, Y_{αp} in 𝔰𝔭(m+1) (realized on ℂP^{2m+1}), with
/// X_p, Y_α and the Z's rebuilt from A, B, C.
pub fn quaternionic_tables(m: usize) -> (f64, f64) {
    let space = build_cp_odd(m, 1.0).unwrap();
    let alg = space.algebra().clone();
    let n = 2 * m + 2;
    let (p0, q0) = (2 * m + 1, 2 * m + 2);
    let x = [a_mat(n, p0, q0), b_mat(n, p0, q0), c_mat(n, p0, q0)];
    let y = |al: usize| &b_mat(n, al, p0) + &b_mat(n, m + al, q0);
    let yp = |al: usize, p: usize| label_mat(&alg, &format!("Y_{{{al}{p}}}"));
    let z_ab = |al: usize, be: usize| &b_mat(n, al, be) + &b_mat(n, m + al, m + be);
    let z_ap = |al: usize, p: usize| match p {
        1 => a_mat(n, al, m + al),
        2 => b_mat(n, al, m + al),
        _ => c_mat(n, al, m + al),
    };
    let z_abp = |al: usize, be: usize, p: usize| match p {
        1 => &c_mat(n, al, be) - &c_mat(n, m + al, m + be),
        2 => &b_mat(n, al, m + be) + &b_mat(n, be, m + al),
        _ => &c_mat(n, al, m + be) + &c_mat(n, m + al, be),
    };
    // Coordinates of a matrix that is known to be a basis element or a sum of them.
    let coords = |mat: &ComplexMatrix| -> DVector<f64> {
        let mut v = DVector::zeros(alg.dim());
        for (i, bm) in alg.basis().iter().enumerate() {
            let num = bm.matrix.re_trace_product(mat, 0, n);
            let den = bm.matrix.re_trace_product(&bm.matrix, 0, n);
            v[i] = num / den;
        }
        assert!((&alg.matrix_of(&v) - mat).max_abs() < 1e-12, "not in the span of orthogonal basis");
        v
    };
    let br = |u: &ComplexMatrix, v: &ComplexMatrix| bracket_matrix(&alg, &coords(u), &coords(v));
    let cyc = [(1, 2, 3), (2, 3, 1), (3, 1, 2)];
    let mut s = 0.0f64;
    let mut s1 = 0.0f64;
    for &(p, q, r) in &cyc {
        let (xp, xq, xr) = (&x[p - 1], &x[q - 1], &x[r - 1]);
        s = s.max((&br(xp, xq) - &(xr.clone() * 2.0)).max_abs());
        for al in 1..=m {
            s = s.max((&br(xp, &y(al)) - &(yp(al, p) * -1.0)).max_abs());
            s = s.max((&br(xp, &yp(al, p)) - &y(al)).max_abs());
            s = s.max((&br(xp, &yp(al, q)) - &yp(al, r)).max_abs());
            let rhs = &(xp.clone() * -2.0) + &(z_ap(al, p) * 2.0);
            s = s.max((&br(&y(al), &yp(al, p)) - &rhs).max_abs());
            let rhs = &(xr.clone() * 2.0) + &(z_ap(al, r) * 2.0);
            s = s.max((&br(&yp(al, p), &yp(al, q)) - &rhs).max_abs());
            for be in 1..=m {
                if be == al {
                    continue;
                }
                s = s.max((&br(&y(al), &y(be)) - &(z_ab(al, be) * -1.0)).max_abs());
                s1 = s1.max((&br(&y(al), &yp(be, p)) - &z_abp(al, be, p)).max_abs());
                s1 = s1.max((&br(&yp(al, p), &yp(be, p)) - &(z_ab(al, be) * -1.0)).max_abs());
                s1 = s1.max((&br(&yp(al, p), &yp(be, q)) - &z_abp(al, be, r)).max_abs());
            }
        }
    }
    (s, s1)
}

fn alpha(j: usize) -> f64 {
    ((j * (j + 1)) as f64 / 2.0).sqrt()
}

/// Brackets of 𝔪_s on the Berger sphere S^{2m+1}, s < 1.
pub fn berger_table(m: usize, s: f64) -> f64 {
    let space = build_berger(m, s, 1.0).unwrap();
    let alg = space.algebra().clone();
    let v = |l: &str| label_vec(&alg, l);
    let mat = |l: &str| label_mat(&alg, l);
    let n = alg.basis()[0].matrix.size();
    let c0 = s.sqrt() * (m as f64 + 1.0) / alpha(m);
    let mut worst = 0.0f64;
    for r in 1..=m {
        let (er, fr) = (format!("e_{r}"), format!("f_{r}"));
        let lhs = bracket_matrix(&alg, &v("d_s"), &v(&er));
        worst = worst.max((&lhs - &(mat(&fr) * c0)).max_abs());
        let lhs = bracket_matrix(&alg, &v("d_s"), &v(&fr));
        worst = worst.max((&lhs - &(mat(&er) * -c0)).max_abs());
        for j in 1..=m {
            if j == r {
                continue;
            }
            let (ej, fj) = (format!("e_{j}"), format!("f_{j}"));
            let brj = b_mat(n, r, j);
            let crj = c_mat(n, r, j);
            worst = worst.max((&bracket_matrix(&alg, &v(&er), &v(&ej)) - &(brj.clone() * -1.0)).max_abs());
            worst = worst.max((&bracket_matrix(&alg, &v(&fr), &v(&fj)) - &(brj * -1.0)).max_abs());
            worst = worst.max((&bracket_matrix(&alg, &v(&er), &v(&fj)) - &crj).max_abs());
        }
        let k = (m as f64 + 1.0) / alpha(m);
        let mut terms = vec![(k * s.sqrt(), mat("d_s")), (k * (1.0 - s).sqrt(), mat("h_s"))];
        if r >= 2 {
            terms.push(((1.0 - r as f64) / alpha(r - 1), mat(&format!("S_{}", r - 1))));
        }
        for j in r..m {
            terms.push((1.0 / alpha(j), mat(&format!("S_{j}"))));
        }
        let rhs = combo(&terms, n);
        worst = worst.max((&bracket_matrix(&alg, &v(&er), &v(&fr)) - &rhs).max_abs());
    }
    worst
}

fn orthonormal_pairs(space: &ReductiveSpace, part: Part) -> Vec<(DVector<f64>, DVector<f64>)> {
    let idx = space.m_positions(part).unwrap();
    let labels: Vec<String> = idx.map(|i| space.m_label(i).to_string()).collect();
    let mut out = Vec::new();
    for a in 0..labels.len() {
        for b in (a + 1)..labels.len() {
            out.push((space.m_basis(&labels[a]).unwrap(), space.m_basis(&labels[b]).unwrap()));
        }
    }
    out
}

fn part_norm_sq(space: &ReductiveSpace, x: &DVector<f64>, part: Part) -> f64 {
    let p = space.project(x, part).unwrap();
    space.inner(&p, &p)
}

/// ‖[e_r,f_r]_𝔥‖² = 7, ‖[e_r,f_r]_𝔪‖² = ‖[e_r,f_r]_𝔪₀‖² = 1 and, for orthonormal
/// u, v ∈ 𝔪₀, ‖[u,v]‖² = ‖[u,v]_𝔥‖² = 4.
pub fn b13_norms() -> f64 {
    let space = build_b13().unwrap();
    let mut worst = 0.0f64;
    for r in 1..=4 {
        let e = space.embed(&space.m_basis(&format!("e_{r}")).unwrap());
        let f = space.embed(&space.m_basis(&format!("f_{r}")).unwrap());
        let b = space.bracket(&e, &f);
        worst = worst.max((part_norm_sq(&space, &b, Part::K) - 7.0).abs());
        worst = worst.max((part_norm_sq(&space, &b, Part::M) - 1.0).abs());
        worst = worst.max((part_norm_sq(&space, &b, Part::M0) - 1.0).abs());
    }
    for (u, v) in orthonormal_pairs(&space, Part::M0) {
        let b = space.bracket(&space.embed(&u), &space.embed(&v));
        worst = worst.max((space.inner(&b, &b) - 4.0).abs());
        worst = worst.max((part_norm_sq(&space, &b, Part::K) - 4.0).abs());
    }
    worst
}

/// For orthonormal u, v in the vertical part of W⁷:
/// ‖[u,v]_𝔪‖² = 4(1−s)²/(s(1+s)) and ‖[u,v]_𝔨‖² = 4/(1+s).
pub fn w7_norms(s: f64) -> f64 {
    let space = build_w7(s).unwrap();
    let mut worst = 0.0f64;
    for (u, v) in orthonormal_pairs(&space, Part::M0) {
        let b = space.bracket(&space.embed(&u), &space.embed(&v));
        let want_m = 4.0 * (1.0 - s).powi(2) / (s * (1.0 + s));
        worst = worst.max((part_norm_sq(&space, &b, Part::M) - want_m).abs());
        worst = worst.max((part_norm_sq(&space, &b, Part::K) - 4.0 / (1.0 + s)).abs());
    }
    worst
}

/// Every table entry and norm identity, as (name, max residual).
pub fn all_residuals() -> Vec<(String, f64)> {
    let mut out = vec![("su(4) A/B/C table".to_string(), abc_table())];
    for m in 1..=3 {
        let (s, s1) = quaternionic_tables(m);
        out.push((format!("sp({}) X/Y table", m + 1), s));
        if m > 1 {
            out.push((format!("sp({}) mixed Y table", m + 1), s1));
        }
    }
    for m in 1..=3 {
        for s in [0.25, 0.5, 2.0 / 3.0, 0.9] {
            out.push((format!("Berger m={m} s={s} table"), berger_table(m, s)));
        }
    }
    out.push(("B13 bracket norms".to_string(), b13_norms()));
    for s in [0.25, 0.5, 2.0 / 3.0, 0.9, 1.0] {
        out.push((format!("W7 s={s} bracket norms"), w7_norms(s)));
    }
    out
}
