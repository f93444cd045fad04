mod common;

use common::tables;

const TOL: f64 = 1e-10;

#[test]
fn su4_abc_table() {
    let r = tables::abc_table();
    assert!(r < TOL, "residual {r:e}");
}

#[test]
fn quaternionic_tables_hold_for_small_m() {
    for m in 1..=3 {
        let (s, s1) = tables::quaternionic_tables(m);
        assert!(s < TOL, "m={m}: X/Y table residual {s:e}");
        assert!(s1 < TOL, "m={m}: mixed Y table residual {s1:e}");
    }
}

#[test]
fn berger_table_across_grid() {
    for m in 1..=3 {
        for s in [0.25, 0.5, 2.0 / 3.0, 0.9] {
            let r = tables::berger_table(m, s);
            assert!(r < TOL, "m={m} s={s}: residual {r:e}");
        }
    }
}

#[test]
fn b13_norm_identities() {
    let r = tables::b13_norms();
    assert!(r < TOL, "residual {r:e}");
}

#[test]
fn w7_norm_identities() {
    for s in [0.25, 0.5, 2.0 / 3.0, 0.9, 1.0] {
        let r = tables::w7_norms(s);
        assert!(r < TOL, "s={s}: residual {r:e}");
    }
}
