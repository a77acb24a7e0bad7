use std::f64::consts::TAU;

use proptest::prelude::*;
use ptlattice::lattice::{
    bloch_eigenvector, characteristic_determinant, dispersion, eigen_residual, threshold_and_gap, Branch,
};
use ptlattice::{Complex64, LatticeParams64};

fn params() -> impl Strategy<Value = LatticeParams64> {
    (0.05..2.0f64, 0.05..2.0f64, 0.0..1.5f64, 0.0..TAU, 0.0..1.5f64)
        .prop_map(|(k, s, r, p, g)| LatticeParams64::new(k, s, r, p, g).unwrap())
}

fn grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| TAU * k as f64 / n as f64)
}

/// Hausdorff distance between `{a, b}` and `{a*, b*}`.
fn conjugate_set_distance(a: Complex64, b: Complex64) -> f64 {
    let d = |x: Complex64| (x - a.conj()).norm().min((x - b.conj()).norm());
    let e = |x: Complex64| (x.conj() - a).norm().min((x.conj() - b).norm());
    d(a).max(d(b)).max(e(a)).max(e(b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn band_pair_is_closed_under_conjugation(p in params()) {
        for q in grid(1024) {
            let (ep, em) = dispersion(&p, q);
            prop_assert!(conjugate_set_distance(ep, em) <= 1e-12);
        }
    }

    #[test]
    fn bands_are_real_without_gain(p in params()) {
        let p = p.with_g(0.0).unwrap();
        for q in grid(1024) {
            let (ep, em) = dispersion(&p, q);
            prop_assert!(ep.im.abs() <= 1e-14 && em.im.abs() <= 1e-14);
        }
    }

    #[test]
    fn eigenvectors_solve_the_bloch_system(p in params()) {
        for q in grid(1024) {
            if p.radicand(q).abs() < 1e-8 {
                continue;
            }
            for branch in [Branch::Plus, Branch::Minus] {
                let (ep, em) = dispersion(&p, q);
                let e = if branch == Branch::Plus { ep } else { em };
                let v = bloch_eigenvector(&p, q, branch);
                let r = eigen_residual(&p, q, e, &v);
                prop_assert!(r <= 1e-10, "q = {q}, {branch:?}: residual {r}");
            }
        }
    }

    #[test]
    fn band_energies_zero_the_determinant(p in params()) {
        for q in grid(1024) {
            let (ep, em) = dispersion(&p, q);
            prop_assert!(characteristic_determinant(&p, q, ep).norm() <= 1e-10);
            prop_assert!(characteristic_determinant(&p, q, em).norm() <= 1e-10);
        }
    }

    #[test]
    fn gap_at_zone_edge_matches_threshold_formula(p in params(), frac in 0.0..1.0f64) {
        let (g_th, _) = threshold_and_gap(&p);
        let p = p.with_g(frac * g_th).unwrap();
        let (_, gap) = threshold_and_gap(&p);
        let (ep, em) = dispersion(&p, std::f64::consts::PI);
        prop_assert!(((ep - em).norm() - gap).abs() <= 1e-12);
    }
}
