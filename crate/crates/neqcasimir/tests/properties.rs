use neqcasimir::cli::{parse_quantity, LENGTH_UNITS};
use neqcasimir::engine::EquilibriumTable;
use neqcasimir::materials::{epsilon, DielectricModel};
use neqcasimir::reference::log_grid;
use neqcasimir::specfun;
use neqcasimir::tmatrix::{full_t, thin_t};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bessel_wronskians(n in 0i32..8, x in 0.01f64..60.0) {
        let w = specfun::bessel_j(n, x).unwrap() * specfun::bessel_y_prime(n, x).unwrap()
            - specfun::bessel_j_prime(n, x).unwrap() * specfun::bessel_y(n, x).unwrap();
        prop_assert!((w * PI * x / 2.0 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn modified_bessel_wronskian(n in 0i32..8, x in 0.01f64..30.0) {
        let w = specfun::bessel_i(n, x).unwrap() * specfun::bessel_k_prime(n, x).unwrap()
            - specfun::bessel_i_prime(n, x).unwrap() * specfun::bessel_k(n, x).unwrap();
        prop_assert!((w * x + 1.0).abs() < 1e-9);
    }

    #[test]
    fn t_matrix_parities(re in 1.5f64..20.0, im in 0.0f64..5.0, kt in -0.99f64..3.0, x in 0.01f64..0.4) {
        let eps = Complex64::new(re, im);
        let one = Complex64::new(1.0, 0.0);
        let blocks = [
            (thin_t(1, kt, eps, one, x).unwrap(), thin_t(-1, kt, eps, one, x).unwrap()),
            (full_t(1, kt, eps, one, x).unwrap(), full_t(-1, kt, eps, one, x).unwrap()),
        ];
        for (a, b) in blocks {
            let tol = 1e-9 * a.max_abs().max(1e-300);
            prop_assert!((a.entries[0][1] - a.entries[1][0]).norm() <= tol);
            prop_assert!((a.entries[0][1] + b.entries[0][1]).norm() <= tol);
            prop_assert!((a.entries[0][0] - b.entries[0][0]).norm() <= tol);
        }
    }

    #[test]
    fn materials_are_passive(ev in 1e-4f64..2.0) {
        let omega = neqcasimir::units::ev_to_rad_per_s(ev);
        for m in [DielectricModel::sic(), DielectricModel::tungsten_2400k()] {
            prop_assert!(epsilon(&m, omega).unwrap().im >= 0.0);
        }
    }

    #[test]
    fn interpolation_stays_between_nodes(a in -1e-12f64..-1e-18, b in -1e-12f64..-1e-18, t in 0.0f64..1.0) {
        let table = EquilibriumTable::new(vec![1e-6, 2e-6], vec![a, b]).unwrap();
        let d = 1e-6 * (2f64).powf(t);
        let v = table.value_at(d).unwrap();
        prop_assert!(v >= a.min(b) * (1.0 + 1e-12) && v <= a.max(b) * (1.0 - 1e-12));
    }

    #[test]
    fn log_grids_are_increasing_and_exact_at_ends(start in 1e-8f64..1e-6, factor in 1.5f64..1e3, points in 2usize..100) {
        let stop = start * factor;
        let g = log_grid(start, stop, points);
        prop_assert_eq!(g.len(), points);
        prop_assert_eq!(g[0], start);
        prop_assert_eq!(g[points - 1], stop);
        prop_assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn lengths_parse_with_units(v in 1e-3f64..1e3) {
        let nm = parse_quantity(&format!("{v}nm"), &LENGTH_UNITS).unwrap();
        let um = parse_quantity(&format!("{v}um"), &LENGTH_UNITS).unwrap();
        prop_assert!((um / nm - 1e3).abs() < 1e-9);
    }
}
