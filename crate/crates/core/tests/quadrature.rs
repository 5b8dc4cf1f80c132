mod common;

use carleman_core::laguerre::{laguerre_functions, DEFAULT_SCALE};
use carleman_core::quadrature::{gauss_legendre_reference, inner, l2_norm, make_grid, sup_norm, Rule};
use carleman_core::spectral::orthonormality_defect;
use carleman_core::{Error, GridFn};
use common::*;
use proptest::prelude::*;

#[test]
fn gauss_legendre_is_exact_to_degree_2n_minus_1() {
    for n in 1..=20 {
        let (x, w) = gauss_legendre_reference(n).unwrap();
        for deg in 0..2 * n {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((got - want).abs() < 1e-13, "n={n} deg={deg}: {got} vs {want}");
        }
    }
}

#[test]
fn mapped_rule_integrates_polynomials_on_the_half_line_window() {
    let g = make_grid(3.0, 5, Rule::GaussLegendre).unwrap();
    // ∫_0^3 s^9 ds = 3^10 / 10
    let got = g.integrate(|s| s.powi(9));
    assert!((got - 3f64.powi(10) / 10.0).abs() < 1e-9 * 5904.9);
}

#[test]
fn trapezoid_weights_sum_to_cutoff() {
    for n in 2..40 {
        let g = make_grid(7.5, n, Rule::Trapezoid).unwrap();
        assert!((g.weights().iter().sum::<f64>() - 7.5).abs() < 1e-12);
    }
}

#[test]
fn invalid_grids_are_rejected() {
    assert!(matches!(make_grid(0.0, 4, Rule::GaussLegendre), Err(Error::InvalidArgument(_))));
    assert!(matches!(make_grid(1.0, 0, Rule::GaussLegendre), Err(Error::InvalidArgument(_))));
    assert!(matches!(make_grid(f64::NAN, 4, Rule::Trapezoid), Err(Error::InvalidArgument(_))));
}

#[test]
fn scaled_laguerre_family_is_orthonormal_on_64_nodes() {
    let g = laguerre_grid();
    let raw = carleman_core::laguerre::sample_family(&g, 16, DEFAULT_SCALE);
    assert!(orthonormality_defect(&raw) < 1e-9);
    // brute-force Gram matrix with an independent loop
    for m in 0..16 {
        for n in 0..16 {
            let mut acc = 0.0;
            for (&s, &w) in g.points().iter().zip(g.weights()) {
                let v = laguerre_functions(16, DEFAULT_SCALE, s);
                acc += w * v[m] * v[n];
            }
            let want = if m == n { 1.0 } else { 0.0 };
            assert!((acc - want).abs() < 1e-9, "({m},{n}) = {acc}");
        }
    }
}

#[test]
fn norms_of_simple_functions() {
    let g = make_grid(4.0, 8, Rule::GaussLegendre).unwrap();
    let z = GridFn::zeros(&g);
    assert_eq!(l2_norm(&z), 0.0);
    assert_eq!(sup_norm(&z), 0.0);
    let k = GridFn::constant(&g, c(3.0, -4.0));
    assert!((sup_norm(&k) - 5.0).abs() < 1e-15);
    assert!((l2_norm(&k) - 10.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inner_is_conjugate_symmetric_and_linear(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_grid(&mut r, 24);
        let (f, h, k) = (random_fn(&mut r, &g), random_fn(&mut r, &g), random_fn(&mut r, &g));
        let a = random_c64(&mut r);
        let fg = inner(&f, &h).unwrap();
        prop_assert!((fg - inner(&h, &f).unwrap().conj()).norm() < 1e-12 * (1.0 + fg.norm()));
        let lhs = inner(&f.combine(a, &k, c(1.0, 0.0)).unwrap(), &h).unwrap();
        let rhs = a * fg + inner(&k, &h).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
    }

    #[test]
    fn cauchy_schwarz(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_grid(&mut r, 24);
        let (f, h) = (random_fn(&mut r, &g), random_fn(&mut r, &g));
        prop_assert!(inner(&f, &h).unwrap().norm() <= l2_norm(&f) * l2_norm(&h) * (1.0 + 1e-12));
    }

    #[test]
    fn sup_norm_is_a_linear_scan(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_grid(&mut r, 24);
        let f = random_fn(&mut r, &g);
        let mut best = 0.0f64;
        for v in f.values() {
            if v.norm() > best {
                best = v.norm();
            }
        }
        prop_assert_eq!(sup_norm(&f), best);
    }

    #[test]
    fn mismatched_grids_never_pair(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g1 = make_grid(1.0, 4, Rule::GaussLegendre).unwrap();
        let g2 = make_grid(1.0, 4, Rule::Trapezoid).unwrap();
        let (f, h) = (random_fn(&mut r, &g1), random_fn(&mut r, &g2));
        prop_assert_eq!(inner(&f, &h), Err(Error::IncompatibleGrids));
    }
}
