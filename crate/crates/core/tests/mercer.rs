mod common;

use carleman_core::kernel::rotated_hermitian_part;
use carleman_core::mercer::{
    bessel_check, cauchy_tail_bound_check, diag_lower_bound_check, dini_table, mercer_report, partial_sum,
    positive_coefficients, SLACK_TOL,
};
use carleman_core::quadrature::{make_grid, Rule};
use carleman_core::spectral::{positive_part, reconstruct, sector_fit, synthesize_from_diagonal};
use carleman_core::{EigenSystem, Error, KernelMatrix, Sector, C64};
use common::*;
use proptest::prelude::*;

fn preset(count: usize, growth: bool, theta: f64) -> (KernelMatrix, EigenSystem) {
    let g = laguerre_grid();
    let fam = laguerre_family(&g, count);
    let alphas = law(count, growth, theta);
    let k = synthesize_from_diagonal(&alphas, &fam).unwrap();
    (k, EigenSystem::new(g, alphas, fam).unwrap())
}

#[test]
fn classical_preset_satisfies_every_inequality() {
    let (k, e) = preset(16, false, 0.0);
    assert!(diag_lower_bound_check(&k, &e).unwrap() >= SLACK_TOL);
    assert!(bessel_check(&k, &e).unwrap() >= SLACK_TOL);
    for p in 0..16 {
        for q in p..16 {
            assert!(cauchy_tail_bound_check(&k, &e, p, q).unwrap() >= SLACK_TOL);
        }
    }
    let t = dini_table(&k, &e).unwrap();
    assert!(t.diag_sup_err.windows(2).all(|w| w[1] < w[0]), "{:?}", t.diag_sup_err);
    assert!(*t.diag_sup_err.last().unwrap() <= 1e-8);
}

#[test]
fn one_term_cauchy_reduces_to_the_diagonal_bound() {
    let (k, e) = preset(6, false, 0.0);
    let x = positive_coefficients(&e).unwrap();
    let big_m = (0..k.size()).map(|i| k.get(i, i).re).fold(f64::MIN, f64::max);
    for p in 0..6 {
        let mods: Vec<f64> = e.vectors()[p].values().iter().map(|v| v.norm()).collect();
        let mut want = f64::INFINITY;
        for &a in &mods {
            for &b in &mods {
                want = want.min(x[p] * a * a * (big_m - x[p] * b * b));
            }
        }
        let got = cauchy_tail_bound_check(&k, &e, p, p).unwrap();
        assert!((got - want).abs() <= 1e-12 * (1.0 + want.abs()));
        assert!(got >= SLACK_TOL);
    }
    assert_eq!(cauchy_tail_bound_check(&k, &e, 3, 2), Err(Error::InvalidRange { p: 3, q: 2 }));
    assert_eq!(cauchy_tail_bound_check(&k, &e, 0, 6), Err(Error::InvalidRange { p: 0, q: 6 }));
}

#[test]
fn zero_kernel_is_trivial() {
    let g = make_grid(3.0, 8, Rule::GaussLegendre).unwrap();
    let k = KernelMatrix::zeros(&g);
    let e = EigenSystem::empty(&g);
    assert_eq!(diag_lower_bound_check(&k, &e).unwrap(), 0.0);
    assert_eq!(bessel_check(&k, &e).unwrap(), 0.0);
    let t = dini_table(&k, &e).unwrap();
    assert_eq!(t.diag_sup_err, vec![0.0]);
    assert_eq!(t.sup_err, vec![0.0]);
}

#[test]
fn negative_spectrum_is_refused() {
    let (_, e) = preset(3, false, 0.0);
    let bad = EigenSystem::new(e.grid().clone(), vec![c(1.0, 0.0), c(-0.5, 0.0), c(0.1, 0.0)], e.vectors().to_vec())
        .unwrap();
    assert!(matches!(positive_coefficients(&bad), Err(Error::NotPositive { .. })));
}

#[test]
fn full_order_reconstructs_on_every_preset() {
    for (growth, theta) in [(false, 0.0), (true, 0.4), (true, std::f64::consts::FRAC_PI_4)] {
        let (k, e) = preset(16, growth, theta);
        let sector = sector_fit(e.alphas(), e.zero_threshold()).unwrap();
        let t = mercer_report(&k, &e, &sector).unwrap();
        assert!(*t.sup_err.last().unwrap() <= 1e-7);
        assert!(t.is_diag_monotone());
        assert!(t.worst_tail_slack() >= SLACK_TOL);
        assert_eq!(t.orders, (0..=16).collect::<Vec<_>>());
    }
}

#[test]
fn wide_sector_uses_the_sqrt2_factor() {
    let (k, e) = preset(16, true, std::f64::consts::FRAC_PI_4);
    let sector = Sector::new(0.0, 1.0).unwrap();
    let t = mercer_report(&k, &e, &sector).unwrap();
    let x = positive_part(&e, &sector);
    for m in 0..=16 {
        let mut worst_tail = 0.0f64;
        let mut worst_abs = 0.0f64;
        for i in 0..k.size() {
            let tail: f64 = (m..16).map(|n| x.alphas()[n].re * e.vectors()[n].values()[i].norm_sqr()).sum();
            worst_tail = worst_tail.max(tail);
            for j in 0..k.size() {
                let a: f64 = (m..16)
                    .map(|n| e.alphas()[n].norm() * e.vectors()[n].values()[i].norm() * e.vectors()[n].values()[j].norm())
                    .sum();
                worst_abs = worst_abs.max(a);
            }
        }
        assert!((t.tail_bound[m] - 2f64.sqrt() * worst_tail).abs() <= 1e-12 * (1.0 + worst_tail));
        assert!((t.abs_tail[m] - worst_abs).abs() <= 1e-12 * (1.0 + worst_abs));
        assert!(worst_abs <= 2f64.sqrt() * worst_tail + 1e-8);
    }
    // the slope 0.5 sector does not contain the spectrum
    let narrow = Sector::new(0.0, 0.5).unwrap();
    assert!(matches!(mercer_report(&k, &e, &narrow), Err(Error::SectorRequired(_))));
}

#[test]
fn truncated_system_plateaus_at_the_dropped_mass() {
    let (k, e) = preset(16, false, 0.0);
    let half = e.truncated(8);
    let t = dini_table(&k, &half).unwrap();
    let dropped = k.sub(&reconstruct(&half)).unwrap().sup_entry();
    assert!((t.sup_err[8] - dropped).abs() <= 1e-14);
    assert!(t.sup_err[8] > 1e-4);
}

#[test]
fn partial_sums_of_a_two_term_system() {
    let (_, e) = preset(2, true, 0.3);
    let one = partial_sum(&e, 1).unwrap();
    let n = e.grid().len();
    let phi = e.vectors()[0].values();
    for i in 0..n {
        for j in 0..n {
            let want = e.alphas()[0] * phi[i] * phi[j].conj();
            assert!((one.get(i, j) - want).norm() <= 1e-15 * (1.0 + want.norm()));
        }
    }
    assert_eq!(partial_sum(&e, 2).unwrap(), reconstruct(&e));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_positive_systems(seed in any::<u64>(), count in 1usize..12) {
        let mut r = rng(seed);
        let g = random_grid(&mut r, 24);
        let count = count.min(g.len());
        let fam = random_family(&mut r, &g, count);
        let alphas = law(count, seed % 2 == 1, 0.0);
        let k = synthesize_from_diagonal(&alphas, &fam).unwrap();
        let e = EigenSystem::new(g, alphas, fam).unwrap();
        prop_assert!(diag_lower_bound_check(&k, &e).unwrap() >= SLACK_TOL);
        prop_assert!(bessel_check(&k, &e).unwrap() >= SLACK_TOL);
        prop_assert!(cauchy_tail_bound_check(&k, &e, 0, count - 1).unwrap() >= SLACK_TOL);
        prop_assert!(dini_table(&k, &e).unwrap().is_diag_monotone());
    }

    #[test]
    fn rotated_hermitian_part_diagonal_drives_the_table(seed in any::<u64>(), theta in 0.0f64..1.4) {
        let mut r = rng(seed);
        let g = random_grid(&mut r, 16);
        let count = g.len().min(6);
        let fam = random_family(&mut r, &g, count);
        let alphas: Vec<C64> = law(count, true, theta);
        let k = synthesize_from_diagonal(&alphas, &fam).unwrap();
        let e = EigenSystem::new(g, alphas, fam).unwrap();
        let sector = sector_fit(e.alphas(), 0.0).unwrap();
        let t = mercer_report(&k, &e, &sector).unwrap();
        let x = rotated_hermitian_part(&k, sector.rotation);
        let d0 = (0..k.size()).map(|i| x.get(i, i).re.abs()).fold(0.0, f64::max);
        prop_assert!((t.diag_sup_err[0] - d0).abs() <= 1e-15 * (1.0 + d0));
        prop_assert!(t.worst_tail_slack() >= SLACK_TOL);
    }
}
