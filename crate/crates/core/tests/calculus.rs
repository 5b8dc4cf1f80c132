mod common;

use std::f64::consts::PI;

use carleman_core::calculus::{
    monotonicity_check, phi_direct, phi_epsilon, phi_pv, projector_identity_check, reid_bound_check,
    spectral_bound, spectral_function, x_epsilon, Region, Symbol,
};
use carleman_core::kernel::{adjoint, rotated_hermitian_part};
use carleman_core::oracle::weighted_compose;
use carleman_core::spectral::{reconstruct, sector_fit, synthesize_from_diagonal};
use carleman_core::{EigenSystem, Error, KernelMatrix, Sector};
use common::*;
use proptest::prelude::*;
use rand::Rng;

fn preset(count: usize, growth: bool, theta: f64) -> (KernelMatrix, EigenSystem, Sector) {
    let g = laguerre_grid();
    let fam = laguerre_family(&g, count);
    let alphas = law(count, growth, theta);
    let k = synthesize_from_diagonal(&alphas, &fam).unwrap();
    let e = EigenSystem::new(g, alphas, fam).unwrap();
    let sector = sector_fit(e.alphas(), e.zero_threshold()).unwrap();
    (k, e, sector)
}

fn presets() -> Vec<(KernelMatrix, EigenSystem, Sector)> {
    vec![preset(16, false, 0.0), preset(16, true, 0.4), preset(16, true, PI / 4.0)]
}

fn symbols(e: &EigenSystem) -> Vec<Symbol> {
    let min = e.min_nonzero_modulus().unwrap();
    vec![Symbol::identity(), Symbol::cayley(), Symbol::phase(), Symbol::clip(0.5 * min).unwrap()]
}

fn random_region(r: &mut rand_chacha::ChaCha8Rng) -> Region {
    let lo = r.gen_range(0.001..2.0);
    let hi = lo + r.gen_range(0.1..20.0);
    let a = r.gen_range(-PI..PI);
    let b = a + r.gen_range(0.1..2.0 * PI);
    Region::annular_sector(lo, hi, a, b).unwrap()
}

#[test]
fn identity_symbol_rebuilds_the_kernel() {
    for (k, e, _) in presets() {
        assert!(phi_direct(&e, &Symbol::identity()).unwrap().sup_distance(&k).unwrap() <= 1e-12);
    }
}

#[test]
fn clip_symbol_is_the_spectral_projection() {
    for (_, e, _) in presets() {
        for eps in [1e-3, 0.05, 0.5, 3.0] {
            let chi = phi_direct(&e, &Symbol::clip(eps).unwrap()).unwrap();
            let proj = spectral_function(&e, &Region::outside_disk(eps).unwrap());
            assert!(chi.sup_distance(&proj).unwrap() <= 1e-12);
        }
    }
}

#[test]
fn cayley_matches_a_per_atom_sum() {
    let (_, e, _) = preset(8, true, 0.4);
    let got = phi_direct(&e, &Symbol::cayley()).unwrap();
    let n = e.grid().len();
    for i in 0..n {
        for j in 0..n {
            let mut want = c(0.0, 0.0);
            for (a, v) in e.alphas().iter().zip(e.vectors()) {
                want += *a / (1.0 + a.norm()) * v.values()[i] * v.values()[j].conj();
            }
            assert!((got.get(i, j) - want).norm() <= 1e-13 * (1.0 + want.norm()));
        }
    }
}

#[test]
fn principal_value_limits() {
    for (_, e, _) in presets() {
        let max = e.alphas().iter().map(|a| a.norm()).fold(0.0, f64::max);
        let min = e.min_nonzero_modulus().unwrap();
        for sym in symbols(&e) {
            assert_eq!(phi_epsilon(&e, &sym, 2.0 * max).unwrap().sup_entry(), 0.0);
            let direct = phi_direct(&e, &sym).unwrap();
            assert!(phi_epsilon(&e, &sym, 0.5 * min).unwrap().sup_distance(&direct).unwrap() <= 1e-12);
            let seq: Vec<f64> = (0..24).map(|k| 2.0 * max * 0.6f64.powi(k)).collect();
            let pv = phi_pv(&e, &sym, &seq).unwrap();
            assert!(pv.max_increase() <= 0.0, "{}: {:?}", sym.name(), pv.sup_dist);
            for (eps, d) in pv.eps.iter().zip(&pv.sup_dist) {
                if *eps < min {
                    assert!(*d <= 1e-9);
                }
            }
        }
    }
    let (_, e, _) = preset(3, false, 0.0);
    assert_eq!(phi_pv(&e, &Symbol::identity(), &[0.1, 0.2]).unwrap_err(), Error::InvalidSequence);
    assert_eq!(phi_pv(&e, &Symbol::identity(), &[]).unwrap_err(), Error::InvalidSequence);
}

#[test]
fn x_epsilon_tends_to_the_rotated_real_part() {
    for (k, e, sector) in presets() {
        let x0 = x_epsilon(&e, &sector, 0.0).unwrap();
        let want = rotated_hermitian_part(&k, sector.rotation);
        assert!(x0.sup_distance(&want).unwrap() <= 1e-12);
        let top = e.alphas().iter().map(|a| a.norm()).fold(0.0, f64::max);
        assert_eq!(x_epsilon(&e, &sector, top).unwrap().sup_entry(), 0.0);
    }
}

#[test]
fn monotonicity_and_reid_on_presets() {
    for (_, e, sector) in presets() {
        let max = e.alphas().iter().map(|a| a.norm()).fold(0.0, f64::max);
        let eps: Vec<f64> = (0..17).map(|k| 2.0 * max * 0.55f64.powi(k)).collect();
        for w in eps.windows(2) {
            let m = monotonicity_check(&e, &sector, w[1], w[0]).unwrap();
            assert!(m.worst() >= -1e-9, "{m:?}");
            for sym in symbols(&e) {
                assert!(reid_bound_check(&e, &sector, &sym, w[1], w[0]).unwrap() >= -1e-8);
            }
        }
        let m = monotonicity_check(&e, &sector, eps[16], f64::INFINITY).unwrap();
        assert!(m.pair >= 0.0);
        let zero = Symbol::new("zero", 0.0, |_| c(0.0, 0.0)).unwrap();
        assert!(reid_bound_check(&e, &sector, &zero, eps[16], eps[3]).unwrap() >= 0.0);
    }
}

#[test]
fn calculus_refuses_points_outside_the_sector() {
    let (_, e, _) = preset(4, true, 0.4);
    let narrow = Sector::new(0.0, 1e-3).unwrap();
    assert!(matches!(x_epsilon(&e, &narrow, 0.1), Err(Error::SectorRequired(_))));
    assert!(matches!(reid_bound_check(&e, &narrow, &Symbol::identity(), 0.1, 0.2), Err(Error::SectorRequired(_))));
}

#[test]
fn symbol_presets_by_name() {
    assert_eq!(Symbol::preset("identity").unwrap().name(), "identity");
    assert_eq!(Symbol::preset("clip:0.25").unwrap().v_sup(), 4.0);
    assert!(matches!(Symbol::preset("clip:x"), Err(Error::Symbol(_))));
    assert!(matches!(Symbol::preset("sqrt"), Err(Error::Symbol(_))));
    // φ must stay in the declared class
    let liar = Symbol::new("liar", 0.1, |_| c(1.0, 0.0)).unwrap();
    let (_, e, _) = preset(2, false, 0.0);
    assert!(matches!(phi_direct(&e, &liar), Err(Error::Symbol(_))));
}

#[test]
fn empty_region_gives_zero_projection() {
    let (_, e, _) = preset(4, true, 0.2);
    assert_eq!(spectral_function(&e, &Region::empty()).sup_entry(), 0.0);
    assert_eq!(projector_identity_check(&e, &Region::empty()), 0.0);
    let min = e.min_nonzero_modulus().unwrap();
    assert!(projector_identity_check(&e, &Region::outside_disk(0.5 * min).unwrap()) <= 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn projection_algebra(seed in any::<u64>()) {
        let mut r = rng(seed);
        let presets = presets();
        let (_, e, _) = &presets[r.gen_range(0..presets.len())];
        let omega = random_region(&mut r);
        let p = spectral_function(e, &omega);
        prop_assert!(p.hermitian_defect() <= 1e-12);
        prop_assert!(adjoint(&p).sup_distance(&p).unwrap() <= 1e-12);
        let pp = weighted_compose(&p, &p).unwrap();
        prop_assert!(pp.sup_distance(&p).unwrap() <= 1e-9);
        prop_assert!(projector_identity_check(e, &omega) <= 1e-9);

        // split ω into two disjoint pieces by modulus
        let cut = r.gen_range(0.01..10.0);
        let inner_part = omega.intersection(&Region::new(0.0, move |z| z.norm() > 0.0 && z.norm() <= cut).unwrap());
        let outer_part = omega.intersection(&Region::outside_disk(cut).unwrap());
        let sum = spectral_function(e, &inner_part).add(&spectral_function(e, &outer_part)).unwrap();
        prop_assert!(sum.sup_distance(&p).unwrap() <= 1e-15 * (1.0 + p.sup_entry()));
    }

    #[test]
    fn spectral_functions_are_bounded(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (_, e, _) = preset(12, true, 0.5);
        let omega = random_region(&mut r);
        let p = spectral_function(&e, &omega);
        let bound = spectral_bound(&e, omega.inner_radius());
        prop_assert!(p.sup_entry() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn reconstruct_is_phi_of_identity_on_random_systems(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_grid(&mut r, 16);
        let count = g.len().min(5);
        let fam = random_family(&mut r, &g, count);
        let e = EigenSystem::new(g, law(count, true, 1.0), fam).unwrap();
        let d = phi_direct(&e, &Symbol::identity()).unwrap().sup_distance(&reconstruct(&e)).unwrap();
        prop_assert!(d <= 1e-12 * (1.0 + reconstruct(&e).sup_entry()));
    }
}
