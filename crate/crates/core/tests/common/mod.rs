#![allow(dead_code)]

use carleman_core::laguerre::{orthonormalize, sample_family, DEFAULT_SCALE};
use carleman_core::quadrature::{make_grid, Rule};
use carleman_core::{Grid, GridFn, KernelMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn random_c64(rng: &mut ChaCha8Rng) -> C64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_grid(rng: &mut ChaCha8Rng, max_n: usize) -> Grid {
    let n = rng.gen_range(2..=max_n);
    let cutoff = rng.gen_range(1.0..20.0);
    let rule = if rng.gen_bool(0.5) { Rule::GaussLegendre } else { Rule::Trapezoid };
    make_grid(cutoff, n, rule).unwrap()
}

pub fn random_fn(rng: &mut ChaCha8Rng, grid: &Grid) -> GridFn {
    GridFn::from_fn(grid, |_| random_c64(rng))
}

pub fn random_kernel(rng: &mut ChaCha8Rng, grid: &Grid) -> KernelMatrix {
    let n = grid.len();
    KernelMatrix::new(grid.clone(), (0..n * n).map(|_| random_c64(rng)).collect()).unwrap()
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, grid: &Grid) -> KernelMatrix {
    let n = grid.len();
    let mut v = vec![c(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = c(rng.gen_range(-1.0..1.0), 0.0);
        for j in i + 1..n {
            let z = random_c64(rng);
            v[i * n + j] = z;
            v[j * n + i] = z.conj();
        }
    }
    KernelMatrix::new(grid.clone(), v).unwrap()
}

/// Random weighted-orthonormal family of `count` functions.
pub fn random_family(rng: &mut ChaCha8Rng, grid: &Grid, count: usize) -> Vec<GridFn> {
    let raw: Vec<GridFn> = (0..count).map(|_| random_fn(rng, grid)).collect();
    orthonormalize(&raw)
}

/// 64 Gauss–Legendre nodes on `[0, 40]`.
pub fn laguerre_grid() -> Grid {
    make_grid(40.0, 64, Rule::GaussLegendre).unwrap()
}

pub fn laguerre_family(grid: &Grid, count: usize) -> Vec<GridFn> {
    orthonormalize(&sample_family(grid, count, DEFAULT_SCALE))
}

/// `α_n = base / (n+1)²` or `base (n+1)`, spread over `[-θ, θ]`.
pub fn law(count: usize, growth: bool, theta_max: f64) -> Vec<C64> {
    let golden = 0.618_033_988_749_894_8_f64;
    (0..count)
        .map(|n| {
            let k = (n + 1) as f64;
            let r = if growth { k } else { 1.0 / (k * k) };
            let theta = theta_max * (2.0 * (n as f64 * golden).fract() - 1.0);
            C64::from_polar(r, theta)
        })
        .collect()
}
