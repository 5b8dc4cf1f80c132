//! Scaled Laguerre functions `√c · L_n(c s) · e^{-c s / 2}`, an orthonormal
//! system in `L₂(R+)` for every `c > 0`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::quadrature::{weighted_dot, Grid, GridFn};
use crate::C64;

/// Scale at which 16 functions are resolved by 64 Gauss–Legendre nodes on
/// `[0, 40]` with tails below `1e-8` in the last decile.
pub const DEFAULT_SCALE: f64 = 3.5;

/// Values of the first `count` scaled Laguerre functions at `s`.
///
/// The three-term recurrence runs on `L_n(x) e^{-x/2}` directly so that
/// large arguments never overflow.
pub fn laguerre_functions(count: usize, scale: f64, s: f64) -> Vec<f64> {
    let x = scale * s;
    let norm = scale.sqrt();
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let mut prev = (-0.5 * x).exp();
    out.push(norm * prev);
    if count == 1 {
        return out;
    }
    let mut cur = (1.0 - x) * prev;
    out.push(norm * cur);
    for k in 1..count - 1 {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        out.push(norm * cur);
    }
    out
}

pub fn laguerre_function(n: usize, scale: f64, s: f64) -> f64 {
    laguerre_functions(n + 1, scale, s)[n]
}

/// Samples the first `count` scaled Laguerre functions on a grid.
pub fn sample_family(grid: &Grid, count: usize, scale: f64) -> Vec<GridFn> {
    let table: Vec<Vec<f64>> = grid.points().iter().map(|&s| laguerre_functions(count, scale, s)).collect();
    (0..count)
        .map(|n| {
            let values = table.iter().map(|row| C64::new(row[n], 0.0)).collect();
            GridFn::new(grid.clone(), values).expect("one value per node")
        })
        .collect()
}

/// Modified Gram–Schmidt in the weighted inner product, applied twice.
///
/// Functions that become numerically dependent are returned as zero.
pub fn orthonormalize(family: &[GridFn]) -> Vec<GridFn> {
    let mut basis: Vec<Vec<C64>> = family.iter().map(|f| f.values().to_vec()).collect();
    let Some(grid) = family.first().map(|f| f.grid().clone()) else {
        return Vec::new();
    };
    let w = grid.weights();
    for n in 0..basis.len() {
        for _ in 0..2 {
            for m in 0..n {
                let proj = weighted_dot(w, &basis[n], &basis[m]);
                let (head, tail) = basis.split_at_mut(n);
                for (x, &q) in tail[0].iter_mut().zip(&head[m]) {
                    *x -= proj * q;
                }
            }
        }
        let norm = weighted_dot(w, &basis[n], &basis[n]).re.sqrt();
        let inv = if norm > 0.0 { 1.0 / norm } else { 0.0 };
        for x in basis[n].iter_mut() {
            *x *= inv;
        }
    }
    basis.into_iter().map(|v| GridFn::new(grid.clone(), v).expect("same length")).collect()
}
