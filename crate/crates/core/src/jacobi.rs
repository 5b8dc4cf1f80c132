//! Cyclic Jacobi eigensolver for dense complex Hermitian matrices.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64};

pub(crate) const MAX_SWEEPS: usize = 100;
pub(crate) const OFF_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub(crate) struct JacobiOutcome {
    /// Unsorted real eigenvalues.
    pub values: Vec<f64>,
    /// Row-major `n x n`; column `k` is the eigenvector of `values[k]`.
    pub vectors: Vec<C64>,
    /// Off-diagonal Frobenius mass before the first sweep and after each one.
    pub off_history: Vec<f64>,
}

fn off_diagonal_mass(s: &[C64], n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += s[i * n + j].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Diagonalizes the Hermitian matrix `s` (row-major, `n x n`) in place.
///
/// Sweeps run over all pairs `p < q` in row order until the off-diagonal
/// Frobenius mass drops to `OFF_TOL · ‖S‖_F`.
pub(crate) fn hermitian_eigen(mut s: Vec<C64>, n: usize) -> Result<JacobiOutcome> {
    debug_assert_eq!(s.len(), n * n);
    let mut v = alloc::vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = C64::new(1.0, 0.0);
        s[i * n + i].im = 0.0;
    }
    let frob = s.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let target = OFF_TOL * frob;
    let mut off = off_diagonal_mass(&s, n);
    let mut off_history = alloc::vec![off];
    let mut sweeps = 0;
    while off > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { iterations: MAX_SWEEPS });
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut s, &mut v, n, p, q);
            }
        }
        sweeps += 1;
        off = off_diagonal_mass(&s, n);
        off_history.push(off);
    }
    let values = (0..n).map(|i| s[i * n + i].re).collect();
    Ok(JacobiOutcome { values, vectors: v, off_history })
}

/// One unitary rotation annihilating `S_pq`.
///
/// The phase of `S_pq` is first moved onto column `q`, leaving a real
/// symmetric 2x2 block that is zeroed by a plane rotation.
fn rotate(s: &mut [C64], v: &mut [C64], n: usize, p: usize, q: usize) {
    let b = s[p * n + q];
    let babs = b.norm();
    if babs == 0.0 || !babs.is_normal() {
        return;
    }
    let a = s[p * n + p].re;
    let d = s[q * n + q].re;
    let phase = b / babs;
    let theta = (d - a) / (2.0 * babs);
    let t = if theta.is_infinite() {
        0.0
    } else {
        let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * c;
    let conj_phase = phase.conj();
    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(sn, 0.0);
    let u_qp = conj_phase * (-sn);
    let u_qq = conj_phase * c;

    for k in 0..n {
        let skp = s[k * n + p];
        let skq = s[k * n + q];
        s[k * n + p] = skp * u_pp + skq * u_qp;
        s[k * n + q] = skp * u_pq + skq * u_qq;
    }
    for k in 0..n {
        let spk = s[p * n + k];
        let sqk = s[q * n + k];
        s[p * n + k] = u_pp.conj() * spk + u_qp.conj() * sqk;
        s[q * n + k] = u_pq.conj() * spk + u_qq.conj() * sqk;
    }
    s[p * n + p] = C64::new(a - t * babs, 0.0);
    s[q * n + q] = C64::new(d + t * babs, 0.0);
    s[p * n + q] = C64::new(0.0, 0.0);
    s[q * n + p] = C64::new(0.0, 0.0);

    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * u_pp + vkq * u_qp;
        v[k * n + q] = vkp * u_pq + vkq * u_qq;
    }
}
