//! Bilinear partial sums and the inequalities controlling their convergence.
//!
//! All inequality checks work on a positive Hermitian system: a kernel
//! `K(s,t) = conj(K(t,s))` together with its eigensystem with eigenvalues
//! `x_n ≥ 0`. For a normal kernel whose spectrum lies in a sector this is
//! the rotated Hermitian part, see [`crate::spectral::positive_part`].
//! Eigenvalues with `x_n ≤ 1e-12 · max x` are dropped before any check.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::kernel::{check_k0, rotated_hermitian_part, KernelMatrix};
use crate::spectral::{bilinear_sum, EigenSystem, Sector, ZERO_ATOM_REL};
use crate::{Error, Result, C64};

/// Most negative eigenvalue accepted as roundoff in a positive system.
pub const NEGATIVE_EIGEN_TOL: f64 = 1e-10;
/// Slack allowed on inequalities that hold exactly in theory.
pub const SLACK_TOL: f64 = -1e-8;

/// Convergence of the bilinear series, one entry per truncation order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceTable {
    pub orders: Vec<usize>,
    /// `max_{s,t} |K(s,t) − S_m(s,t)|`.
    pub sup_err: Vec<f64>,
    /// `max_s |X(s,s) − Σ_{n<m} x_n |φ_n(s)|²|` for the Hermitian part `X`.
    pub diag_sup_err: Vec<f64>,
    /// `max_{s,t} Σ_{n≥m} |α_n| |φ_n(s)| |φ_n(t)|`.
    pub abs_tail: Vec<f64>,
    /// `√(1+l²) · max_s Σ_{n≥m} x_n |φ_n(s)|²`, the bound on `abs_tail`.
    pub tail_bound: Vec<f64>,
}

impl ConvergenceTable {
    /// `min_m (tail_bound − abs_tail)`.
    pub fn worst_tail_slack(&self) -> f64 {
        self.tail_bound.iter().zip(&self.abs_tail).map(|(b, a)| b - a).fold(f64::INFINITY, f64::min)
    }

    /// Largest increase `diag_sup_err[m+1] − diag_sup_err[m]`; zero or
    /// negative for a nonincreasing column.
    pub fn diag_increase(&self) -> f64 {
        max_increase(&self.diag_sup_err)
    }

    pub fn sup_err_increase(&self) -> f64 {
        max_increase(&self.sup_err)
    }

    /// Roundoff allowance for monotonicity of the error columns.
    pub fn monotone_tol(&self) -> f64 {
        1e-12 * (1.0 + self.diag_sup_err.first().copied().unwrap_or(0.0))
    }

    pub fn is_diag_monotone(&self) -> bool {
        self.diag_increase() <= self.monotone_tol()
    }
}

fn max_increase(v: &[f64]) -> f64 {
    v.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max).max(0.0)
}

/// `Σ_{n<m} α_n φ_n(s_i) conj(φ_n(s_j))`, the first `m` terms.
pub fn partial_sum(e: &EigenSystem, m: usize) -> Result<KernelMatrix> {
    if m > e.len() {
        return Err(Error::OrderOutOfRange { order: m, count: e.len() });
    }
    Ok(bilinear_sum(e.grid(), e.alphas()[..m].iter().copied().zip(&e.vectors()[..m])))
}

/// Coefficients `x_n` of a positive Hermitian system, with the atom at zero
/// set to `0` so indices stay aligned with the eigensystem.
pub fn positive_coefficients(e: &EigenSystem) -> Result<Vec<f64>> {
    let max = e.alphas().iter().map(|a| a.re).fold(0.0, f64::max);
    if let Some(bad) = e.alphas().iter().map(|a| a.re).find(|&x| x < -NEGATIVE_EIGEN_TOL) {
        return Err(Error::NotPositive { value: bad });
    }
    Ok(e.alphas().iter().map(|a| if a.re > ZERO_ATOM_REL * max { a.re } else { 0.0 }).collect())
}

fn check_pair(k: &KernelMatrix, e: &EigenSystem) -> Result<Vec<f64>> {
    if k.grid() != e.grid() {
        return Err(Error::IncompatibleGrids);
    }
    positive_coefficients(e)
}

/// `|φ_n(s_i)|` for every `n` and node; `moduli[n][i]`.
fn moduli(e: &EigenSystem) -> Vec<Vec<f64>> {
    e.vectors().iter().map(|v| v.values().iter().map(|z| z.norm()).collect()).collect()
}

/// Worst margin of `K(s,s) ≥ Σ_{n<m} x_n |φ_n(s)|²` over all nodes and all
/// truncation orders `m`.
pub fn diag_lower_bound_check(k_herm: &KernelMatrix, e_herm: &EigenSystem) -> Result<f64> {
    let x = check_pair(k_herm, e_herm)?;
    let mods = moduli(e_herm);
    let mut worst = f64::INFINITY;
    for i in 0..k_herm.size() {
        let kss = k_herm.get(i, i).re;
        let mut partial = 0.0;
        worst = worst.min(kss);
        for (n, &xn) in x.iter().enumerate() {
            partial += xn * mods[n][i] * mods[n][i];
            worst = worst.min(kss - partial);
        }
    }
    Ok(if worst.is_finite() { worst } else { 0.0 })
}

/// Worst slack of the Cauchy estimate
/// `(Σ_{n=p..=q} x_n |φ_n(s)| |φ_n(t)|)² ≤ M Σ_{n=p..=q} x_n |φ_n(s)|²`
/// with `M = max_s K(s,s)`, over all node pairs.
pub fn cauchy_tail_bound_check(k_herm: &KernelMatrix, e_herm: &EigenSystem, p: usize, q: usize) -> Result<f64> {
    if p > q || q >= e_herm.len() {
        return Err(Error::InvalidRange { p, q });
    }
    let x = check_pair(k_herm, e_herm)?;
    let mods = moduli(e_herm);
    let n = k_herm.size();
    let big_m = (0..n).map(|i| k_herm.get(i, i).re).fold(f64::NEG_INFINITY, f64::max);
    let mut worst = f64::INFINITY;
    for i in 0..n {
        let a: f64 = (p..=q).map(|m| x[m] * mods[m][i] * mods[m][i]).sum();
        for j in 0..n {
            let b: f64 = (p..=q).map(|m| x[m] * mods[m][i] * mods[m][j]).sum();
            worst = worst.min(big_m * a - b * b);
        }
    }
    Ok(if worst.is_finite() { worst } else { 0.0 })
}

/// Worst slack of the Bessel estimate
/// `Σ_n x_n² |φ_n(s)|² ≤ max_s ‖k(s)‖²` over the nodes.
pub fn bessel_check(k_herm: &KernelMatrix, e_herm: &EigenSystem) -> Result<f64> {
    let x = check_pair(k_herm, e_herm)?;
    let mods = moduli(e_herm);
    let bound = check_k0(k_herm).max_row_l2.powi(2);
    let mut worst = f64::INFINITY;
    for i in 0..k_herm.size() {
        let sum: f64 = x.iter().enumerate().map(|(n, &xn)| xn * xn * mods[n][i] * mods[n][i]).sum();
        worst = worst.min(bound - sum);
    }
    Ok(if worst.is_finite() { worst } else { 0.0 })
}

/// Convergence table of a positive Hermitian system.
pub fn dini_table(k_herm: &KernelMatrix, e_herm: &EigenSystem) -> Result<ConvergenceTable> {
    let x = check_pair(k_herm, e_herm)?;
    let abs_coeffs = x.clone();
    Ok(build_table(k_herm, k_herm, e_herm, &x, &abs_coeffs, 1.0))
}

/// Convergence table of the complex bilinear series of a normal kernel
/// whose eigenvalues lie in `sector`.
///
/// The diagonal column and the tail bound use the rotated Hermitian part
/// with coefficients `x_n = Re(e^{iα} α_n)`; `abs_tail` uses `|α_n|`.
pub fn mercer_report(k: &KernelMatrix, e: &EigenSystem, sector: &Sector) -> Result<ConvergenceTable> {
    if k.grid() != e.grid() {
        return Err(Error::IncompatibleGrids);
    }
    let thr = e.zero_threshold();
    let violation = sector.worst_violation(e.alphas(), thr);
    let scale = e.alphas().iter().map(|a| a.norm()).fold(0.0, f64::max);
    if violation > 1e-12 * scale.max(1.0) {
        return Err(Error::SectorRequired(alloc::format!("eigenvalues leave the sector by {violation:e}")));
    }
    let x: Vec<f64> = e
        .alphas()
        .iter()
        .map(|&a| if a.norm() > thr { sector.rotate(a).re.max(0.0) } else { 0.0 })
        .collect();
    let abs_coeffs: Vec<f64> = e.alphas().iter().map(|&a| if a.norm() > thr { a.norm() } else { 0.0 }).collect();
    let hermitian = rotated_hermitian_part(k, sector.rotation);
    Ok(build_table(k, &hermitian, e, &x, &abs_coeffs, sector.modulus_factor()))
}

fn build_table(
    k: &KernelMatrix,
    hermitian: &KernelMatrix,
    e: &EigenSystem,
    x: &[f64],
    abs_coeffs: &[f64],
    factor: f64,
) -> ConvergenceTable {
    let n = k.size();
    let count = e.len();
    let mods = moduli(e);
    let orders: Vec<usize> = (0..=count).collect();

    let mut residual: Vec<C64> = k.values().to_vec();
    let mut sup_err = Vec::with_capacity(count + 1);
    sup_err.push(residual.iter().map(|v| v.norm()).fold(0.0, f64::max));
    for (alpha, phi) in e.alphas().iter().zip(e.vectors()) {
        let phi = phi.values();
        for i in 0..n {
            let c = alpha * phi[i];
            for j in 0..n {
                residual[i * n + j] -= c * phi[j].conj();
            }
        }
        sup_err.push(residual.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }

    let mut diag: Vec<f64> = (0..n).map(|i| hermitian.get(i, i).re).collect();
    let mut diag_sup_err = Vec::with_capacity(count + 1);
    diag_sup_err.push(diag.iter().map(|d| d.abs()).fold(0.0, f64::max));
    for (m, &xm) in x.iter().enumerate() {
        for (d, &phi) in diag.iter_mut().zip(&mods[m]) {
            *d -= xm * phi * phi;
        }
        diag_sup_err.push(diag.iter().map(|d| d.abs()).fold(0.0, f64::max));
    }

    // suffix sums over n ≥ m, accumulated from the end
    let mut abs_tail = alloc::vec![0.0; count + 1];
    let mut tail_bound = alloc::vec![0.0; count + 1];
    let mut pair_tail = alloc::vec![0.0; n * n];
    let mut node_tail = alloc::vec![0.0; n];
    for m in (0..count).rev() {
        let phi = &mods[m];
        for i in 0..n {
            node_tail[i] += x[m] * phi[i] * phi[i];
            let ci = abs_coeffs[m] * phi[i];
            for j in 0..n {
                pair_tail[i * n + j] += ci * phi[j];
            }
        }
        abs_tail[m] = pair_tail.iter().copied().fold(0.0, f64::max);
        tail_bound[m] = factor * node_tail.iter().copied().fold(0.0, f64::max);
    }

    ConvergenceTable { orders, sup_err, diag_sup_err, abs_tail, tail_bound }
}
