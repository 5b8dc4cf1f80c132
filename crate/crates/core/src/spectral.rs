//! Diagonalization of normal kernels and kernels in diagonal form.
//!
//! A normal kernel `K` is split into the commuting Hermitian pair
//! `X = (K + K*)/2`, `Y = (K - K*)/2i`. `X` is diagonalized by Jacobi
//! rotations on the symmetrized matrix `W^{1/2} X W^{1/2}`; inside every
//! cluster of (numerically) equal `X`-eigenvalues the compression of `Y` is
//! diagonalized in turn, which yields a common eigenbasis with
//! `α = x + i y`.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::{FRAC_PI_2, PI, TAU};

#[allow(unused_imports)]
use num_traits::Float;

use crate::jacobi;
use crate::kernel::{adjoint, compose, rotated_hermitian_part, KernelMatrix};
use crate::quadrature::{weighted_dot, Grid, GridFn};
use crate::{Error, Result, C64};

/// Orthonormality tolerance for families and eigensystems.
pub const ORTHONORMAL_TOL: f64 = 1e-8;
/// Relative size below which an eigenvalue belongs to the atom at zero.
pub const ZERO_ATOM_REL: f64 = 1e-12;
/// Relative gap under which `X`-eigenvalues are treated as one cluster.
pub const CLUSTER_REL_GAP: f64 = 1e-8;
/// Relative normality residual accepted by [`eig_normal`].
pub const NORMALITY_REL_TOL: f64 = 1e-8;
/// Smallest slope reported by [`sector_fit`].
pub const SLOPE_FLOOR: f64 = 1e-12;
/// Rotated eigenvalues need `Re ≥ SECTOR_EDGE_REL · |α|`: a spectrum whose
/// arc is π up to rounding counts as too wide.
pub const SECTOR_EDGE_REL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues `α_n` and grid-orthonormal eigenfunctions `φ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    grid: Grid,
    alphas: Vec<C64>,
    vectors: Vec<GridFn>,
}

impl EigenSystem {
    /// Builds a system from explicit data; the family must be orthonormal
    /// within [`ORTHONORMAL_TOL`].
    pub fn new(grid: Grid, alphas: Vec<C64>, vectors: Vec<GridFn>) -> Result<Self> {
        if alphas.len() != vectors.len() {
            return Err(Error::InvalidArgument(alloc::format!(
                "{} eigenvalues but {} eigenfunctions",
                alphas.len(),
                vectors.len()
            )));
        }
        if vectors.iter().any(|v| *v.grid() != grid) {
            return Err(Error::IncompatibleGrids);
        }
        if alphas.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidArgument("eigenvalues must be finite".into()));
        }
        let defect = orthonormality_defect(&vectors);
        if defect > ORTHONORMAL_TOL {
            return Err(Error::InvalidFamily { defect });
        }
        Ok(EigenSystem { grid, alphas, vectors })
    }

    pub fn empty(grid: &Grid) -> Self {
        EigenSystem { grid: grid.clone(), alphas: Vec::new(), vectors: Vec::new() }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn alphas(&self) -> &[C64] {
        &self.alphas
    }

    pub fn vectors(&self) -> &[GridFn] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// Keeps the first `m` eigenpairs.
    pub fn truncated(&self, m: usize) -> EigenSystem {
        let m = m.min(self.len());
        EigenSystem {
            grid: self.grid.clone(),
            alphas: self.alphas[..m].to_vec(),
            vectors: self.vectors[..m].to_vec(),
        }
    }

    /// `max_{m,n} |⟨φ_m, φ_n⟩ − δ_mn|`.
    pub fn orthonormality_defect(&self) -> f64 {
        orthonormality_defect(&self.vectors)
    }

    /// `ZERO_ATOM_REL · max |α_n|`.
    pub fn zero_threshold(&self) -> f64 {
        ZERO_ATOM_REL * self.alphas.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Whether eigenvalue `n` is part of the atom at zero.
    pub fn is_null_atom(&self, n: usize) -> bool {
        self.alphas[n].norm() <= self.zero_threshold()
    }

    /// Smallest `|α_n|` outside the atom at zero.
    pub fn min_nonzero_modulus(&self) -> Option<f64> {
        let thr = self.zero_threshold();
        self.alphas.iter().map(|a| a.norm()).filter(|&m| m > thr).reduce(f64::min)
    }

    pub(crate) fn from_raw(grid: Grid, alphas: Vec<C64>, vectors: Vec<GridFn>) -> Self {
        EigenSystem { grid, alphas, vectors }
    }
}

/// `max_{m,n} |⟨φ_m, φ_n⟩ − δ_mn|` over a family of grid functions.
pub fn orthonormality_defect(family: &[GridFn]) -> f64 {
    let mut worst = 0.0f64;
    for (m, f) in family.iter().enumerate() {
        for (n, g) in family.iter().enumerate().skip(m) {
            let d = weighted_dot(f.grid().weights(), f.values(), g.values());
            let expect = if m == n { 1.0 } else { 0.0 };
            worst = worst.max((d - expect).norm());
        }
    }
    worst
}

/// Principal argument in `(-π, π]`.
pub(crate) fn principal_arg(z: C64) -> f64 {
    let a = z.im.atan2(z.re);
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Descending modulus, ties by ascending argument.
fn spectral_order(a: &C64, b: &C64) -> Ordering {
    b.norm().total_cmp(&a.norm()).then_with(|| principal_arg(*a).total_cmp(&principal_arg(*b)))
}

/// Multiplies `v` by a unit phase so that its first largest-modulus sample
/// is real and positive.
fn fix_phase(values: &mut [C64]) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, v) in values.iter().enumerate() {
        let a = v.norm();
        if a > best_abs {
            best_abs = a;
            best = i;
        }
    }
    if best_abs > 0.0 {
        let p = values[best].conj() / best_abs;
        for v in values.iter_mut() {
            *v *= p;
        }
        values[best] = C64::new(values[best].re, 0.0);
    }
}

fn assemble(grid: &Grid, mut pairs: Vec<(C64, Vec<C64>)>) -> EigenSystem {
    for (_, v) in pairs.iter_mut() {
        fix_phase(v);
    }
    pairs.sort_by(|a, b| spectral_order(&a.0, &b.0));
    let (alphas, vectors) = pairs
        .into_iter()
        .map(|(a, v)| (a, GridFn::new(grid.clone(), v).expect("eigenvector length matches grid")))
        .unzip();
    EigenSystem::from_raw(grid.clone(), alphas, vectors)
}

/// Sup-entry norm of the commutator `K∘K* − K*∘K` under weighted composition.
pub fn check_normality(k: &KernelMatrix) -> f64 {
    let ka = adjoint(k);
    let left = compose(k, &ka).expect("same grid");
    let right = compose(&ka, k).expect("same grid");
    left.sup_distance(&right).expect("same grid")
}

fn symmetrize(k: &KernelMatrix) -> Vec<C64> {
    let n = k.size();
    let sw: Vec<f64> = k.grid().weights().iter().map(|w| w.sqrt()).collect();
    let mut s = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            s.push(k.get(i, j) * (sw[i] * sw[j]));
        }
    }
    s
}

/// Jacobi eigenpairs of a Hermitian kernel in the weighted inner product;
/// vectors come back as grid samples `φ = W^{-1/2} v`.
fn hermitian_pairs(k: &KernelMatrix) -> Result<(Vec<f64>, Vec<Vec<C64>>, Vec<f64>)> {
    let scale = k.sup_entry().max(1.0);
    let defect = k.hermitian_defect();
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::PreconditionViolation(alloc::format!(
            "kernel is not Hermitian (defect {defect:e})"
        )));
    }
    let n = k.size();
    let out = jacobi::hermitian_eigen(symmetrize(k), n)?;
    let inv_sw: Vec<f64> = k.grid().weights().iter().map(|w| 1.0 / w.sqrt()).collect();
    let vectors = (0..n)
        .map(|col| (0..n).map(|i| out.vectors[i * n + col] * inv_sw[i]).collect())
        .collect();
    Ok((out.values, vectors, out.off_history))
}

/// Eigensystem of a Hermitian kernel (real eigenvalues stored as complex).
pub fn eig_hermitian(k: &KernelMatrix) -> Result<EigenSystem> {
    eig_hermitian_traced(k).map(|(e, _)| e)
}

/// [`eig_hermitian`] together with the off-diagonal mass after each Jacobi
/// sweep (first entry is the initial mass).
pub fn eig_hermitian_traced(k: &KernelMatrix) -> Result<(EigenSystem, Vec<f64>)> {
    let (values, vectors, history) = hermitian_pairs(k)?;
    let pairs = values.into_iter().zip(vectors).map(|(x, v)| (C64::new(x, 0.0), v)).collect();
    Ok((assemble(k.grid(), pairs), history))
}

/// Side information from [`eig_normal_with_diagnostics`].
#[derive(Debug, Clone, PartialEq)]
pub struct NormalDiagnostics {
    pub normality_residual: f64,
    /// Sizes of the `X`-eigenvalue clusters with more than one member.
    pub clusters: Vec<usize>,
    /// Gaps between consecutive `X`-eigenvalues that exceed the cluster
    /// tolerance by less than a factor 100; their vectors may be mixed.
    pub ambiguous_gaps: Vec<f64>,
}

/// Eigensystem of a normal kernel via the commuting Hermitian pair.
pub fn eig_normal(k: &KernelMatrix) -> Result<EigenSystem> {
    eig_normal_with_diagnostics(k).map(|(e, _)| e)
}

pub fn eig_normal_with_diagnostics(k: &KernelMatrix) -> Result<(EigenSystem, NormalDiagnostics)> {
    let residual = check_normality(k);
    if residual > NORMALITY_REL_TOL * k.sup_entry() {
        return Err(Error::NotNormal { residual });
    }
    let n = k.size();
    let w = k.grid().weights();
    let x = rotated_hermitian_part(k, 0.0);
    let y = rotated_hermitian_part(k, -FRAC_PI_2);
    let (xs, xv, _) = hermitian_pairs(&x)?;

    let spectral_scale = symmetrize(k).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let gap_tol = CLUSTER_REL_GAP * spectral_scale;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));

    let mut diagnostics =
        NormalDiagnostics { normality_residual: residual, clusters: Vec::new(), ambiguous_gaps: Vec::new() };
    let mut pairs = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n {
            let gap = xs[order[end]] - xs[order[end - 1]];
            if gap > gap_tol {
                if gap <= 100.0 * gap_tol {
                    diagnostics.ambiguous_gaps.push(gap);
                }
                break;
            }
            end += 1;
        }
        let members = &order[start..end];
        let size = members.len();
        let x_mean = members.iter().map(|&m| xs[m]).sum::<f64>() / size as f64;
        // compression C_ab = ⟨Y φ_b, φ_a⟩
        let yphi: Vec<Vec<C64>> = members
            .iter()
            .map(|&b| {
                let phi = &xv[b];
                (0..n)
                    .map(|i| {
                        y.row(i)
                            .iter()
                            .zip(phi)
                            .zip(w)
                            .fold(C64::new(0.0, 0.0), |acc, ((&yij, &pj), &wj)| acc + yij * pj * wj)
                    })
                    .collect()
            })
            .collect();
        let mut comp = alloc::vec![C64::new(0.0, 0.0); size * size];
        for (a, &ma) in members.iter().enumerate() {
            for (b, yb) in yphi.iter().enumerate() {
                comp[a * size + b] = weighted_dot(w, yb, &xv[ma]);
            }
        }
        if size == 1 {
            pairs.push((C64::new(x_mean, comp[0].re), xv[members[0]].clone()));
        } else {
            diagnostics.clusters.push(size);
            for a in 0..size {
                for b in a..size {
                    let h = (comp[a * size + b] + comp[b * size + a].conj()) * 0.5;
                    comp[a * size + b] = h;
                    comp[b * size + a] = h.conj();
                }
            }
            let inner = jacobi::hermitian_eigen(comp, size)?;
            for col in 0..size {
                let mut v = alloc::vec![C64::new(0.0, 0.0); n];
                for (b, &mb) in members.iter().enumerate() {
                    let u = inner.vectors[b * size + col];
                    for (dst, &src) in v.iter_mut().zip(&xv[mb]) {
                        *dst += src * u;
                    }
                }
                pairs.push((C64::new(x_mean, inner.values[col]), v));
            }
        }
        start = end;
    }
    Ok((assemble(k.grid(), pairs), diagnostics))
}

/// `Σ_n c_n φ_n(s_i) conj(φ_n(s_j))` accumulated in the given order.
pub(crate) fn bilinear_sum<'a, I>(grid: &Grid, terms: I) -> KernelMatrix
where
    I: IntoIterator<Item = (C64, &'a GridFn)>,
{
    let mut k = KernelMatrix::zeros(grid);
    for (c, phi) in terms {
        k.add_outer(c, phi.values(), phi.values());
    }
    k
}

/// `K_ij = Σ_n α_n φ_n(s_i) conj(φ_n(s_j))`.
pub fn reconstruct(e: &EigenSystem) -> KernelMatrix {
    bilinear_sum(&e.grid, e.alphas.iter().copied().zip(&e.vectors))
}

/// Kernel with the prescribed diagonal form `Σ α_n φ_n ⊗ conj(φ_n)`.
pub fn synthesize_from_diagonal(alphas: &[C64], family: &[GridFn]) -> Result<KernelMatrix> {
    let grid = family
        .first()
        .map(|f| f.grid().clone())
        .ok_or_else(|| Error::InvalidArgument("family must not be empty".into()))?;
    let e = EigenSystem::new(grid, alphas.to_vec(), family.to_vec())?;
    Ok(reconstruct(&e))
}

/// Sector `{z : |Im(e^{iα} z)| ≤ l · Re(e^{iα} z)}` with vertex at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sector {
    /// Rotation angle `α ∈ [0, 2π)`.
    pub rotation: f64,
    /// Slope `l > 0` of the bounding rays in the rotated frame.
    pub slope: f64,
}

impl Sector {
    pub fn new(rotation: f64, slope: f64) -> Result<Self> {
        if !rotation.is_finite() || !(slope > 0.0) || !slope.is_finite() {
            return Err(Error::InvalidArgument(alloc::format!(
                "invalid sector (rotation {rotation}, slope {slope})"
            )));
        }
        Ok(Sector { rotation: num_traits::Euclid::rem_euclid(&rotation, &TAU), slope })
    }

    /// `e^{iα} z`.
    pub fn rotate(&self, z: C64) -> C64 {
        C64::from_polar(1.0, self.rotation) * z
    }

    pub fn contains(&self, z: C64, atol: f64) -> bool {
        let r = self.rotate(z);
        r.im.abs() <= self.slope * r.re + atol
    }

    /// Largest violation `|Im λ| − l Re λ` over the eigenvalues above
    /// `zero_tol`; non-positive when every one lies in the sector.
    pub fn worst_violation(&self, alphas: &[C64], zero_tol: f64) -> f64 {
        alphas
            .iter()
            .filter(|a| a.norm() > zero_tol)
            .map(|&a| {
                let r = self.rotate(a);
                r.im.abs() - self.slope * r.re
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `√(1 + l²)`, the factor in `|λ| ≤ Re λ · √(1 + l²)`.
    pub fn modulus_factor(&self) -> f64 {
        (1.0 + self.slope * self.slope).sqrt()
    }
}

fn sector_for_rotation(alphas: &[C64], atol: f64, rotation: f64) -> core::result::Result<Sector, (usize, f64)> {
    let phase = C64::from_polar(1.0, rotation);
    let mut slope = 0.0f64;
    for (i, &a) in alphas.iter().enumerate() {
        if a.norm() <= atol {
            continue;
        }
        let r = phase * a;
        if !(r.re > SECTOR_EDGE_REL * r.norm()) {
            return Err((i, r.re));
        }
        slope = slope.max(r.im.abs() / r.re);
    }
    Ok(Sector { rotation: num_traits::Euclid::rem_euclid(&rotation, &TAU), slope: slope.max(SLOPE_FLOOR) })
}

/// Fits a sector of angle `< π` around the eigenvalues with `|α| > atol`.
///
/// The rotation is minus the circular mean of their arguments. If that
/// rotation leaves some eigenvalue outside the open right half-plane, the
/// bisector of the smallest arc containing all arguments is tried before
/// giving up.
pub fn sector_fit(alphas: &[C64], atol: f64) -> Result<Sector> {
    let nonzero: Vec<C64> = alphas.iter().copied().filter(|a| a.norm() > atol).collect();
    if nonzero.is_empty() {
        return Err(Error::ZeroOperator);
    }
    let mean: C64 = nonzero.iter().map(|a| a / a.norm()).sum();
    let first_try = if mean.norm() > 0.0 {
        sector_for_rotation(alphas, atol, -principal_arg(mean))
    } else {
        Err((0, 0.0))
    };
    let (index, real_part) = match first_try {
        Ok(s) => return Ok(s),
        Err(e) => e,
    };
    // smallest containing arc: complement of the largest gap between sorted arguments
    let mut args: Vec<f64> = nonzero.iter().map(|&a| principal_arg(a)).collect();
    args.sort_by(f64::total_cmp);
    let count = args.len();
    let (mut gap, mut after) = (args[0] + TAU - args[count - 1], 0);
    for i in 1..count {
        let g = args[i] - args[i - 1];
        if g > gap {
            gap = g;
            after = i;
        }
    }
    if gap > PI {
        let start = args[after];
        let span = TAU - gap;
        if let Ok(s) = sector_for_rotation(alphas, atol, -(start + 0.5 * span)) {
            return Ok(s);
        }
    }
    Err(Error::SectorTooWide { index, real_part })
}

/// Multiplies every eigenvalue by `e^{iα}`; eigenfunctions and order are kept.
pub fn rotate(e: &EigenSystem, alpha: f64) -> EigenSystem {
    let phase = C64::from_polar(1.0, alpha);
    EigenSystem {
        grid: e.grid.clone(),
        alphas: e.alphas.iter().map(|&a| phase * a).collect(),
        vectors: e.vectors.clone(),
    }
}

/// The Hermitian system `x_n = Re(e^{iα} α_n)` on the same eigenfunctions:
/// the diagonal form of the rotated Hermitian part.
pub fn positive_part(e: &EigenSystem, sector: &Sector) -> EigenSystem {
    EigenSystem {
        grid: e.grid.clone(),
        alphas: e.alphas.iter().map(|&a| C64::new(sector.rotate(a).re, 0.0)).collect(),
        vectors: e.vectors.clone(),
    }
}
