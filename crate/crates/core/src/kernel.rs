//! Sampled kernels `K(s_i, t_j)` acting as integral operators on a grid.
//!
//! Row index is the first argument. The operator induced by a kernel is
//! `(Kf)_i = Σ_j w_j K_ij f_j`, so composition of operators interleaves the
//! weights and the kernel of the adjoint operator (with respect to the
//! weighted inner product) is simply the conjugate transpose.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::quadrature::{Grid, GridFn};
use crate::{Error, Result, C64};

/// Dense complex kernel samples on a square grid.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    grid: Grid,
    values: Vec<C64>,
}

/// Grid proxies for the K⁰-kernel conditions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct K0Report {
    /// `max_i ‖k(s_i)‖`, the grid form of `‖k‖_{C(R+, L2)}`.
    pub max_row_l2: f64,
    /// `max_j ‖k*(t_j)‖`.
    pub max_col_l2: f64,
    /// Largest `|K_ij|` with `s_i` or `t_j` in the last decile of `[0, L]`.
    pub tail_sup: f64,
    /// `max |K_ij - conj(K_ji)|`.
    pub hermitian_defect: f64,
}

impl KernelMatrix {
    /// Wraps row-major samples; rejects wrong sizes and non-finite entries.
    pub fn new(grid: Grid, values: Vec<C64>) -> Result<Self> {
        let n = grid.len();
        if values.len() != n * n {
            return Err(Error::InvalidArgument(alloc::format!(
                "{} kernel values for a {n}-node grid",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFiniteKernel { row: pos / n, col: pos % n });
        }
        Ok(KernelMatrix { grid, values })
    }

    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.len();
        KernelMatrix { grid: grid.clone(), values: alloc::vec![C64::new(0.0, 0.0); n * n] }
    }

    pub(crate) fn from_raw(grid: Grid, values: Vec<C64>) -> Self {
        debug_assert_eq!(values.len(), grid.len() * grid.len());
        KernelMatrix { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn size(&self) -> usize {
        self.grid.len()
    }

    /// Row-major samples.
    pub fn values(&self) -> &[C64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.values[i * self.size() + j]
    }

    pub fn row(&self, i: usize) -> &[C64] {
        let n = self.size();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.size()).map(|i| self.get(i, i)).collect()
    }

    /// `max |K_ij|`.
    pub fn sup_entry(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max |A_ij - B_ij|`.
    pub fn sup_distance(&self, other: &KernelMatrix) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    pub fn scale(&self, a: C64) -> KernelMatrix {
        KernelMatrix::from_raw(self.grid.clone(), self.values.iter().map(|&v| a * v).collect())
    }

    pub fn add(&self, other: &KernelMatrix) -> Result<KernelMatrix> {
        self.same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(KernelMatrix::from_raw(self.grid.clone(), values))
    }

    pub fn sub(&self, other: &KernelMatrix) -> Result<KernelMatrix> {
        self.same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(KernelMatrix::from_raw(self.grid.clone(), values))
    }

    /// `K_ij += c · f_i · conj(g_j)`.
    pub(crate) fn add_outer(&mut self, c: C64, f: &[C64], g: &[C64]) {
        let n = self.size();
        for (i, &fi) in f.iter().enumerate() {
            let cf = c * fi;
            let row = &mut self.values[i * n..(i + 1) * n];
            for (k, &gj) in row.iter_mut().zip(g) {
                *k += cf * gj.conj();
            }
        }
    }

    pub(crate) fn same_grid(&self, other: &KernelMatrix) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::IncompatibleGrids)
        }
    }

    /// `max |K_ij - conj(K_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.size();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Largest difference between samples at neighbouring nodes along either
    /// argument. Reported as a continuity proxy only.
    pub fn adjacent_difference(&self) -> f64 {
        let n = self.size();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i + 1 < n {
                    worst = worst.max((self.get(i + 1, j) - self.get(i, j)).norm());
                }
                if j + 1 < n {
                    worst = worst.max((self.get(i, j + 1) - self.get(i, j)).norm());
                }
            }
        }
        worst
    }
}

/// Samples `K_ij = k(s_i, s_j)`.
pub fn sample_kernel<F: Fn(f64, f64) -> C64>(k: F, grid: &Grid) -> Result<KernelMatrix> {
    let pts = grid.points();
    let values = pts.iter().flat_map(|&s| pts.iter().map(move |&t| (s, t))).map(|(s, t)| k(s, t)).collect();
    KernelMatrix::new(grid.clone(), values)
}

/// The Carleman function `k(s_i) = conj(K(s_i, ·))`.
pub fn carleman_row(k: &KernelMatrix, i: usize) -> Result<GridFn> {
    let n = k.size();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    GridFn::new(k.grid.clone(), k.row(i).iter().map(|v| v.conj()).collect())
}

/// The Carleman function `k*(t_j) = K(·, t_j)`.
pub fn carleman_col(k: &KernelMatrix, j: usize) -> Result<GridFn> {
    let n = k.size();
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, len: n });
    }
    GridFn::new(k.grid.clone(), (0..n).map(|i| k.get(i, j)).collect())
}

/// `(Kf)_i = Σ_j w_j K_ij f_j`.
pub fn apply(k: &KernelMatrix, f: &GridFn) -> Result<GridFn> {
    if *f.grid() != k.grid {
        return Err(Error::IncompatibleGrids);
    }
    let weighted: Vec<C64> = f.values().iter().zip(k.grid.weights()).map(|(&v, &w)| v * w).collect();
    let out = (0..k.size())
        .map(|i| k.row(i).iter().zip(&weighted).fold(C64::new(0.0, 0.0), |acc, (&a, &b)| acc + a * b))
        .collect();
    GridFn::new(k.grid.clone(), out)
}

/// Kernel of the adjoint operator with respect to the weighted inner product.
///
/// The operator matrix is `K·W`; its weighted adjoint `W⁻¹ (K·W)ᴴ W = Kᴴ·W`
/// is again an integral operator whose kernel is the conjugate transpose.
pub fn adjoint(k: &KernelMatrix) -> KernelMatrix {
    let n = k.size();
    let mut values = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            values.push(k.get(j, i).conj());
        }
    }
    KernelMatrix::from_raw(k.grid.clone(), values)
}

/// `(e^{iα} K(s,t) + e^{-iα} conj(K(t,s))) / 2`, exactly Hermitian.
pub fn rotated_hermitian_part(k: &KernelMatrix, alpha: f64) -> KernelMatrix {
    let n = k.size();
    let phase = C64::from_polar(1.0, alpha);
    let mut values = alloc::vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        let d = (phase * k.get(i, i)).re;
        values[i * n + i] = C64::new(d, 0.0);
        for j in i + 1..n {
            let v = (phase * k.get(i, j) + (phase * k.get(j, i)).conj()) * 0.5;
            values[i * n + j] = v;
            values[j * n + i] = v.conj();
        }
    }
    KernelMatrix::from_raw(k.grid.clone(), values)
}

/// Kernel of the operator product `A∘B`: `C_ij = Σ_k A_ik w_k B_kj`.
pub fn compose(a: &KernelMatrix, b: &KernelMatrix) -> Result<KernelMatrix> {
    a.same_grid(b)?;
    let n = a.size();
    let w = a.grid.weights();
    let mut out = alloc::vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        let dst = &mut out[i * n..(i + 1) * n];
        for (k, &wk) in w.iter().enumerate() {
            let aik = a.get(i, k) * wk;
            for (d, &bkj) in dst.iter_mut().zip(b.row(k)) {
                *d += aik * bkj;
            }
        }
    }
    Ok(KernelMatrix::from_raw(a.grid.clone(), out))
}

/// K⁰ diagnostics on the grid.
pub fn check_k0(k: &KernelMatrix) -> K0Report {
    let n = k.size();
    let w = k.grid.weights();
    let row_l2 = |i: usize| (0..n).map(|j| w[j] * k.get(i, j).norm_sqr()).sum::<f64>().sqrt();
    let col_l2 = |j: usize| (0..n).map(|i| w[i] * k.get(i, j).norm_sqr()).sum::<f64>().sqrt();
    let max_row_l2 = (0..n).map(row_l2).fold(0.0, f64::max);
    let max_col_l2 = (0..n).map(col_l2).fold(0.0, f64::max);
    let mut tail_sup = 0.0f64;
    for i in k.grid.tail_indices() {
        for j in 0..n {
            tail_sup = tail_sup.max(k.get(i, j).norm()).max(k.get(j, i).norm());
        }
    }
    K0Report { max_row_l2, max_col_l2, tail_sup, hermitian_defect: k.hermitian_defect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{inner, make_grid, Rule};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_kernel() {
        let g = make_grid(2.0, 5, Rule::GaussLegendre).unwrap();
        let k = sample_kernel(|_, _| c(0.0, 0.0), &g).unwrap();
        assert!(k.values().iter().all(|v| *v == c(0.0, 0.0)));
        assert!(carleman_row(&k, 2).unwrap().values().iter().all(|v| *v == c(0.0, 0.0)));
        assert!(carleman_col(&k, 4).unwrap().values().iter().all(|v| *v == c(0.0, 0.0)));
        let f = GridFn::constant(&g, c(1.0, 2.0));
        assert!(apply(&k, &f).unwrap().values().iter().all(|v| *v == c(0.0, 0.0)));
        assert_eq!(adjoint(&k), k);
        assert_eq!(check_k0(&k), K0Report::default());
    }

    #[test]
    fn separable_kernel_is_rank_one() {
        let g = make_grid(1.0, 2, Rule::Trapezoid).unwrap();
        let k = sample_kernel(|s, t| c((-s - t).exp(), 0.0), &g).unwrap();
        let e = (-1.0f64).exp();
        assert_eq!(k.values(), &[c(1.0, 0.0), c(e, 0.0), c(e, 0.0), c(e * e, 0.0)]);
        // 2x2 determinant vanishes
        let det = k.get(0, 0) * k.get(1, 1) - k.get(0, 1) * k.get(1, 0);
        assert!(det.norm() < 1e-16);
    }

    #[test]
    fn non_finite_sample_rejected() {
        let g = make_grid(1.0, 3, Rule::Trapezoid).unwrap();
        let err = sample_kernel(|s, t| if s > 0.9 && t < 0.1 { c(f64::NAN, 0.0) } else { c(1.0, 0.0) }, &g);
        assert_eq!(err.unwrap_err(), Error::NonFiniteKernel { row: 2, col: 0 });
        let err = sample_kernel(|_, _| c(0.0, f64::INFINITY), &g);
        assert!(matches!(err, Err(Error::NonFiniteKernel { .. })));
    }

    #[test]
    fn carleman_index_out_of_range() {
        let g = make_grid(1.0, 3, Rule::Trapezoid).unwrap();
        let k = KernelMatrix::zeros(&g);
        assert_eq!(carleman_row(&k, 3).unwrap_err(), Error::IndexOutOfRange { index: 3, len: 3 });
        assert_eq!(carleman_col(&k, 7).unwrap_err(), Error::IndexOutOfRange { index: 7, len: 3 });
    }

    #[test]
    fn hermitian_rows_equal_columns() {
        let g = make_grid(3.0, 6, Rule::GaussLegendre).unwrap();
        let k = sample_kernel(|s, t| c((-(s - t) * (s - t)).exp(), (s - t).sin()), &g).unwrap();
        assert!(k.hermitian_defect() < 1e-15);
        for i in 0..6 {
            let r = carleman_row(&k, i).unwrap();
            let col = carleman_col(&k, i).unwrap();
            for (a, b) in r.values().iter().zip(col.values()) {
                assert!((a - b).norm() < 1e-15);
            }
        }
        assert!(rotated_hermitian_part(&k, 0.0).sup_distance(&k).unwrap() < 1e-15);
    }

    #[test]
    fn separable_apply_is_inner_times_profile() {
        let g = make_grid(4.0, 12, Rule::GaussLegendre).unwrap();
        let a = |s: f64| c(s.cos(), 0.3 * s);
        let b = |s: f64| c((-s).exp(), s.sin());
        let k = sample_kernel(|s, t| a(s) * b(t).conj(), &g).unwrap();
        let f = GridFn::from_fn(&g, |s| c(1.0 / (1.0 + s), s * s * 0.1));
        let bf = GridFn::from_fn(&g, b);
        let expected = GridFn::from_fn(&g, a).scale(inner(&f, &bf).unwrap());
        let got = apply(&k, &f).unwrap();
        for (x, y) in got.values().iter().zip(expected.values()) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn phase_removed_by_rotation() {
        let g = make_grid(2.0, 5, Rule::GaussLegendre).unwrap();
        let h = sample_kernel(|s, t| c(1.0 / (1.0 + s + t), 0.2 * (s - t)), &g).unwrap();
        let ih = h.scale(c(0.0, 1.0));
        let back = rotated_hermitian_part(&ih, -core::f64::consts::FRAC_PI_2);
        assert!(back.sup_distance(&h).unwrap() < 1e-15);
    }

    #[test]
    fn tail_of_exponential_kernel() {
        let cutoff = 20.0;
        let g = make_grid(cutoff, 40, Rule::GaussLegendre).unwrap();
        let k = sample_kernel(|s, t| c((-s - t).exp(), 0.0), &g).unwrap();
        let report = check_k0(&k);
        // largest tail sample pairs the first node with the first tail node
        let s0 = g.points()[0];
        let first_tail = g.points()[g.tail_indices().next().unwrap()];
        assert!(report.tail_sup <= (-0.9 * cutoff).exp());
        assert!((report.tail_sup - (-s0 - first_tail).exp()).abs() < 1e-22);
        assert!(report.hermitian_defect <= 1e-12);
    }

    #[test]
    fn compose_grid_mismatch() {
        let a = KernelMatrix::zeros(&make_grid(1.0, 3, Rule::Trapezoid).unwrap());
        let b = KernelMatrix::zeros(&make_grid(1.0, 4, Rule::Trapezoid).unwrap());
        assert_eq!(compose(&a, &b).unwrap_err(), Error::IncompatibleGrids);
        assert_eq!(a.sup_distance(&b).unwrap_err(), Error::IncompatibleGrids);
    }
}
