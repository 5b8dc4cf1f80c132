//! Discrete model of `L₂[0, L]`: quadrature nodes and weights, grid
//! functions, the weighted inner product and the two norms used throughout.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64};

/// Quadrature rule used to discretize `[0, L]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rule {
    Trapezoid,
    #[default]
    GaussLegendre,
}

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITERS: usize = 100;

#[derive(Debug, PartialEq)]
struct GridData {
    points: Vec<f64>,
    weights: Vec<f64>,
    cutoff: f64,
}

/// Quadrature nodes `s_i` and positive weights `w_i` on `[0, cutoff]`.
///
/// Cloning is cheap; the node data is shared.
#[derive(Debug, Clone)]
pub struct Grid {
    data: Arc<GridData>,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.data, &other.data) || self.data == other.data
    }
}

impl Grid {
    /// Builds a grid from explicit nodes and weights, checking the invariants:
    /// equal lengths, strictly increasing nodes inside `[0, cutoff]`, strictly
    /// positive finite weights.
    pub fn from_parts(points: Vec<f64>, weights: Vec<f64>, cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0) || !cutoff.is_finite() {
            return Err(Error::InvalidArgument(format!("cutoff must be positive, got {cutoff}")));
        }
        if points.is_empty() {
            return Err(Error::InvalidArgument("grid needs at least one node".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if points.iter().any(|&p| !(0.0..=cutoff).contains(&p)) {
            return Err(Error::InvalidArgument("grid points must lie in [0, cutoff]".into()));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("grid points must be strictly increasing".into()));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument("grid weights must be positive".into()));
        }
        Ok(Grid { data: Arc::new(GridData { points, weights, cutoff }) })
    }

    pub fn points(&self) -> &[f64] {
        &self.data.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.data.weights
    }

    pub fn cutoff(&self) -> f64 {
        self.data.cutoff
    }

    pub fn len(&self) -> usize {
        self.data.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.points.is_empty()
    }

    /// Indices of the nodes in the last decile `[0.9 L, L]` of the interval.
    pub fn tail_indices(&self) -> impl Iterator<Item = usize> + '_ {
        let start = 0.9 * self.cutoff();
        self.points().iter().enumerate().filter(move |(_, &s)| s >= start).map(|(i, _)| i)
    }

    /// Weighted sum `Σ w_i f(s_i)` of a real function.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.points().iter().zip(self.weights()).map(|(&s, &w)| w * f(s)).sum()
    }
}

/// Builds a quadrature grid with `count` nodes on `[0, cutoff]`.
pub fn make_grid(cutoff: f64, count: usize, rule: Rule) -> Result<Grid> {
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return Err(Error::InvalidArgument(format!("cutoff must be positive, got {cutoff}")));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("node count must be positive".into()));
    }
    let (points, weights) = match rule {
        Rule::Trapezoid => {
            if count < 2 {
                return Err(Error::InvalidArgument("trapezoid rule needs at least two nodes".into()));
            }
            let h = cutoff / (count - 1) as f64;
            let points: Vec<f64> =
                (0..count).map(|i| if i == count - 1 { cutoff } else { i as f64 * h }).collect();
            let weights = (0..count)
                .map(|i| if i == 0 || i == count - 1 { 0.5 * h } else { h })
                .collect();
            (points, weights)
        }
        Rule::GaussLegendre => {
            let (x, w) = gauss_legendre_reference(count)?;
            let half = 0.5 * cutoff;
            let points = x.iter().map(|&x| half * (x + 1.0)).collect();
            let weights = w.iter().map(|&w| half * w).collect();
            (points, weights)
        }
    };
    Grid::from_parts(points, weights, cutoff)
}

/// Legendre polynomial `P_n(x)` and its derivative by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
        p_prev = p;
        p = next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
///
/// Roots of `P_n` by Newton iteration from the Tricomi initial guess; the
/// lower half is mirrored so the rule is exactly symmetric.
pub fn gauss_legendre_reference(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // i-th largest root
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITERS {
            let (p, dp) = legendre_with_derivative(n, z);
            let step = p / dp;
            z -= step;
            if step.abs() <= NEWTON_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence { iterations: NEWTON_MAX_ITERS });
        }
        let (_, dp) = legendre_with_derivative(n, z);
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        // ascending order: largest root goes last
        x[n - 1 - i] = z;
        x[i] = -z;
        w[n - 1 - i] = weight;
        w[i] = weight;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    Ok((x, w))
}

/// Samples `f_i = f(s_i)` of a complex function on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    grid: Grid,
    values: Vec<C64>,
}

impl GridFn {
    pub fn new(grid: Grid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(GridFn { grid, values })
    }

    pub fn from_fn<F: FnMut(f64) -> C64>(grid: &Grid, f: F) -> Self {
        let values = grid.points().iter().copied().map(f).collect();
        GridFn { grid: grid.clone(), values }
    }

    pub fn zeros(grid: &Grid) -> Self {
        GridFn { grid: grid.clone(), values: alloc::vec![C64::new(0.0, 0.0); grid.len()] }
    }

    pub fn constant(grid: &Grid, c: C64) -> Self {
        GridFn { grid: grid.clone(), values: alloc::vec![c; grid.len()] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scale(&self, a: C64) -> GridFn {
        GridFn { grid: self.grid.clone(), values: self.values.iter().map(|&v| a * v).collect() }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: C64, other: &GridFn, b: C64) -> Result<GridFn> {
        if self.grid != other.grid {
            return Err(Error::IncompatibleGrids);
        }
        let values = self.values.iter().zip(&other.values).map(|(&x, &y)| a * x + b * y).collect();
        Ok(GridFn { grid: self.grid.clone(), values })
    }
}

/// `⟨f, g⟩ = Σ w_i f_i conj(g_i)`; linear in `f`, conjugate-linear in `g`.
pub fn inner(f: &GridFn, g: &GridFn) -> Result<C64> {
    if f.grid != g.grid {
        return Err(Error::IncompatibleGrids);
    }
    Ok(weighted_dot(f.grid.weights(), &f.values, &g.values))
}

pub(crate) fn weighted_dot(weights: &[f64], f: &[C64], g: &[C64]) -> C64 {
    weights.iter().zip(f).zip(g).fold(C64::new(0.0, 0.0), |acc, ((&w, &a), &b)| acc + a * b.conj() * w)
}

pub fn l2_norm(f: &GridFn) -> f64 {
    f.grid.weights().iter().zip(&f.values).map(|(&w, v)| w * v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn sup_norm(f: &GridFn) -> f64 {
    f.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}
