//! Slow reference implementations used to cross-check the primary code.
//!
//! Nothing here reuses the summation routines of the other modules: every
//! quantity is recomputed from raw samples with plain loops.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;

use crate::calculus::Symbol;
use crate::kernel::KernelMatrix;
use crate::quadrature::GridFn;
use crate::spectral::{EigenSystem, Sector};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_iters: 10_000, tol: 1e-10, seed: 0x5eed }
    }
}

impl OracleConfig {
    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 || !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("oracle needs max_iters >= 1 and tol > 0".into()));
        }
        Ok(())
    }
}

/// splitmix64, enough for reproducible start vectors.
struct SplitMix(u64);

impl SplitMix {
    fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    }
}

/// Power-of-two exponent of the iterated operator: each step applies `A^32`.
const SQUARINGS: usize = 5;

fn wnorm(w: &[f64], x: &[C64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..x.len() {
        acc += w[i] * (x[i].re * x[i].re + x[i].im * x[i].im);
    }
    acc.sqrt()
}

fn matvec(a: &[C64], x: &[C64], n: usize) -> Vec<C64> {
    let mut y = alloc::vec![C64::new(0.0, 0.0); n];
    for i in 0..n {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            acc += a[i * n + j] * x[j];
        }
        y[i] = acc;
    }
    y
}

fn matmul(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
    let mut c = alloc::vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += a[i * n + k] * b[k * n + j];
            }
            c[i * n + j] = acc;
        }
    }
    c
}

/// Top `count` eigenpairs (by modulus) of a Hermitian kernel by power
/// iteration with Hotelling deflation in the weighted inner product.
///
/// The operator matrix `M = K·W` is shifted by twice its ∞-norm `ρ` so that
/// its spectrum is positive; each step applies `(M_defl + 2ρ)^32`. A pair is
/// accepted once `‖Mφ − λφ‖ ≤ tol · max(|λ|, ρ)`, or once λ is stationary to
/// that tolerance with a residual below `√tol · max(|λ|, ρ)` (clusters).
pub fn power_eig_hermitian(k: &KernelMatrix, count: usize, cfg: &OracleConfig) -> Result<EigenSystem> {
    cfg.validate()?;
    let n = k.size();
    if count > n {
        return Err(Error::InvalidArgument(alloc::format!("count {count} exceeds grid size {n}")));
    }
    let grid = k.grid().clone();
    let w = grid.weights().to_vec();
    let mut defect = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            defect = defect.max((k.get(i, j) - k.get(j, i).conj()).norm());
            scale = scale.max(k.get(i, j).norm());
        }
    }
    if defect > 1e-10 * scale.max(1.0) {
        return Err(Error::PreconditionViolation(alloc::format!("kernel is not Hermitian (defect {defect:e})")));
    }

    let mut m = alloc::vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = k.get(i, j) * w[j];
        }
    }
    let norm_inf = (0..n).map(|i| (0..n).map(|j| m[i * n + j].norm()).sum::<f64>()).fold(0.0, f64::max);
    // twice the bound keeps every live shifted eigenvalue away from the
    // deflated zeros
    let sigma = 2.0 * norm_inf;

    let mut pairs: Vec<(C64, Vec<C64>)> = Vec::with_capacity(n);
    if sigma == 0.0 {
        for i in 0..n {
            let mut v = alloc::vec![C64::new(0.0, 0.0); n];
            v[i] = C64::new(1.0 / w[i].sqrt(), 0.0);
            pairs.push((C64::new(0.0, 0.0), v));
        }
    } else {
        let mut shifted = m.clone();
        for i in 0..n {
            shifted[i * n + i] += sigma;
        }
        let mut rng = SplitMix(cfg.seed);
        for _ in 0..n {
            let mut b = shifted.clone();
            for _ in 0..SQUARINGS {
                b = matmul(&b, &b, n);
                let big = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
                if big > 0.0 {
                    for z in b.iter_mut() {
                        *z /= big;
                    }
                }
            }
            let mut x: Vec<C64> = (0..n).map(|_| C64::new(rng.next_f64(), rng.next_f64())).collect();
            let nx = wnorm(&w, &x);
            for z in x.iter_mut() {
                *z /= nx;
            }
            let mut iters = 0;
            let mut previous = f64::NAN;
            let (lambda, vec) = loop {
                if iters == cfg.max_iters {
                    return Err(Error::NoConvergence { iterations: iters });
                }
                iters += 1;
                let mut y = matvec(&b, &x, n);
                let ny = wnorm(&w, &y);
                if ny == 0.0 || !ny.is_finite() {
                    // start vector annihilated: restart from fresh noise
                    y = (0..n).map(|_| C64::new(rng.next_f64(), rng.next_f64())).collect();
                    let ny = wnorm(&w, &y);
                    for z in y.iter_mut() {
                        *z /= ny;
                    }
                } else {
                    for z in y.iter_mut() {
                        *z /= ny;
                    }
                }
                // keep clear of directions already found
                for (_, v) in &pairs {
                    let mut proj = C64::new(0.0, 0.0);
                    for i in 0..n {
                        proj += y[i] * v[i].conj() * w[i];
                    }
                    for i in 0..n {
                        y[i] -= proj * v[i];
                    }
                }
                let ny = wnorm(&w, &y);
                for z in y.iter_mut() {
                    *z /= ny;
                }
                x = y;
                let mx = matvec(&m, &x, n);
                let mut rq = C64::new(0.0, 0.0);
                for i in 0..n {
                    rq += mx[i] * x[i].conj() * w[i];
                }
                let lambda = rq.re;
                let r: Vec<C64> = (0..n).map(|i| mx[i] - x[i] * lambda).collect();
                let scale = lambda.abs().max(norm_inf);
                let res = wnorm(&w, &r);
                // inside a tight cluster the vector drifts but λ settles
                let stalled = (lambda - previous).abs() <= cfg.tol * scale && res <= cfg.tol.sqrt() * scale;
                if res <= cfg.tol * scale || stalled {
                    break (lambda, x.clone());
                }
                previous = lambda;
            };
            // Hotelling deflation: shifted -= (λ + σ) v (W v)^H
            let mu = lambda + sigma;
            for i in 0..n {
                for j in 0..n {
                    shifted[i * n + j] -= vec[i] * vec[j].conj() * (mu * w[j]);
                }
            }
            pairs.push((C64::new(lambda, 0.0), vec));
        }
    }

    pairs.sort_by(|a, b| {
        b.0.norm().total_cmp(&a.0.norm()).then_with(|| a.0.im.atan2(a.0.re).total_cmp(&b.0.im.atan2(b.0.re)))
    });
    pairs.truncate(count);
    let mut alphas = Vec::with_capacity(count);
    let mut vectors = Vec::with_capacity(count);
    for (lambda, mut v) in pairs {
        let mut idx = 0;
        for i in 1..n {
            if v[i].norm() > v[idx].norm() {
                idx = i;
            }
        }
        let ph = v[idx].conj() / v[idx].norm();
        for z in v.iter_mut() {
            *z *= ph;
        }
        alphas.push(lambda);
        vectors.push(GridFn::new(grid.clone(), v)?);
    }
    EigenSystem::new(grid, alphas, vectors)
}

/// `C_ij = Σ_k w_k A_ik B_kj` by the textbook triple loop.
pub fn weighted_compose(a: &KernelMatrix, b: &KernelMatrix) -> Result<KernelMatrix> {
    if a.grid() != b.grid() {
        return Err(Error::IncompatibleGrids);
    }
    let n = a.size();
    let w = a.grid().weights();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += a.get(i, k) * b.get(k, j) * w[k];
            }
            out.push(acc);
        }
    }
    KernelMatrix::new(a.grid().clone(), out)
}

/// Inequalities that can be swept exhaustively.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckId {
    /// `K(s,s) ≥ Σ_{n<m} x_n |φ_n(s)|²`.
    DiagLowerBound,
    /// `(Σ_{p..=q} x_n |φ_n(s)||φ_n(t)|)² ≤ M Σ_{p..=q} x_n |φ_n(s)|²`.
    CauchyTail,
    /// `Σ x_n² |φ_n(s)|² ≤ max_s ‖k(s)‖²`.
    Bessel,
    /// `X_{ε_m}(s,s) ≥ X_{ε_n}(s,s)` and `X(s,s) ≥ X_ε(s,s)`.
    Monotonicity,
    /// `|ΔΦ(s,t)|² ≤ ‖PP*‖ ΔX(s) ΔX(t)`.
    Reid,
}

impl CheckId {
    pub const ALL: [CheckId; 5] =
        [CheckId::DiagLowerBound, CheckId::CauchyTail, CheckId::Bessel, CheckId::Monotonicity, CheckId::Reid];

    pub fn name(&self) -> &'static str {
        match self {
            CheckId::DiagLowerBound => "diag-lower-bound",
            CheckId::CauchyTail => "cauchy-tail",
            CheckId::Bessel => "bessel",
            CheckId::Monotonicity => "monotonicity",
            CheckId::Reid => "reid",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL.iter().copied().find(|c| c.name() == s).ok_or_else(|| Error::UnknownCheck(s.to_string()))
    }
}

/// Inputs of one inequality instance.
#[derive(Debug, Clone, Copy)]
pub enum SweepInstance<'a> {
    DiagLowerBound { kernel: &'a KernelMatrix, system: &'a EigenSystem },
    CauchyTail { kernel: &'a KernelMatrix, system: &'a EigenSystem, p: usize, q: usize },
    Bessel { kernel: &'a KernelMatrix, system: &'a EigenSystem },
    Monotonicity { system: &'a EigenSystem, sector: &'a Sector, eps_m: f64, eps_n: f64 },
    Reid { system: &'a EigenSystem, sector: &'a Sector, symbol: &'a Symbol, eps_m: f64, eps_n: f64 },
}

impl SweepInstance<'_> {
    pub fn check(&self) -> CheckId {
        match self {
            SweepInstance::DiagLowerBound { .. } => CheckId::DiagLowerBound,
            SweepInstance::CauchyTail { .. } => CheckId::CauchyTail,
            SweepInstance::Bessel { .. } => CheckId::Bessel,
            SweepInstance::Monotonicity { .. } => CheckId::Monotonicity,
            SweepInstance::Reid { .. } => CheckId::Reid,
        }
    }
}

/// Arg-min of an exhaustive sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub check: CheckId,
    pub margin: f64,
    /// Node index of the first argument.
    pub s: usize,
    /// Node index of the second argument, where there is one.
    pub t: Option<usize>,
    /// Truncation order, where there is one.
    pub m: Option<usize>,
}

struct Best {
    margin: f64,
    s: usize,
    t: Option<usize>,
    m: Option<usize>,
}

impl Best {
    fn new() -> Self {
        Best { margin: f64::INFINITY, s: 0, t: None, m: None }
    }

    fn offer(&mut self, margin: f64, s: usize, t: Option<usize>, m: Option<usize>) {
        if margin < self.margin {
            *self = Best { margin, s, t, m };
        }
    }

    fn finish(self, check: CheckId) -> Witness {
        let margin = if self.margin.is_finite() { self.margin } else { 0.0 };
        Witness { check, margin, s: self.s, t: self.t, m: self.m }
    }
}

fn abs2(z: C64) -> f64 {
    z.re * z.re + z.im * z.im
}

/// Coefficients `x_n`, with `x_n ≤ 1e-12 max x` replaced by zero.
fn oracle_positive(system: &EigenSystem) -> Vec<f64> {
    let mut max = 0.0f64;
    for a in system.alphas() {
        if a.re > max {
            max = a.re;
        }
    }
    system.alphas().iter().map(|a| if a.re > 1e-12 * max { a.re } else { 0.0 }).collect()
}

fn live(system: &EigenSystem) -> Vec<bool> {
    let mut max = 0.0f64;
    for a in system.alphas() {
        max = max.max(a.norm());
    }
    system.alphas().iter().map(|a| a.norm() > 1e-12 * max).collect()
}

/// `X_ε(s,s)` by direct summation; `ε = ∞` gives zero.
fn x_diag(system: &EigenSystem, sector: &Sector, eps: f64, live: &[bool], s: usize) -> f64 {
    let rot = C64::new(sector.rotation.cos(), sector.rotation.sin());
    let mut acc = C64::new(0.0, 0.0);
    for (n, a) in system.alphas().iter().enumerate() {
        if live[n] && a.norm() > eps {
            let phi = system.vectors()[n].values()[s];
            acc += C64::new((rot * a).re, 0.0) * phi * phi.conj();
        }
    }
    acc.re
}

fn phi_entry(system: &EigenSystem, symbol: &Symbol, eps: f64, live: &[bool], s: usize, t: usize) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (n, &a) in system.alphas().iter().enumerate() {
        if live[n] && a.norm() > eps {
            let v = system.vectors()[n].values();
            acc += a * symbol.v(a) * v[s] * v[t].conj();
        }
    }
    acc
}

/// Re-evaluates the named inequality at every node (pair) and order and
/// returns the worst case.
pub fn exhaustive_inequality_sweep(check: &str, instance: &SweepInstance<'_>) -> Result<Witness> {
    let id: CheckId = check.parse()?;
    if id != instance.check() {
        return Err(Error::InvalidArgument(alloc::format!(
            "check `{id}` does not match instance for `{}`",
            instance.check()
        )));
    }
    let mut best = Best::new();
    match *instance {
        SweepInstance::DiagLowerBound { kernel, system } => {
            let x = oracle_positive(system);
            for s in 0..kernel.size() {
                let kss = kernel.get(s, s).re;
                for m in 0..=x.len() {
                    let mut sum = 0.0;
                    for n in 0..m {
                        let p = system.vectors()[n].values()[s].norm();
                        sum += x[n] * p * p;
                    }
                    best.offer(kss - sum, s, None, Some(m));
                }
            }
        }
        SweepInstance::CauchyTail { kernel, system, p, q } => {
            if p > q || q >= system.len() {
                return Err(Error::InvalidRange { p, q });
            }
            let x = oracle_positive(system);
            let n = kernel.size();
            let mut big_m = f64::NEG_INFINITY;
            for i in 0..n {
                big_m = big_m.max(kernel.get(i, i).re);
            }
            for s in 0..n {
                for t in 0..n {
                    let (mut a, mut b) = (0.0, 0.0);
                    for k in p..=q {
                        let v = system.vectors()[k].values();
                        let (ps, pt) = (v[s].norm(), v[t].norm());
                        a += x[k] * ps * ps;
                        b += x[k] * ps * pt;
                    }
                    best.offer(big_m * a - b * b, s, Some(t), None);
                }
            }
        }
        SweepInstance::Bessel { kernel, system } => {
            let x = oracle_positive(system);
            let n = kernel.size();
            let w = kernel.grid().weights();
            let mut bound = 0.0f64;
            for i in 0..n {
                let mut row = 0.0;
                for j in 0..n {
                    row += w[j] * abs2(kernel.get(i, j));
                }
                bound = bound.max(row);
            }
            // the primary path squares a square root
            bound = bound.sqrt().powi(2);
            for s in 0..n {
                let mut sum = 0.0;
                for (k, &xk) in x.iter().enumerate() {
                    let p = system.vectors()[k].values()[s].norm();
                    sum += xk * xk * p * p;
                }
                best.offer(bound - sum, s, None, None);
            }
        }
        SweepInstance::Monotonicity { system, sector, eps_m, eps_n } => {
            if !(eps_m > 0.0) || !(eps_m <= eps_n) {
                return Err(Error::ReversedEpsilons { eps_m, eps_n });
            }
            let live = live(system);
            for s in 0..system.grid().len() {
                let full = x_diag(system, sector, 0.0, &live, s);
                let xm = x_diag(system, sector, eps_m, &live, s);
                let xn = x_diag(system, sector, eps_n, &live, s);
                best.offer(xm - xn, s, None, None);
                best.offer(full - xm, s, None, None);
                best.offer(full - xn, s, None, None);
            }
        }
        SweepInstance::Reid { system, sector, symbol, eps_m, eps_n } => {
            if !(eps_m > 0.0) || !(eps_m <= eps_n) {
                return Err(Error::ReversedEpsilons { eps_m, eps_n });
            }
            let live = live(system);
            let n = system.grid().len();
            let bound = symbol.v_sup() * symbol.v_sup() * (1.0 + sector.slope * sector.slope);
            let dx: Vec<f64> = (0..n)
                .map(|s| x_diag(system, sector, eps_m, &live, s) - x_diag(system, sector, eps_n, &live, s))
                .collect();
            for s in 0..n {
                for t in 0..n {
                    let d = phi_entry(system, symbol, eps_m, &live, s, t) - phi_entry(system, symbol, eps_n, &live, s, t);
                    best.offer(bound * dx[s] * dx[t] - abs2(d), s, Some(t), None);
                }
            }
        }
    }
    Ok(best.finish(id))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{make_grid, Rule};
    use crate::spectral::reconstruct;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn check_ids_round_trip() {
        for id in CheckId::ALL {
            assert_eq!(id.name().parse::<CheckId>().unwrap(), id);
        }
        assert_eq!("nope".parse::<CheckId>().unwrap_err(), Error::UnknownCheck("nope".into()));
    }

    #[test]
    fn rank_one_power_iteration() {
        let g = make_grid(2.0, 8, Rule::GaussLegendre).unwrap();
        let phi = GridFn::constant(&g, c(1.0 / 2f64.sqrt(), 0.0));
        let e = EigenSystem::new(g, alloc::vec![c(2.0, 0.0)], alloc::vec![phi.clone()]).unwrap();
        let k = reconstruct(&e);
        let got = power_eig_hermitian(&k, 1, &OracleConfig::default()).unwrap();
        assert!((got.alphas()[0] - c(2.0, 0.0)).norm() < 1e-12);
        for (a, b) in got.vectors()[0].values().iter().zip(phi.values()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn diagonal_kernel_power_iteration() {
        let g = make_grid(4.0, 4, Rule::Trapezoid).unwrap();
        let diag = [3.0, -2.0, 1.0, 0.5];
        let mut vals = alloc::vec![c(0.0, 0.0); 16];
        for i in 0..4 {
            vals[i * 4 + i] = c(diag[i], 0.0);
        }
        let k = KernelMatrix::new(g.clone(), vals).unwrap();
        let got = power_eig_hermitian(&k, 4, &OracleConfig::default()).unwrap();
        // operator eigenvalues K_ii w_i: 2, -8/3, 4/3, 1/3
        let w = g.weights();
        let expect = [diag[1] * w[1], diag[0] * w[0], diag[2] * w[2], diag[3] * w[3]];
        let coords = [1, 0, 2, 3];
        for n in 0..4 {
            assert!((got.alphas()[n].re - expect[n]).abs() < 1e-10, "{:?}", got.alphas());
            let v = got.vectors()[n].values();
            assert!((v[coords[n]].re - 1.0 / w[coords[n]].sqrt()).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_kernel_power_iteration() {
        let g = make_grid(1.0, 3, Rule::GaussLegendre).unwrap();
        let got = power_eig_hermitian(&KernelMatrix::zeros(&g), 3, &OracleConfig::default()).unwrap();
        assert!(got.alphas().iter().all(|a| *a == c(0.0, 0.0)));
    }

    #[test]
    fn compose_with_zero() {
        let g = make_grid(1.0, 3, Rule::GaussLegendre).unwrap();
        let k = crate::kernel::sample_kernel(|s, t| c(s + t, s - t), &g).unwrap();
        let z = KernelMatrix::zeros(&g);
        assert_eq!(weighted_compose(&k, &z).unwrap().sup_entry(), 0.0);
    }

    #[test]
    fn mismatched_instance() {
        let g = make_grid(1.0, 2, Rule::Trapezoid).unwrap();
        let k = KernelMatrix::zeros(&g);
        let e = EigenSystem::empty(&g);
        let inst = SweepInstance::Bessel { kernel: &k, system: &e };
        assert!(matches!(exhaustive_inequality_sweep("reid", &inst), Err(Error::InvalidArgument(_))));
        assert!(matches!(exhaustive_inequality_sweep("(2.6)", &inst), Err(Error::UnknownCheck(_))));
        assert_eq!(exhaustive_inequality_sweep("bessel", &inst).unwrap().margin, 0.0);
    }
}
