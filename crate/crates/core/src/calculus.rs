//! Spectral functions and the calculus `φ(N) = N v(N)` of a normal kernel.
//!
//! In finite dimension the spectral measure is atomic: it sits on the
//! eigenvalues `α_n` with weights `φ_n ⊗ conj(φ_n)`. Every Lebesgue–Stieltjes
//! integral against `E(s,t;·)` therefore becomes a finite sum over atoms.
//! Atoms in the zero class (`|α_n| ≤ 1e-12 · max|α|`) never contribute: the
//! operator `N E({0})` vanishes.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::kernel::{compose, KernelMatrix};
use crate::spectral::{bilinear_sum, reconstruct, EigenSystem, Sector};
use crate::{Error, Result, C64};

/// Tolerance on `|v(α_n)| ≤ v_sup` at evaluated atoms.
pub const SYMBOL_SUP_TOL: f64 = 1e-12;

type SymbolFn = dyn Fn(C64) -> C64 + Send + Sync;
type RegionFn = dyn Fn(C64) -> bool + Send + Sync;

/// A function `φ(z) = z v(z)` with `v` bounded by `v_sup`.
#[derive(Clone)]
pub struct Symbol {
    v: Arc<SymbolFn>,
    v_sup: f64,
    name: String,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol").field("name", &self.name).field("v_sup", &self.v_sup).finish()
    }
}

impl Symbol {
    pub fn new<F>(name: impl Into<String>, v_sup: f64, v: F) -> Result<Self>
    where
        F: Fn(C64) -> C64 + Send + Sync + 'static,
    {
        if !(v_sup >= 0.0) || !v_sup.is_finite() {
            return Err(Error::Symbol(alloc::format!("bound must be finite and non-negative, got {v_sup}")));
        }
        Ok(Symbol { v: Arc::new(v), v_sup, name: name.into() })
    }

    /// `v ≡ 1`, so `φ(z) = z`.
    pub fn identity() -> Self {
        Symbol::new("identity", 1.0, |_| C64::new(1.0, 0.0)).expect("valid bound")
    }

    /// `v(z) = χ_{|z|>eps}(z) / z`, so `φ` is the indicator of `ω_eps`.
    pub fn clip(eps: f64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::Symbol(alloc::format!("clip radius must be positive, got {eps}")));
        }
        Symbol::new(alloc::format!("clip:{eps}"), 1.0 / eps, move |z| {
            if z.norm() > eps {
                z.inv()
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// `v(z) = 1 / (1 + |z|)`.
    pub fn cayley() -> Self {
        Symbol::new("cayley", 1.0, |z| C64::new(1.0 / (1.0 + z.norm()), 0.0)).expect("valid bound")
    }

    /// `v(z) = e^{-|z|}`.
    pub fn phase() -> Self {
        Symbol::new("phase", 1.0, |z| C64::new((-z.norm()).exp(), 0.0)).expect("valid bound")
    }

    /// Looks up a preset by name: `identity`, `clip:EPS`, `cayley`, `phase`.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "identity" => Ok(Symbol::identity()),
            "cayley" => Ok(Symbol::cayley()),
            "phase" => Ok(Symbol::phase()),
            _ => match name.strip_prefix("clip:") {
                Some(eps) => {
                    let eps: f64 =
                        eps.parse().map_err(|_| Error::Symbol(alloc::format!("bad clip radius `{eps}`")))?;
                    Symbol::clip(eps)
                }
                None => Err(Error::Symbol(alloc::format!("unknown symbol `{name}`"))),
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn v_sup(&self) -> f64 {
        self.v_sup
    }

    pub fn v(&self, z: C64) -> C64 {
        (self.v)(z)
    }

    /// `φ(z) = z v(z)`.
    pub fn phi(&self, z: C64) -> C64 {
        z * (self.v)(z)
    }

    /// `v(z)`, failing on non-finite values or on a broken bound.
    fn checked_v(&self, z: C64) -> Result<C64> {
        let v = self.v(z);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Symbol(alloc::format!("{}: v({z}) is not finite", self.name)));
        }
        if v.norm() > self.v_sup + SYMBOL_SUP_TOL {
            return Err(Error::Symbol(alloc::format!(
                "{}: |v({z})| = {} exceeds declared bound {}",
                self.name,
                v.norm(),
                self.v_sup
            )));
        }
        Ok(v)
    }
}

/// A Borel set of the plane whose closure avoids zero, given by a
/// membership predicate and a radius `ε` with `z ∈ ω ⇒ |z| > ε`.
#[derive(Clone)]
pub struct Region {
    predicate: Arc<RegionFn>,
    inner_radius: f64,
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Region").field("inner_radius", &self.inner_radius).finish_non_exhaustive()
    }
}

impl Region {
    pub fn new<F>(inner_radius: f64, predicate: F) -> Result<Self>
    where
        F: Fn(C64) -> bool + Send + Sync + 'static,
    {
        if !(inner_radius >= 0.0) {
            return Err(Error::InvalidArgument(alloc::format!("inner radius must be >= 0, got {inner_radius}")));
        }
        if predicate(C64::new(0.0, 0.0)) {
            return Err(Error::InvalidArgument("region must not contain 0".into()));
        }
        Ok(Region { predicate: Arc::new(predicate), inner_radius })
    }

    pub fn empty() -> Self {
        Region { predicate: Arc::new(|_| false), inner_radius: 0.0 }
    }

    /// `ω₀ = C ∖ {0}`.
    pub fn punctured_plane() -> Self {
        Region { predicate: Arc::new(|z: C64| z.norm() > 0.0), inner_radius: 0.0 }
    }

    /// `ω_ε = {|z| > ε}`.
    pub fn outside_disk(eps: f64) -> Result<Self> {
        if !(eps >= 0.0) {
            return Err(Error::InvalidArgument(alloc::format!("radius must be >= 0, got {eps}")));
        }
        Ok(Region { predicate: Arc::new(move |z: C64| z.norm() > eps), inner_radius: eps })
    }

    /// `{r_lo < |z| ≤ r_hi, arg_lo ≤ arg z < arg_hi}` with arguments in `(-π, π]`.
    pub fn annular_sector(r_lo: f64, r_hi: f64, arg_lo: f64, arg_hi: f64) -> Result<Self> {
        if !(r_lo >= 0.0) {
            return Err(Error::InvalidArgument(alloc::format!("radius must be >= 0, got {r_lo}")));
        }
        Ok(Region {
            predicate: Arc::new(move |z: C64| {
                let r = z.norm();
                let a = crate::spectral::principal_arg(z);
                r > r_lo && r <= r_hi && a >= arg_lo && a < arg_hi
            }),
            inner_radius: r_lo,
        })
    }

    pub fn union(&self, other: &Region) -> Region {
        let (a, b) = (self.predicate.clone(), other.predicate.clone());
        let (ra, rb) = (self.inner_radius, other.inner_radius);
        Region {
            predicate: Arc::new(move |z| (a(z) && z.norm() > ra) || (b(z) && z.norm() > rb)),
            inner_radius: ra.min(rb),
        }
    }

    pub fn intersection(&self, other: &Region) -> Region {
        let (a, b) = (self.predicate.clone(), other.predicate.clone());
        Region { predicate: Arc::new(move |z| a(z) && b(z)), inner_radius: self.inner_radius.max(other.inner_radius) }
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    /// Membership; points with `|z| ≤ inner_radius` are never members.
    pub fn contains(&self, z: C64) -> bool {
        z.norm() > self.inner_radius && (self.predicate)(z)
    }

    /// `v_ω(z) = χ_ω(z) / z`.
    pub fn v_omega(&self, z: C64) -> C64 {
        if self.contains(z) {
            z.inv()
        } else {
            C64::new(0.0, 0.0)
        }
    }
}

/// Atoms outside the zero class, in eigensystem order.
fn live_atoms(e: &EigenSystem) -> impl Iterator<Item = usize> + '_ {
    let thr = e.zero_threshold();
    (0..e.len()).filter(move |&n| e.alphas()[n].norm() > thr)
}

/// Kernel of the projection `E(ω)`: `Σ_{α_n ∈ ω} φ_n(s) conj(φ_n(t))`.
pub fn spectral_function(e: &EigenSystem, omega: &Region) -> KernelMatrix {
    let one = C64::new(1.0, 0.0);
    bilinear_sum(
        e.grid(),
        live_atoms(e).filter(|&n| omega.contains(e.alphas()[n])).map(|n| (one, &e.vectors()[n])),
    )
}

/// Sup-entry residual of `E(ω) = N v_ω(N)` with the right-hand side composed
/// as operators.
pub fn projector_identity_check(e: &EigenSystem, omega: &Region) -> f64 {
    let lhs = spectral_function(e, omega);
    let n_kernel = reconstruct(e);
    let v_kernel = bilinear_sum(
        e.grid(),
        live_atoms(e).map(|n| (omega.v_omega(e.alphas()[n]), &e.vectors()[n])),
    );
    let rhs = compose(&n_kernel, &v_kernel).expect("same grid");
    lhs.sup_distance(&rhs).expect("same grid")
}

/// `max_s Σ_{|α_n|>ε} |φ_n(s)|²`, which bounds every `|E(s,t;σ)|` with
/// `σ ⊆ ω_ε`.
pub fn spectral_bound(e: &EigenSystem, eps: f64) -> f64 {
    let n = e.grid().len();
    let mut diag = alloc::vec![0.0; n];
    for k in live_atoms(e).filter(|&k| e.alphas()[k].norm() > eps) {
        for (d, v) in diag.iter_mut().zip(e.vectors()[k].values()) {
            *d += v.norm_sqr();
        }
    }
    diag.into_iter().fold(0.0, f64::max)
}

fn phi_terms(e: &EigenSystem, sym: &Symbol, eps: f64) -> Result<Vec<(C64, usize)>> {
    live_atoms(e)
        .filter(|&n| e.alphas()[n].norm() > eps)
        .map(|n| {
            let a = e.alphas()[n];
            sym.checked_v(a).map(|v| (a * v, n))
        })
        .collect()
}

/// Kernel of `φ(N)`: `Σ φ(α_n) φ_n(s) conj(φ_n(t))` over non-zero atoms.
pub fn phi_direct(e: &EigenSystem, sym: &Symbol) -> Result<KernelMatrix> {
    phi_epsilon(e, sym, 0.0)
}

/// `Φ_ε(s,t) = Σ_{|α_n|>ε} φ(α_n) φ_n(s) conj(φ_n(t))`. `ε = ∞` gives zero.
pub fn phi_epsilon(e: &EigenSystem, sym: &Symbol, eps: f64) -> Result<KernelMatrix> {
    let terms = phi_terms(e, sym, eps)?;
    Ok(bilinear_sum(e.grid(), terms.into_iter().map(|(c, n)| (c, &e.vectors()[n]))))
}

/// Principal-value approximants and their distance to the direct kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct PvResult {
    pub eps: Vec<f64>,
    pub kernels: Vec<KernelMatrix>,
    /// `max_{s,t} |Φ_ε(s,t) − Φ(s,t)|` per `ε`.
    pub sup_dist: Vec<f64>,
}

impl PvResult {
    /// Largest increase along the distance column; `0` when nonincreasing.
    pub fn max_increase(&self) -> f64 {
        self.sup_dist.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

pub fn validate_eps_sequence(eps_seq: &[f64]) -> Result<()> {
    if eps_seq.is_empty()
        || eps_seq.iter().any(|&e| !(e > 0.0) || !e.is_finite())
        || eps_seq.windows(2).any(|w| !(w[1] < w[0]))
    {
        return Err(Error::InvalidSequence);
    }
    Ok(())
}

/// `Φ_ε` along a strictly decreasing sequence of positive cutoffs.
pub fn phi_pv(e: &EigenSystem, sym: &Symbol, eps_seq: &[f64]) -> Result<PvResult> {
    validate_eps_sequence(eps_seq)?;
    let direct = phi_direct(e, sym)?;
    let mut kernels = Vec::with_capacity(eps_seq.len());
    let mut sup_dist = Vec::with_capacity(eps_seq.len());
    for &eps in eps_seq {
        let k = phi_epsilon(e, sym, eps)?;
        sup_dist.push(k.sup_distance(&direct)?);
        kernels.push(k);
    }
    Ok(PvResult { eps: eps_seq.to_vec(), kernels, sup_dist })
}

fn check_sector(e: &EigenSystem, sector: &Sector) -> Result<()> {
    let thr = e.zero_threshold();
    let scale = e.alphas().iter().map(|a| a.norm()).fold(0.0, f64::max);
    let violation = sector.worst_violation(e.alphas(), thr);
    if violation > 1e-12 * scale.max(1.0) {
        return Err(Error::SectorRequired(alloc::format!("eigenvalues leave the sector by {violation:e}")));
    }
    Ok(())
}

/// `X_ε(s,t) = Σ_{|α_n|>ε} Re(e^{iα} α_n) φ_n(s) conj(φ_n(t))` in the frame
/// rotated by the sector.
pub fn x_epsilon(e: &EigenSystem, sector: &Sector, eps: f64) -> Result<KernelMatrix> {
    check_sector(e, sector)?;
    Ok(x_epsilon_unchecked(e, sector, eps))
}

fn x_epsilon_unchecked(e: &EigenSystem, sector: &Sector, eps: f64) -> KernelMatrix {
    bilinear_sum(
        e.grid(),
        live_atoms(e)
            .filter(|&n| e.alphas()[n].norm() > eps)
            .map(|n| (C64::new(sector.rotate(e.alphas()[n]).re, 0.0), &e.vectors()[n])),
    )
}

fn real_diagonal(k: &KernelMatrix) -> Vec<f64> {
    k.diagonal().into_iter().map(|z| z.re).collect()
}

fn check_eps_pair(eps_m: f64, eps_n: f64) -> Result<()> {
    if !(eps_m > 0.0) || !(eps_m <= eps_n) {
        return Err(Error::ReversedEpsilons { eps_m, eps_n });
    }
    Ok(())
}

/// Margins of the diagonal monotonicity of `X_ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityMargins {
    /// `min_s [X_{ε_m}(s,s) − X_{ε_n}(s,s)]`.
    pub pair: f64,
    /// `min_s [X(s,s) − X_ε(s,s)]` over `ε ∈ {ε_m, ε_n}`.
    pub upper: f64,
}

impl MonotonicityMargins {
    pub fn worst(&self) -> f64 {
        self.pair.min(self.upper)
    }
}

/// Checks `X_{ε_m}(s,s) ≥ X_{ε_n}(s,s)` and `X_ε(s,s) ≤ X(s,s)` for
/// `0 < ε_m ≤ ε_n` (`ε_n` may be infinite).
pub fn monotonicity_check(e: &EigenSystem, sector: &Sector, eps_m: f64, eps_n: f64) -> Result<MonotonicityMargins> {
    check_eps_pair(eps_m, eps_n)?;
    check_sector(e, sector)?;
    let full = real_diagonal(&x_epsilon_unchecked(e, sector, 0.0));
    let xm = real_diagonal(&x_epsilon_unchecked(e, sector, eps_m));
    let xn = real_diagonal(&x_epsilon_unchecked(e, sector, eps_n));
    let min_diff =
        |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).fold(f64::INFINITY, f64::min);
    let pair = min_diff(&xm, &xn);
    let upper = min_diff(&full, &xm).min(min_diff(&full, &xn));
    let fix = |v: f64| if v.is_finite() { v } else { 0.0 };
    Ok(MonotonicityMargins { pair: fix(pair), upper: fix(upper) })
}

/// Worst slack of the Cauchy estimate
/// `|Φ_{ε_m}(s,t) − Φ_{ε_n}(s,t)|² ≤ ‖PP*‖ ΔX(s) ΔX(t)` with
/// `ΔX(s) = X_{ε_m}(s,s) − X_{ε_n}(s,s)` and `‖PP*‖ ≤ v_sup² (1 + l²)`.
pub fn reid_bound_check(e: &EigenSystem, sector: &Sector, sym: &Symbol, eps_m: f64, eps_n: f64) -> Result<f64> {
    check_eps_pair(eps_m, eps_n)?;
    check_sector(e, sector)?;
    let bound = sym.v_sup() * sym.v_sup() * (1.0 + sector.slope * sector.slope);
    let xm = real_diagonal(&x_epsilon_unchecked(e, sector, eps_m));
    let xn = real_diagonal(&x_epsilon_unchecked(e, sector, eps_n));
    let dx: Vec<f64> = xm.iter().zip(&xn).map(|(a, b)| a - b).collect();
    let dphi = phi_epsilon(e, sym, eps_m)?.sub(&phi_epsilon(e, sym, eps_n)?)?;
    let n = dx.len();
    let mut worst = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            worst = worst.min(bound * dx[i] * dx[j] - dphi.get(i, j).norm_sqr());
        }
    }
    Ok(if worst.is_finite() { worst } else { 0.0 })
}
