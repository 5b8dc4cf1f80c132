//! Built-in kernels with a prescribed diagonal form on scaled Laguerre
//! functions.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;

use carleman_core::laguerre::{orthonormalize, sample_family, DEFAULT_SCALE};
use carleman_core::quadrature::make_grid;
use carleman_core::spectral::{orthonormality_defect, synthesize_from_diagonal};
use carleman_core::{EigenSystem, KernelMatrix, Rule, C64};

use crate::error::{CliError, CliResult};

/// Largest raw orthonormality defect of the sampled family.
pub const MAX_FAMILY_DEFECT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Law {
    /// `α_n = base (n+1) e^{iθ_n}`.
    #[value(name = "linear_growth")]
    LinearGrowth,
    /// `α_n = base (n+1)^{-2} e^{iθ_n}`.
    #[value(name = "inverse_square")]
    InverseSquare,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: String,
    pub count: usize,
    pub law: Law,
    pub base: f64,
    pub theta_max: f64,
    pub grid_n: usize,
    pub cutoff: f64,
    pub rule: Rule,
    pub scale: f64,
}

pub const PRESET_NAMES: [&str; 3] = ["classical", "sector", "wide"];

impl Preset {
    fn base(name: &str, law: Law, theta_max: f64) -> Self {
        Preset {
            name: name.into(),
            count: 16,
            law,
            base: 1.0,
            theta_max,
            grid_n: 64,
            cutoff: 40.0,
            rule: Rule::GaussLegendre,
            scale: DEFAULT_SCALE,
        }
    }

    /// `classical` is positive self-adjoint, `sector` spreads the
    /// eigenvalues over `±0.4`, `wide` over `±π/4` (slope close to 1).
    pub fn builtin(name: &str) -> CliResult<Self> {
        match name {
            "classical" => Ok(Preset::base(name, Law::InverseSquare, 0.0)),
            "sector" => Ok(Preset::base(name, Law::LinearGrowth, 0.4)),
            "wide" => Ok(Preset::base(name, Law::LinearGrowth, FRAC_PI_4)),
            _ => Err(CliError::Usage(format!("unknown preset `{name}` (expected one of {})", PRESET_NAMES.join(", ")))),
        }
    }

    fn validate(&self) -> CliResult<()> {
        if self.count == 0 {
            return Err(CliError::Usage("count must be at least 1".into()));
        }
        if self.count > self.grid_n {
            return Err(CliError::Usage(format!("count {} exceeds grid size {}", self.count, self.grid_n)));
        }
        if !(self.theta_max >= 0.0 && self.theta_max < FRAC_PI_2) {
            return Err(CliError::Usage(format!("theta-max must lie in [0, π/2), got {}", self.theta_max)));
        }
        if !(self.base > 0.0 && self.base.is_finite()) || !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(CliError::Usage("base and scale must be positive".into()));
        }
        Ok(())
    }

    /// `θ_n = θ_max (2 frac(n g) − 1)` with `g` the golden ratio conjugate.
    pub fn angle(&self, n: usize) -> f64 {
        const GOLDEN: f64 = 0.618_033_988_749_894_8;
        self.theta_max * (2.0 * (n as f64 * GOLDEN).fract() - 1.0)
    }

    pub fn alphas(&self) -> Vec<C64> {
        (0..self.count)
            .map(|n| {
                let k = (n + 1) as f64;
                let r = match self.law {
                    Law::LinearGrowth => self.base * k,
                    Law::InverseSquare => self.base / (k * k),
                };
                C64::from_polar(r, self.angle(n))
            })
            .collect()
    }

    /// The synthesized kernel with its ground-truth eigensystem.
    ///
    /// The sampled family is re-orthonormalized after the defect check so
    /// that the ground truth is exactly orthonormal on the grid.
    pub fn build(&self) -> CliResult<(KernelMatrix, EigenSystem)> {
        self.validate()?;
        let grid = make_grid(self.cutoff, self.grid_n, self.rule)?;
        let raw = sample_family(&grid, self.count, self.scale);
        let defect = orthonormality_defect(&raw);
        if !(defect <= MAX_FAMILY_DEFECT) {
            return Err(CliError::GridTooCoarse { defect });
        }
        let family = orthonormalize(&raw);
        let alphas = self.alphas();
        let k = synthesize_from_diagonal(&alphas, &family)?;
        let e = EigenSystem::new(grid, alphas, family)?;
        Ok((k, e))
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Law::LinearGrowth => "linear_growth",
            Law::InverseSquare => "inverse_square",
        })
    }
}
