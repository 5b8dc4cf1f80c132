use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use carleman_core::calculus::{monotonicity_check, phi_pv, reid_bound_check, Symbol};
use carleman_core::kernel::{check_k0, rotated_hermitian_part};
use carleman_core::mercer::{
    bessel_check, cauchy_tail_bound_check, diag_lower_bound_check, mercer_report, ConvergenceTable, SLACK_TOL,
};
use carleman_core::spectral::{
    check_normality, eig_normal, positive_part, reconstruct, sector_fit, NORMALITY_REL_TOL, ORTHONORMAL_TOL,
    SLOPE_FLOOR,
};
use carleman_core::{EigenSystem, Error, KernelMatrix, Rule, Sector};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{exit, CliError, CliResult};
use crate::format::{self, fmt_f64, KernelHeader, PvRow};
use crate::preset::{Law, Preset};

/// Reconstruction error accepted by `verify`.
pub const RECONSTRUCTION_TOL: f64 = 1e-7;
/// Largest kernel entry accepted in the last decile of the grid.
pub const TAIL_TOL: f64 = 1e-6;
/// Slack accepted on the diagonal monotonicity of `X_ε`.
pub const MONOTONICITY_TOL: f64 = -1e-9;
/// Distance to the direct kernel once every atom is included.
pub const PV_LIMIT_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "carleman", version, about = "Bilinear expansions and spectral calculus of sampled normal kernels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a preset kernel and its ground-truth eigensystem.
    Synth(SynthArgs),
    /// Diagonalize a normal kernel.
    Decompose(DecomposeArgs),
    /// Convergence table of the bilinear series.
    Mercer(MercerArgs),
    /// Principal-value report for a symbol.
    Calculus(CalculusArgs),
    /// Run every invariant check on a kernel file.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    #[value(name = "gauss-legendre")]
    GaussLegendre,
    Trapezoid,
}

impl From<RuleArg> for Rule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::GaussLegendre => Rule::GaussLegendre,
            RuleArg::Trapezoid => Rule::Trapezoid,
        }
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// classical, sector or wide.
    #[arg(long, default_value = "classical")]
    pub preset: String,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub law: Option<Law>,
    #[arg(long)]
    pub theta_max: Option<f64>,
    #[arg(long)]
    pub grid_n: Option<usize>,
    #[arg(long)]
    pub grid_cutoff: Option<f64>,
    #[arg(long)]
    pub rule: Option<RuleArg>,
    /// Laguerre scale `c` in `√c L_n(cs) e^{-cs/2}`.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Output directory; receives `kernel.json` and `eigsys.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    pub kernel: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MercerArgs {
    pub eigsys: PathBuf,
    pub kernel: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Debug, Args)]
pub struct CalculusArgs {
    pub eigsys: PathBuf,
    /// identity, cayley, phase or clip:EPS.
    #[arg(long)]
    pub symbol: String,
    /// Strictly decreasing cutoffs, comma separated.
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub kernel: PathBuf,
    #[arg(long, default_value = "cayley")]
    pub symbol: String,
    #[arg(long)]
    pub eps: Option<String>,
}

/// Outcome of one invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
    /// `value ≥ bound` when set, `value ≤ bound` otherwise.
    pub lower: bool,
}

impl Check {
    fn at_least(name: &'static str, value: f64, bound: f64) -> Self {
        Check { name, value, bound, lower: true }
    }

    fn at_most(name: &'static str, value: f64, bound: f64) -> Self {
        Check { name, value, bound, lower: false }
    }

    /// Signed distance to the threshold; non-negative iff the check passes.
    pub fn margin(&self) -> f64 {
        if self.lower {
            self.value - self.bound
        } else {
            self.bound - self.value
        }
    }

    pub fn pass(&self) -> bool {
        self.margin() >= 0.0
    }

    fn line(&self) -> String {
        format!(
            "{:<18} {:>24} {} {:<10} {}",
            self.name,
            fmt_f64(self.value),
            if self.lower { ">=" } else { "<=" },
            fmt_f64(self.bound),
            if self.pass() { "PASS" } else { "FAIL" }
        )
    }
}

fn emit(out: &mut dyn Write, checks: &[Check]) -> CliResult<()> {
    for c in checks {
        writeln!(out, "{}", c.line()).map_err(stdout_err)?;
    }
    let failed: Vec<String> = checks.iter().filter(|c| !c.pass()).map(|c| c.name.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::InvariantFail(failed))
    }
}

fn stdout_err(source: std::io::Error) -> CliError {
    CliError::Io { path: PathBuf::from("<stdout>"), source }
}

/// Parses the arguments and runs the command; returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit::PASS,
                _ => exit::USAGE,
            };
            let _ = if code == exit::PASS { write!(out, "{}", e.render()) } else { write!(err, "{}", e.render()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => exit::PASS,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn dispatch(command: Command, out: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Synth(a) => cmd_synth(&a, out),
        Command::Decompose(a) => cmd_decompose(&a.kernel, &a.out, out),
        Command::Mercer(a) => cmd_mercer(&a.eigsys, &a.kernel, &a.report, out),
        Command::Calculus(a) => cmd_calculus(&a.eigsys, &a.symbol, a.eps.as_deref(), &a.report, out),
        Command::Verify(a) => cmd_verify(&a.kernel, &a.symbol, a.eps.as_deref(), out),
    }
}

pub fn preset_from_args(a: &SynthArgs) -> CliResult<Preset> {
    let mut p = Preset::builtin(&a.preset)?;
    if let Some(v) = a.count {
        p.count = v;
    }
    if let Some(v) = a.law {
        p.law = v;
    }
    if let Some(v) = a.theta_max {
        p.theta_max = v;
    }
    if let Some(v) = a.grid_n {
        p.grid_n = v;
    }
    if let Some(v) = a.grid_cutoff {
        p.cutoff = v;
    }
    if let Some(v) = a.rule {
        p.rule = v.into();
    }
    if let Some(v) = a.scale {
        p.scale = v;
    }
    Ok(p)
}

pub fn cmd_synth(a: &SynthArgs, out: &mut dyn Write) -> CliResult<()> {
    let preset = preset_from_args(a)?;
    let (k, e) = preset.build()?;
    std::fs::create_dir_all(&a.out).map_err(|source| CliError::Io { path: a.out.clone(), source })?;
    let header = KernelHeader {
        k0: check_k0(&k).into(),
        normality_residual: check_normality(&k),
        preset: Some(preset.name.clone()),
    };
    let kernel_path = a.out.join("kernel.json");
    let eigsys_path = a.out.join("eigsys.json");
    format::write_kernel(&kernel_path, &k, Some(header))?;
    format::write_eigsys(&eigsys_path, &e)?;
    writeln!(
        out,
        "wrote {} and {} ({} eigenpairs, {} law, {} nodes)",
        kernel_path.display(),
        eigsys_path.display(),
        preset.count,
        preset.law,
        preset.grid_n
    )
    .map_err(stdout_err)
}

/// The eigensystem without its atom at zero.
pub fn drop_null_atoms(e: &EigenSystem) -> CliResult<EigenSystem> {
    let keep: Vec<usize> = (0..e.len()).filter(|&n| !e.is_null_atom(n)).collect();
    if keep.len() == e.len() {
        return Ok(e.clone());
    }
    let alphas = keep.iter().map(|&n| e.alphas()[n]).collect();
    let vectors = keep.iter().map(|&n| e.vectors()[n].clone()).collect();
    Ok(EigenSystem::new(e.grid().clone(), alphas, vectors)?)
}

fn normality_gate(k: &KernelMatrix) -> CliResult<f64> {
    let residual = check_normality(k);
    if residual > NORMALITY_REL_TOL * k.sup_entry() {
        return Err(CliError::NotNormal { residual });
    }
    Ok(residual)
}

pub fn cmd_decompose(kernel: &Path, dest: &Path, out: &mut dyn Write) -> CliResult<()> {
    let (k, _) = format::read_kernel(kernel)?;
    normality_gate(&k)?;
    let e = drop_null_atoms(&eig_normal(&k)?)?;
    format::write_eigsys(dest, &e)?;
    writeln!(out, "wrote {} ({} eigenpairs)", dest.display(), e.len()).map_err(stdout_err)?;
    if !e.is_empty() {
        if let Err(err) = sector_fit(e.alphas(), e.zero_threshold()) {
            writeln!(out, "warning: {err}").map_err(stdout_err)?;
        }
    }
    Ok(())
}

/// Sector around the non-zero eigenvalues; any sector when there are none.
pub fn fit_sector(e: &EigenSystem) -> CliResult<Sector> {
    match sector_fit(e.alphas(), e.zero_threshold()) {
        Ok(s) => Ok(s),
        Err(Error::ZeroOperator) => Ok(Sector::new(0.0, SLOPE_FLOOR)?),
        Err(err) => Err(err.into()),
    }
}

/// Convergence table together with the inequality checks on the rotated
/// Hermitian part.
pub fn mercer_checks(k: &KernelMatrix, e: &EigenSystem, sector: &Sector) -> CliResult<(ConvergenceTable, Vec<Check>)> {
    let table = mercer_report(k, e, sector)?;
    let kh = rotated_hermitian_part(k, sector.rotation);
    let eh = positive_part(e, sector);
    let mut cauchy = f64::INFINITY;
    for p in 0..eh.len() {
        cauchy = cauchy.min(cauchy_tail_bound_check(&kh, &eh, p, eh.len() - 1)?);
    }
    let cauchy = if cauchy.is_finite() { cauchy } else { 0.0 };
    let checks = vec![
        Check::at_least("diag-lower-bound", diag_lower_bound_check(&kh, &eh)?, SLACK_TOL),
        Check::at_least("cauchy-tail", cauchy, SLACK_TOL),
        Check::at_least("bessel", bessel_check(&kh, &eh)?, SLACK_TOL),
        Check::at_most("dini-monotone", table.diag_increase(), table.monotone_tol()),
        Check::at_least("abs-tail-bound", table.worst_tail_slack(), SLACK_TOL),
    ];
    Ok((table, checks))
}

pub fn cmd_mercer(eigsys: &Path, kernel: &Path, report: &Path, out: &mut dyn Write) -> CliResult<()> {
    let e = format::read_eigsys(eigsys)?;
    let (k, _) = format::read_kernel(kernel)?;
    if e.grid() != k.grid() {
        return Err(CliError::GridMismatch);
    }
    let sector = fit_sector(&e)?;
    let (table, checks) = mercer_checks(&k, &e, &sector)?;
    format::write_mercer_csv(report, &table)?;
    emit(out, &checks)
}

fn lookup_symbol(name: &str) -> CliResult<Symbol> {
    Symbol::preset(name).map_err(|e| CliError::UnknownSymbol(format!("{name} ({e})")))
}

/// Comma-separated cutoffs, or a halving sequence from twice the spectral
/// radius to below half the smallest non-zero eigenvalue.
pub fn eps_sequence(e: &EigenSystem, list: Option<&str>) -> CliResult<Vec<f64>> {
    let seq = match list {
        Some(text) => text
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad eps value `{t}`"))))
            .collect::<CliResult<Vec<f64>>>()?,
        None => {
            let top = e.alphas().iter().map(|a| a.norm()).fold(0.0, f64::max);
            match e.min_nonzero_modulus() {
                Some(low) => {
                    let mut v = vec![2.0 * top];
                    while *v.last().expect("non-empty") >= 0.5 * low {
                        v.push(0.5 * v.last().expect("non-empty"));
                    }
                    v
                }
                None => vec![1.0],
            }
        }
    };
    carleman_core::calculus::validate_eps_sequence(&seq)
        .map_err(|_| CliError::Usage("eps must be positive, finite and strictly decreasing".into()))?;
    Ok(seq)
}

/// Principal-value rows and checks; Reid and monotonicity are evaluated on
/// consecutive pairs, the first against `ε = ∞`.
pub fn calculus_checks(e: &EigenSystem, sector: &Sector, sym: &Symbol, eps: &[f64]) -> CliResult<(Vec<PvRow>, Vec<Check>)> {
    let pv = phi_pv(e, sym, eps)?;
    let mut rows = Vec::with_capacity(eps.len());
    for (k, (&em, &dist)) in eps.iter().zip(&pv.sup_dist).enumerate() {
        let en = if k == 0 { f64::INFINITY } else { eps[k - 1] };
        rows.push(PvRow {
            eps: em,
            sup_dist_to_direct: dist,
            reid_worst_slack: reid_bound_check(e, sector, sym, em, en)?,
            monotonicity: monotonicity_check(e, sector, em, en)?,
        });
    }
    let d0 = pv.sup_dist.first().copied().unwrap_or(0.0);
    let reid = rows.iter().map(|r| r.reid_worst_slack).fold(f64::INFINITY, f64::min);
    let mono = rows.iter().map(|r| r.monotonicity.worst()).fold(f64::INFINITY, f64::min);
    let mut checks = vec![
        Check::at_most("pv-monotone", pv.max_increase(), 1e-12 * (1.0 + d0)),
        Check::at_least("reid", reid, SLACK_TOL),
        Check::at_least("x-monotone", mono, MONOTONICITY_TOL),
    ];
    if let Some(low) = e.min_nonzero_modulus() {
        if let Some(k) = eps.iter().position(|&x| x < low) {
            checks.push(Check::at_most("pv-limit", pv.sup_dist[k], PV_LIMIT_TOL));
        }
    }
    Ok((rows, checks))
}

pub fn cmd_calculus(
    eigsys: &Path,
    symbol: &str,
    eps: Option<&str>,
    report: &Path,
    out: &mut dyn Write,
) -> CliResult<()> {
    let sym = lookup_symbol(symbol)?;
    let e = format::read_eigsys(eigsys)?;
    let sector = fit_sector(&e)?;
    let eps = eps_sequence(&e, eps)?;
    let (rows, checks) = calculus_checks(&e, &sector, &sym, &eps)?;
    format::write_pv_csv(report, &rows)?;
    emit(out, &checks)
}

pub fn cmd_verify(kernel: &Path, symbol: &str, eps: Option<&str>, out: &mut dyn Write) -> CliResult<()> {
    let sym = lookup_symbol(symbol)?;
    let (k, _) = format::read_kernel(kernel)?;
    let k0 = check_k0(&k);
    let residual = check_normality(&k);
    let normal = Check::at_most("normality", residual, NORMALITY_REL_TOL * k.sup_entry());
    writeln!(out, "{}", normal.line()).map_err(stdout_err)?;
    normality_gate(&k)?;

    let full = eig_normal(&k)?;
    let e = drop_null_atoms(&full)?;
    let mut checks = vec![
        Check::at_most("k0-tail", k0.tail_sup, TAIL_TOL),
        Check::at_most("orthonormality", full.orthonormality_defect(), ORTHONORMAL_TOL),
        Check::at_most("reconstruction", reconstruct(&e).sup_distance(&k)?, RECONSTRUCTION_TOL),
    ];
    let sector = match fit_sector(&e) {
        Ok(s) => s,
        Err(err) => {
            emit(out, &checks).ok();
            return Err(err);
        }
    };
    let (_, mercer) = mercer_checks(&k, &e, &sector)?;
    checks.extend(mercer);
    let eps = eps_sequence(&e, eps)?;
    let (_, calculus) = calculus_checks(&e, &sector, &sym, &eps)?;
    checks.extend(calculus);
    emit(out, &checks)
}
