//! On-disk formats.
//!
//! Kernel and eigensystem files are JSON with complex numbers stored as
//! `[re, im]` pairs; reports are CSV. Floats are written in shortest
//! round-trip form so identical inputs give identical bytes.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use carleman_core::calculus::MonotonicityMargins;
use carleman_core::mercer::ConvergenceTable;
use carleman_core::{EigenSystem, Grid, GridFn, K0Report, KernelMatrix, C64};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub type Pair = [f64; 2];

fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

fn complex(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridJson {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub cutoff: f64,
}

impl GridJson {
    pub fn from_grid(g: &Grid) -> Self {
        GridJson { points: g.points().to_vec(), weights: g.weights().to_vec(), cutoff: g.cutoff() }
    }

    pub fn to_grid(&self) -> carleman_core::Result<Grid> {
        Grid::from_parts(self.points.clone(), self.weights.clone(), self.cutoff)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct K0Json {
    pub max_row_l2: f64,
    pub max_col_l2: f64,
    pub tail_sup: f64,
    pub hermitian_defect: f64,
}

impl From<K0Report> for K0Json {
    fn from(r: K0Report) -> Self {
        K0Json {
            max_row_l2: r.max_row_l2,
            max_col_l2: r.max_col_l2,
            tail_sup: r.tail_sup,
            hermitian_defect: r.hermitian_defect,
        }
    }
}

/// Diagnostics written ahead of the kernel samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelHeader {
    pub k0: K0Json,
    pub normality_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub header: Option<KernelHeader>,
    pub grid: GridJson,
    /// Row-major samples `K(s_i, s_j)`.
    pub values: Vec<Pair>,
}

impl KernelJson {
    pub fn new(k: &KernelMatrix, header: Option<KernelHeader>) -> Self {
        KernelJson { header, grid: GridJson::from_grid(k.grid()), values: k.values().iter().copied().map(pair).collect() }
    }

    pub fn to_kernel(&self) -> carleman_core::Result<KernelMatrix> {
        let grid = self.grid.to_grid()?;
        KernelMatrix::new(grid, self.values.iter().copied().map(complex).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigsysJson {
    pub grid: GridJson,
    pub alphas: Vec<Pair>,
    /// `vectors[n][i] = φ_n(s_i)`.
    pub vectors: Vec<Vec<Pair>>,
}

impl EigsysJson {
    pub fn new(e: &EigenSystem) -> Self {
        EigsysJson {
            grid: GridJson::from_grid(e.grid()),
            alphas: e.alphas().iter().copied().map(pair).collect(),
            vectors: e.vectors().iter().map(|v| v.values().iter().copied().map(pair).collect()).collect(),
        }
    }

    pub fn to_system(&self) -> carleman_core::Result<EigenSystem> {
        let grid = self.grid.to_grid()?;
        let vectors = self
            .vectors
            .iter()
            .map(|v| GridFn::new(grid.clone(), v.iter().copied().map(complex).collect()))
            .collect::<carleman_core::Result<Vec<_>>>()?;
        EigenSystem::new(grid, self.alphas.iter().copied().map(complex).collect(), vectors)
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let file = File::open(path).map_err(io_err(path))?;
    serde_json::from_reader(BufReader::new(file))
        .map_err(|e| CliError::Malformed { path: path.to_path_buf(), msg: e.to_string() })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer(&mut w, value).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e.into() })?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(io_err(path))
}

/// Kernel file contents with the parsed matrix.
pub fn read_kernel(path: &Path) -> CliResult<(KernelMatrix, Option<KernelHeader>)> {
    let json: KernelJson = read_json(path)?;
    let k = json.to_kernel().map_err(|e| CliError::Malformed { path: path.to_path_buf(), msg: e.to_string() })?;
    Ok((k, json.header))
}

pub fn write_kernel(path: &Path, k: &KernelMatrix, header: Option<KernelHeader>) -> CliResult<()> {
    write_json(path, &KernelJson::new(k, header))
}

pub fn read_eigsys(path: &Path) -> CliResult<EigenSystem> {
    let json: EigsysJson = read_json(path)?;
    json.to_system().map_err(|e| CliError::Malformed { path: path.to_path_buf(), msg: e.to_string() })
}

pub fn write_eigsys(path: &Path, e: &EigenSystem) -> CliResult<()> {
    write_json(path, &EigsysJson::new(e))
}

/// Shortest round-trip scientific notation; `inf` for infinities.
pub fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:e}")
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::Io { path: path.to_path_buf(), source: e.into() }
}

/// Columns `m, sup_err, diag_sup_err, abs_tail`.
pub fn write_mercer_csv(path: &Path, table: &ConvergenceTable) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["m", "sup_err", "diag_sup_err", "abs_tail"]).map_err(csv_err(path))?;
    for (i, m) in table.orders.iter().enumerate() {
        w.write_record([
            m.to_string(),
            fmt_f64(table.sup_err[i]),
            fmt_f64(table.diag_sup_err[i]),
            fmt_f64(table.abs_tail[i]),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// One line of the principal-value report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvRow {
    pub eps: f64,
    pub sup_dist_to_direct: f64,
    pub reid_worst_slack: f64,
    pub monotonicity: MonotonicityMargins,
}

/// Columns `eps, sup_dist_to_direct, reid_worst_slack, monotonicity_margin`.
pub fn write_pv_csv(path: &Path, rows: &[PvRow]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["eps", "sup_dist_to_direct", "reid_worst_slack", "monotonicity_margin"]).map_err(csv_err(path))?;
    for r in rows {
        w.write_record([
            fmt_f64(r.eps),
            fmt_f64(r.sup_dist_to_direct),
            fmt_f64(r.reid_worst_slack),
            fmt_f64(r.monotonicity.worst()),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}
