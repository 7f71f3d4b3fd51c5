//! The four experiment drivers behind the `graphfill` binary.
//!
//! Each command reads and writes plain files (see [`crate::io`]) and returns
//! the in-memory result so that library callers and tests can inspect it
//! without reparsing.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::graph::LaplacianMatrix;
use crate::io::{create_dir, read_matrix, write_matrix, write_row, write_text};
use crate::metrics::{
    graph_metrics, rescale_trace_to_n, signal_metrics, GraphMetrics, SignalMetrics,
};
use crate::signal::Mask;
use crate::solver::{solve, SolverResult};
use crate::synth::{generate_ground_truth, GroundTruth};

pub const MANIFEST: &str = "manifest.txt";
pub const METRICS: &str = "metrics.csv";

const LAPLACIAN_TOL: f64 = 1e-9;

/// Writes `w_true.csv`, `L_true.csv`, `X_true.csv`, `M.csv`, `Y.csv` and a
/// manifest for the cell `(cfg.seed, cfg.sampling_rate)`.
pub fn synth(cfg: &RunConfig, out: &Path) -> Result<GroundTruth> {
    cfg.validate()?;
    let gt = generate_ground_truth(&cfg.synth(cfg.seed, cfg.sampling_rate))?;
    create_dir(out)?;
    write_row(
        &out.join("w_true.csv"),
        gt.w_true.as_slice(),
        Some("edge weights, Tr(L) = n"),
    )?;
    write_matrix(
        &out.join("L_true.csv"),
        gt.l_true.matrix(),
        Some("Laplacian"),
    )?;
    write_matrix(&out.join("X_true.csv"), &gt.x_true, Some("vertices x time"))?;
    write_matrix(&out.join("M.csv"), gt.mask.matrix(), Some("sampling mask"))?;
    write_matrix(&out.join("Y.csv"), &gt.y, Some("observations"))?;
    write_text(&out.join(MANIFEST), &cfg.to_manifest(cfg.t))?;
    Ok(gt)
}

/// Reads `Y` and `M`, runs the solver and writes `X_hat.csv`, `L_hat.csv`,
/// `w_hat.csv`, `trace.csv` and a manifest.
pub fn learn(y_path: &Path, mask_path: &Path, cfg: &RunConfig, out: &Path) -> Result<SolverResult> {
    let y = read_matrix(y_path)?;
    let m = read_matrix(mask_path)?;
    if y.shape() != m.shape() {
        return Err(Error::DimensionMismatch(format!(
            "{} is {}x{} but {} is {}x{}",
            y_path.display(),
            y.nrows(),
            y.ncols(),
            mask_path.display(),
            m.nrows(),
            m.ncols()
        )));
    }
    let mask = Mask::new(m)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", mask_path.display())))?;
    let t = y.ncols();
    let solver_cfg = cfg.solver(t);
    let res = solve(&y, &mask, &solver_cfg)?;

    create_dir(out)?;
    write_matrix(&out.join("X_hat.csv"), &res.x_hat, Some("vertices x time"))?;
    write_matrix(
        &out.join("L_hat.csv"),
        res.l_hat.matrix(),
        Some("Laplacian"),
    )?;
    write_row(
        &out.join("w_hat.csv"),
        res.w_hat.as_slice(),
        Some("edge weights"),
    )?;
    let mut trace = String::from("iteration,objective\n");
    for (i, v) in res.objective_trace.iter().enumerate() {
        let _ = writeln!(trace, "{i},{v}");
    }
    write_text(&out.join("trace.csv"), &trace)?;

    let mut manifest = cfg.to_manifest(t);
    let _ = writeln!(manifest, "# y: {}", y_path.display());
    let _ = writeln!(manifest, "# mask: {}", mask_path.display());
    let _ = writeln!(manifest, "# termination: {}", res.termination.as_str());
    let _ = writeln!(manifest, "# iterations: {}", res.iterations);
    write_text(&out.join(MANIFEST), &manifest)?;
    Ok(res)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalRecord {
    pub graph: GraphMetrics,
    pub signal: SignalMetrics,
}

impl EvalRecord {
    pub const HEADER: &'static str = "rel_err,f_score,tp,fp,fn,snr_db,nmse";

    pub fn to_csv(&self) -> String {
        let g = &self.graph;
        let s = &self.signal;
        format!(
            "{}\n{},{},{},{},{},{},{}\n",
            Self::HEADER,
            g.rel_err,
            g.f_score,
            g.tp,
            g.fp,
            g.fn_,
            s.snr_db,
            s.nmse
        )
    }
}

fn read_laplacian(path: &Path) -> Result<LaplacianMatrix> {
    LaplacianMatrix::from_matrix(read_matrix(path)?, LAPLACIAN_TOL)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

/// Compares `L_hat`/`X_hat` in `est` with `L_true`/`X_true` in `truth`.
/// Both Laplacians are rescaled to `Tr = n` first. Writes `est/metrics.csv`.
pub fn eval(truth: &Path, est: &Path, edge_threshold: f64) -> Result<EvalRecord> {
    let l_true = read_laplacian(&truth.join("L_true.csv"))?;
    let x_true = read_matrix(&truth.join("X_true.csv"))?;
    let l_hat = read_laplacian(&est.join("L_hat.csv"))?;
    let x_hat = read_matrix(&est.join("X_hat.csv"))?;
    let graph = graph_metrics(
        &rescale_trace_to_n(&l_true)?,
        &rescale_trace_to_n(&l_hat)?,
        edge_threshold,
    )?;
    let signal = signal_metrics(&x_true, &x_hat)?;
    let rec = EvalRecord { graph, signal };
    write_text(&est.join(METRICS), &rec.to_csv())?;
    Ok(rec)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub graph: GraphMetrics,
    pub signal: SignalMetrics,
    /// Zero-fill baseline `X_hat = Y`.
    pub zero_fill: SignalMetrics,
    pub iterations: usize,
    pub termination: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub sr: f64,
    pub seed: u64,
    pub wall_ms: f64,
    pub outcome: std::result::Result<CellOutcome, String>,
}

impl SweepRecord {
    pub const HEADER: &'static str = "sr,seed,status,rel_err,f_score,snr_db,nmse,iterations,termination,wall_ms,zf_snr_db,zf_nmse,error";

    pub fn to_csv_line(&self) -> String {
        match &self.outcome {
            Ok(c) => format!(
                "{},{},ok,{},{},{},{},{},{},{},{},{},",
                self.sr,
                self.seed,
                c.graph.rel_err,
                c.graph.f_score,
                c.signal.snr_db,
                c.signal.nmse,
                c.iterations,
                c.termination,
                self.wall_ms,
                c.zero_fill.snr_db,
                c.zero_fill.nmse
            ),
            Err(msg) => format!(
                "{},{},error,NaN,NaN,NaN,NaN,0,,{},NaN,NaN,{}",
                self.sr,
                self.seed,
                self.wall_ms,
                msg.replace([',', '\n', '\r'], ";")
            ),
        }
    }

    /// Equality of everything except timing.
    pub fn same_result(&self, other: &Self) -> bool {
        self.sr.to_bits() == other.sr.to_bits()
            && self.seed == other.seed
            && self.outcome == other.outcome
    }
}

pub fn format_report(records: &[SweepRecord]) -> String {
    let mut s = String::from(SweepRecord::HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&r.to_csv_line());
        s.push('\n');
    }
    s
}

/// Generates, solves and evaluates one `(rate, seed)` cell.
pub fn run_cell(cfg: &RunConfig, sr: f64, seed: u64) -> SweepRecord {
    let start = Instant::now();
    let outcome = cell_outcome(cfg, sr, seed).map_err(|e| e.to_string());
    SweepRecord {
        sr,
        seed,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        outcome,
    }
}

fn cell_outcome(cfg: &RunConfig, sr: f64, seed: u64) -> Result<CellOutcome> {
    let gt = generate_ground_truth(&cfg.synth(seed, sr))?;
    let res = solve(&gt.y, &gt.mask, &cfg.solver(cfg.t))?;
    let graph = graph_metrics(
        &gt.l_true,
        &rescale_trace_to_n(&res.l_hat)?,
        cfg.edge_threshold,
    )?;
    Ok(CellOutcome {
        graph,
        signal: signal_metrics(&gt.x_true, &res.x_hat)?,
        zero_fill: signal_metrics(&gt.x_true, &gt.y)?,
        iterations: res.iterations,
        termination: res.termination.as_str(),
    })
}

/// All cells in rate-major, seed-minor order, on `workers` threads.
pub fn sweep(cfg: &RunConfig, workers: usize) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    let cells: Vec<(f64, u64)> = cfg
        .rates
        .iter()
        .flat_map(|&r| cfg.seeds.iter().map(move |&s| (r, s)))
        .collect();
    if workers <= 1 {
        return Ok(cells.iter().map(|&(r, s)| run_cell(cfg, r, s)).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(|| {
        cells
            .par_iter()
            .map(|&(r, s)| run_cell(cfg, r, s))
            .collect()
    }))
}

/// Runs [`sweep`] and writes the report to `out` and the manifest next to it.
pub fn sweep_to_file(cfg: &RunConfig, workers: usize, out: &Path) -> Result<Vec<SweepRecord>> {
    let records = sweep(cfg, workers)?;
    if let Some(dir) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    write_text(out, &format_report(&records))?;
    write_text(&sweep_manifest_path(out), &cfg.to_manifest(cfg.t))?;
    Ok(records)
}

pub fn sweep_manifest_path(report: &Path) -> PathBuf {
    let mut name = report.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.txt");
    report.with_file_name(name)
}
