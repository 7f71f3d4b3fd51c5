//! Graph-recovery (RelErr, F-score) and signal-recovery (SNR, NMSE) metrics.

use crate::error::{Error, Result};
use crate::graph::{edges, laplacian, LaplacianMatrix};
use crate::signal::{check_same_shape, SignalMatrix};
use crate::synth::scale_trace;

/// Weight above which an edge counts as present, after trace rescaling.
pub const DEFAULT_EDGE_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphMetrics {
    pub rel_err: f64,
    pub f_score: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalMetrics {
    /// `+inf` for exact recovery.
    pub snr_db: f64,
    pub nmse: f64,
}

/// Scales a Laplacian to `Tr = n`.
pub fn rescale_trace_to_n(l: &LaplacianMatrix) -> Result<LaplacianMatrix> {
    let n = l.n();
    Ok(laplacian(&scale_trace(&l.weights(), n as f64)?))
}

/// `2TP / (2TP + FP + FN)`; two empty edge sets agree perfectly.
pub fn f_score(tp: usize, fp: usize, fn_: usize) -> f64 {
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        1.0
    } else {
        (2 * tp) as f64 / denom as f64
    }
}

/// Compares two Laplacians that are already on the same trace scale.
pub fn graph_metrics(
    l_true: &LaplacianMatrix,
    l_hat: &LaplacianMatrix,
    edge_threshold: f64,
) -> Result<GraphMetrics> {
    let n = l_true.n();
    if l_hat.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "true Laplacian is {n}x{n}, estimate is {}x{}",
            l_hat.n(),
            l_hat.n()
        )));
    }
    let (a, b) = (l_true.matrix(), l_hat.matrix());
    let rel_err = (a - b).norm() / a.norm();

    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (_, i, j) in edges(n) {
        let truth = -a[(i, j)] > edge_threshold;
        let est = -b[(i, j)] > edge_threshold;
        match (truth, est) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            (false, false) => {}
        }
    }
    Ok(GraphMetrics {
        rel_err,
        f_score: f_score(tp, fp, fn_),
        tp,
        fp,
        fn_,
    })
}

/// SNR in dB over the whole matrix and NMSE averaged over time columns.
pub fn signal_metrics(x_true: &SignalMatrix, x_hat: &SignalMatrix) -> Result<SignalMetrics> {
    check_same_shape(x_true.shape(), x_hat.shape(), "X_true vs X_hat")?;
    if x_true.ncols() == 0 {
        return Err(Error::InvalidArgument("signal has no time stamps".into()));
    }
    let mut nmse = 0.0;
    for (t, (truth, est)) in x_true.column_iter().zip(x_hat.column_iter()).enumerate() {
        let energy = truth.norm_squared();
        if energy == 0.0 {
            return Err(Error::UndefinedMetric { column: t });
        }
        nmse += (truth - est).norm_squared() / energy;
    }
    nmse /= x_true.ncols() as f64;

    let err = (x_true - x_hat).norm();
    let snr_db = if err == 0.0 {
        f64::INFINITY
    } else {
        20.0 * (x_true.norm() / err).log10()
    };
    Ok(SignalMetrics { snr_db, nmse })
}
