//! Block successive upper-bound minimization of the joint cost.
//!
//! Each outer iteration takes one closed-form step per block:
//!
//! * **X-step.** The quadratic X-block cost is majorized by adding
//!   `vec(X - X₀)ᵀ(θI - G)vec(X - X₀)` with `θ > 1 + 4α‖L(w)‖`. Its minimizer
//!   is a gradient step of length `1/(2θ)`.
//! * **w-step.** `-log det` is majorized through its tangent plane and an
//!   inverse-weight bound, then a proximal term `τ q_k w₀ₖ² h(w_k / w₀ₖ)` with
//!   `h(x) = x + 1/x - 2` makes every coordinate strictly convex. The
//!   coordinate minimizer is the multiplicative rule
//!   `w ← w ⊙ √((τ w⊙q + q) ⊘ (τ w⊙q + r))`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::{edges, laplacian, laplacian_adjoint, EdgeWeights, LaplacianMatrix};
use crate::objective::{evaluate, inverse_laplacian_plus_j, k_matrix, Hyperparams};
use crate::signal::{check_finite, check_same_shape, Mask, SignalMatrix};
use crate::temporal::{temporal_diff, temporal_diff_adjoint};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub hp: Hyperparams,
    /// Multiplier (> 1) applied to the majorizer curvature bound.
    pub theta_slack: f64,
    /// Lower bound on every initial edge weight.
    pub w_floor: f64,
    pub rel_tol: f64,
    pub max_iters: usize,
    /// Record the full objective after every iteration.
    pub track_objective: bool,
}

impl SolverConfig {
    pub const DEFAULT_THETA_SLACK: f64 = 1.01;
    pub const DEFAULT_W_FLOOR: f64 = 1e-8;
    pub const DEFAULT_REL_TOL: f64 = 1e-5;
    pub const DEFAULT_MAX_ITERS: usize = 1000;

    pub fn with_hyperparams(hp: Hyperparams) -> Self {
        Self {
            hp,
            theta_slack: Self::DEFAULT_THETA_SLACK,
            w_floor: Self::DEFAULT_W_FLOOR,
            rel_tol: Self::DEFAULT_REL_TOL,
            max_iters: Self::DEFAULT_MAX_ITERS,
            track_objective: true,
        }
    }

    /// Default configuration for a signal with `t` time stamps.
    pub fn defaults_for(t: usize) -> Self {
        Self::with_hyperparams(Hyperparams::defaults_for(t))
    }

    pub fn validate(&self) -> Result<()> {
        self.hp.validate()?;
        if !(self.theta_slack > 1.0) || !self.theta_slack.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "theta_slack must be > 1, got {}",
                self.theta_slack
            )));
        }
        if !(self.w_floor >= 0.0) || !self.w_floor.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "w_floor must be >= 0, got {}",
                self.w_floor
            )));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "rel_tol must be > 0, got {}",
                self.rel_tol
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIters,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIters => "max_iters",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    pub x_hat: SignalMatrix,
    pub w_hat: EdgeWeights,
    pub l_hat: LaplacianMatrix,
    /// Objective at the initial point followed by one value per iteration.
    /// Empty when tracking is disabled.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub termination: Termination,
}

/// Curvature for the X-majorizer: `slack · (1 + 4α · 2·max_degree)`.
///
/// `2·max_degree` is the Gershgorin bound on `‖L(w)‖₂`.
pub fn theta_bound(w: &EdgeWeights, alpha: f64, theta_slack: f64) -> f64 {
    theta_slack * (1.0 + 4.0 * alpha * 2.0 * w.max_degree())
}

/// `∂f_X/∂X = 2(α L(w) Δ(X)(I - Dᵀ) + M⊙X - Y)`.
pub fn x_gradient(
    x: &SignalMatrix,
    w: &EdgeWeights,
    y: &SignalMatrix,
    mask: &Mask,
    alpha: f64,
) -> SignalMatrix {
    let l = laplacian(w).into_matrix();
    let smooth = temporal_diff_adjoint(&(l * temporal_diff(x)));
    (smooth * alpha + mask.apply(x) - y) * 2.0
}

/// One majorize-minimize step on the X block.
pub fn x_update(
    x: &SignalMatrix,
    w: &EdgeWeights,
    y: &SignalMatrix,
    mask: &Mask,
    alpha: f64,
    theta: f64,
) -> SignalMatrix {
    x - x_gradient(x, w, y, mask, alpha) / (2.0 * theta)
}

/// Per-edge coefficients `(q, r)` of the w-block majorizer at `w`.
///
/// `q = L*((L(w) + J)⁻¹)` and `r = L*(K)`.
pub fn w_coefficients(
    w: &EdgeWeights,
    x: &SignalMatrix,
    hp: &Hyperparams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.nrows() != w.n() {
        return Err(Error::DimensionMismatch(format!(
            "signal has {} rows, graph has {} vertices",
            x.nrows(),
            w.n()
        )));
    }
    let q = laplacian_adjoint(&inverse_laplacian_plus_j(w)?)?;
    if let Some(k) = q.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::InternalAssertion(format!(
            "q[{k}] = {} is not positive",
            q[k]
        )));
    }
    // r ≥ 0 analytically; clip rounding noise from near-identical rows.
    let r = laplacian_adjoint(&k_matrix(x, hp))?
        .into_iter()
        .map(|v| v.max(0.0))
        .collect();
    Ok((q, r))
}

/// Closed-form minimizer of one coordinate of the w-majorizer.
pub fn w_coordinate_step(w0: f64, q: f64, r: f64, tau: f64) -> f64 {
    if w0 == 0.0 {
        return 0.0;
    }
    let tq = tau * w0 * q;
    w0 * ((tq + q) / (tq + r)).sqrt()
}

/// One majorize-minimize step on the w block.
pub fn w_update(w: &EdgeWeights, x: &SignalMatrix, hp: &Hyperparams) -> Result<EdgeWeights> {
    let (q, r) = w_coefficients(w, x, hp)?;
    let next = w
        .as_slice()
        .iter()
        .zip(q.iter().zip(&r))
        .map(|(&w0, (&qk, &rk))| w_coordinate_step(w0, qk, rk, hp.tau))
        .collect();
    EdgeWeights::new(w.n(), next)
}

/// `X⁽⁰⁾ = Y` and `w⁽⁰⁾` projected from the pseudo-inverse of `S_Y = YYᵀ/T`.
///
/// The weight of edge `(i, j)` is `max(-[S_Y†]_ij, w_floor)`.
pub fn initialize(
    y: &SignalMatrix,
    mask: &Mask,
    cfg: &SolverConfig,
) -> Result<(SignalMatrix, EdgeWeights)> {
    check_same_shape(mask.shape(), y.shape(), "M vs Y")?;
    check_finite(y, "Y")?;
    let (n, t) = y.shape();
    let cov = y * y.transpose() / t as f64;
    let pinv = pseudo_inverse(cov);
    let w: Vec<f64> = edges(n)
        .map(|(_, i, j)| (-pinv[(i, j)]).max(0.0).max(cfg.w_floor))
        .collect();
    Ok((y.clone(), EdgeWeights::new(n, w)?))
}

fn pseudo_inverse(s: DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(s);
    let cutoff = 1e-10 * eig.eigenvalues.max().max(0.0);
    let inv = eig
        .eigenvalues
        .map(|v| if v > cutoff && v > 0.0 { 1.0 / v } else { 0.0 });
    &eig.eigenvectors * DMatrix::from_diagonal(&inv) * eig.eigenvectors.transpose()
}

fn relative_change(new: &[f64], old: &[f64]) -> f64 {
    let diff: f64 = new.iter().zip(old).map(|(a, b)| (a - b) * (a - b)).sum();
    let base: f64 = old.iter().map(|v| v * v).sum();
    diff.sqrt() / (1.0 + base.sqrt())
}

/// Runs the alternating X / w iteration until the relative change of both
/// blocks drops below `rel_tol` or `max_iters` is reached.
pub fn solve(y: &SignalMatrix, mask: &Mask, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    check_same_shape(mask.shape(), y.shape(), "M vs Y")?;
    if y.nrows() < 2 || y.ncols() < 1 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 vertices and 1 time stamp, got {}x{}",
            y.nrows(),
            y.ncols()
        )));
    }
    if mask.observed() == 0 {
        return Err(Error::InvalidArgument(
            "mask has no observed entries".into(),
        ));
    }
    let hp = cfg.hp;
    let (mut x, mut w) = initialize(y, mask, cfg)?;

    let mut trace = Vec::new();
    if cfg.track_objective {
        trace.push(
            evaluate(&x, &w, y, mask, &hp)
                .map_err(|e| e.at_iteration(0))?
                .total,
        );
    }

    let mut termination = Termination::MaxIters;
    let mut iterations = 0;
    for j in 0..cfg.max_iters {
        let theta = theta_bound(&w, hp.alpha, cfg.theta_slack);
        let x_next = x_update(&x, &w, y, mask, hp.alpha, theta);
        let w_next = w_update(&w, &x_next, &hp).map_err(|e| e.at_iteration(j))?;

        let change = relative_change(x_next.as_slice(), x.as_slice())
            .max(relative_change(w_next.as_slice(), w.as_slice()));
        x = x_next;
        w = w_next;
        iterations = j + 1;

        if cfg.track_objective {
            let f = evaluate(&x, &w, y, mask, &hp).map_err(|e| e.at_iteration(j + 1))?;
            trace.push(f.total);
        }
        if change < cfg.rel_tol {
            termination = Termination::Converged;
            break;
        }
    }

    Ok(SolverResult {
        l_hat: laplacian(&w),
        x_hat: x,
        w_hat: w,
        objective_trace: trace,
        iterations,
        termination,
    })
}
