//! The joint cost
//!
//! ```text
//! f(X, w) = ‖Y - M⊙X‖²_F + α Tr(L(w) Δ(X) Δ(X)ᵀ) - β log det(L(w) + J) + γ‖w‖₁
//! ```
//!
//! and the two block subproblems the solver majorizes.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::{edges, h_off, j_matrix, laplacian, laplacian_adjoint, EdgeWeights};
use crate::signal::{check_same_shape, Mask, SignalMatrix};
use crate::temporal::temporal_diff;

/// Smallest eigenvalue of `L(w) + J` accepted as positive definite.
pub const PD_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    /// Spatio-temporal smoothness weight.
    pub alpha: f64,
    /// Log-determinant weight.
    pub beta: f64,
    /// Sparsity weight on `‖w‖₁`.
    pub gamma: f64,
    /// Curvature of the `w`-block majorizer.
    pub tau: f64,
}

impl Hyperparams {
    /// `α = 0.02, β = 0.02T, γ = 0.002T, τ = 100`.
    pub fn defaults_for(t: usize) -> Self {
        let t = t as f64;
        Self {
            alpha: 0.02,
            beta: 0.02 * t,
            gamma: 0.002 * t,
            tau: 100.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.alpha > 0.0
            && self.beta > 0.0
            && self.gamma >= 0.0
            && self.tau > 0.0
            && [self.alpha, self.beta, self.gamma, self.tau]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "hyper-parameters need alpha > 0, beta > 0, gamma >= 0, tau > 0; got {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveBreakdown {
    /// `‖Y - M⊙X‖²_F`
    pub fidelity: f64,
    /// `Tr(L(w) Δ(X) Δ(X)ᵀ)`
    pub smoothness: f64,
    /// `log det(L(w) + J)`
    pub logdet_term: f64,
    /// `‖w‖₁`
    pub sparsity: f64,
    pub total: f64,
}

/// Evaluates every term of the joint cost.
pub fn evaluate(
    x: &SignalMatrix,
    w: &EdgeWeights,
    y: &SignalMatrix,
    mask: &Mask,
    hp: &Hyperparams,
) -> Result<ObjectiveBreakdown> {
    check_same_shape(x.shape(), y.shape(), "X vs Y")?;
    check_same_shape(mask.shape(), y.shape(), "M vs Y")?;
    if x.nrows() != w.n() {
        return Err(Error::DimensionMismatch(format!(
            "signal has {} rows, graph has {} vertices",
            x.nrows(),
            w.n()
        )));
    }
    let fidelity = fidelity(x, y, mask);
    let smoothness = smoothness_term(x, w)?;
    let logdet_term = logdet_laplacian_plus_j(w)?;
    let sparsity = w.l1_norm();
    let total = fidelity + hp.alpha * smoothness - hp.beta * logdet_term + hp.gamma * sparsity;
    Ok(ObjectiveBreakdown {
        fidelity,
        smoothness,
        logdet_term,
        sparsity,
        total,
    })
}

pub fn fidelity(x: &SignalMatrix, y: &SignalMatrix, mask: &Mask) -> f64 {
    (y - mask.apply(x)).norm_squared()
}

/// `Tr(L(w) Δ Δᵀ)`, contracting against the smaller of the two Gram products.
pub fn smoothness_term(x: &SignalMatrix, w: &EdgeWeights) -> Result<f64> {
    if x.nrows() != w.n() {
        return Err(Error::DimensionMismatch(format!(
            "signal has {} rows, graph has {} vertices",
            x.nrows(),
            w.n()
        )));
    }
    let delta = temporal_diff(x);
    let l = laplacian(w).into_matrix();
    Ok(if delta.ncols() >= delta.nrows() {
        l.dot(&(&delta * delta.transpose()))
    } else {
        (&l * &delta).dot(&delta)
    })
}

/// Edge-sum form `Σ_k w_k ‖δ_i - δ_j‖²` of [`smoothness_term`].
pub fn smoothness_edge_sum(x: &SignalMatrix, w: &EdgeWeights) -> Result<f64> {
    if x.nrows() != w.n() {
        return Err(Error::DimensionMismatch(format!(
            "signal has {} rows, graph has {} vertices",
            x.nrows(),
            w.n()
        )));
    }
    let delta = temporal_diff(x);
    let ws = w.as_slice();
    Ok(edges(w.n())
        .filter(|&(k, _, _)| ws[k] != 0.0)
        .map(|(k, i, j)| ws[k] * (delta.row(i) - delta.row(j)).norm_squared())
        .sum())
}

/// Eigenvalues of `L(w) + J`, failing when the smallest is not above [`PD_FLOOR`].
pub(crate) fn checked_eigen(w: &EdgeWeights) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    let f = laplacian(w).into_matrix() + j_matrix(w.n());
    let eig = SymmetricEigen::new(f);
    let min = eig.eigenvalues.min();
    if !(min > PD_FLOOR) {
        return Err(Error::SingularModel {
            eigenvalue: min,
            iteration: None,
        });
    }
    Ok(eig)
}

/// `log det(L(w) + J)` from the symmetric eigendecomposition.
pub fn logdet_laplacian_plus_j(w: &EdgeWeights) -> Result<f64> {
    Ok(checked_eigen(w)?.eigenvalues.iter().map(|v| v.ln()).sum())
}

/// `(L(w) + J)⁻¹`.
pub fn inverse_laplacian_plus_j(w: &EdgeWeights) -> Result<DMatrix<f64>> {
    let eig = checked_eigen(w)?;
    let inv_vals = eig.eigenvalues.map(|v| 1.0 / v);
    let scaled = &eig.eigenvectors * DMatrix::from_diagonal(&inv_vals);
    Ok(scaled * eig.eigenvectors.transpose())
}

/// X-block cost with `w` fixed (constant terms dropped).
pub fn x_subproblem(
    x: &SignalMatrix,
    w: &EdgeWeights,
    y: &SignalMatrix,
    mask: &Mask,
    alpha: f64,
) -> Result<f64> {
    Ok(fidelity(x, y, mask) + alpha * smoothness_term(x, w)?)
}

/// `K = (1/β)(α Δ(X)Δ(X)ᵀ + (γ/2) H_off)`.
pub fn k_matrix(x: &SignalMatrix, hp: &Hyperparams) -> DMatrix<f64> {
    let delta = temporal_diff(x);
    let gram = &delta * delta.transpose();
    (gram * hp.alpha + h_off(x.nrows()) * (hp.gamma / 2.0)) / hp.beta
}

/// w-block cost divided by β: `Tr(L(w) K) - log det(L(w) + J)`.
pub fn w_subproblem(w: &EdgeWeights, k: &DMatrix<f64>) -> Result<f64> {
    let r = laplacian_adjoint(k)?;
    let linear: f64 = w.as_slice().iter().zip(&r).map(|(a, b)| a * b).sum();
    Ok(linear - logdet_laplacian_plus_j(w)?)
}
