//! First-order temporal differences with the `x₀ = 0` convention.

use nalgebra::DMatrix;

use crate::signal::SignalMatrix;

/// Shift matrix `D` (`T × T`, ones on the first superdiagonal).
///
/// Only needed by dense reference checks; the solver never forms it.
pub fn shift_matrix(t: usize) -> DMatrix<f64> {
    DMatrix::from_fn(t, t, |r, c| if c == r + 1 { 1.0 } else { 0.0 })
}

/// `Δ(X) = X - XD`: column 0 is `x₀`, column `t` is `x_t - x_{t-1}`.
pub fn temporal_diff(x: &SignalMatrix) -> SignalMatrix {
    let mut out = x.clone();
    for t in (1..x.ncols()).rev() {
        let mut col = out.column_mut(t);
        col -= x.column(t - 1);
    }
    out
}

/// `Z (I - Dᵀ)`: column `t` is `z_t - z_{t+1}`, the last column is kept.
pub fn temporal_diff_adjoint(z: &SignalMatrix) -> SignalMatrix {
    let mut out = z.clone();
    for t in 0..z.ncols().saturating_sub(1) {
        let mut col = out.column_mut(t);
        col -= z.column(t + 1);
    }
    out
}
