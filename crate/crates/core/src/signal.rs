use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Dense `n × T` signal: rows are vertices, columns are time stamps.
pub type SignalMatrix = DMatrix<f64>;

/// Binary sampling mask; entries are exactly `0.0` or `1.0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask(DMatrix<f64>);

impl Mask {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if let Some((idx, v)) = m.iter().enumerate().find(|(_, &v)| v != 0.0 && v != 1.0) {
            let (r, c) = (idx % m.nrows(), idx / m.nrows());
            return Err(Error::InvalidArgument(format!(
                "mask entry ({r}, {c}) is {v}, expected 0 or 1"
            )));
        }
        Ok(Self(m))
    }

    pub fn ones(n: usize, t: usize) -> Self {
        Self(DMatrix::from_element(n, t, 1.0))
    }

    pub fn zeros(n: usize, t: usize) -> Self {
        Self(DMatrix::zeros(n, t))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn observed(&self) -> usize {
        self.0.iter().filter(|&&v| v == 1.0).count()
    }

    /// `M ⊙ X`.
    pub fn apply(&self, x: &SignalMatrix) -> SignalMatrix {
        self.0.component_mul(x)
    }
}

pub(crate) fn check_finite(x: &SignalMatrix, what: &str) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{what} has non-finite entries"
        )))
    }
}

pub(crate) fn check_same_shape(a: (usize, usize), b: (usize, usize), what: &str) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "{what}: {}x{} vs {}x{}",
            a.0, a.1, b.0, b.1
        )))
    }
}
