//! Brute-force reference implementations for checking `graphfill`.
//!
//! Everything here is built literally from dense matrices (incidence vectors,
//! Kronecker products, explicit shift matrices, LU inverses and determinants)
//! and deliberately shares no code with the production crate. Costs are
//! `O((nT)³)`; keep instances small.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Largest `n·T` accepted by [`materialize_quadratic`].
pub const MAX_DENSE_SIZE: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    TooLarge { size: usize },
    Singular,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::TooLarge { size } => {
                write!(f, "dense size {size} exceeds oracle cap {MAX_DENSE_SIZE}")
            }
            OracleError::Singular => write!(f, "matrix is singular"),
        }
    }
}

impl std::error::Error for OracleError {}

/// Incidence vector for the 1-based edge index `k = i - j + (j-1)(2n-j)/2`:
/// `+1` at vertex `j`, `-1` at vertex `i` (`i > j`, both 1-based).
pub fn incidence_vectors(n: usize) -> Vec<DVector<f64>> {
    let m = n * (n - 1) / 2;
    let mut out = vec![DVector::zeros(n); m];
    for j in 1..=n {
        for i in j + 1..=n {
            let k = i - j + (j - 1) * (2 * n - j) / 2;
            let xi = &mut out[k - 1];
            xi[j - 1] = 1.0;
            xi[i - 1] = -1.0;
        }
    }
    out
}

/// `L(w) = E Diag(w) Eᵀ`.
pub fn dense_laplacian(n: usize, w: &[f64]) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(n, n);
    for (xi, &wk) in incidence_vectors(n).iter().zip(w) {
        l += xi * xi.transpose() * wk;
    }
    l
}

/// `L*(M)_k = ξ_kᵀ M ξ_k`.
pub fn dense_adjoint(m: &DMatrix<f64>) -> Vec<f64> {
    incidence_vectors(m.nrows())
        .iter()
        .map(|xi| (xi.transpose() * m * xi)[(0, 0)])
        .collect()
}

pub fn shift_matrix(t: usize) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(t, t);
    for r in 0..t.saturating_sub(1) {
        d[(r, r + 1)] = 1.0;
    }
    d
}

pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    DMatrix::from_fn(ar * br, ac * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// Column-stacking `vec(X)`.
pub fn vec_of(x: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(x.as_slice())
}

pub fn unvec(v: &DVector<f64>, n: usize, t: usize) -> DMatrix<f64> {
    DMatrix::from_column_slice(n, t, v.as_slice())
}

/// `H = I_{nT} - Dᵀ ⊗ I_n`.
pub fn h_matrix(n: usize, t: usize) -> DMatrix<f64> {
    DMatrix::identity(n * t, n * t) - kron(&shift_matrix(t).transpose(), &DMatrix::identity(n, n))
}

/// Largest singular value, from the eigenvalues of `AᵀA`.
pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    let gram = a.transpose() * a;
    SymmetricEigen::new(gram).eigenvalues.max().max(0.0).sqrt()
}

/// Dense quadratic form of the X-block cost:
/// `f_X(X) = vec(X)ᵀ G vec(X) - 2 vec(X)ᵀ b + c`.
#[derive(Debug, Clone)]
pub struct DenseQuadratic {
    pub g: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: f64,
    pub n: usize,
    pub t: usize,
}

/// Builds `G = Diag(vec(M)) + α Hᵀ(I_T ⊗ L(w))H`, `b = vec(Y)`, `c = ‖Y‖²`.
pub fn materialize_quadratic(
    w: &[f64],
    mask: &DMatrix<f64>,
    y: &DMatrix<f64>,
    alpha: f64,
) -> Result<DenseQuadratic, OracleError> {
    let (n, t) = mask.shape();
    if n * t > MAX_DENSE_SIZE {
        return Err(OracleError::TooLarge { size: n * t });
    }
    let h = h_matrix(n, t);
    let block = kron(&DMatrix::identity(t, t), &dense_laplacian(n, w));
    let g = DMatrix::from_diagonal(&vec_of(mask)) + h.transpose() * block * &h * alpha;
    Ok(DenseQuadratic {
        g,
        b: vec_of(y),
        c: y.norm_squared(),
        n,
        t,
    })
}

impl DenseQuadratic {
    pub fn value(&self, x: &DMatrix<f64>) -> f64 {
        let v = vec_of(x);
        v.dot(&(&self.g * &v)) - 2.0 * v.dot(&self.b) + self.c
    }

    /// `f_X(X) + vec(X - X₀)ᵀ(θI - G)vec(X - X₀)`.
    pub fn surrogate(&self, x: &DMatrix<f64>, x0: &DMatrix<f64>, theta: f64) -> f64 {
        let d = vec_of(x) - vec_of(x0);
        let curvature = DMatrix::identity(d.len(), d.len()) * theta - &self.g;
        self.value(x) + d.dot(&(curvature * &d))
    }

    /// Solves `∇ surrogate = 0` by a dense linear solve.
    pub fn surrogate_minimizer(
        &self,
        x0: &DMatrix<f64>,
        theta: f64,
    ) -> Result<DMatrix<f64>, OracleError> {
        // ∇ = 2Gx - 2b + 2(θI - G)(x - x₀) = 2θx - 2b - 2(θI - G)x₀
        let size = self.n * self.t;
        let hess = DMatrix::<f64>::identity(size, size) * theta;
        let rhs = &self.b + (DMatrix::identity(size, size) * theta - &self.g) * vec_of(x0);
        let sol = hess.lu().solve(&rhs).ok_or(OracleError::Singular)?;
        Ok(unvec(&sol, self.n, self.t))
    }

    pub fn gradient(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let v = vec_of(x);
        unvec(&((&self.g * v - &self.b) * 2.0), self.n, self.t)
    }
}

/// `log det` through LU, failing on a non-positive determinant.
pub fn logdet_lu(a: &DMatrix<f64>) -> Result<f64, OracleError> {
    let det = a.clone().lu().determinant();
    if det > 0.0 {
        Ok(det.ln())
    } else {
        Err(OracleError::Singular)
    }
}

pub fn inverse_lu(a: &DMatrix<f64>) -> Result<DMatrix<f64>, OracleError> {
    a.clone().try_inverse().ok_or(OracleError::Singular)
}

/// Literal joint cost, built with explicit `D`, `J` and LU log-determinant.
#[allow(clippy::too_many_arguments)]
pub fn naive_objective(
    x: &DMatrix<f64>,
    w: &[f64],
    y: &DMatrix<f64>,
    mask: &DMatrix<f64>,
    alpha: f64,
    beta: f64,
    gamma: f64,
) -> Result<f64, OracleError> {
    let (n, t) = x.shape();
    let delta = x - x * shift_matrix(t);
    let l = dense_laplacian(n, w);
    let j = DMatrix::from_element(n, n, 1.0 / n as f64);
    let fid = (y - mask.component_mul(x)).norm_squared();
    let smooth = (&l * &delta * delta.transpose()).trace();
    let l1: f64 = w.iter().map(|v| v.abs()).sum();
    Ok(fid + alpha * smooth - beta * logdet_lu(&(l + j))? + gamma * l1)
}

/// `K = (1/β)(α ΔΔᵀ + (γ/2)(I - 11ᵀ))` with an explicit shift matrix.
pub fn dense_k(x: &DMatrix<f64>, alpha: f64, beta: f64, gamma: f64) -> DMatrix<f64> {
    let (n, t) = x.shape();
    let delta = x - x * shift_matrix(t);
    let h_off = DMatrix::identity(n, n) - DMatrix::from_element(n, n, 1.0);
    (&delta * delta.transpose() * alpha + h_off * (gamma / 2.0)) / beta
}

/// `f_w(w) = Tr(L(w)K) - log det(L(w) + J)`.
pub fn dense_fw(w: &[f64], k: &DMatrix<f64>) -> Result<f64, OracleError> {
    let n = k.nrows();
    let l = dense_laplacian(n, w);
    let j = DMatrix::from_element(n, n, 1.0 / n as f64);
    Ok((&l * k).trace() - logdet_lu(&(l + j))?)
}

/// Majorizer coefficients `(q, r)` at `w0` via incidence quadratic forms.
pub fn dense_qr(w0: &[f64], k: &DMatrix<f64>) -> Result<(Vec<f64>, Vec<f64>), OracleError> {
    let n = k.nrows();
    let j = DMatrix::from_element(n, n, 1.0 / n as f64);
    let f0_inv = inverse_lu(&(dense_laplacian(n, w0) + j))?;
    Ok((dense_adjoint(&f0_inv), dense_adjoint(k)))
}

/// Full w-block majorizer `f_w^S(w; w₀)` (requires `w, w₀ > 0`).
pub fn w_surrogate(w: &[f64], w0: &[f64], k: &DMatrix<f64>, tau: f64) -> Result<f64, OracleError> {
    let n = k.nrows();
    let j = DMatrix::from_element(n, n, 1.0 / n as f64);
    let f0 = dense_laplacian(n, w0) + &j;
    let f0_inv = inverse_lu(&f0)?;
    let (q, r) = dense_qr(w0, k)?;
    let mut s = 0.0;
    for idx in 0..w.len() {
        s += tau
            * q[idx]
            * w0[idx]
            * w0[idx]
            * (w[idx] / w0[idx] + (w0[idx] + 1.0 / tau) / w[idx] - 2.0);
        s += w[idx] * r[idx];
    }
    Ok(s + (&f0_inv * &j).trace() - logdet_lu(&f0)? - n as f64)
}

/// Scalar majorizer `g^S(w) = r w + τ q w₀² (w/w₀ + (w₀ + 1/τ)/w - 2)`.
pub fn w_scalar_surrogate(w: f64, w0: f64, q: f64, r: f64, tau: f64) -> f64 {
    r * w + tau * q * w0 * w0 * (w / w0 + (w0 + 1.0 / tau) / w - 2.0)
}

/// `h(x) = x + 1/x - 2`.
pub fn h(x: f64) -> f64 {
    x + 1.0 / x - 2.0
}

/// Central finite-difference gradient of a scalar field over matrices.
pub fn fd_gradient<F>(f: F, x: &DMatrix<f64>, step: f64) -> DMatrix<f64>
where
    F: Fn(&DMatrix<f64>) -> f64,
{
    let mut probe = x.clone();
    DMatrix::from_fn(x.nrows(), x.ncols(), |r, c| {
        let orig = probe[(r, c)];
        probe[(r, c)] = orig + step;
        let up = f(&probe);
        probe[(r, c)] = orig - step;
        let down = f(&probe);
        probe[(r, c)] = orig;
        (up - down) / (2.0 * step)
    })
}

/// Golden-section search for the minimizer of a unimodal `f` on `[lo, hi]`.
pub fn golden_min<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}
