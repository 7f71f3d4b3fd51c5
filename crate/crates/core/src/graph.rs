//! Laplacian operator algebra on undirected weighted graphs.
//!
//! Edges are stored as a flat vector over the strictly lower triangle in
//! column-major order: `(1,0), (2,0), …, (n-1,0), (2,1), …, (n-1,n-2)`.
//! All indices here are zero-based; the 1-based form of the same map is
//! `k = i - j + (j - 1)(2n - j)/2` for `i > j`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Number of vertex pairs of an `n`-vertex graph.
pub fn edge_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Position of edge `{i, j}` (with `i > j`) in the canonical edge order.
pub fn edge_index(i: usize, j: usize, n: usize) -> Result<usize> {
    if i >= n || j >= i {
        return Err(Error::InvalidArgument(format!(
            "edge ({i}, {j}) invalid for n = {n}; need j < i < n"
        )));
    }
    Ok(i - j - 1 + j * (2 * n - j - 1) / 2)
}

/// Inverse of [`edge_index`]: returns `(i, j)` with `i > j`.
pub fn edge_pair(k: usize, n: usize) -> Result<(usize, usize)> {
    if k >= edge_count(n) {
        return Err(Error::InvalidArgument(format!(
            "edge index {k} out of range for n = {n}"
        )));
    }
    let mut rem = k;
    for j in 0..n - 1 {
        let len = n - 1 - j;
        if rem < len {
            return Ok((j + 1 + rem, j));
        }
        rem -= len;
    }
    unreachable!("edge index bounded by edge_count")
}

/// Iterates `(k, i, j)` over all edges in canonical order.
pub fn edges(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..n.saturating_sub(1))
        .flat_map(move |j| (j + 1..n).map(move |i| (i, j)))
        .enumerate()
        .map(|(k, (i, j))| (k, i, j))
}

/// Nonnegative edge weights of an undirected graph on `n` vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeights {
    n: usize,
    w: Vec<f64>,
}

impl EdgeWeights {
    pub fn new(n: usize, w: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("need n >= 2, got {n}")));
        }
        if w.len() != edge_count(n) {
            return Err(Error::InvalidArgument(format!(
                "expected {} edge weights for n = {n}, got {}",
                edge_count(n),
                w.len()
            )));
        }
        if let Some(k) = w.iter().position(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "edge weight {k} is {} (must be finite and >= 0)",
                w[k]
            )));
        }
        Ok(Self { n, w })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, vec![0.0; edge_count(n)])
    }

    pub fn filled(n: usize, value: f64) -> Result<Self> {
        Self::new(n, vec![value; edge_count(n)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.w
    }

    pub fn get(&self, i: usize, j: usize) -> Result<f64> {
        let (a, b) = if i > j { (i, j) } else { (j, i) };
        Ok(self.w[edge_index(a, b, self.n)?])
    }

    pub fn l1_norm(&self) -> f64 {
        self.w.iter().sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.w.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.n, self.w.iter().map(|v| v * c).collect())
    }

    /// Weighted degree of every vertex.
    pub fn degrees(&self) -> Vec<f64> {
        let mut deg = vec![0.0; self.n];
        for (k, i, j) in edges(self.n) {
            deg[i] += self.w[k];
            deg[j] += self.w[k];
        }
        deg
    }

    pub fn max_degree(&self) -> f64 {
        self.degrees().into_iter().fold(0.0, f64::max)
    }

    /// `Tr(L(w)) = 2‖w‖₁`.
    pub fn laplacian_trace(&self) -> f64 {
        2.0 * self.l1_norm()
    }
}

/// Combinatorial Laplacian of an undirected weighted graph.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix(DMatrix<f64>);

impl LaplacianMatrix {
    /// Wraps a dense matrix after checking symmetry, zero row sums and
    /// nonpositive off-diagonals to within `tol`.
    pub fn from_matrix(l: DMatrix<f64>, tol: f64) -> Result<Self> {
        let n = l.nrows();
        if n < 2 || l.ncols() != n {
            return Err(Error::InvalidArgument(format!(
                "Laplacian must be square with n >= 2, got {}x{}",
                l.nrows(),
                l.ncols()
            )));
        }
        for i in 0..n {
            let row_sum: f64 = l.row(i).iter().sum();
            let scale = 1.0 + l[(i, i)].abs();
            if row_sum.abs() > tol * scale {
                return Err(Error::InvalidArgument(format!(
                    "Laplacian row {i} sums to {row_sum}"
                )));
            }
            for j in 0..i {
                if (l[(i, j)] - l[(j, i)]).abs() > tol * scale {
                    return Err(Error::InvalidArgument(format!(
                        "Laplacian not symmetric at ({i}, {j})"
                    )));
                }
                if l[(i, j)] > tol * scale {
                    return Err(Error::InvalidArgument(format!(
                        "Laplacian off-diagonal ({i}, {j}) is positive"
                    )));
                }
            }
        }
        Ok(Self(l))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// Edge weights read off the negated lower triangle, clipped at zero.
    pub fn weights(&self) -> EdgeWeights {
        let n = self.n();
        let w = edges(n)
            .map(|(_, i, j)| (-self.0[(i, j)]).max(0.0))
            .collect();
        EdgeWeights::new(n, w).expect("clipped weights are valid")
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self(&self.0 * c)
    }
}

/// `L(w)`: dense Laplacian of the weighted graph.
pub fn laplacian(w: &EdgeWeights) -> LaplacianMatrix {
    let n = w.n();
    let mut l = DMatrix::zeros(n, n);
    for (k, i, j) in edges(n) {
        let v = w.w[k];
        l[(i, j)] = -v;
        l[(j, i)] = -v;
        l[(i, i)] += v;
        l[(j, j)] += v;
    }
    LaplacianMatrix(l)
}

/// Matrix-free product `L(w) · y`.
pub fn apply_laplacian(w: &EdgeWeights, y: &DVector<f64>) -> Result<DVector<f64>> {
    let n = w.n();
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} against {n}-vertex Laplacian",
            y.len()
        )));
    }
    let mut out = DVector::zeros(n);
    for (k, i, j) in edges(n) {
        let flow = w.w[k] * (y[i] - y[j]);
        out[i] += flow;
        out[j] -= flow;
    }
    Ok(out)
}

/// `L*(M)`: entry `k` for edge `(i, j)` is `M_ii + M_jj - M_ij - M_ji`.
pub fn laplacian_adjoint(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::InvalidArgument(format!(
            "adjoint needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("adjoint needs n >= 2".into()));
    }
    Ok(edges(n)
        .map(|(_, i, j)| m[(i, i)] + m[(j, j)] - m[(i, j)] - m[(j, i)])
        .collect())
}

/// `J = (1/n) 1 1ᵀ`.
pub fn j_matrix(n: usize) -> DMatrix<f64> {
    DMatrix::from_element(n, n, 1.0 / n as f64)
}

/// `H_off = I - 1 1ᵀ`.
pub fn h_off(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { -1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;
    use proptest::prelude::*;

    fn w(n: usize, v: &[f64]) -> EdgeWeights {
        EdgeWeights::new(n, v.to_vec()).unwrap()
    }

    #[test]
    fn edge_index_examples() {
        // (i, j) one-based → zero-based vertices, zero-based k
        assert_eq!(edge_index(1, 0, 4).unwrap() + 1, 1);
        assert_eq!(edge_index(2, 1, 4).unwrap() + 1, 4);
        assert_eq!(edge_index(3, 2, 4).unwrap() + 1, 6);
    }

    #[test]
    fn edge_index_enumeration_is_bijective() {
        // enumerate the one-based closed form directly
        let n = 4;
        let mut seen = vec![false; edge_count(n)];
        for j in 1..=n {
            for i in j + 1..=n {
                let k = i - j + (j - 1) * (2 * n - j) / 2;
                assert_eq!(edge_index(i - 1, j - 1, n).unwrap() + 1, k);
                assert!(!seen[k - 1]);
                seen[k - 1] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn edge_index_rejects_bad_pairs() {
        assert!(edge_index(0, 0, 3).is_err());
        assert!(edge_index(0, 1, 3).is_err());
        assert!(edge_index(3, 1, 3).is_err());
        assert!(edge_pair(3, 3).is_err());
    }

    #[test]
    fn edge_round_trip_small_n() {
        for n in 2..=12 {
            for (k, i, j) in edges(n) {
                assert_eq!(edge_index(i, j, n).unwrap(), k);
                assert_eq!(edge_pair(k, n).unwrap(), (i, j));
            }
            assert_eq!(edges(n).count(), edge_count(n));
        }
    }

    #[test]
    fn edge_weights_invariants() {
        assert!(EdgeWeights::new(1, vec![]).is_err());
        assert!(EdgeWeights::new(3, vec![1.0, 2.0]).is_err());
        assert!(EdgeWeights::new(3, vec![1.0, -2.0, 0.0]).is_err());
        assert!(EdgeWeights::new(3, vec![1.0, f64::NAN, 0.0]).is_err());
        assert!(EdgeWeights::new(3, vec![1.0, 0.0, 0.0]).is_ok());
    }

    #[test]
    fn laplacian_examples() {
        let l2 = laplacian(&w(2, &[1.0]));
        assert_eq!(
            l2.matrix(),
            &DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0])
        );

        let l3 = laplacian(&w(3, &[1.0, 0.0, 2.0]));
        let want =
            DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, -1.0, 3.0, -2.0, 0.0, -2.0, 2.0]);
        assert_eq!(l3.matrix(), &want);

        let l0 = laplacian(&w(3, &[0.0; 3]));
        assert_eq!(l0.matrix(), &DMatrix::zeros(3, 3));
    }

    #[test]
    fn laplacian_weights_round_trip() {
        let ws = w(4, &[0.5, 0.0, 1.5, 2.0, 0.0, 3.0]);
        let l = laplacian(&ws);
        assert_eq!(l.weights(), ws);
        assert!(LaplacianMatrix::from_matrix(l.into_matrix(), 1e-12).is_ok());
        assert!(LaplacianMatrix::from_matrix(DMatrix::identity(3, 3), 1e-12).is_err());
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(
            laplacian_adjoint(&DMatrix::identity(3, 3)).unwrap(),
            vec![2.0; 3]
        );
        let adj = laplacian_adjoint(&j_matrix(3)).unwrap();
        assert!(adj.iter().all(|v| v.abs() < 1e-15));
        assert!(laplacian_adjoint(&DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn j_matrix_properties() {
        assert_eq!(j_matrix(2), DMatrix::from_element(2, 2, 0.5));
        for n in 2..7 {
            let j = j_matrix(n);
            assert!((&j * &j - &j).abs().max() < 1e-15);
            assert!((j.trace() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn h_off_properties() {
        assert_eq!(
            h_off(2),
            DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0])
        );
        assert!(h_off(3).diagonal().iter().all(|&v| v == 0.0));
        let ws = w(4, &[0.5, 0.0, 1.5, 2.0, 0.25, 3.0]);
        let tr = (laplacian(&ws).matrix() * h_off(4)).trace();
        assert!((tr - 2.0 * ws.l1_norm()).abs() < 1e-12);
    }

    fn weights_strategy() -> impl Strategy<Value = EdgeWeights> {
        (2usize..=8).prop_flat_map(|n| {
            prop::collection::vec(0.0f64..5.0, edge_count(n))
                .prop_map(move |v| EdgeWeights::new(n, v).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn adjoint_identity(
            ws in weights_strategy(),
            seed in prop::collection::vec(-3.0f64..3.0, 64),
        ) {
            let n = ws.n();
            let m = DMatrix::from_fn(n, n, |i, j| seed[i * 8 + j]);
            let lhs = laplacian(&ws).matrix().dot(&m);
            let rhs: f64 = ws.as_slice().iter()
                .zip(laplacian_adjoint(&m).unwrap())
                .map(|(a, b)| a * b)
                .sum();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
        }

        #[test]
        fn laplacian_is_psd_with_zero_row_sums(ws in weights_strategy()) {
            let l = laplacian(&ws).into_matrix();
            for i in 0..ws.n() {
                prop_assert!(l.row(i).iter().sum::<f64>().abs() < 1e-10);
            }
            let min = SymmetricEigen::new(l).eigenvalues.min();
            prop_assert!(min >= -1e-10);
        }

        #[test]
        fn matrix_free_product_matches_dense(
            ws in weights_strategy(),
            y in prop::collection::vec(-2.0f64..2.0, 8),
        ) {
            let y = DVector::from_iterator(ws.n(), y.into_iter().take(ws.n()));
            let dense = laplacian(&ws).matrix() * &y;
            let free = apply_laplacian(&ws, &y).unwrap();
            prop_assert!((dense - free).abs().max() < 1e-12);
        }

        #[test]
        fn adjoint_of_psd_laplacian_like_is_nonnegative(
            ws in weights_strategy(),
            seed in prop::collection::vec(-3.0f64..3.0, 64),
        ) {
            // A = P Bᵀ B P with P the centering projector: PSD with zero row sums.
            let n = ws.n();
            let b = DMatrix::from_fn(n, n, |i, j| seed[i * 8 + j]);
            let p = DMatrix::identity(n, n) - j_matrix(n);
            let a = &p * b.transpose() * &b * &p;
            for v in laplacian_adjoint(&a).unwrap() {
                prop_assert!(v >= -1e-10);
            }
        }
    }
}
