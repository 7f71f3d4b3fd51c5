//! Synthetic ground truth: stochastic-block-model graphs, Laplacian-GMRF
//! signals, row normalization and Bernoulli sampling masks.
//!
//! All randomness comes from `ChaCha20Rng::seed_from_u64(seed)` with a fixed
//! stream per purpose (see [`Stream`]), so a seed reproduces the same bundle
//! on every platform.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::{edges, laplacian, EdgeWeights, LaplacianMatrix};
use crate::signal::{Mask, SignalMatrix};

/// Independent ChaCha streams drawn from one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Graph = 1,
    Signal = 2,
    Mask = 3,
}

pub fn rng_for(seed: u64, stream: Stream) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

const MAX_CONNECT_RETRIES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightDist {
    Unit,
    Uniform { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbmConfig {
    pub n: usize,
    pub clusters: usize,
    pub p_within: f64,
    pub p_between: f64,
    pub weight_dist: WeightDist,
    pub seed: u64,
}

impl SbmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!(
                "need n >= 2, got {}",
                self.n
            )));
        }
        if self.clusters == 0 || self.clusters > self.n {
            return Err(Error::InvalidArgument(format!(
                "clusters must be in 1..={}, got {}",
                self.n, self.clusters
            )));
        }
        for (name, p) in [("p_within", self.p_within), ("p_between", self.p_between)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!(
                    "{name} = {p} not in [0, 1]"
                )));
            }
        }
        if let WeightDist::Uniform { lo, hi } = self.weight_dist {
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "uniform weights need 0 < lo < hi, got ({lo}, {hi})"
                )));
            }
        }
        Ok(())
    }

    /// Cluster of vertex `v`; the last cluster absorbs the remainder.
    pub fn cluster_of(&self, v: usize) -> usize {
        (v / (self.n / self.clusters)).min(self.clusters - 1)
    }
}

/// Draws an SBM graph, redrawing until it is connected.
pub fn generate_sbm(cfg: &SbmConfig) -> Result<EdgeWeights> {
    cfg.validate()?;
    let mut rng = rng_for(cfg.seed, Stream::Graph);
    for _ in 0..MAX_CONNECT_RETRIES {
        let w: Vec<f64> = edges(cfg.n)
            .map(|(_, i, j)| {
                let p = if cfg.cluster_of(i) == cfg.cluster_of(j) {
                    cfg.p_within
                } else {
                    cfg.p_between
                };
                if rng.random::<f64>() < p {
                    match cfg.weight_dist {
                        WeightDist::Unit => 1.0,
                        WeightDist::Uniform { lo, hi } => rng.random_range(lo..hi),
                    }
                } else {
                    0.0
                }
            })
            .collect();
        let w = EdgeWeights::new(cfg.n, w)?;
        if is_connected(&w) {
            return Ok(w);
        }
    }
    Err(Error::Generation(format!(
        "no connected graph after {MAX_CONNECT_RETRIES} draws (n = {}, p_within = {}, p_between = {})",
        cfg.n, cfg.p_within, cfg.p_between
    )))
}

pub fn is_connected(w: &EdgeWeights) -> bool {
    let n = w.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    let mut components = n;
    for (k, i, j) in edges(n) {
        if w.as_slice()[k] > 0.0 {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a] = b;
                components -= 1;
            }
        }
    }
    components == 1
}

/// Rescales `w` so that `Tr(L(w)) = target`.
pub fn scale_trace(w: &EdgeWeights, target: f64) -> Result<EdgeWeights> {
    let tr = w.laplacian_trace();
    if !(tr > 0.0) {
        return Err(Error::ZeroTrace);
    }
    w.scaled(target / tr)
}

/// Draws `t` columns `x = √(L†) ν` with `ν ~ N(0, I)`.
pub fn sample_gmrf(l: &LaplacianMatrix, t: usize, seed: u64) -> Result<SignalMatrix> {
    let n = l.n();
    let eig = SymmetricEigen::new(l.matrix().clone());
    let cutoff = 1e-10 * eig.eigenvalues.max();
    let zero_eigenvalues = eig.eigenvalues.iter().filter(|&&v| v <= cutoff).count();
    if zero_eigenvalues != 1 {
        return Err(Error::Disconnected { zero_eigenvalues });
    }
    if t == 0 {
        return Ok(DMatrix::zeros(n, 0));
    }
    let inv_sqrt = eig
        .eigenvalues
        .map(|v| if v > cutoff { 1.0 / v.sqrt() } else { 0.0 });
    let root = &eig.eigenvectors * DMatrix::from_diagonal(&inv_sqrt) * eig.eigenvectors.transpose();

    let mut rng = rng_for(seed, Stream::Signal);
    let noise = DMatrix::from_fn(n, t, |_, _| rng.sample::<f64, _>(StandardNormal));
    Ok(root * noise)
}

/// Per-row affine map to zero mean and unit population standard deviation.
pub fn normalize_rows(x: &SignalMatrix) -> Result<SignalMatrix> {
    let t = x.ncols() as f64;
    let mut out = x.clone();
    for (r, mut row) in out.row_iter_mut().enumerate() {
        let mean = row.sum() / t;
        let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / t;
        if !(var > 0.0) {
            return Err(Error::ZeroVariance { row: r });
        }
        let sd = var.sqrt();
        row.apply(|v| *v = (*v - mean) / sd);
    }
    Ok(out)
}

/// I.i.d. Bernoulli(`rate`) mask.
///
/// Entries are drawn column-major from one uniform stream, so for a fixed seed
/// the observed set grows monotonically with `rate`.
pub fn generate_mask(n: usize, t: usize, rate: f64, seed: u64) -> Result<Mask> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::InvalidArgument(format!(
            "sampling rate {rate} not in [0, 1]"
        )));
    }
    let mut rng = rng_for(seed, Stream::Mask);
    let m = DMatrix::from_fn(
        n,
        t,
        |_, _| {
            if rng.random::<f64>() < rate {
                1.0
            } else {
                0.0
            }
        },
    );
    Mask::new(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub w_true: EdgeWeights,
    /// Scaled to `Tr = n`.
    pub l_true: LaplacianMatrix,
    pub x_true: SignalMatrix,
    pub mask: Mask,
    pub y: SignalMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub sbm: SbmConfig,
    pub t: usize,
    pub sampling_rate: f64,
}

/// Full pipeline: graph, trace scaling, GMRF signal, normalization, mask.
pub fn generate_ground_truth(cfg: &SynthConfig) -> Result<GroundTruth> {
    let n = cfg.sbm.n;
    let seed = cfg.sbm.seed;
    let w_true = scale_trace(&generate_sbm(&cfg.sbm)?, n as f64)?;
    let l_true = laplacian(&w_true);
    let x_true = normalize_rows(&sample_gmrf(&l_true, cfg.t, seed)?)?;
    let mask = generate_mask(n, cfg.t, cfg.sampling_rate, seed)?;
    let y = mask.apply(&x_true);
    Ok(GroundTruth {
        w_true,
        l_true,
        x_true,
        mask,
        y,
    })
}
