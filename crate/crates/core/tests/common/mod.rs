#![allow(dead_code)]

use graphfill::{EdgeWeights, Hyperparams, Mask, SignalMatrix};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small random problem at dense-oracle scale.
pub struct Instance {
    pub n: usize,
    pub t: usize,
    pub w: Vec<f64>,
    pub mask: DMatrix<f64>,
    pub y: DMatrix<f64>,
    pub x0: DMatrix<f64>,
    pub hp: Hyperparams,
}

impl Instance {
    /// `n ∈ [2, 6]`, `T ∈ [1, 8]`, strictly positive weights.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..=6);
        let t = rng.random_range(1..=8);
        Self::with_size(&mut rng, n, t)
    }

    pub fn with_size(rng: &mut ChaCha8Rng, n: usize, t: usize) -> Self {
        let m = n * (n - 1) / 2;
        let w = (0..m).map(|_| rng.random_range(0.05..1.5)).collect();
        let mut mask = DMatrix::from_fn(n, t, |_, _| if rng.random_bool(0.6) { 1.0 } else { 0.0 });
        mask[(0, 0)] = 1.0;
        let x_star = DMatrix::from_fn(n, t, |_, _| rng.random_range(-2.0..2.0));
        let y = mask.component_mul(&x_star);
        let x0 = DMatrix::from_fn(n, t, |_, _| rng.random_range(-2.0..2.0));
        let hp = Hyperparams {
            alpha: rng.random_range(0.01..1.0),
            beta: rng.random_range(0.1..2.0),
            gamma: rng.random_range(0.0..0.5),
            tau: rng.random_range(0.5..100.0),
        };
        Self {
            n,
            t,
            w,
            mask,
            y,
            x0,
            hp,
        }
    }

    pub fn weights(&self) -> EdgeWeights {
        EdgeWeights::new(self.n, self.w.clone()).unwrap()
    }

    pub fn mask(&self) -> Mask {
        Mask::new(self.mask.clone()).unwrap()
    }

    pub fn random_signal(&self, rng: &mut ChaCha8Rng) -> SignalMatrix {
        DMatrix::from_fn(self.n, self.t, |_, _| rng.random_range(-3.0..3.0))
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}
