//! Single-kernel classical CNN for 2x2 images.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::LabeledImage;
use crate::error::{Error, Result};
use crate::training::{derive_seed, mse, sigmoid, DatasetSource, EpochRecord, LossCurve, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalKernel {
    pub weights: [f64; 4],
    pub bias: f64,
}

impl ClassicalKernel {
    pub fn new(weights: [f64; 4], bias: f64) -> Result<Self> {
        if weights.iter().chain([&bias]).any(|v| !v.is_finite()) {
            return Err(Error::invalid("classical kernel values must be finite"));
        }
        Ok(ClassicalKernel { weights, bias })
    }

    pub fn zeros() -> Self {
        ClassicalKernel {
            weights: [0.0; 4],
            bias: 0.0,
        }
    }

    /// Weights and bias drawn uniformly from `[-0.5, 0.5)`.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || rng.random_range(-0.5..0.5);
        ClassicalKernel {
            weights: [draw(), draw(), draw(), draw()],
            bias: draw(),
        }
    }

    pub fn to_flat(&self) -> [f64; 5] {
        let w = self.weights;
        [w[0], w[1], w[2], w[3], self.bias]
    }

    pub fn from_flat(v: [f64; 5]) -> Result<Self> {
        ClassicalKernel::new([v[0], v[1], v[2], v[3]], v[4])
    }
}

fn inputs(pixels: &[u8]) -> Result<[f64; 4]> {
    if pixels.len() != 4 {
        return Err(Error::invalid(format!(
            "classical baseline takes 2x2 images, got {} pixels",
            pixels.len()
        )));
    }
    Ok(std::array::from_fn(|k| pixels[k] as f64 / 255.0))
}

/// `sigmoid(w . pixels/255 + b)`.
pub fn classical_forward(pixels: &[u8], kernel: &ClassicalKernel) -> Result<f64> {
    let x = inputs(pixels)?;
    let z: f64 = kernel.weights.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + kernel.bias;
    Ok(sigmoid(z))
}

/// Batch MSE of the activated outputs.
pub fn classical_loss(batch: &[LabeledImage], kernel: &ClassicalKernel) -> Result<f64> {
    let preds = batch
        .iter()
        .map(|s| classical_forward(s.pixels(), kernel))
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<f64> = batch.iter().map(|s| s.label() as f64).collect();
    mse(&preds, &labels)
}

/// Analytic gradient of [`classical_loss`] as `[dw0, dw1, dw2, dw3, db]`.
pub fn classical_gradient(batch: &[LabeledImage], kernel: &ClassicalKernel) -> Result<[f64; 5]> {
    if batch.is_empty() {
        return Err(Error::invalid("gradient of an empty batch"));
    }
    let mut g = [0.0; 5];
    for s in batch {
        let x = inputs(s.pixels())?;
        let a = classical_forward(s.pixels(), kernel)?;
        let delta = 2.0 * (a - s.label() as f64) * a * (1.0 - a);
        for k in 0..4 {
            g[k] += delta * x[k];
        }
        g[4] += delta;
    }
    let n = batch.len() as f64;
    g.iter_mut().for_each(|v| *v /= n);
    Ok(g)
}

#[derive(Debug, Clone)]
pub struct ClassicalOutcome {
    pub kernel: ClassicalKernel,
    pub curve: LossCurve,
}

/// Gradient descent on the batch MSE. Uses `epochs`, `batch_size`,
/// `learning_rate` and `seed` from `cfg`; the architecture must be the 2x2
/// one. A learning rate of 0 is accepted and leaves the kernel fixed.
pub fn classical_train(cfg: &TrainConfig, source: &DatasetSource) -> Result<ClassicalOutcome> {
    if cfg.learning_rate == 0.0 {
        TrainConfig {
            learning_rate: 1.0,
            ..cfg.clone()
        }
        .validate()?;
    } else {
        cfg.validate()?;
    }
    if cfg.arch.side() != 2 {
        return Err(Error::invalid(format!(
            "classical baseline needs 2x2 images, not {}",
            cfg.arch
        )));
    }
    let mut kernel = ClassicalKernel::random(derive_seed(cfg.seed, &[0xc1a5]));
    let mut curve = LossCurve::default();
    for epoch in 0..cfg.epochs {
        let started = Instant::now();
        let batch = source.batch(cfg, epoch)?;
        let loss = classical_loss(&batch, &kernel)?;
        let g = classical_gradient(&batch, &kernel)?;
        let mut flat = kernel.to_flat();
        for (v, gk) in flat.iter_mut().zip(g) {
            *v -= cfg.learning_rate * gk;
        }
        kernel = ClassicalKernel::from_flat(flat)?;
        curve.records.push(EpochRecord {
            epoch: epoch + 1,
            mse: loss,
            millis: started.elapsed().as_millis() as u64,
            evals: 0,
        });
    }
    Ok(ClassicalOutcome { kernel, curve })
}
