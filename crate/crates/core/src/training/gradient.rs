//! Loss, the shift-rule gradient and the sigmoid update rule.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use super::activation::{sigmoid, sigmoid_deriv, Activation};
use super::forward::{derive_seed, Evaluator};
use crate::error::{Error, Result};
use crate::network::{ModelParams, Network};

/// Mean squared error between predictions and labels.
pub fn mse(predictions: &[f64], labels: &[f64]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::invalid("mse of an empty batch"));
    }
    if predictions.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} predictions for {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    Ok(predictions
        .iter()
        .zip(labels)
        .map(|(p, y)| (p - y) * (p - y))
        .sum::<f64>()
        / predictions.len() as f64)
}

/// Two-point shift rule `(f(theta_j + pi/2) - f(theta_j - pi/2)) / 2` for
/// every coordinate. Exact for functions of the form
/// `a + b cos(theta_j) + c sin(theta_j)` in each coordinate.
pub fn shift_rule<F: Fn(&[f64]) -> f64>(f: F, params: &[f64]) -> Vec<f64> {
    let mut work = params.to_vec();
    (0..params.len())
        .map(|j| {
            work[j] = params[j] + FRAC_PI_2;
            let plus = f(&work);
            work[j] = params[j] - FRAC_PI_2;
            let minus = f(&work);
            work[j] = params[j];
            0.5 * (plus - minus)
        })
        .collect()
}

/// Which per-sample loss a circuit-derivative rule descends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loss {
    /// `(p1 - y)^2`: activation left out of the gradient path.
    Circuit,
    /// `(act(p1) - y)^2`.
    Activated(Activation),
}

impl Loss {
    pub fn value(self, p1s: &[f64], labels: &[f64]) -> Result<f64> {
        match self {
            Loss::Circuit => mse(p1s, labels),
            Loss::Activated(a) => {
                let act: Vec<f64> = p1s.iter().map(|&p| a.apply(p)).collect();
                mse(&act, labels)
            }
        }
    }

    /// `d loss_i / d p1_i`.
    pub fn dloss_dp(self, p1: f64, y: f64) -> f64 {
        match self {
            Loss::Circuit => 2.0 * (p1 - y),
            Loss::Activated(a) => 2.0 * (a.apply(p1) - y) * a.deriv(p1),
        }
    }
}

/// Gradient of the batch-mean `loss` with respect to the flat parameters in
/// `which`, chaining `d loss / d p1` with shift-rule circuit derivatives.
/// `p1s` are the unshifted readouts. Returns the gradient (aligned with
/// `which`) and the circuit evaluations spent.
#[allow(clippy::too_many_arguments)]
pub fn batch_gradient(
    ev: &Evaluator,
    nets: &[Network],
    labels: &[f64],
    params: &ModelParams,
    p1s: &[f64],
    loss: Loss,
    which: &[usize],
    seed: u64,
) -> Result<(Vec<f64>, u64)> {
    if nets.is_empty() || nets.len() != labels.len() || nets.len() != p1s.len() {
        return Err(Error::invalid("batch gradient needs matching, nonempty batches"));
    }
    let per_sample: Vec<(Vec<f64>, u64)> = nets
        .par_iter()
        .enumerate()
        .map(|(i, net)| {
            let w = loss.dloss_dp(p1s[i], labels[i]);
            if w == 0.0 {
                return Ok((vec![0.0; which.len()], 0));
            }
            let (dp, evals) = ev.probability_gradient(net, params, which, derive_seed(seed, &[i as u64]))?;
            Ok((dp.into_iter().map(|d| w * d).collect(), evals))
        })
        .collect::<Result<_>>()?;

    let n = nets.len() as f64;
    let mut grad = vec![0.0; which.len()];
    let mut evals = 0;
    for (g, e) in per_sample {
        for (acc, v) in grad.iter_mut().zip(g) {
            *acc += v;
        }
        evals += e;
    }
    grad.iter_mut().for_each(|v| *v /= n);
    Ok((grad, evals))
}

/// `mean_i conv_out_i * error_i * sigmoid'(p1_i)`: the scalar step of the
/// sigmoid update rule.
pub fn sigmoid_rule_scalar(conv_outs: &[f64], p1s: &[f64], errors: &[f64]) -> Result<f64> {
    if conv_outs.is_empty() {
        return Err(Error::invalid("sigmoid update on an empty batch"));
    }
    if conv_outs.len() != p1s.len() || p1s.len() != errors.len() {
        return Err(Error::invalid(format!(
            "shape mismatch: {} conv outputs, {} readouts, {} errors",
            conv_outs.len(),
            p1s.len(),
            errors.len()
        )));
    }
    Ok(conv_outs
        .iter()
        .zip(p1s)
        .zip(errors)
        .map(|((c, &p), e)| c * e * sigmoid_deriv(p))
        .sum::<f64>()
        / conv_outs.len() as f64)
}

/// `params + lr * (conv_outs^T . (error * sigmoid'(p1)))` with the readouts
/// as convolution outputs; every angle moves by the same amount.
pub fn grad_sigmoid_update(
    params: &ModelParams,
    p1s: &[f64],
    errors: &[f64],
    learning_rate: f64,
) -> Result<ModelParams> {
    let step = learning_rate * sigmoid_rule_scalar(p1s, p1s, errors)?;
    let mut out = params.clone();
    for k in 0..out.n_layers() {
        out.layer_mut(k).iter_mut().for_each(|a| *a += step);
    }
    Ok(out)
}

/// `label - sigmoid(p1)` per sample.
pub fn prediction_errors(p1s: &[f64], labels: &[f64]) -> Vec<f64> {
    p1s.iter().zip(labels).map(|(&p, y)| y - sigmoid(p)).collect()
}
