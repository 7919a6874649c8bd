use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use super::activation::{sigmoid, Activation};
use super::config::{GradMethod, TrainConfig, UpdateStrategy};
use super::forward::{derive_seed, Evaluator, ForwardOutput, Prediction};
use super::gradient::{batch_gradient, mse, prediction_errors, sigmoid_rule_scalar, Loss};
use crate::dataset::{gen_dataset, LabeledImage};
use crate::error::{Error, Result};
use crate::network::{build_plan, init_params, ModelParams, Network};
use crate::sim::plan::ANGLES_PER_LAYER;
use crate::sim::FrontierSim;

/// Where each epoch's batch comes from.
#[derive(Debug, Clone)]
pub enum DatasetSource {
    /// A fixed training set, walked cyclically `batch_size` samples at a
    /// time. When it holds at most `batch_size` samples every epoch sees the
    /// whole set.
    Fixed(Vec<LabeledImage>),
    /// A freshly generated batch per epoch.
    Fresh { seed: u64 },
}

impl DatasetSource {
    pub(crate) fn batch(&self, cfg: &TrainConfig, epoch: usize) -> Result<Vec<LabeledImage>> {
        match self {
            DatasetSource::Fixed(data) => {
                if data.is_empty() {
                    return Err(Error::invalid("training set is empty"));
                }
                if data.len() <= cfg.batch_size {
                    return Ok(data.clone());
                }
                let start = (epoch * cfg.batch_size) % data.len();
                Ok((0..cfg.batch_size)
                    .map(|k| data[(start + k) % data.len()].clone())
                    .collect())
            }
            DatasetSource::Fresh { seed } => {
                gen_dataset(cfg.batch_size, cfg.arch.side(), derive_seed(*seed, &[epoch as u64]))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    pub mse: f64,
    pub millis: u64,
    pub evals: u64,
}

/// Per-epoch MSE of the activated predictions, measured before that
/// epoch's update.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LossCurve {
    pub records: Vec<EpochRecord>,
}

impl LossCurve {
    pub fn mse_values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.mse).collect()
    }

    pub fn first(&self) -> Option<f64> {
        self.records.first().map(|r| r.mse)
    }

    pub fn last(&self) -> Option<f64> {
        self.records.last().map(|r| r.mse)
    }

    pub fn min(&self) -> Option<f64> {
        self.records.iter().map(|r| r.mse).reduce(f64::min)
    }

    /// `max - min` over the curve.
    pub fn spread(&self) -> f64 {
        let max = self.records.iter().map(|r| r.mse).fold(f64::NEG_INFINITY, f64::max);
        self.min().map(|m| max - m).unwrap_or(0.0)
    }

    pub fn total_evals(&self) -> u64 {
        self.records.iter().map(|r| r.evals).sum()
    }

    /// `epoch,mse` CSV, values printed at full round-trip precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,mse\n");
        for r in &self.records {
            let _ = writeln!(out, "{},{}", r.epoch, r.mse);
        }
        out
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    /// Parses the `epoch,mse` CSV written by [`to_csv`](Self::to_csv).
    pub fn parse_csv(text: &str, path: &Path) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, "epoch,mse")) => {}
            _ => return Err(Error::parse(path, 1, "expected header `epoch,mse`")),
        }
        let mut records = Vec::new();
        for (i, line) in lines {
            let bad = || Error::parse(path, i + 1, format!("malformed row `{line}`"));
            let (e, m) = line.split_once(',').ok_or_else(bad)?;
            records.push(EpochRecord {
                epoch: e.parse().map_err(|_| bad())?,
                mse: m.parse().map_err(|_| bad())?,
                millis: 0,
                evals: 0,
            });
        }
        Ok(LossCurve { records })
    }
}

impl EpochRecord {
    /// One human-readable training-log line.
    pub fn log_line(&self) -> String {
        format!(
            "epoch={} mse={:.9} millis={} evals={}",
            self.epoch, self.mse, self.millis, self.evals
        )
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: ModelParams,
    pub curve: LossCurve,
}

fn evaluator(cfg: &TrainConfig) -> Evaluator {
    Evaluator {
        measure: cfg.measure_mode,
        eval: cfg.eval_mode,
        shots: cfg.shots,
        sim: FrontierSim::with_cap(cfg.width_cap),
    }
}

fn forward_batch(ev: &Evaluator, nets: &[Network], params: &ModelParams, seed: u64) -> Result<Vec<ForwardOutput>> {
    nets.par_iter()
        .enumerate()
        .map(|(i, n)| ev.forward(n, params, None, derive_seed(seed, &[i as u64])))
        .collect()
}

/// Trains from the configured initialization.
pub fn train(cfg: &TrainConfig, source: &DatasetSource) -> Result<TrainOutcome> {
    let init = init_params(cfg.arch, cfg.seed, cfg.init);
    train_from(cfg, source, init, |_| {})
}

/// Trains from `init`, calling `on_epoch` after each epoch's update.
pub fn train_from(
    cfg: &TrainConfig,
    source: &DatasetSource,
    init: ModelParams,
    mut on_epoch: impl FnMut(&EpochRecord),
) -> Result<TrainOutcome> {
    cfg.validate()?;
    if !init.matches(cfg.arch) {
        return Err(Error::invalid(format!(
            "{} takes {} layer(s), params have {}",
            cfg.arch,
            cfg.arch.conv_layers(),
            init.n_layers()
        )));
    }
    let ev = evaluator(cfg);
    let mut params = init;
    let mut curve = LossCurve::default();
    let n_layers = cfg.arch.conv_layers();

    for epoch in 0..cfg.epochs {
        let started = Instant::now();
        let batch = source.batch(cfg, epoch)?;
        let nets = batch
            .par_iter()
            .map(|s| build_plan(cfg.arch, &s.angle_image()))
            .collect::<Result<Vec<_>>>()?;
        let labels: Vec<f64> = batch.iter().map(|s| s.label() as f64).collect();
        let epoch_seed = derive_seed(cfg.seed, &[0x5eed, epoch as u64]);

        let mut outs = forward_batch(&ev, &nets, &params, derive_seed(epoch_seed, &[0]))?;
        let mut evals: u64 = outs.iter().map(|o| o.evals).sum();
        let p1s: Vec<f64> = outs.iter().map(|o| o.p1).collect();
        let activated: Vec<f64> = p1s.iter().map(|&p| sigmoid(p)).collect();
        let epoch_mse = mse(&activated, &labels)?;

        let groups: Vec<Vec<usize>> = match cfg.update_strategy {
            UpdateStrategy::Simultaneous => vec![(0..n_layers).collect()],
            UpdateStrategy::LayerWise => (0..n_layers).map(|l| vec![l]).collect(),
        };
        for (gi, layers) in groups.iter().enumerate() {
            if gi > 0 {
                outs = forward_batch(&ev, &nets, &params, derive_seed(epoch_seed, &[1 + gi as u64]))?;
                evals += outs.iter().map(|o| o.evals).sum::<u64>();
            }
            let p1s: Vec<f64> = outs.iter().map(|o| o.p1).collect();
            match cfg.grad_method {
                GradMethod::Sigmoid => {
                    let errors = prediction_errors(&p1s, &labels);
                    let steps = layers
                        .iter()
                        .map(|&l| {
                            let conv: Vec<f64> = outs.iter().zip(&nets).map(|(o, n)| o.conv_output(n, l)).collect();
                            sigmoid_rule_scalar(&conv, &p1s, &errors)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    for (&l, s) in layers.iter().zip(steps) {
                        params.layer_mut(l).iter_mut().for_each(|a| *a += cfg.learning_rate * s);
                    }
                }
                GradMethod::Shift | GradMethod::Combined => {
                    let loss = if cfg.grad_method == GradMethod::Shift {
                        Loss::Circuit
                    } else {
                        Loss::Activated(Activation::Logistic)
                    };
                    let which: Vec<usize> = layers
                        .iter()
                        .flat_map(|&l| l * ANGLES_PER_LAYER..(l + 1) * ANGLES_PER_LAYER)
                        .collect();
                    let (grad, e) = batch_gradient(
                        &ev,
                        &nets,
                        &labels,
                        &params,
                        &p1s,
                        loss,
                        &which,
                        derive_seed(epoch_seed, &[100 + gi as u64]),
                    )?;
                    evals += e;
                    let mut flat = params.flat();
                    for (&j, g) in which.iter().zip(grad) {
                        flat[j] -= cfg.learning_rate * g;
                    }
                    params = ModelParams::from_flat(cfg.arch, &flat)?;
                }
            }
        }

        let rec = EpochRecord {
            epoch: epoch + 1,
            mse: epoch_mse,
            millis: started.elapsed().as_millis() as u64,
            evals,
        };
        on_epoch(&rec);
        curve.records.push(rec);
    }
    Ok(TrainOutcome { params, curve })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub samples: usize,
    pub mse: f64,
    pub accuracy: f64,
}

/// MSE of activated predictions and thresholded accuracy over `data`.
pub fn evaluate(cfg: &TrainConfig, params: &ModelParams, data: &[LabeledImage]) -> Result<EvalReport> {
    if data.is_empty() {
        return Err(Error::invalid("cannot evaluate on an empty dataset"));
    }
    if !params.matches(cfg.arch) {
        return Err(Error::invalid(format!(
            "{} takes {} angles, params have {}",
            cfg.arch,
            cfg.arch.n_params(),
            params.flat().len()
        )));
    }
    let ev = evaluator(cfg);
    let preds = data
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let net = build_plan(cfg.arch, &s.angle_image())?;
            let out = ev.forward(&net, params, None, derive_seed(cfg.seed, &[0xe7a1, i as u64]))?;
            Ok(Prediction::new(out.p1, Activation::Logistic, cfg.threshold))
        })
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<f64> = data.iter().map(|s| s.label() as f64).collect();
    let act: Vec<f64> = preds.iter().map(|p| p.activated).collect();
    let correct = preds.iter().zip(data).filter(|(p, s)| p.label_hat == s.label()).count();
    Ok(EvalReport {
        samples: data.len(),
        mse: mse(&act, &labels)?,
        accuracy: correct as f64 / data.len() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Architecture;

    fn small(epochs: usize) -> TrainConfig {
        TrainConfig {
            epochs,
            batch_size: 16,
            seed: 3,
            ..Default::default()
        }
    }

    #[test]
    fn curve_has_one_record_per_epoch() {
        let data = gen_dataset(16, 2, 1).unwrap();
        let out = train(&small(3), &DatasetSource::Fixed(data)).unwrap();
        assert_eq!(out.curve.records.len(), 3);
        assert_eq!(out.curve.records[2].epoch, 3);
        assert!(out.curve.records.iter().all(|r| (0.0..=1.0).contains(&r.mse)));
    }

    #[test]
    fn exact_runs_repeat() {
        let src = DatasetSource::Fresh { seed: 9 };
        let a = train(&small(4), &src).unwrap();
        let b = train(&small(4), &src).unwrap();
        assert_eq!(a.curve.to_csv(), b.curve.to_csv());
        assert_eq!(a.params, b.params);
    }

    #[test]
    fn fixed_source_cycles() {
        let data = gen_dataset(10, 2, 1).unwrap();
        let cfg = TrainConfig {
            batch_size: 4,
            ..small(1)
        };
        let src = DatasetSource::Fixed(data.clone());
        assert_eq!(src.batch(&cfg, 0).unwrap(), data[0..4]);
        let b2 = src.batch(&cfg, 2).unwrap();
        assert_eq!(b2[0], data[8]);
        assert_eq!(b2[2], data[0]);
    }

    #[test]
    fn wrong_param_shape_rejected() {
        let cfg = TrainConfig {
            arch: Architecture::ConvPoolConvPool,
            ..small(1)
        };
        let err = train_from(
            &cfg,
            &DatasetSource::Fresh { seed: 0 },
            ModelParams::zeros(Architecture::Conv),
            |_| {},
        );
        assert!(err.is_err());
    }

    #[test]
    fn csv_round_trip() {
        let curve = LossCurve {
            records: vec![
                EpochRecord {
                    epoch: 1,
                    mse: 0.26,
                    millis: 3,
                    evals: 9,
                },
                EpochRecord {
                    epoch: 2,
                    mse: 0.2599999999,
                    millis: 3,
                    evals: 9,
                },
            ],
        };
        let text = curve.to_csv();
        assert!(text.starts_with("epoch,mse\n1,0.26\n"));
        let back = LossCurve::parse_csv(&text, Path::new("c.csv")).unwrap();
        assert_eq!(back.mse_values(), curve.mse_values());
    }

    #[test]
    fn evaluate_reports() {
        let data = gen_dataset(20, 2, 4).unwrap();
        let cfg = small(1);
        let params = ModelParams::zeros(Architecture::Conv);
        let r = evaluate(&cfg, &params, &data).unwrap();
        assert_eq!(r.samples, 20);
        assert!((0.0..=1.0).contains(&r.accuracy));
        assert_eq!(r, evaluate(&cfg, &params, &data).unwrap());
        assert!(evaluate(&cfg, &params, &[]).is_err());
    }
}
