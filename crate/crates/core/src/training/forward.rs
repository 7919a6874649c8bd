//! Forward passes: end-to-end or with measured, re-encoded layer outputs.

use std::f64::consts::{FRAC_PI_2, PI};

use super::activation::Activation;
use super::config::{EvalMode, MeasureMode};
use crate::error::Result;
use crate::network::{ModelParams, Network, StageKind};
use crate::sim::{readout_probability, sampled_probability, AngleSource, CircuitPlan, FrontierSim, GateKind};

/// Splitmix64 finalizer, used to derive independent seeds from a base seed
/// and a list of tags.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    let mut z = base;
    for &t in tags {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(t);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

/// A gate occurrence whose angle can be shifted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Site {
    /// Position in the end-to-end plan.
    Full(usize),
    /// Position within a stage's stand-alone plan.
    Stage(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub p1: f64,
    pub activated: f64,
    pub label_hat: u8,
}

impl Prediction {
    pub fn new(p1: f64, activation: Activation, threshold: f64) -> Self {
        let activated = activation.apply(p1);
        Prediction {
            p1,
            activated,
            label_hat: (activated > threshold) as u8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardOutput {
    pub p1: f64,
    /// Probabilities measured at each stage's outputs (only filled in
    /// intermediate mode).
    pub stage_outputs: Vec<Vec<f64>>,
    /// Circuit evaluations performed.
    pub evals: u64,
}

impl ForwardOutput {
    /// Mean measured output of the convolution stage for trainable `layer`,
    /// falling back to the readout when no intermediate values exist.
    pub fn conv_output(&self, net: &Network, layer: usize) -> f64 {
        net.stages()
            .iter()
            .position(|s| s.kind == StageKind::Conv { layer })
            .and_then(|k| self.stage_outputs.get(k))
            .filter(|v| !v.is_empty())
            .map(|v| v.iter().sum::<f64>() / v.len() as f64)
            .unwrap_or(self.p1)
    }
}

/// Evaluation settings shared by every forward pass in a run.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator {
    pub measure: MeasureMode,
    pub eval: EvalMode,
    pub shots: u64,
    pub sim: FrontierSim,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator {
            measure: MeasureMode::EndToEnd,
            eval: EvalMode::Exact,
            shots: 1000,
            sim: FrontierSim::default(),
        }
    }
}

impl Evaluator {
    fn observe(&self, p: f64, seed: u64) -> Result<f64> {
        match self.eval {
            EvalMode::Exact => Ok(p),
            EvalMode::Sampled => sampled_probability(p.clamp(0.0, 1.0), self.shots, seed),
        }
    }

    /// One forward pass. `shift` adds `delta` to the angle at a single gate
    /// occurrence; `seed` drives shot sampling.
    pub fn forward(
        &self,
        net: &Network,
        params: &ModelParams,
        shift: Option<(Site, f64)>,
        seed: u64,
    ) -> Result<ForwardOutput> {
        let flat = params.flat();
        match self.measure {
            MeasureMode::EndToEnd => {
                let plan = net.plan();
                let mut angles = plan.resolve(&flat)?;
                if let Some((Site::Full(pos), delta)) = shift {
                    angles[pos] += delta;
                }
                let p = readout_probability(plan, &angles, &self.sim)?;
                Ok(ForwardOutput {
                    p1: self.observe(p, seed)?,
                    stage_outputs: Vec::new(),
                    evals: 1,
                })
            }
            MeasureMode::Intermediate => {
                let mut inputs: Vec<f64> = Vec::new();
                let mut stage_outputs = Vec::with_capacity(net.stages().len());
                let mut evals = 0;
                for (k, stage) in net.stages().iter().enumerate() {
                    let plan = net.stage_plan(k, &inputs)?;
                    let mut angles = plan.resolve(&flat)?;
                    if let Some((Site::Stage(sk, pos), delta)) = shift {
                        if sk == k {
                            angles[pos] += delta;
                        }
                    }
                    let outs = self.stage_outputs(&plan, &stage.outputs, &angles, derive_seed(seed, &[k as u64]))?;
                    evals += outs.len() as u64;
                    inputs = outs.clone();
                    stage_outputs.push(outs);
                }
                Ok(ForwardOutput {
                    p1: inputs[0],
                    stage_outputs,
                    evals,
                })
            }
        }
    }

    /// Measured probability of every wire in `outputs` for one stage plan.
    fn stage_outputs(&self, plan: &CircuitPlan, outputs: &[usize], angles: &[f64], seed: u64) -> Result<Vec<f64>> {
        outputs
            .iter()
            .map(|&wire| {
                let p = readout_probability(&plan.with_readout(wire)?, angles, &self.sim)?;
                self.observe(p, derive_seed(seed, &[wire as u64]))
            })
            .collect()
    }

    /// Every gate occurrence reading flat trainable slot `flat`.
    pub fn param_sites(&self, net: &Network, flat: usize) -> Result<Vec<Site>> {
        match self.measure {
            MeasureMode::EndToEnd => {
                let plan = net.plan();
                let cone = plan.light_cone_mask();
                Ok(plan
                    .param_positions(flat)
                    .into_iter()
                    .filter(|&p| cone[p])
                    .map(Site::Full)
                    .collect())
            }
            MeasureMode::Intermediate => {
                let mut sites = Vec::new();
                for (k, stage) in net.stages().iter().enumerate() {
                    let dummy = vec![0.0; if k == 0 { 0 } else { stage.inputs.len() }];
                    let plan = net.stage_plan(k, &dummy)?;
                    sites.extend(plan.param_positions(flat).into_iter().map(|p| Site::Stage(k, p)));
                }
                Ok(sites)
            }
        }
    }

    /// `d p1 / d theta_flat`. Returns the derivative and the number of
    /// circuit evaluations used.
    pub fn probability_derivative(
        &self,
        net: &Network,
        params: &ModelParams,
        flat: usize,
        seed: u64,
    ) -> Result<(f64, u64)> {
        let (g, evals) = self.probability_gradient(net, params, &[flat], seed)?;
        Ok((g[0], evals))
    }

    /// `d p1 / d theta_j` for every flat slot in `which`.
    ///
    /// End to end, the two-point shift rule is applied to each occurrence of
    /// the shared angle and the results summed. With intermediate
    /// measurement the readout is a composition of stage circuits joined by
    /// `RY(pi p)` re-encodings; each stage's derivatives with respect to its
    /// angles and to its re-encoded inputs come from the shift rule, and are
    /// chained from the readout back to the first stage.
    pub fn probability_gradient(
        &self,
        net: &Network,
        params: &ModelParams,
        which: &[usize],
        seed: u64,
    ) -> Result<(Vec<f64>, u64)> {
        match self.measure {
            MeasureMode::EndToEnd => {
                let mut grad = Vec::with_capacity(which.len());
                let mut evals = 0;
                for &flat in which {
                    let mut total = 0.0;
                    for (i, site) in self.param_sites(net, flat)?.into_iter().enumerate() {
                        let tag = (flat as u64) << 32 | (i as u64) << 1;
                        let plus = self.forward(net, params, Some((site, FRAC_PI_2)), derive_seed(seed, &[tag]))?;
                        let minus =
                            self.forward(net, params, Some((site, -FRAC_PI_2)), derive_seed(seed, &[tag | 1]))?;
                        total += 0.5 * (plus.p1 - minus.p1);
                        evals += plus.evals + minus.evals;
                    }
                    grad.push(total);
                }
                Ok((grad, evals))
            }
            MeasureMode::Intermediate => self.chained_gradient(net, params, which, seed),
        }
    }

    fn chained_gradient(
        &self,
        net: &Network,
        params: &ModelParams,
        which: &[usize],
        seed: u64,
    ) -> Result<(Vec<f64>, u64)> {
        let flat = params.flat();
        let stages = net.stages();
        let mut evals = 0;
        let mut plans = Vec::with_capacity(stages.len());
        let mut inputs: Vec<f64> = Vec::new();
        for (k, stage) in stages.iter().enumerate() {
            let plan = net.stage_plan(k, &inputs)?;
            let angles = plan.resolve(&flat)?;
            inputs = self.stage_outputs(&plan, &stage.outputs, &angles, derive_seed(seed, &[k as u64]))?;
            evals += inputs.len() as u64;
            plans.push((plan, angles));
        }

        let mut grad = vec![0.0; which.len()];
        // d p1 / d (outputs of stage k)
        let mut upstream = vec![1.0];
        for k in (0..stages.len()).rev() {
            let (plan, angles) = &plans[k];
            let outputs = &stages[k].outputs;
            let mut slope = |pos: usize, tag: [u64; 3]| -> Result<f64> {
                let mut a = angles.clone();
                let mut sides = [0.0; 2];
                for (side, delta) in [FRAC_PI_2, -FRAC_PI_2].into_iter().enumerate() {
                    a[pos] = angles[pos] + delta;
                    let s = derive_seed(seed, &[k as u64, tag[0], tag[1], tag[2], side as u64]);
                    let outs = self.stage_outputs(plan, outputs, &a, s)?;
                    evals += outs.len() as u64;
                    sides[side] = outs.iter().zip(&upstream).map(|(o, u)| o * u).sum();
                }
                Ok(0.5 * (sides[0] - sides[1]))
            };
            for (g, &j) in grad.iter_mut().zip(which) {
                for (i, pos) in plan.param_positions(j).into_iter().enumerate() {
                    *g += slope(pos, [1, j as u64, i as u64])?;
                }
            }
            if k > 0 {
                let n_in = stages[k].inputs.len();
                let mut next = vec![0.0; n_in];
                for (i, d) in next.iter_mut().enumerate() {
                    let pos = plan
                        .gates()
                        .iter()
                        .position(|g| g.kind == GateKind::Ry && g.angle == AngleSource::Data(i))
                        .expect("stage plans re-encode every input");
                    // angle = pi * p
                    *d = PI * slope(pos, [2, i as u64, 0])?;
                }
                upstream = next;
            }
        }
        Ok((grad, evals))
    }
}
