//! Convolution/pooling circuit construction for the three architectures.
//!
//! Each 2x2 window (stride 2) gets four trainable `RX` rotations followed by
//! the fixed entangler: `CZ`,`CY` from wire 1 into wire 0 and from wire 3
//! into wire 2, then `CZ`,`CY` from wire 2 into wire 0. Wire 0 of the
//! window is its representative. Pooling applies `CX` from each odd
//! representative into its even neighbour. Two-wire gates always target the
//! lower-indexed wire and are controlled by the higher one.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::encoding::{encode_image, prob_to_angle, AngleImage};
use crate::error::{Error, Result};
use crate::pgm::GrayImage;
use crate::sim::plan::ANGLES_PER_LAYER;
use crate::sim::{pure_run, schedule_depth_first, AngleSource, CircuitPlan, GateKind, GateOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Architecture {
    /// One convolution on a 2x2 image.
    Conv,
    /// Convolution then two poolings on a 4x4 image.
    ConvPoolPool,
    /// Convolution, pooling, convolution, pooling on an 8x8 image.
    ConvPoolConvPool,
}

impl Architecture {
    pub const ALL: [Architecture; 3] = [
        Architecture::Conv,
        Architecture::ConvPoolPool,
        Architecture::ConvPoolConvPool,
    ];

    pub fn side(self) -> usize {
        match self {
            Architecture::Conv => 2,
            Architecture::ConvPoolPool => 4,
            Architecture::ConvPoolConvPool => 8,
        }
    }

    pub fn n_wires(self) -> usize {
        self.side() * self.side()
    }

    pub fn conv_layers(self) -> usize {
        match self {
            Architecture::ConvPoolConvPool => 2,
            _ => 1,
        }
    }

    pub fn n_params(self) -> usize {
        self.conv_layers() * ANGLES_PER_LAYER
    }

    pub fn stage_kinds(self) -> Vec<StageKind> {
        use StageKind::*;
        match self {
            Architecture::Conv => vec![Conv { layer: 0 }],
            Architecture::ConvPoolPool => vec![Conv { layer: 0 }, Pool, Pool],
            Architecture::ConvPoolConvPool => {
                vec![Conv { layer: 0 }, Pool, Conv { layer: 1 }, Pool]
            }
        }
    }

    pub fn for_side(side: usize) -> Result<Self> {
        Architecture::ALL
            .into_iter()
            .find(|a| a.side() == side)
            .ok_or_else(|| Error::invalid(format!("no architecture for {side}x{side} images")))
    }

    pub fn name(self) -> &'static str {
        match self {
            Architecture::Conv => "conv",
            Architecture::ConvPoolPool => "conv-pool-pool",
            Architecture::ConvPoolConvPool => "conv-pool-conv-pool",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Architecture::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            Error::invalid(format!(
                "unknown architecture `{s}` (expected conv, conv-pool-pool or conv-pool-conv-pool)"
            ))
        })
    }
}

/// Four shared kernel angles `(a00, a01, a10, a11)` per convolution layer.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    layers: Vec<[f64; ANGLES_PER_LAYER]>,
}

impl ModelParams {
    pub fn new(layers: Vec<[f64; ANGLES_PER_LAYER]>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::invalid("a model needs at least one layer"));
        }
        if layers.iter().flatten().any(|a| !a.is_finite()) {
            return Err(Error::invalid("model angles must be finite"));
        }
        Ok(ModelParams { layers })
    }

    pub fn zeros(arch: Architecture) -> Self {
        ModelParams {
            layers: vec![[0.0; ANGLES_PER_LAYER]; arch.conv_layers()],
        }
    }

    pub fn from_flat(arch: Architecture, flat: &[f64]) -> Result<Self> {
        if flat.len() != arch.n_params() {
            return Err(Error::invalid(format!(
                "{arch} takes {} angles, got {}",
                arch.n_params(),
                flat.len()
            )));
        }
        ModelParams::new(
            flat.chunks_exact(ANGLES_PER_LAYER)
                .map(|c| [c[0], c[1], c[2], c[3]])
                .collect(),
        )
    }

    pub fn n_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, k: usize) -> &[f64; ANGLES_PER_LAYER] {
        &self.layers[k]
    }

    pub fn layer_mut(&mut self, k: usize) -> &mut [f64; ANGLES_PER_LAYER] {
        &mut self.layers[k]
    }

    pub fn flat(&self) -> Vec<f64> {
        self.layers.iter().flatten().copied().collect()
    }

    pub fn matches(&self, arch: Architecture) -> bool {
        self.layers.len() == arch.conv_layers()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitScheme {
    Zeros,
    /// Uniform on `[0, pi)`.
    Uniform,
}

impl FromStr for InitScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zeros" => Ok(InitScheme::Zeros),
            "uniform" => Ok(InitScheme::Uniform),
            _ => Err(Error::invalid(format!("unknown init scheme `{s}` (zeros, uniform)"))),
        }
    }
}

pub fn init_params(arch: Architecture, seed: u64, scheme: InitScheme) -> ModelParams {
    match scheme {
        InitScheme::Zeros => ModelParams::zeros(arch),
        InitScheme::Uniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let flat: Vec<f64> = (0..arch.n_params()).map(|_| rng.random_range(0.0..PI)).collect();
            ModelParams::from_flat(arch, &flat).expect("sized for arch")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageKind {
    Conv { layer: usize },
    Pool,
}

/// One layer of the network: the wires it consumes, its gates, and the
/// representative wires it hands to the next layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub kind: StageKind,
    pub inputs: Vec<usize>,
    pub gates: Vec<GateOp>,
    pub outputs: Vec<usize>,
}

/// The gate block for one kernel position on `w = [w00, w01, w10, w11]`.
pub fn kernel_block(w: [usize; 4], layer: usize) -> Vec<GateOp> {
    let mut g: Vec<GateOp> = (0..4)
        .map(|i| GateOp::rx(w[i], AngleSource::Param { layer, index: i }))
        .collect();
    for (t, c) in [(w[0], w[1]), (w[2], w[3]), (w[0], w[2])] {
        g.push(GateOp::fixed(GateKind::PaperCz, t, c));
        g.push(GateOp::fixed(GateKind::PaperCy, t, c));
    }
    g
}

fn conv_stage(inputs: &[usize], groups: &[[usize; 4]], layer: usize) -> Stage {
    Stage {
        kind: StageKind::Conv { layer },
        inputs: inputs.to_vec(),
        gates: groups.iter().flat_map(|&w| kernel_block(w, layer)).collect(),
        outputs: groups.iter().map(|w| w[0]).collect(),
    }
}

fn pool_stage(reps: &[usize]) -> Stage {
    let gates = reps
        .chunks_exact(2)
        .map(|p| GateOp::fixed(GateKind::PaperCx, p[0], p[1]))
        .collect();
    Stage {
        kind: StageKind::Pool,
        inputs: reps.to_vec(),
        gates,
        outputs: reps.iter().step_by(2).copied().collect(),
    }
}

/// Wires of each 2x2 window of a `side`-wide row-major grid, windows in
/// row-major order.
pub fn image_windows(width: usize, height: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for r in (0..height).step_by(2) {
        for c in (0..width).step_by(2) {
            let top = r * width + c;
            let bottom = (r + 1) * width + c;
            out.push([top, top + 1, bottom, bottom + 1]);
        }
    }
    out
}

/// A built network for one input image.
#[derive(Debug, Clone)]
pub struct Network {
    arch: Architecture,
    image: Vec<f64>,
    stages: Vec<Stage>,
    plan: CircuitPlan,
}

impl Network {
    pub fn arch(&self) -> Architecture {
        self.arch
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    /// The end-to-end circuit (encoding, every layer, readout on wire 0),
    /// ordered depth-first for the frontier engine.
    pub fn plan(&self) -> &CircuitPlan {
        &self.plan
    }

    /// Wires measurable at each stage's output, outermost last.
    pub fn layer_boundaries(&self) -> Vec<Vec<usize>> {
        self.stages.iter().map(|s| s.outputs.clone()).collect()
    }

    /// Stand-alone circuit for stage `k`. Stage 0 starts from the encoded
    /// image; later stages re-encode `input_probs` (one per input wire) as
    /// `RY(pi * p)`. Readout is the stage's first output.
    pub fn stage_plan(&self, k: usize, input_probs: &[f64]) -> Result<CircuitPlan> {
        let stage = self
            .stages
            .get(k)
            .ok_or_else(|| Error::invalid(format!("stage {k} out of range")))?;
        let n = self.arch.n_wires();
        if k == 0 {
            let mut gates = encode_image_wires(n);
            gates.extend_from_slice(&stage.gates);
            return CircuitPlan::new(n, schedule_depth_first(&gates), stage.outputs[0], self.image.clone());
        }
        if input_probs.len() != stage.inputs.len() {
            return Err(Error::invalid(format!(
                "stage {k} takes {} inputs, got {}",
                stage.inputs.len(),
                input_probs.len()
            )));
        }
        let data = input_probs
            .iter()
            .map(|&p| prob_to_angle(p))
            .collect::<Result<Vec<_>>>()?;
        let mut gates: Vec<GateOp> = stage
            .inputs
            .iter()
            .enumerate()
            .map(|(i, &w)| GateOp::ry(w, AngleSource::Data(i)))
            .collect();
        gates.extend_from_slice(&stage.gates);
        CircuitPlan::new(n, schedule_depth_first(&gates), stage.outputs[0], data)
    }
}

fn encode_image_wires(n: usize) -> Vec<GateOp> {
    (0..n).map(|k| GateOp::ry(k, AngleSource::Data(k))).collect()
}

/// Builds the circuit of `arch` for `img`. Trainable angles stay symbolic
/// and are bound at evaluation time.
pub fn build_plan(arch: Architecture, img: &AngleImage) -> Result<Network> {
    let side = arch.side();
    if img.width() != side || img.height() != side {
        return Err(Error::invalid(format!(
            "{arch} expects a {side}x{side} image, got {}x{}",
            img.width(),
            img.height()
        )));
    }
    let all: Vec<usize> = (0..side * side).collect();
    let mut stages = Vec::new();
    let mut reps = all.clone();
    for kind in arch.stage_kinds() {
        let stage = match kind {
            StageKind::Conv { layer } => {
                let groups: Vec<[usize; 4]> = if layer == 0 {
                    image_windows(side, side)
                } else {
                    reps.chunks_exact(4).map(|c| [c[0], c[1], c[2], c[3]]).collect()
                };
                conv_stage(&reps, &groups, layer)
            }
            StageKind::Pool => pool_stage(&reps),
        };
        reps = stage.outputs.clone();
        stages.push(stage);
    }
    debug_assert_eq!(reps, vec![0]);

    let mut gates = encode_image(img);
    for s in &stages {
        gates.extend_from_slice(&s.gates);
    }
    let plan = CircuitPlan::new(side * side, schedule_depth_first(&gates), 0, img.angles().to_vec())?;
    Ok(Network {
        arch,
        image: img.angles().to_vec(),
        stages,
        plan,
    })
}

/// Runs the single-window kernel circuit on every non-overlapping 2x2 window
/// of `img` and returns the readout probabilities as a half-size grid
/// (row-major, `(width/2) x (height/2)`).
pub fn conv_feature_map(img: &GrayImage, params: &[f64; ANGLES_PER_LAYER]) -> Result<Vec<f64>> {
    let (w, h) = (img.width(), img.height());
    if w == 0 || h == 0 || w % 2 != 0 || h % 2 != 0 {
        return Err(Error::invalid(format!("feature map needs even sides, got {w}x{h}")));
    }
    let mut gates = encode_image_wires(4);
    gates.extend(kernel_block([0, 1, 2, 3], 0));
    let px = img.pixels();
    image_windows(w, h)
        .into_iter()
        .map(|win| {
            let pixels: Vec<u8> = win.iter().map(|&i| px[i]).collect();
            let angles = AngleImage::from_pixels(2, 2, &pixels)?;
            let plan = CircuitPlan::new(4, gates.clone(), 0, angles.angles().to_vec())?;
            pure_run(&plan, &plan.resolve(params)?)
        })
        .collect()
}
