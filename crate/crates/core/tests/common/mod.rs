#![allow(dead_code)]

use qcnn::dataset::gen_dataset;
use qcnn::network::init_params;
use qcnn::training::{batch_gradient, derive_seed, Evaluator, Loss, MeasureMode};
use qcnn::{build_plan, Architecture, InitScheme, ModelParams, Network};

pub const FD_STEP: f64 = 1e-4;
pub const FD_REL_TOL: f64 = 1e-5;

/// Largest `|shift - fd| / (tol * max|fd| + 1e-12)` over `draws` random
/// parameter vectors; the check passes when this is at most 1.
pub fn worst_gradient_ratio(arch: Architecture, measure: MeasureMode, loss: Loss, draws: u64, batch: usize) -> f64 {
    let ev = Evaluator {
        measure,
        ..Default::default()
    };
    let mut worst: f64 = 0.0;
    for draw in 0..draws {
        let samples = gen_dataset(batch, arch.side(), derive_seed(17, &[draw])).unwrap();
        let nets: Vec<Network> = samples
            .iter()
            .map(|s| build_plan(arch, &s.angle_image()).unwrap())
            .collect();
        let labels: Vec<f64> = samples.iter().map(|s| s.label() as f64).collect();
        let params = init_params(arch, derive_seed(29, &[draw]), InitScheme::Uniform);
        let loss_at = |flat: &[f64]| -> f64 {
            let p = ModelParams::from_flat(arch, flat).unwrap();
            let p1s: Vec<f64> = nets.iter().map(|n| ev.forward(n, &p, None, 0).unwrap().p1).collect();
            loss.value(&p1s, &labels).unwrap()
        };
        let p1s: Vec<f64> = nets
            .iter()
            .map(|n| ev.forward(n, &params, None, 0).unwrap().p1)
            .collect();
        let which: Vec<usize> = (0..arch.n_params()).collect();
        let (grad, _) = batch_gradient(&ev, &nets, &labels, &params, &p1s, loss, &which, 0).unwrap();

        let base = params.flat();
        let fd: Vec<f64> = which
            .iter()
            .map(|&j| {
                let mut up = base.clone();
                let mut down = base.clone();
                up[j] += FD_STEP;
                down[j] -= FD_STEP;
                (loss_at(&up) - loss_at(&down)) / (2.0 * FD_STEP)
            })
            .collect();
        let scale = fd.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (g, f) in grad.iter().zip(&fd) {
            worst = worst.max((g - f).abs() / (FD_REL_TOL * scale + 1e-12));
        }
    }
    worst
}

pub fn draws_for(arch: Architecture, measure: MeasureMode) -> u64 {
    match (arch, measure) {
        (Architecture::ConvPoolConvPool, MeasureMode::Intermediate) => 10,
        _ => 50,
    }
}
