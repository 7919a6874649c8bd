//! Shift-rule gradients against central finite differences on every
//! architecture.
//!
//! ```bash
//! cargo run --release -p qcnn --example gradient_check
//! ```

use qcnn::dataset::gen_dataset;
use qcnn::network::init_params;
use qcnn::training::{Evaluator, MeasureMode};
use qcnn::{build_plan, Architecture, InitScheme, ModelParams};

fn main() -> qcnn::Result<()> {
    let h = 1e-5;
    for arch in [
        Architecture::Conv,
        Architecture::ConvPoolPool,
        Architecture::ConvPoolConvPool,
    ] {
        let net = build_plan(arch, &gen_dataset(1, arch.side(), 4)?[0].angle_image())?;
        let params = init_params(arch, 4, InitScheme::Uniform);
        for &measure in MeasureMode::ALL {
            let ev = Evaluator {
                measure,
                ..Default::default()
            };
            let p1 = |flat: &[f64]| -> qcnn::Result<f64> {
                Ok(ev.forward(&net, &ModelParams::from_flat(arch, flat)?, None, 0)?.p1)
            };
            let mut worst: f64 = 0.0;
            for j in 0..arch.n_params() {
                let (shift, _) = ev.probability_derivative(&net, &params, j, 0)?;
                let mut up = params.flat();
                let mut down = params.flat();
                up[j] += h;
                down[j] -= h;
                let fd = (p1(&up)? - p1(&down)?) / (2.0 * h);
                worst = worst.max((shift - fd).abs());
            }
            println!("{arch} {measure}: max |shift - finite difference| = {worst:.2e}");
        }
    }
    Ok(())
}
