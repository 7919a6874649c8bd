//! Compares end-to-end evaluation with measuring and re-encoding between
//! layers, on the 4x4 network.
//!
//! ```bash
//! cargo run --release -p qcnn --example measurement_modes
//! ```

use qcnn::dataset::gen_dataset;
use qcnn::network::init_params;
use qcnn::training::{Evaluator, MeasureMode};
use qcnn::{build_plan, Architecture, InitScheme};

fn main() -> qcnn::Result<()> {
    for arch in [Architecture::Conv, Architecture::ConvPoolPool] {
        let params = init_params(arch, 3, InitScheme::Uniform);
        for sample in gen_dataset(3, arch.side(), 3)? {
            let net = build_plan(arch, &sample.angle_image())?;
            let mut line = format!("{arch} label {}:", sample.label());
            for &measure in MeasureMode::ALL {
                let ev = Evaluator {
                    measure,
                    ..Default::default()
                };
                let out = ev.forward(&net, &params, None, 0)?;
                line += &format!(" {measure} p1={:.9} ({} evals)", out.p1, out.evals);
            }
            println!("{line}");
        }
    }

    let arch = Architecture::ConvPoolPool;
    let net = build_plan(arch, &gen_dataset(1, 4, 9)?[0].angle_image())?;
    let ev = Evaluator {
        measure: MeasureMode::Intermediate,
        ..Default::default()
    };
    let out = ev.forward(&net, &init_params(arch, 9, InitScheme::Uniform), None, 0)?;
    for (k, probs) in out.stage_outputs.iter().enumerate() {
        println!("stage {k} measured {:.4?}", probs);
    }
    Ok(())
}
