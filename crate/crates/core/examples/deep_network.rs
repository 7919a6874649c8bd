//! Two-layer network on 8x8 images under both update strategies.
//!
//! ```bash
//! cargo run --release -p qcnn --example deep_network -- 2 20
//! ```
//! Arguments: epochs (default 2), batch size (default 20).

use std::time::Instant;

use qcnn::training::UpdateStrategy;
use qcnn::{train, Architecture, DatasetSource, TrainConfig};

fn main() -> qcnn::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<usize>().expect("numeric argument"));
    let epochs = args.next().unwrap_or(2);
    let batch_size = args.next().unwrap_or(20);

    let net = qcnn::build_plan(
        Architecture::ConvPoolConvPool,
        &qcnn::dataset::gen_dataset(1, 8, 0)?[0].angle_image(),
    )?;
    println!(
        "{} gates on {} wires, peak frontier width {}",
        net.plan().gates().len(),
        net.plan().n_wires(),
        net.plan().peak_width()
    );

    for &update_strategy in UpdateStrategy::ALL {
        let cfg = TrainConfig {
            arch: Architecture::ConvPoolConvPool,
            epochs,
            batch_size,
            update_strategy,
            seed: 11,
            ..Default::default()
        };
        let started = Instant::now();
        let out = train(&cfg, &DatasetSource::Fresh { seed: 11 })?;
        println!(
            "{update_strategy}: final mse {:.6}, {} evaluations, {:.1?}",
            out.curve.last().unwrap_or(f64::NAN),
            out.curve.total_evals(),
            started.elapsed()
        );
    }
    Ok(())
}
