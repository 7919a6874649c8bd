//! The classical single-kernel network on the 2x2 task.
//!
//! ```bash
//! cargo run --release -p qcnn --example classical_baseline
//! ```

use qcnn::baseline::{classical_forward, classical_train, ClassicalKernel};
use qcnn::{DatasetSource, TrainConfig};

fn main() -> qcnn::Result<()> {
    let k = ClassicalKernel::new([0.25; 4], 0.0)?;
    println!("sigma(1) = {:.4}", classical_forward(&[255; 4], &k)?);

    for learning_rate in [1e-7, 1.0] {
        let cfg = TrainConfig {
            learning_rate,
            seed: 5,
            ..Default::default()
        };
        let out = classical_train(&cfg, &DatasetSource::Fresh { seed: 5 })?;
        println!(
            "lr {learning_rate:e}: {} epochs, mse {:.5} -> {:.5}, kernel {:.4?}",
            out.curve.records.len(),
            out.curve.first().unwrap_or(f64::NAN),
            out.curve.last().unwrap_or(f64::NAN),
            out.kernel.to_flat()
        );
    }
    Ok(())
}
