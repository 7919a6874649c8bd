//! Trains the single-layer network on 2x2 images with each gradient rule.
//!
//! ```bash
//! cargo run --release -p qcnn --example train_conv -- 100 200
//! ```
//! Arguments: epochs (default 50), batch size (default 200).

use qcnn::dataset::gen_dataset;
use qcnn::training::{evaluate, GradMethod};
use qcnn::{train, DatasetSource, TrainConfig};

fn main() -> qcnn::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<usize>().expect("numeric argument"));
    let epochs = args.next().unwrap_or(50);
    let batch_size = args.next().unwrap_or(200);
    let train_set = gen_dataset(batch_size, 2, 1)?;
    let test_set = gen_dataset(1000, 2, 2)?;

    for &grad_method in GradMethod::ALL {
        let cfg = TrainConfig {
            epochs,
            batch_size,
            grad_method,
            learning_rate: 0.5,
            seed: 1,
            ..Default::default()
        };
        let out = train(&cfg, &DatasetSource::Fixed(train_set.clone()))?;
        let report = evaluate(&cfg, &out.params, &test_set)?;
        println!(
            "{grad_method:>9}: mse {:.5} -> {:.5}, held-out mse {:.5}, accuracy {:.3}, params {:.4?}",
            out.curve.first().unwrap_or(f64::NAN),
            out.curve.last().unwrap_or(f64::NAN),
            report.mse,
            report.accuracy,
            out.params.flat()
        );
    }
    Ok(())
}
