//! Generates the flat-versus-noisy image dataset and writes it as CSV.
//!
//! ```bash
//! cargo run -p qcnn --example generate_dataset -- /tmp/d.csv
//! ```

use qcnn::dataset::{class_balance, gen_dataset, load_dataset, save_dataset};

fn main() -> qcnn::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "dataset.csv".into());
    for side in [2, 4, 8] {
        let data = gen_dataset(1000, side, 42)?;
        println!(
            "side {side}: {} samples, fraction labelled 1 = {:.3}",
            data.len(),
            class_balance(&data)
        );
    }
    let data = gen_dataset(10, 2, 42)?;
    for s in &data[..4] {
        println!("  label {} pixels {:?}", s.label(), s.pixels());
    }
    save_dataset(&data, &out)?;
    assert_eq!(load_dataset(&out)?, data);
    println!("wrote {out}");
    Ok(())
}
