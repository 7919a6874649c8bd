//! Runs the trainable 2x2 kernel circuit over every window of a grayscale
//! image and writes the half-resolution feature map as a PGM.
//!
//! ```bash
//! cargo run --release -p qcnn --example feature_map -- in.pgm out.pgm
//! ```
//! Without arguments a 28x28 synthetic digit-like image is used.

use qcnn::network::conv_feature_map;
use qcnn::pgm::GrayImage;

fn synthetic() -> qcnn::Result<GrayImage> {
    let (w, h) = (28, 28);
    let pixels = (0..w * h)
        .map(|i| {
            let (x, y) = ((i % w) as f64 - 13.5, (i / w) as f64 - 13.5);
            let r = (x * x + y * y).sqrt();
            if (7.0..10.0).contains(&r) {
                255
            } else {
                0
            }
        })
        .collect();
    GrayImage::new(w, h, pixels)
}

fn main() -> qcnn::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let img = match args.first() {
        Some(p) => GrayImage::load(p)?,
        None => synthetic()?,
    };
    let kernel = [0.4, 1.1, 2.0, 2.9];
    let probs = conv_feature_map(&img, &kernel)?;
    let map = GrayImage::from_probabilities(img.width() / 2, img.height() / 2, &probs)?;
    println!("{}x{} -> {}x{}", img.width(), img.height(), map.width(), map.height());
    for row in map.pixels().chunks(map.width()) {
        let line: String = row.iter().map(|&v| if v > 127 { '#' } else { '.' }).collect();
        println!("{line}");
    }
    if let Some(out) = args.get(1) {
        map.save(out)?;
        println!("wrote {out}");
    }
    Ok(())
}
