//! Pixel intensities to rotation angles, and the resulting single-wire
//! readout probabilities.
//!
//! ```bash
//! cargo run -p qcnn --example encoding
//! ```

use qcnn::encoding::{encode_image, pixel_to_angle, prob_to_angle, AngleImage};
use qcnn::sim::{pure_run, CircuitPlan};

fn main() -> qcnn::Result<()> {
    for px in [0u32, 125, 200, 255] {
        let theta = pixel_to_angle(px)?;
        println!(
            "pixel {px:>3} -> {theta:.6} rad, P(1) = {:.6}",
            (theta / 2.0).sin().powi(2)
        );
    }
    println!("probability 0.25 re-encodes as {:.6} rad", prob_to_angle(0.25)?);

    let img = AngleImage::from_pixels(2, 2, &[125, 200, 0, 255])?;
    let gates = encode_image(&img);
    for wire in 0..4 {
        let plan = CircuitPlan::new(4, gates.clone(), wire, img.angles().to_vec())?;
        println!("wire {wire}: P(1) = {:.6}", pure_run(&plan, &plan.resolve(&[])?)?);
    }
    Ok(())
}
