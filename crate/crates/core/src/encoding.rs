//! Qubit Lattice encoding: one wire per pixel, rotated by an angle
//! proportional to intensity.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::sim::{AngleSource, GateOp};

pub const MAX_INTENSITY: u8 = 255;

/// `pi * p / 255`.
pub fn pixel_to_angle(p: u32) -> Result<f64> {
    if p > MAX_INTENSITY as u32 {
        return Err(Error::invalid(format!("pixel intensity {p} outside 0..=255")));
    }
    Ok(PI * p as f64 / MAX_INTENSITY as f64)
}

/// `pi * p`: re-encodes a measured probability as an input angle, with
/// probability 1 playing the role of intensity 255.
pub fn prob_to_angle(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("probability {p} outside [0, 1]")));
    }
    Ok(PI * p)
}

/// Row-major grid of encoding angles, each in `[0, pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleImage {
    width: usize,
    height: usize,
    angles: Vec<f64>,
}

impl AngleImage {
    pub fn new(width: usize, height: usize, angles: Vec<f64>) -> Result<Self> {
        if angles.len() != width * height {
            return Err(Error::invalid(format!(
                "{} angles for a {width}x{height} image",
                angles.len()
            )));
        }
        if let Some(a) = angles.iter().find(|a| !(0.0..=PI).contains(*a)) {
            return Err(Error::invalid(format!("angle {a} outside [0, pi]")));
        }
        Ok(AngleImage { width, height, angles })
    }

    pub fn from_pixels(width: usize, height: usize, pixels: &[u8]) -> Result<Self> {
        let angles = pixels
            .iter()
            .map(|&p| pixel_to_angle(p as u32))
            .collect::<Result<Vec<_>>>()?;
        AngleImage::new(width, height, angles)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.angles[row * self.width + col]
    }
}

/// One `RY` per pixel, pixel `k` (row-major) on wire `k`, reading data slot
/// `k`.
pub fn encode_image(img: &AngleImage) -> Vec<GateOp> {
    (0..img.angles.len())
        .map(|k| GateOp::ry(k, AngleSource::Data(k)))
        .collect()
}
