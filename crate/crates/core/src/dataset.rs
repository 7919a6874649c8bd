//! Two-class synthetic images: noise (label 0) versus a single flat color
//! (label 1).
//!
//! All randomness comes from `ChaCha8Rng` seeded with `seed_from_u64`, so a
//! `(n, side, seed)` triple names one dataset on every platform.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::encoding::AngleImage;
use crate::error::{Error, Result};

pub const VALID_SIDES: [usize; 3] = [2, 4, 8];

pub fn check_side(side: usize) -> Result<()> {
    if VALID_SIDES.contains(&side) {
        Ok(())
    } else {
        Err(Error::invalid(format!("image side {side} is not one of 2, 4, 8")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabeledImage {
    side: usize,
    pixels: Vec<u8>,
    label: u8,
}

impl LabeledImage {
    pub fn new(side: usize, pixels: Vec<u8>, label: u8) -> Result<Self> {
        check_side(side)?;
        if pixels.len() != side * side {
            return Err(Error::invalid(format!(
                "{} pixels for a {side}x{side} image",
                pixels.len()
            )));
        }
        match label {
            0 => {}
            1 => {
                if pixels.iter().any(|&p| p != pixels[0]) {
                    return Err(Error::invalid("label 1 requires a single-colored image"));
                }
            }
            other => return Err(Error::invalid(format!("label {other} is not 0 or 1"))),
        }
        Ok(LabeledImage { side, pixels, label })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn label(&self) -> u8 {
        self.label
    }

    pub fn angle_image(&self) -> AngleImage {
        AngleImage::from_pixels(self.side, self.side, &self.pixels).expect("u8 pixels are always in range")
    }
}

/// Draws one sample: a fair label, then either i.i.d. uniform pixels
/// (label 0, redrawn in the rare case all pixels coincide) or one uniform
/// intensity copied to every pixel (label 1).
pub fn gen_sample<R: Rng + ?Sized>(side: usize, rng: &mut R) -> Result<LabeledImage> {
    check_side(side)?;
    let n = side * side;
    let label = rng.random_range(0..2u8);
    let pixels = if label == 1 {
        vec![rng.random::<u8>(); n]
    } else {
        loop {
            let px: Vec<u8> = (0..n).map(|_| rng.random::<u8>()).collect();
            if px.iter().any(|&p| p != px[0]) {
                break px;
            }
        }
    };
    LabeledImage::new(side, pixels, label)
}

pub fn gen_dataset(n: usize, side: usize, seed: u64) -> Result<Vec<LabeledImage>> {
    if n == 0 {
        return Err(Error::invalid("dataset size must be at least 1"));
    }
    check_side(side)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| gen_sample(side, &mut rng)).collect()
}

/// Fraction of samples carrying label 1.
pub fn class_balance(samples: &[LabeledImage]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().filter(|s| s.label == 1).count() as f64 / samples.len() as f64
}

fn header(k: usize) -> String {
    let mut h = String::from("label");
    for i in 0..k {
        let _ = write!(h, ",p{i}");
    }
    h
}

/// CSV text: header `label,p0,...,p{k-1}`, one sample per `\n`-terminated
/// line.
pub fn to_csv(samples: &[LabeledImage]) -> Result<String> {
    let first = samples
        .first()
        .ok_or_else(|| Error::invalid("cannot write an empty dataset"))?;
    let k = first.pixels.len();
    let mut out = header(k);
    out.push('\n');
    for s in samples {
        if s.pixels.len() != k {
            return Err(Error::invalid("dataset mixes image sizes"));
        }
        let _ = write!(out, "{}", s.label);
        for p in &s.pixels {
            let _ = write!(out, ",{p}");
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_csv(text: &str, path: &Path) -> Result<Vec<LabeledImage>> {
    let mut lines = text.lines().enumerate();
    let (_, head) = lines.next().ok_or_else(|| Error::parse(path, 1, "missing header"))?;
    let cols = head.split(',').count();
    let k = cols.saturating_sub(1);
    let side = (k as f64).sqrt().round() as usize;
    if side * side != k || check_side(side).is_err() || head != header(k) {
        return Err(Error::parse(
            path,
            1,
            format!("header must be `label,p0,...,p{{k-1}}` with k in 4, 16, 64; got `{head}`"),
        ));
    }

    let mut out = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected {cols} columns, found {}", fields.len()),
            ));
        }
        let label: u8 = fields[0]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad label `{}`", fields[0])))?;
        let pixels = fields[1..]
            .iter()
            .map(|f| {
                f.parse::<u32>()
                    .ok()
                    .filter(|&v| v <= 255)
                    .map(|v| v as u8)
                    .ok_or_else(|| Error::parse(path, lineno, format!("pixel `{f}` is not an integer in 0..=255")))
            })
            .collect::<Result<Vec<u8>>>()?;
        let sample = LabeledImage::new(side, pixels, label).map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        out.push(sample);
    }
    Ok(out)
}

pub fn save_dataset(samples: &[LabeledImage], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_csv(samples)?).map_err(|e| Error::io(path, e))
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Vec<LabeledImage>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text, path)
}
