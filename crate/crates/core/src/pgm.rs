//! Plain (ASCII, `P2`) portable graymap images.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::invalid(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(GrayImage { width, height, pixels })
    }

    /// Maps probabilities in `[0, 1]` to intensities `round(255 p)`.
    pub fn from_probabilities(width: usize, height: usize, probs: &[f64]) -> Result<Self> {
        let pixels = probs
            .iter()
            .map(|&p| {
                if (0.0..=1.0).contains(&p) {
                    Ok((p * 255.0).round() as u8)
                } else {
                    Err(Error::invalid(format!("probability {p} outside [0, 1]")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        GrayImage::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn to_pgm(&self) -> String {
        let mut out = format!("P2\n{} {}\n255\n", self.width, self.height);
        for row in self.pixels.chunks(self.width.max(1)) {
            let line: Vec<String> = row.iter().map(u8::to_string).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    /// Parses a `P2` file. Intensities are rescaled to 0..=255 when the
    /// declared maximum differs.
    pub fn parse_pgm(text: &str, path: &Path) -> Result<Self> {
        // tokens with their line numbers, comments stripped
        let mut tokens = text.lines().enumerate().flat_map(|(i, line)| {
            let body = line.split('#').next().unwrap_or("");
            body.split_whitespace().map(move |t| (i + 1, t))
        });
        let mut next = |what: &str| {
            tokens
                .next()
                .ok_or_else(|| Error::parse(path, text.lines().count().max(1), format!("missing {what}")))
        };
        let (line, magic) = next("magic number")?;
        if magic != "P2" {
            return Err(Error::parse(
                path,
                line,
                format!("expected magic `P2`, found `{magic}`"),
            ));
        }
        let mut number = |what: &str| -> Result<(usize, u32)> {
            let (line, tok) = next(what)?;
            tok.parse::<u32>()
                .map(|v| (line, v))
                .map_err(|_| Error::parse(path, line, format!("bad {what} `{tok}`")))
        };
        let (_, width) = number("width")?;
        let (_, height) = number("height")?;
        let (line, maxval) = number("maximum value")?;
        if maxval == 0 || maxval > 65535 {
            return Err(Error::parse(path, line, format!("maximum value {maxval} out of range")));
        }
        let n = width as usize * height as usize;
        let mut pixels = Vec::with_capacity(n);
        for _ in 0..n {
            let (line, v) = number("pixel")?;
            if v > maxval {
                return Err(Error::parse(path, line, format!("pixel {v} exceeds maximum {maxval}")));
            }
            let scaled = if maxval == 255 {
                v as u8
            } else {
                ((v as f64) * 255.0 / maxval as f64).round() as u8
            };
            pixels.push(scaled);
        }
        GrayImage::new(width as usize, height as usize, pixels)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        GrayImage::parse_pgm(&text, path)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_pgm()).map_err(|e| Error::io(path, e))
    }
}
