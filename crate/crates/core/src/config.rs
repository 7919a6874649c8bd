//! Run configuration files and parameter files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::network::{Architecture, InitScheme, ModelParams};
use crate::training::TrainConfig;

/// Environment variable consulted for the seed when neither a flag nor the
/// config file sets one.
pub const SEED_ENV: &str = "QCNN_SEED";

/// Flat `key = value` TOML document. Every key is optional; unknown keys
/// are rejected.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub arch: Option<String>,
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub learning_rate: Option<f64>,
    pub shots: Option<u64>,
    pub grad_method: Option<String>,
    pub measure_mode: Option<String>,
    pub update_strategy: Option<String>,
    pub eval_mode: Option<String>,
    pub threshold: Option<f64>,
    pub init: Option<String>,
    pub seed: Option<u64>,
    /// Training set CSV. Without it every epoch draws a fresh batch.
    pub data: Option<PathBuf>,
    /// Size of a generated fixed training set.
    pub dataset_size: Option<usize>,
    pub curve_out: Option<PathBuf>,
    pub params_out: Option<PathBuf>,
    pub log_out: Option<PathBuf>,
    pub width_cap: Option<usize>,
    pub jobs: Option<usize>,
}

fn parse_field<T: FromStr<Err = Error>>(key: &str, value: &Option<String>) -> Result<Option<T>> {
    value
        .as_deref()
        .map(|v| v.parse().map_err(|e: Error| Error::Config(format!("{key}: {e}"))))
        .transpose()
}

impl RunConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfigFile::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Overlays the values present in `self` onto `cfg`.
    pub fn apply(&self, cfg: &mut TrainConfig) -> Result<()> {
        if let Some(a) = parse_field::<Architecture>("arch", &self.arch)? {
            cfg.arch = a;
        }
        if let Some(v) = parse_field("grad_method", &self.grad_method)? {
            cfg.grad_method = v;
        }
        if let Some(v) = parse_field("measure_mode", &self.measure_mode)? {
            cfg.measure_mode = v;
        }
        if let Some(v) = parse_field("update_strategy", &self.update_strategy)? {
            cfg.update_strategy = v;
        }
        if let Some(v) = parse_field("eval_mode", &self.eval_mode)? {
            cfg.eval_mode = v;
        }
        if let Some(v) = parse_field::<InitScheme>("init", &self.init)? {
            cfg.init = v;
        }
        cfg.epochs = self.epochs.unwrap_or(cfg.epochs);
        cfg.batch_size = self.batch_size.unwrap_or(cfg.batch_size);
        cfg.learning_rate = self.learning_rate.unwrap_or(cfg.learning_rate);
        cfg.shots = self.shots.unwrap_or(cfg.shots);
        cfg.threshold = self.threshold.unwrap_or(cfg.threshold);
        cfg.seed = self.seed.unwrap_or(cfg.seed);
        cfg.width_cap = self.width_cap.unwrap_or(cfg.width_cap);
        Ok(())
    }
}

/// Seed from the environment, or 0.
pub fn env_seed() -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

/// One angle per line, layer order, 17 significant digits.
pub fn params_to_text(params: &ModelParams) -> String {
    let mut out = String::new();
    for a in params.flat() {
        let _ = writeln!(out, "{a:.16e}");
    }
    out
}

pub fn parse_params(text: &str, arch: Architecture, path: &Path) -> Result<ModelParams> {
    let values = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(path, i + 1, format!("bad angle `{}`", l.trim())))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.len() != arch.n_params() {
        return Err(Error::invalid(format!(
            "{}: {} angles, {} expects {}",
            path.display(),
            values.len(),
            arch,
            arch.n_params()
        )));
    }
    ModelParams::from_flat(arch, &values)
}

pub fn save_params(params: &ModelParams, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, params_to_text(params)).map_err(|e| Error::io(path, e))
}

pub fn load_params(path: impl AsRef<Path>, arch: Architecture) -> Result<ModelParams> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_params(&text, arch, path)
}
