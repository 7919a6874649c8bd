use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::network::{Architecture, InitScheme};
use crate::sim::DEFAULT_WIDTH_CAP;

macro_rules! named_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn name(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(Error::invalid(format!(
                        concat!("unknown ", stringify!($name), " `{}` (expected one of: {})"),
                        s,
                        [$($text),+].join(", ")
                    ))),
                }
            }
        }
    };
}

named_enum! {
    /// How parameter updates are derived.
    GradMethod {
        Sigmoid => "sigmoid",
        Shift => "shift",
        Combined => "combined",
    }
}

named_enum! {
    /// Whether layer outputs are measured and re-encoded between layers.
    MeasureMode {
        EndToEnd => "end-to-end",
        Intermediate => "intermediate",
    }
}

named_enum! {
    UpdateStrategy {
        Simultaneous => "simultaneous",
        LayerWise => "layer-wise",
    }
}

named_enum! {
    /// Exact probabilities, or binomial shot estimates of them.
    EvalMode {
        Exact => "exact",
        Sampled => "sampled",
    }
}

/// Training hyperparameters. Defaults follow the reference setup:
/// 500 epochs, batch 1000, learning rate 1e-7, 1000 shots.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub arch: Architecture,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub shots: u64,
    pub grad_method: GradMethod,
    pub measure_mode: MeasureMode,
    pub update_strategy: UpdateStrategy,
    pub eval_mode: EvalMode,
    pub threshold: f64,
    pub init: InitScheme,
    pub seed: u64,
    /// Most wires the density-matrix simulator may hold at once.
    pub width_cap: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            arch: Architecture::Conv,
            epochs: 500,
            batch_size: 1000,
            learning_rate: 1e-7,
            shots: 1000,
            grad_method: GradMethod::Shift,
            measure_mode: MeasureMode::EndToEnd,
            update_strategy: UpdateStrategy::Simultaneous,
            eval_mode: EvalMode::Exact,
            threshold: 0.5,
            init: InitScheme::Uniform,
            seed: 0,
            width_cap: DEFAULT_WIDTH_CAP,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::invalid(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::invalid("epochs must be at least 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batch size must be at least 1"));
        }
        if self.width_cap == 0 {
            return Err(Error::invalid("width cap must be at least 1"));
        }
        if self.shots == 0 {
            return Err(Error::invalid("shots must be at least 1"));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::invalid(format!(
                "threshold must lie in (0, 1), got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}
