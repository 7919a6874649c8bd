//! Simulation and training of small quantum convolutional neural networks
//! on synthetic binary image-classification tasks.
//!
//! Circuits are described by [`sim::CircuitPlan`] and evaluated either on a
//! dense state vector or on the frontier density-matrix engine, which keeps
//! only the wires between their first and last use alive.

pub mod baseline;
pub mod config;
pub mod dataset;
pub mod encoding;
pub mod error;
pub mod network;
pub mod pgm;
pub mod sim;
pub mod training;

pub use error::{Error, Result};
pub use network::{build_plan, Architecture, InitScheme, ModelParams, Network};
pub use training::{train, DatasetSource, LossCurve, TrainConfig};
