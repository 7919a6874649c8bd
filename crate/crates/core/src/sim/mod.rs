//! Gate set, pure-state oracle, frontier engine and shot sampling.

pub mod frontier;
pub mod gates;
mod kernel;
pub mod plan;
pub mod sampling;
pub mod state;

pub use frontier::{frontier_run, FrontierSim, FrontierState, DEFAULT_WIDTH_CAP};
pub use gates::{fixed_gate_matrix, rotation_matrix, rx_matrix, ry_matrix, GateKind, Mat2, Mat4};
pub use plan::{schedule_depth_first, AngleSource, CircuitPlan, GateOp};
pub use sampling::{sample_shots, sampled_probability};
pub use state::{pure_run, PureState};

use crate::error::Result;

/// Plans at most this wide (after light-cone restriction) are evaluated on a
/// dense state vector; wider ones go through the frontier engine.
pub const PURE_STATE_CUTOFF: usize = 8;

/// Exact readout probability, dropping gates outside the readout's light
/// cone and choosing the cheaper engine. Agrees with [`frontier_run`] to
/// rounding.
pub fn readout_probability(plan: &CircuitPlan, angles: &[f64], sim: &FrontierSim) -> Result<f64> {
    let mask = plan.light_cone_mask();
    let (small, kept) = plan.restrict(&mask, angles)?;
    if small.n_wires() <= PURE_STATE_CUTOFF {
        pure_run(&small, &kept)
    } else {
        sim.run(&small, &kept)
    }
}
