//! Forward passes, gradients and the epoch loop.

pub mod activation;
pub mod config;
pub mod forward;
pub mod gradient;
pub mod run;

pub use activation::{sigmoid, sigmoid_deriv, Activation};
pub use config::{EvalMode, GradMethod, MeasureMode, TrainConfig, UpdateStrategy};
pub use forward::{derive_seed, Evaluator, ForwardOutput, Prediction, Site};
pub use gradient::{
    batch_gradient, grad_sigmoid_update, mse, prediction_errors, shift_rule, sigmoid_rule_scalar, Loss,
};
pub use run::{evaluate, train, train_from, DatasetSource, EpochRecord, EvalReport, LossCurve, TrainOutcome};
