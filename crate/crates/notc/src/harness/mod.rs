//! Seeded multi-run experiment driver and result serialization.
//!
//! The harness wires a [`Learner`](crate::learner::Learner) to a
//! [`MountainCar`](crate::envs::MountainCar), executes independent seeded
//! runs in parallel, aggregates best-of-window learning curves, and reads
//! and writes the CSV artifacts consumed by the CLI.

pub mod aggregate;
pub mod config;
pub mod csv;
pub mod experiment;
pub mod snapshot;

pub use aggregate::{aggregate, update_decay_report, CurvePoint};
pub use config::{EnvKind, ExperimentConfig, Overrides};
pub use experiment::{run_experiment, run_single, run_single_full, weather_series, TrialRecord};
pub use snapshot::render_snapshot;
