//! Novelty-Organizing Team of Classifiers (NOTC).
//!
//! NOTC learns continuous control tasks by dividing the input space with a
//! small Novelty Map and attaching a subpopulation of fixed-topology neural
//! networks to each map cell. During a trial the first individual activated
//! per cell forms a team; teams collect rewards, the best teams enter a hall
//! of fame, and individual fitness is smoothed toward a discounted estimate
//! of future reward. Periodically a generational step rebuilds each cell's
//! population from hall-of-fame members, the fittest survivors, and fresh
//! individuals bred by differential evolution or copying.
//!
//! The crate ships the algorithm (`novelty_map`, `genome`, `population`,
//! `learner`), the continuous-action mountain-car benchmarks it is evaluated
//! on (`envs`), and a seeded, CSV-producing experiment harness with a CLI
//! (`harness`).

pub mod envs;
pub mod error;
pub mod genome;
pub mod harness;
pub mod learner;
pub mod novelty_map;
pub mod population;

pub use error::{Error, Result};
