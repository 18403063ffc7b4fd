//! Simulation and monitoring of dynamic networks.
//!
//! Generators ([`dlsm`], [`ddcsbm`]) produce sequences of snapshots with
//! temporal correlation, optionally with a planted [`anomaly`]. Summary
//! [`stats`] are monitored with control charts ([`monitor`]) and scored
//! against the anomaly window ([`eval`]). [`scenario`] ties these together
//! into reproducible Monte Carlo experiments.

pub mod anomaly;
pub mod ddcsbm;
pub mod dlsm;
pub mod edgelist;
pub mod error;
pub mod eval;
pub mod monitor;
pub mod network;
pub mod rng;
pub mod scenario;
pub mod stats;

pub use anomaly::{AnomalyFamily, AnomalySpec, Profile};
pub use error::ConfigError;
pub use network::{DynamicNetwork, EdgeKind, Snapshot};
pub use stats::{StatKind, StatSeries};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/networks.md")]
    mod networks {}
    #[doc = include_str!("../../../book/src/generators.md")]
    mod generators {}
    #[doc = include_str!("../../../book/src/anomalies.md")]
    mod anomalies {}
    #[doc = include_str!("../../../book/src/statistics.md")]
    mod statistics {}
    #[doc = include_str!("../../../book/src/monitoring.md")]
    mod monitoring {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/scenarios.md")]
    mod scenarios {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
