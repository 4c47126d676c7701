//! Intention mining from incident-management event logs.
//!
//! The pipeline: parse a raw event log into cases, learn a discrete-emission
//! HMM of user strategies (K-Means initialization, then Baum-Welch), read
//! the strategy table off the emission matrix, prune the transition matrix
//! into a pseudo-map of sub-intentions, cluster sub-intentions into
//! overlapping intentions, and report the map's network statistics.
//!
//! Every stage is a pure function over immutable inputs and every stochastic
//! step is a deterministic function of its seed.

pub mod clustering;
pub mod config;
pub mod error;
pub mod eventlog;
pub mod hmm;
pub mod kmeans;
pub mod mapbuilder;
pub mod metrics;
pub mod strategy;
pub mod synthgen;

pub use config::PipelineConfig;
pub use error::{Error, Result};
