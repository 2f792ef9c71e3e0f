//! Experiment configuration, sweeps and exports.

pub mod config;
