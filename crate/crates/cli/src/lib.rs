//! Experiment layer on top of `deepdefect-core`: configuration resolution
//! with per-dataset defaults, the cross-validated training pipeline, and
//! report/manifest emission. The `deepdefect` binary is a thin CLI over
//! these modules.

pub mod config;
pub mod labels;
pub mod reference;
pub mod report;
pub mod runner;
