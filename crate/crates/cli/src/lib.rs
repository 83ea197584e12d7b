//! Sweeps, configuration and verification behind the `ctc` binary.

pub mod config;
pub mod sweep;
pub mod verify;
