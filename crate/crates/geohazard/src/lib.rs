//! Experiment runner for hazard-stopped multiple-return counts: JSON
//! configs, parallel execution, report files and the `geohazard` command.

pub mod checks;
pub mod cli;
pub mod config;
pub mod output;
pub mod runner;
