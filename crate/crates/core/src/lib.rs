//! Robust appointment scheduling with per-customer worst-case waiting-time
//! guarantees.
//!
//! Service times live in per-customer intervals and an adversary chooses
//! which `k` customers show up. The crate evaluates schedules, computes
//! worst-case scenarios in closed form, builds optimal schedules with
//! polynomial rules where they are known to be optimal, and falls back to a
//! small built-in MILP engine otherwise.

pub mod adversary;
pub mod cli;
pub mod data;
pub mod error;
pub mod json;
pub mod milp;
pub mod model;
pub mod oracle;
pub mod rules;
pub mod sequencer;

pub use error::{Error, Result};
pub use model::{EvaluationReport, Instance, Scenario, Schedule, Sequence};
