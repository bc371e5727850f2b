//! Population simulator for adaptive selection of self-modelling regulators.
//!
//! Every simulated system carries a scalar state `s` that drifts toward a
//! critical value, and an internal model `r` that tracks it with coupling
//! `delta` (self-awareness). When the model reaches its own critical value
//! first, a system with agency readjusts its state and lives on; otherwise it
//! is eliminated. Running a population forward therefore selects for systems
//! whose models warn them early enough.
//!
//! - [`system`]: per-system quantities and the single-system step.
//! - [`universe`]: seeded population initialization, stepping and metrics.
//! - [`analysis`]: closed-form survivor prediction, survival curves,
//!   burstiness of eliminations and plasticity/energy sweeps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod system;
pub mod universe;

pub use error::{Error, Result};
pub use system::{EnergyPolicy, StepOutcome, SystemParams, SystemRecord, TriggerTime};
pub use universe::{
    DeathEvent, DistributionSpec, EnergyMode, MetricsFrame, RngKind, RunResult, Snapshot,
    UniverseConfig,
};
