//! Per-system quantities and the single-system time step.
//!
//! A system is described by one scalar state `s` drifting at a constant rate
//! toward its critical value `s_crit`, and an internal model `r` that moves by
//! `delta` per unit change of `s`. The model has its own critical value
//! `r_crit = s_crit * (1 - tau)`; when `r` reaches it before `s` reaches
//! `s_crit`, a system with agency pushes its state back down.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when checking `r = r0 + delta * (s - s0)`.
pub const MIRROR_TOLERANCE: f64 = 1e-9;

/// Change of the internal model for a change `ds` of the system state.
pub fn model_increment(delta: f64, ds: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(delta * ds)
}

/// Time for the state to travel from `s` to `s_crit` at rate `drift`.
pub fn time_to_critical_system(s: f64, s_crit: f64, drift: f64) -> Result<f64> {
    check_drift(drift)?;
    if s > s_crit {
        return Err(Error::domain(format!(
            "state {s} is already past its critical value {s_crit}"
        )));
    }
    Ok((s_crit - s) / drift)
}

/// Time until the internal model reaches its critical value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TriggerTime {
    At(f64),
    /// The model never moves (`delta = 0`) and starts below its critical value.
    Never,
}

impl TriggerTime {
    /// True when the trigger fires strictly before time `t`.
    pub fn is_before(self, t: f64) -> bool {
        match self {
            TriggerTime::At(x) => x < t,
            TriggerTime::Never => false,
        }
    }
}

/// Time for the model to travel from `r` to `r_crit` while the state drifts at
/// `drift`, so the model moves at `delta * drift`.
pub fn time_to_critical_model(r: f64, r_crit: f64, delta: f64, drift: f64) -> Result<TriggerTime> {
    check_drift(drift)?;
    check_delta(delta)?;
    if r > r_crit {
        return Err(Error::domain(format!(
            "model {r} is already past its critical value {r_crit}"
        )));
    }
    if r == r_crit {
        return Ok(TriggerTime::At(0.0));
    }
    if delta == 0.0 {
        return Ok(TriggerTime::Never);
    }
    Ok(TriggerTime::At((r_crit - r) / (delta * drift)))
}

/// Whether the model warns the system strictly before the state goes critical:
/// `(r_crit - r0) / (s_crit - s0) < delta`.
pub fn has_survival_advantage(
    r_crit: f64,
    r0: f64,
    s_crit: f64,
    s0: f64,
    delta: f64,
) -> Result<bool> {
    check_delta(delta)?;
    if !(s_crit > s0) {
        return Err(Error::domain(format!(
            "critical state {s_crit} must exceed the initial state {s0}"
        )));
    }
    if r_crit < r0 {
        return Err(Error::domain(format!(
            "model critical value {r_crit} lies below the initial model state {r0}"
        )));
    }
    Ok((r_crit - r0) / (s_crit - s0) < delta)
}

/// State displacement produced by spending `energy_applied` on a state `s`
/// with plasticity `epsilon`: `epsilon * energy_applied * s`.
pub fn plasticity_displacement(epsilon: f64, energy_applied: f64, s: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::domain(format!(
            "plasticity must be positive, got {epsilon}"
        )));
    }
    if !(energy_applied >= 0.0) {
        return Err(Error::domain(format!(
            "applied energy must be non-negative, got {energy_applied}"
        )));
    }
    if !(s > 0.0) {
        return Err(Error::domain(format!("state must be positive, got {s}")));
    }
    Ok(epsilon * energy_applied * s)
}

/// Model critical value for agility `tau`: `s_crit * (1 - tau)`.
pub fn model_critical_value(s_crit: f64, tau: f64) -> Result<f64> {
    if !(s_crit > 0.0) {
        return Err(Error::domain(format!(
            "critical state must be positive, got {s_crit}"
        )));
    }
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::domain(format!(
            "agility must lie in [0, 1), got {tau}"
        )));
    }
    Ok(s_crit * (1.0 - tau))
}

/// Self-awareness times plasticity times energy.
pub fn adaptive_capacity(delta: f64, epsilon: f64, energy: f64) -> Result<f64> {
    check_delta(delta)?;
    if !(epsilon >= 0.0) || !(energy >= 0.0) {
        return Err(Error::domain(format!(
            "plasticity and energy must be non-negative, got {epsilon} and {energy}"
        )));
    }
    Ok(delta * epsilon * energy)
}

fn check_delta(delta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&delta) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "self-awareness must lie in [0, 1], got {delta}"
        )))
    }
}

fn check_drift(drift: f64) -> Result<()> {
    if drift > 0.0 && drift.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "drift must be positive, got {drift}"
        )))
    }
}

/// How energy is spent on readjustments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnergyPolicy {
    /// `energy` is an availability that is applied in full and never depleted.
    Unbounded,
    /// `energy` is a reserve drawn down by at most `quantum` per readjustment.
    Budget { quantum: f64 },
}

/// Birth parameters of a system, before derived fields are filled in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub delta: f64,
    pub tau: f64,
    pub epsilon: f64,
    pub energy: f64,
    pub rho: u8,
    pub s0: f64,
    pub s_crit: f64,
    pub r0: f64,
    pub drift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemRecord {
    pub id: u64,
    pub s: f64,
    pub r: f64,
    pub s0: f64,
    pub r0: f64,
    pub s_crit: f64,
    pub tau: f64,
    pub r_crit: f64,
    pub delta: f64,
    pub rho: u8,
    pub epsilon: f64,
    pub energy: f64,
    pub drift: f64,
    pub alive: bool,
    pub death_step: Option<u64>,
}

impl SystemRecord {
    /// Builds a living record at its initial state. Errors name the offending field.
    pub fn new(id: u64, p: SystemParams) -> Result<Self> {
        if !(0.0..=1.0).contains(&p.delta) {
            return Err(Error::config(
                "delta",
                format!("must lie in [0, 1], got {}", p.delta),
            ));
        }
        if !(0.0..1.0).contains(&p.tau) {
            return Err(Error::config(
                "tau",
                format!("must lie in [0, 1), got {}", p.tau),
            ));
        }
        if !(p.epsilon > 0.0 && p.epsilon.is_finite()) {
            return Err(Error::config(
                "epsilon",
                format!("must be positive, got {}", p.epsilon),
            ));
        }
        if !(p.energy > 0.0 && p.energy.is_finite()) {
            return Err(Error::config(
                "energy",
                format!("must be positive, got {}", p.energy),
            ));
        }
        if p.rho > 1 {
            return Err(Error::config(
                "rho",
                format!("must be 0 or 1, got {}", p.rho),
            ));
        }
        if !(p.s0 > 0.0 && p.s0.is_finite()) {
            return Err(Error::config(
                "s0",
                format!("must be positive, got {}", p.s0),
            ));
        }
        if !(p.s_crit > p.s0 && p.s_crit.is_finite()) {
            return Err(Error::config(
                "s_crit",
                format!("must exceed s0 = {}, got {}", p.s0, p.s_crit),
            ));
        }
        if !(p.r0 >= 0.0 && p.r0.is_finite()) {
            return Err(Error::config(
                "r0",
                format!("must be non-negative, got {}", p.r0),
            ));
        }
        if !(p.drift > 0.0 && p.drift.is_finite()) {
            return Err(Error::config(
                "drift",
                format!("must be positive, got {}", p.drift),
            ));
        }
        let r_crit = p.s_crit * (1.0 - p.tau);
        if p.r0 > r_crit {
            return Err(Error::config(
                "r0",
                format!(
                    "must not exceed the model critical value {r_crit}, got {}",
                    p.r0
                ),
            ));
        }
        Ok(SystemRecord {
            id,
            s: p.s0,
            r: p.r0,
            s0: p.s0,
            r0: p.r0,
            s_crit: p.s_crit,
            tau: p.tau,
            r_crit,
            delta: p.delta,
            rho: p.rho,
            epsilon: p.epsilon,
            energy: p.energy,
            drift: p.drift,
            alive: true,
            death_step: None,
        })
    }

    pub fn capacity(&self) -> f64 {
        self.delta * self.epsilon * self.energy
    }

    /// Does the model reach `r_crit` strictly before the state reaches `s_crit`?
    pub fn warns_in_time(&self) -> bool {
        (self.r_crit - self.r0) / (self.s_crit - self.s0) < self.delta
    }

    /// State value at which the model reaches `r_crit`; infinite when `delta = 0`.
    pub fn trigger_state(&self) -> f64 {
        if self.delta == 0.0 {
            f64::INFINITY
        } else {
            self.s0 + (self.r_crit - self.r0) / self.delta
        }
    }

    /// Distance of `r` from the value the mirror identity predicts.
    pub fn mirror_error(&self) -> f64 {
        (self.r - (self.r0 + self.delta * (self.s - self.s0))).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub record: SystemRecord,
    pub died: bool,
    pub readjusted: bool,
    pub energy_spent: f64,
}

/// Advances one living system by `dt`; `step` is the index of the step being
/// taken and becomes the death step if the system dies.
///
/// Crossings inside the step are ordered exactly: the model trigger and the
/// critical state are both points on the state axis, so whichever lies lower
/// is reached first. A tie goes to death.
pub fn step_system(
    record: &SystemRecord,
    step: u64,
    dt: f64,
    policy: EnergyPolicy,
) -> Result<StepOutcome> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::domain(format!(
            "time step must be positive, got {dt}"
        )));
    }
    if !record.alive {
        return Err(Error::Usage(format!(
            "system {} is dead and cannot be stepped",
            record.id
        )));
    }

    let ds = record.drift * dt;
    let s_next = record.s + ds;
    let r_next = record.r + model_increment(record.delta, ds)?;

    let can_act = record.rho == 1
        && match policy {
            EnergyPolicy::Unbounded => true,
            EnergyPolicy::Budget { .. } => record.energy > 0.0,
        };

    let mut next = *record;

    if can_act && record.warns_in_time() {
        let trigger = record.trigger_state().min(record.s_crit);
        if s_next >= trigger {
            // The trigger can only lie behind `s` when r0 == r_crit.
            let at = trigger.max(record.s);
            let applied = match policy {
                EnergyPolicy::Unbounded => record.energy,
                EnergyPolicy::Budget { quantum } => record.energy.min(quantum),
            };
            let d = plasticity_displacement(record.epsilon, applied, at)?;
            next.s = (at - d).max(record.s0);
            next.r = record.r0 + model_increment(record.delta, next.s - record.s0)?;
            let energy_spent = match policy {
                EnergyPolicy::Unbounded => 0.0,
                EnergyPolicy::Budget { .. } => {
                    next.energy = (record.energy - applied).max(0.0);
                    applied
                }
            };
            return Ok(StepOutcome {
                record: next,
                died: false,
                readjusted: true,
                energy_spent,
            });
        }
    }

    if s_next >= record.s_crit {
        next.s = record.s_crit;
        next.r = record.r0 + record.delta * (record.s_crit - record.s0);
        next.alive = false;
        next.death_step = Some(step);
        return Ok(StepOutcome {
            record: next,
            died: true,
            readjusted: false,
            energy_spent: 0.0,
        });
    }

    next.s = s_next;
    next.r = r_next;
    Ok(StepOutcome {
        record: next,
        died: false,
        readjusted: false,
        energy_spent: 0.0,
    })
}
