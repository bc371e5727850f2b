//! Seeded populations of systems stepped forward under elimination.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::{step_system, EnergyPolicy, SystemParams, SystemRecord};

/// Sampling law for one per-system parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DistributionSpec {
    /// Always `value`; draws nothing from the generator.
    Constant { value: f64 },
    /// `low + u * (high - low)` with `u` uniform on `[0, 1)`; one draw.
    Uniform { low: f64, high: f64 },
    /// 1 with probability `p`, else 0; one draw.
    Bernoulli { p: f64 },
}

impl DistributionSpec {
    pub fn validate(&self, field: &str) -> Result<()> {
        match *self {
            DistributionSpec::Constant { value } if !value.is_finite() => Err(Error::config(
                field,
                format!("constant must be finite, got {value}"),
            )),
            DistributionSpec::Uniform { low, high }
                if !(low.is_finite() && high.is_finite() && low <= high) =>
            {
                Err(Error::config(
                    field,
                    format!("uniform bounds must be finite with low <= high, got ({low}, {high})"),
                ))
            }
            DistributionSpec::Bernoulli { p } if !(0.0..=1.0).contains(&p) => Err(Error::config(
                field,
                format!("bernoulli p must lie in [0, 1], got {p}"),
            )),
            _ => Ok(()),
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            DistributionSpec::Constant { value } => value,
            DistributionSpec::Uniform { low, high } => {
                let x = low + unit_interval(rng) * (high - low);
                // rounding can land exactly on `high`
                if x >= high && high > low {
                    high.next_down()
                } else {
                    x
                }
            }
            DistributionSpec::Bernoulli { p } => {
                if unit_interval(rng) < p {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Uniform on `[0, 1)` from the top 53 bits of one 64-bit output.
pub fn unit_interval<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyMode {
    #[default]
    Unbounded,
    Budget,
}

/// Named generator behind every seeded draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RngKind {
    /// ChaCha with 8 rounds, seeded through `SeedableRng::seed_from_u64`.
    #[default]
    #[serde(rename = "chacha8")]
    ChaCha8,
}

impl RngKind {
    pub fn seeded(self, seed: u64) -> ChaCha8Rng {
        match self {
            RngKind::ChaCha8 => ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UniverseConfig {
    pub n_systems: usize,
    pub steps: u64,
    pub dt: f64,
    pub seed: u64,
    pub rng: RngKind,
    pub energy_mode: EnergyMode,
    pub energy_quantum: f64,
    pub dist_delta: DistributionSpec,
    pub dist_tau: DistributionSpec,
    pub dist_epsilon: DistributionSpec,
    pub dist_energy: DistributionSpec,
    pub dist_rho: DistributionSpec,
    pub dist_s0: DistributionSpec,
    pub dist_s_crit_gap: DistributionSpec,
    pub dist_r0: DistributionSpec,
    pub dist_drift: DistributionSpec,
    pub snapshot_steps: Vec<u64>,
}

impl Default for UniverseConfig {
    fn default() -> Self {
        use DistributionSpec::*;
        UniverseConfig {
            n_systems: 100,
            steps: 500,
            dt: 1.0,
            seed: 0,
            rng: RngKind::ChaCha8,
            energy_mode: EnergyMode::Unbounded,
            energy_quantum: 1.0,
            dist_delta: Uniform {
                low: 0.0,
                high: 1.0,
            },
            dist_tau: Uniform {
                low: 0.0,
                high: 0.8,
            },
            dist_epsilon: Uniform {
                low: 0.01,
                high: 0.2,
            },
            dist_energy: Uniform {
                low: 0.5,
                high: 2.0,
            },
            dist_rho: Bernoulli { p: 0.5 },
            dist_s0: Constant { value: 1.0 },
            dist_s_crit_gap: Uniform {
                low: 1.0,
                high: 3.0,
            },
            dist_r0: Constant { value: 0.0 },
            dist_drift: Uniform {
                low: 0.1,
                high: 0.5,
            },
            snapshot_steps: Vec::new(),
        }
    }
}

impl UniverseConfig {
    /// Static checks; sampled values are checked again in [`init_universe`].
    pub fn validate(&self) -> Result<()> {
        if self.n_systems == 0 {
            return Err(Error::config("n_systems", "must be positive, got 0"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config(
                "dt",
                format!("must be positive, got {}", self.dt),
            ));
        }
        if !(self.energy_quantum > 0.0 && self.energy_quantum.is_finite()) {
            return Err(Error::config(
                "energy_quantum",
                format!("must be positive, got {}", self.energy_quantum),
            ));
        }
        for (field, spec) in self.distributions() {
            spec.validate(field)?;
        }
        if let DistributionSpec::Uniform { .. } = self.dist_rho {
            return Err(Error::config(
                "dist_rho",
                "must be a bernoulli or constant law",
            ));
        }
        Ok(())
    }

    pub fn energy_policy(&self) -> EnergyPolicy {
        match self.energy_mode {
            EnergyMode::Unbounded => EnergyPolicy::Unbounded,
            EnergyMode::Budget => EnergyPolicy::Budget {
                quantum: self.energy_quantum,
            },
        }
    }

    fn distributions(&self) -> [(&'static str, &DistributionSpec); 9] {
        [
            ("dist_delta", &self.dist_delta),
            ("dist_tau", &self.dist_tau),
            ("dist_epsilon", &self.dist_epsilon),
            ("dist_energy", &self.dist_energy),
            ("dist_rho", &self.dist_rho),
            ("dist_s0", &self.dist_s0),
            ("dist_s_crit_gap", &self.dist_s_crit_gap),
            ("dist_r0", &self.dist_r0),
            ("dist_drift", &self.dist_drift),
        ]
    }
}

/// Builds the initial population. Each system draws, in order: delta, tau,
/// epsilon, energy, rho, s0, critical gap, r0, drift.
pub fn init_universe(config: &UniverseConfig) -> Result<Vec<SystemRecord>> {
    config.validate()?;
    let mut rng = config.rng.seeded(config.seed);
    let mut population = Vec::with_capacity(config.n_systems);
    for id in 0..config.n_systems as u64 {
        let delta = config.dist_delta.sample(&mut rng);
        let tau = config.dist_tau.sample(&mut rng);
        let epsilon = config.dist_epsilon.sample(&mut rng);
        let energy = config.dist_energy.sample(&mut rng);
        let rho = config.dist_rho.sample(&mut rng);
        let s0 = config.dist_s0.sample(&mut rng);
        let gap = config.dist_s_crit_gap.sample(&mut rng);
        let r0 = config.dist_r0.sample(&mut rng);
        let drift = config.dist_drift.sample(&mut rng);

        if rho != 0.0 && rho != 1.0 {
            return Err(Error::config(
                "dist_rho",
                format!("sampled {rho}, expected 0 or 1"),
            ));
        }
        if !(gap > 0.0) {
            return Err(Error::config(
                "dist_s_crit_gap",
                format!("sampled {gap}, must be positive"),
            ));
        }
        let params = SystemParams {
            delta,
            tau,
            epsilon,
            energy,
            rho: rho as u8,
            s0,
            s_crit: s0 + gap,
            r0,
            drift,
        };
        let record = SystemRecord::new(id, params).map_err(|e| match e {
            Error::Config { field, constraint } => Error::Config {
                field: format!("dist_{field}"),
                constraint: format!("sampled for system {id}: {constraint}"),
            },
            other => other,
        })?;
        population.push(record);
    }
    Ok(population)
}

/// The monitored aggregates over the living systems at one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsFrame {
    pub step: u64,
    pub alive_count: usize,
    pub delta_ave: Option<f64>,
    /// Count of rho = 0 over count of rho = 1; `None` when no rho = 1 system lives.
    pub rho_ratio: Option<f64>,
    pub tau_ave: Option<f64>,
    pub epsilon_ave: Option<f64>,
    pub capacity_ave: Option<f64>,
    pub deaths_this_step: usize,
}

impl MetricsFrame {
    pub fn measure(step: u64, population: &[SystemRecord], deaths_this_step: usize) -> Self {
        let alive: Vec<&SystemRecord> = population.iter().filter(|r| r.alive).collect();
        let n = alive.len();
        let mean = |f: fn(&SystemRecord) -> f64| -> Option<f64> {
            (n > 0).then(|| alive.iter().map(|r| f(r)).sum::<f64>() / n as f64)
        };
        let agents = alive.iter().filter(|r| r.rho == 1).count();
        let inert = n - agents;
        MetricsFrame {
            step,
            alive_count: n,
            delta_ave: mean(|r| r.delta),
            rho_ratio: (agents > 0).then(|| inert as f64 / agents as f64),
            tau_ave: mean(|r| r.tau),
            epsilon_ave: mean(|r| r.epsilon),
            capacity_ave: mean(|r| r.capacity()),
            deaths_this_step,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeathEvent {
    pub step: u64,
    pub id: u64,
    pub delta: f64,
    pub rho: u8,
    pub tau: f64,
    pub epsilon: f64,
    pub energy_at_death: f64,
    pub capacity: f64,
}

impl DeathEvent {
    fn of(step: u64, r: &SystemRecord) -> Self {
        DeathEvent {
            step,
            id: r.id,
            delta: r.delta,
            rho: r.rho,
            tau: r.tau,
            epsilon: r.epsilon,
            energy_at_death: r.energy,
            capacity: r.capacity(),
        }
    }
}

/// Steps every living system once, in id order, and measures the survivors.
pub fn step_universe(
    population: &mut [SystemRecord],
    step: u64,
    dt: f64,
    policy: EnergyPolicy,
) -> Result<(MetricsFrame, Vec<DeathEvent>)> {
    let mut events = Vec::new();
    for record in population.iter_mut().filter(|r| r.alive) {
        let outcome = step_system(record, step, dt, policy)?;
        *record = outcome.record;
        if outcome.died {
            events.push(DeathEvent::of(step, record));
        }
    }
    let frame = MetricsFrame::measure(step, population, events.len());
    Ok((frame, events))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub step: u64,
    pub population: Vec<SystemRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub config: UniverseConfig,
    /// One frame per step, starting with the initial population at step 0.
    pub frames: Vec<MetricsFrame>,
    pub events: Vec<DeathEvent>,
    pub snapshots: Vec<Snapshot>,
    pub population: Vec<SystemRecord>,
}

/// Runs a universe to its horizon. Snapshot steps past the horizon are skipped.
pub fn run(config: &UniverseConfig) -> Result<RunResult> {
    let mut population = init_universe(config)?;
    let policy = config.energy_policy();

    let mut snapshot_steps = config.snapshot_steps.clone();
    snapshot_steps.sort_unstable();
    snapshot_steps.dedup();
    let mut snapshots = Vec::new();
    let mut take_snapshot = |step: u64, population: &[SystemRecord]| {
        if snapshot_steps.binary_search(&step).is_ok() {
            snapshots.push(Snapshot {
                step,
                population: population.to_vec(),
            });
        }
    };

    let mut frames = Vec::with_capacity(config.steps as usize + 1);
    let mut events = Vec::new();
    frames.push(MetricsFrame::measure(0, &population, 0));
    take_snapshot(0, &population);

    for step in 1..=config.steps {
        let (frame, deaths) = step_universe(&mut population, step, config.dt, policy)?;
        frames.push(frame);
        events.extend(deaths);
        take_snapshot(step, &population);
    }

    Ok(RunResult {
        config: config.clone(),
        frames,
        events,
        snapshots,
        population,
    })
}
