//! Analyses over populations and runs.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::{has_survival_advantage, model_critical_value, SystemRecord};
use crate::universe::{run, DistributionSpec, EnergyMode, UniverseConfig};

/// Ids of the systems expected to survive indefinitely with unbounded energy:
/// those with agency whose model warns them before their state goes critical.
pub fn predicted_survivors(population: &[SystemRecord]) -> BTreeSet<u64> {
    population
        .iter()
        .filter(|r| {
            r.rho == 1
                && has_survival_advantage(r.r_crit, r.r0, r.s_crit, r.s0, r.delta).unwrap_or(false)
        })
        .map(|r| r.id)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub delta_grid: Vec<f64>,
    pub probs: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
}

/// Estimates, for each self-awareness value on `delta_grid`, the probability
/// that a system drawn from `config`'s distributions warns itself in time.
///
/// The same `n_samples` draws of (tau, s0, gap, r0), taken in that order, are
/// reused at every grid point, so the estimate is non-decreasing in delta.
pub fn survival_probability_curve(
    config: &UniverseConfig,
    delta_grid: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<SurvivalCurve> {
    if delta_grid.is_empty() {
        return Err(Error::domain("delta grid is empty"));
    }
    if let Some(bad) = delta_grid.iter().find(|d| !(0.0..=1.0).contains(*d)) {
        return Err(Error::domain(format!(
            "delta grid value {bad} lies outside [0, 1]"
        )));
    }
    if delta_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("delta grid must be sorted ascending"));
    }
    if n_samples == 0 {
        return Err(Error::domain("at least one sample is required"));
    }
    for (field, spec) in [
        ("dist_tau", &config.dist_tau),
        ("dist_s0", &config.dist_s0),
        ("dist_s_crit_gap", &config.dist_s_crit_gap),
        ("dist_r0", &config.dist_r0),
    ] {
        spec.validate(field)?;
    }

    let mut rng = config.rng.seeded(seed);
    let mut draws = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let tau = config.dist_tau.sample(&mut rng);
        let s0 = config.dist_s0.sample(&mut rng);
        let gap = config.dist_s_crit_gap.sample(&mut rng);
        let r0 = config.dist_r0.sample(&mut rng);
        let s_crit = s0 + gap;
        let r_crit = model_critical_value(s_crit, tau)?;
        draws.push((r_crit, r0, s_crit, s0));
    }

    let probs = delta_grid
        .iter()
        .map(|&delta| {
            let mut hits = 0usize;
            for &(r_crit, r0, s_crit, s0) in &draws {
                if has_survival_advantage(r_crit, r0, s_crit, s0, delta)? {
                    hits += 1;
                }
            }
            Ok(hits as f64 / n_samples as f64)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SurvivalCurve {
        delta_grid: delta_grid.to_vec(),
        probs,
        n_samples,
        seed,
    })
}

/// Temporal clustering of eliminations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BurstReport {
    /// Step of every death, sorted, with repeats.
    pub death_steps: Vec<u64>,
    /// Gaps between successive distinct death steps.
    pub inter_event_gaps: Vec<u64>,
    /// `(sigma - mu) / (sigma + mu)` over the gaps; `None` with fewer than
    /// three distinct death steps.
    pub burstiness_index: Option<f64>,
    /// Variance over mean of deaths per step, taken over every step from the
    /// first death to the last; `None` without deaths.
    pub dispersion_index: Option<f64>,
}

pub fn burstiness<'a, I>(events: I) -> BurstReport
where
    I: IntoIterator<Item = &'a crate::universe::DeathEvent>,
{
    let mut death_steps: Vec<u64> = events.into_iter().map(|e| e.step).collect();
    death_steps.sort_unstable();

    let mut distinct = death_steps.clone();
    distinct.dedup();
    let inter_event_gaps: Vec<u64> = distinct.windows(2).map(|w| w[1] - w[0]).collect();

    let burstiness_index = (distinct.len() >= 3).then(|| {
        let (mu, sigma) = mean_std(inter_event_gaps.iter().map(|&g| g as f64));
        (sigma - mu) / (sigma + mu)
    });

    let dispersion_index = match (death_steps.first(), death_steps.last()) {
        (Some(&first), Some(&last)) => {
            let mut counts = vec![0.0; (last - first + 1) as usize];
            for &s in &death_steps {
                counts[(s - first) as usize] += 1.0;
            }
            let (mu, sigma) = mean_std(counts.into_iter());
            Some(sigma * sigma / mu)
        }
        _ => None,
    };

    BurstReport {
        death_steps,
        inter_event_gaps,
        burstiness_index,
        dispersion_index,
    }
}

/// Population mean and standard deviation.
fn mean_std(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let xs: Vec<f64> = xs.collect();
    let n = xs.len() as f64;
    let mu = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / n;
    (mu, var.sqrt())
}

/// Aggregates for one (plasticity, energy) typology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub epsilon: f64,
    pub energy: f64,
    /// Typology product epsilon * energy.
    pub capacity: f64,
    /// Mean over all systems of all seeds; survivors count as the horizon.
    pub mean_lifetime: f64,
    /// Mean over seeds of the final `delta_ave`, skipping seeds with no survivors.
    pub mean_final_delta_ave: Option<f64>,
    pub survivor_fraction: f64,
    /// Whether any lifetime was cut off at the horizon.
    pub censored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub cells: Vec<SweepCell>,
    pub seeds: Vec<u64>,
    pub steps: u64,
}

impl SweepResult {
    /// Rank correlation between typology product and mean lifetime across cells.
    pub fn capacity_lifetime_spearman(&self) -> Option<f64> {
        let xs: Vec<f64> = self.cells.iter().map(|c| c.capacity).collect();
        let ys: Vec<f64> = self.cells.iter().map(|c| c.mean_lifetime).collect();
        spearman(&xs, &ys)
    }
}

struct SeedOutcome {
    seed: u64,
    lifetime_sum: f64,
    systems: usize,
    survivors: usize,
    final_delta_ave: Option<f64>,
}

/// Runs every seed for every (epsilon, energy) pair with those two parameters
/// held constant across the population. Requires budget energy mode.
pub fn sweep_typologies(
    base: &UniverseConfig,
    epsilon_values: &[f64],
    energy_values: &[f64],
    seeds: &[u64],
) -> Result<SweepResult> {
    if base.energy_mode != EnergyMode::Budget {
        return Err(Error::Usage(
            "typology sweeps need budget energy mode; with unbounded energy lifetimes are degenerate"
                .into(),
        ));
    }
    if epsilon_values.is_empty() || energy_values.is_empty() {
        return Err(Error::Usage("sweep grids must be non-empty".into()));
    }
    if seeds.len() < 2 {
        return Err(Error::Usage("a sweep needs at least two seeds".into()));
    }
    base.validate()?;

    let cells: Vec<(f64, f64)> = epsilon_values
        .iter()
        .flat_map(|&eps| energy_values.iter().map(move |&e| (eps, e)))
        .collect();
    let jobs: Vec<(usize, u64)> = (0..cells.len())
        .flat_map(|c| seeds.iter().map(move |&s| (c, s)))
        .collect();

    let outcomes = jobs
        .par_iter()
        .map(|&(cell, seed)| {
            let (epsilon, energy) = cells[cell];
            let config = UniverseConfig {
                seed,
                dist_epsilon: DistributionSpec::Constant { value: epsilon },
                dist_energy: DistributionSpec::Constant { value: energy },
                snapshot_steps: Vec::new(),
                ..base.clone()
            };
            let result = run(&config)?;
            let horizon = config.steps as f64;
            let lifetime_sum = result
                .population
                .iter()
                .map(|r| r.death_step.map_or(horizon, |d| d as f64))
                .sum();
            Ok((
                cell,
                SeedOutcome {
                    seed,
                    lifetime_sum,
                    systems: result.population.len(),
                    survivors: result.population.iter().filter(|r| r.alive).count(),
                    final_delta_ave: result.frames.last().and_then(|f| f.delta_ave),
                },
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut grouped: Vec<Vec<SeedOutcome>> = cells.iter().map(|_| Vec::new()).collect();
    for (cell, outcome) in outcomes {
        grouped[cell].push(outcome);
    }

    let cells = cells
        .iter()
        .zip(grouped)
        .map(|(&(epsilon, energy), mut runs)| {
            runs.sort_by_key(|o| o.seed);
            let systems: usize = runs.iter().map(|o| o.systems).sum();
            let survivors: usize = runs.iter().map(|o| o.survivors).sum();
            let lifetime: f64 = runs.iter().map(|o| o.lifetime_sum).sum();
            let finals: Vec<f64> = runs.iter().filter_map(|o| o.final_delta_ave).collect();
            SweepCell {
                epsilon,
                energy,
                capacity: epsilon * energy,
                mean_lifetime: lifetime / systems as f64,
                mean_final_delta_ave: (!finals.is_empty())
                    .then(|| finals.iter().sum::<f64>() / finals.len() as f64),
                survivor_fraction: survivors as f64 / systems as f64,
                censored: survivors > 0,
            }
        })
        .collect();

    Ok(SweepResult {
        cells,
        seeds: seeds.to_vec(),
        steps: base.steps,
    })
}

/// Average ranks (1-based), ties sharing the mean of their positions.
fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation (Pearson correlation of average ranks).
/// `None` for mismatched lengths, fewer than two points, or a constant input.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}
