//! Dynamic power against the all-at-full-power baseline on random networks.

use cci_core::model::Network;
use cci_core::optimizer::{optimize_allowed_interference, OptimizeError, RatioObjective, RatioSearchConfig};
use cci_core::power::{link_capacities, Interference, PowerError, PowerTable};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::derive::{derive_interference_edges, DEFAULT_SIR_THRESHOLD};
use crate::gen::{generate_random_network, GenConfig, GenError};

/// Parallelism cap read by [`run_experiment`]; 0 or unset means one thread
/// per core.
pub const THREADS_ENV: &str = "CCI_THREADS";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
    #[error(transparent)]
    Power(#[from] PowerError),
    #[error("bad {THREADS_ENV} value {0:?}")]
    Threads(String),
    #[error("thread pool: {0}")]
    Pool(String),
}

impl From<cci_core::radio::PhysicsError> for ExperimentError {
    fn from(e: cci_core::radio::PhysicsError) -> Self {
        Self::Power(e.into())
    }
}

/// The four headline numbers for one network, percentages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub total_capacity_gain_pct: f64,
    pub best_link_improvement_pct: f64,
    /// Mean total transmit power per slot, treatment over baseline.
    pub power_used_pct: f64,
    /// Share of the interference-free capacity, at the treatment powers,
    /// that interference takes away.
    pub capacity_loss_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub links: usize,
    pub red_edges: usize,
    pub num_slots: usize,
    pub x_m: f64,
    pub baseline_bps: f64,
    pub treatment_bps: f64,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub trials: Vec<TrialResult>,
    pub mean: Metrics,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub gen: GenConfig,
    pub trials: usize,
    pub sir_threshold: f64,
    pub search: RatioSearchConfig,
    /// `None` defers to [`THREADS_ENV`].
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(gen: GenConfig, trials: usize) -> Self {
        Self {
            gen,
            trials,
            sir_threshold: DEFAULT_SIR_THRESHOLD,
            search: RatioSearchConfig::default(),
            threads: None,
        }
    }
}

/// Outcome of the dynamic-power pipeline on one network.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub x_m: f64,
    pub num_slots: usize,
    pub baseline_bps: f64,
    pub treatment_bps: f64,
    pub treatment_table: PowerTable,
    pub metrics: Metrics,
}

/// Colors the network, searches the ratio and compares the resulting
/// table with everyone at full power in one slot. Without red edges the
/// pipeline changes nothing and the metrics are reported as neutral.
pub fn evaluate_network(network: &Network, search: &RatioSearchConfig) -> Result<Evaluation, ExperimentError> {
    let objective = RatioObjective::new(network)?;
    let prop = objective.propagation();
    let base_table = PowerTable::full_power(network, 1);
    let base = link_capacities(network, prop, &base_table, Interference::Included)?;
    let baseline_bps: f64 = base.iter().sum();

    if network.red_edges().is_empty() {
        return Ok(Evaluation {
            x_m: search.x0,
            num_slots: 1,
            baseline_bps,
            treatment_bps: baseline_bps,
            treatment_table: base_table,
            metrics: Metrics {
                total_capacity_gain_pct: 0.0,
                best_link_improvement_pct: 0.0,
                power_used_pct: 100.0,
                capacity_loss_pct: 0.0,
            },
        });
    }

    let result = optimize_allowed_interference(network, search)?;
    let table = objective.table(result.x_m)?;
    let treat = link_capacities(network, prop, &table, Interference::Included)?;
    let ideal = link_capacities(network, prop, &table, Interference::Ignored)?;
    let treatment_bps: f64 = treat.iter().sum();
    let ideal_bps: f64 = ideal.iter().sum();

    let best_link_improvement_pct = treat
        .iter()
        .zip(&base)
        .map(|(t, b)| 100.0 * (t - b) / b)
        .fold(f64::NEG_INFINITY, f64::max);
    let metrics = Metrics {
        total_capacity_gain_pct: 100.0 * (treatment_bps - baseline_bps) / baseline_bps,
        best_link_improvement_pct,
        power_used_pct: 100.0 * table.mean_total_power() / base_table.mean_total_power(),
        capacity_loss_pct: 100.0 * (1.0 - treatment_bps / ideal_bps),
    };
    Ok(Evaluation {
        x_m: result.x_m,
        num_slots: table.num_slots(),
        baseline_bps,
        treatment_bps,
        treatment_table: table,
        metrics,
    })
}

pub fn mean_metrics(trials: &[TrialResult]) -> Metrics {
    let n = trials.len().max(1) as f64;
    let avg = |f: fn(&Metrics) -> f64| trials.iter().map(|t| f(&t.metrics)).sum::<f64>() / n;
    Metrics {
        total_capacity_gain_pct: avg(|m| m.total_capacity_gain_pct),
        best_link_improvement_pct: avg(|m| m.best_link_improvement_pct),
        power_used_pct: avg(|m| m.power_used_pct),
        capacity_loss_pct: avg(|m| m.capacity_loss_pct),
    }
}

/// Seed of every trial, drawn in order from the master seed.
pub fn trial_seeds(master: u64, trials: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    (0..trials).map(|_| rng.next_u64()).collect()
}

fn threads(config: &ExperimentConfig) -> Result<usize, ExperimentError> {
    if let Some(n) = config.threads {
        return Ok(n);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| ExperimentError::Threads(v)),
        Err(_) => Ok(0),
    }
}

pub fn run_trial(config: &ExperimentConfig, trial: usize, seed: u64) -> Result<TrialResult, ExperimentError> {
    let net = generate_random_network(&config.gen.with_seed(seed))?;
    let net = derive_interference_edges(&net, config.sir_threshold)?;
    let eval = evaluate_network(&net, &config.search)?;
    Ok(TrialResult {
        trial,
        seed,
        links: net.num_links(),
        red_edges: net.red_edges().len(),
        num_slots: eval.num_slots,
        x_m: eval.x_m,
        baseline_bps: eval.baseline_bps,
        treatment_bps: eval.treatment_bps,
        metrics: eval.metrics,
    })
}

/// Trials run in parallel; each depends only on its own seed, and results
/// come back in trial order, so the report does not depend on the thread
/// count. `config.gen.seed` is the master seed.
pub fn run_experiment(config: &ExperimentConfig) -> Result<MetricsReport, ExperimentError> {
    let seeds = trial_seeds(config.gen.seed, config.trials);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads(config)?)
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))?;
    let trials = pool.install(|| {
        seeds
            .par_iter()
            .enumerate()
            .map(|(i, &s)| run_trial(config, i, s))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(MetricsReport {
        mean: mean_metrics(&trials),
        trials,
    })
}
