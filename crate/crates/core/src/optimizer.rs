//! Search for the allowed-interference ratio `x` that maximises network
//! capacity.
//!
//! For a ratio `x` every victim tolerates `P_min = P_r / x`, where `P_r` is
//! its full-power received signal; `f(x)` is the capacity of the resulting
//! dynamic power table. The bracket runs from a configurable floor `x0` up
//! to the worst full-power SIR in the network. Each level samples `f` at
//! `k` equispaced points, fits a natural cubic spline, evaluates `f` at
//! the spline's interior maxima, and recurses on a window one grid step
//! wide around the best point seen so far.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::coloring::{dependent_edge_coloring, QueueSchedule};
use crate::model::Network;
use crate::power::{
    build_power_table_with, network_capacity_with, slot_interference, InterferenceBudget, PowerError, PowerTable,
    Propagation,
};
use crate::radio::BitsPerSecond;
use crate::spline::CubicSpline;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioSearchConfig {
    /// Samples per level, at least 3.
    pub k: usize,
    /// Lower end of the bracket, > 0.
    pub x0: f64,
    /// Maximum number of levels, at least 1.
    pub max_depth: usize,
    /// Stop once the best point moves by at most this fraction.
    pub rel_tol: f64,
}

impl Default for RatioSearchConfig {
    fn default() -> Self {
        Self {
            k: 9,
            x0: 1e-3,
            max_depth: 6,
            rel_tol: 1e-3,
        }
    }
}

impl RatioSearchConfig {
    pub fn check(&self) -> Result<(), OptimizeError> {
        if self.k < 3 {
            return Err(OptimizeError::Config(format!("k must be at least 3, got {}", self.k)));
        }
        if !(self.x0 > 0.0 && self.x0.is_finite()) {
            return Err(OptimizeError::Config(format!("x0 must be positive, got {}", self.x0)));
        }
        if self.max_depth < 1 {
            return Err(OptimizeError::Config("max_depth must be at least 1".into()));
        }
        if !(self.rel_tol > 0.0) {
            return Err(OptimizeError::Config(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizeError {
    #[error("invalid search configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Power(#[from] PowerError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioSearchResult {
    pub x_m: f64,
    pub y_m: f64,
    /// Grid samples of the last level.
    pub samples: Vec<(f64, f64)>,
    /// Bracket searched at each level.
    pub brackets: Vec<(f64, f64)>,
    pub depth_used: usize,
    /// Distinct points at which the objective was evaluated.
    pub evaluations: usize,
}

/// Evaluates `f` at `x`, once per distinct `x`, and tracks the best point
/// with ties going to the smaller `x`.
struct Memo<F> {
    f: F,
    seen: BTreeMap<u64, f64>,
    best: Option<(f64, f64)>,
}

impl<F, E> Memo<F>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    fn eval(&mut self, x: f64) -> Result<f64, E> {
        if let Some(&y) = self.seen.get(&x.to_bits()) {
            return Ok(y);
        }
        let y = (self.f)(x)?;
        self.seen.insert(x.to_bits(), y);
        let better = match self.best {
            None => true,
            Some((bx, by)) => y > by || (y == by && x < bx),
        };
        if better && !y.is_nan() {
            self.best = Some((x, y));
        }
        Ok(y)
    }
}

fn grid(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    let step = (hi - lo) / (k - 1) as f64;
    (0..k)
        .map(|i| if i == k - 1 { hi } else { lo + step * i as f64 })
        .collect()
}

/// Interpolation-guided maximisation of a fallible objective over
/// `[lo, hi]`.
pub fn try_maximize_by_interpolation<F, E>(
    f: F,
    lo: f64,
    hi: f64,
    config: &RatioSearchConfig,
) -> Result<RatioSearchResult, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let mut memo = Memo {
        f,
        seen: BTreeMap::new(),
        best: None,
    };
    if !(lo < hi) {
        let y = memo.eval(hi)?;
        return Ok(RatioSearchResult {
            x_m: hi,
            y_m: y,
            samples: vec![(hi, y)],
            brackets: vec![(hi, hi)],
            depth_used: 1,
            evaluations: 1,
        });
    }

    let k = config.k;
    let (mut a, mut b) = (lo, hi);
    let mut brackets = Vec::new();
    let mut samples = Vec::new();
    let mut previous: Option<f64> = None;

    for _ in 0..config.max_depth {
        brackets.push((a, b));
        let xs = grid(a, b, k);
        let mut ys = Vec::with_capacity(k);
        for &x in &xs {
            ys.push(memo.eval(x)?);
        }
        samples = xs.iter().copied().zip(ys.iter().copied()).collect();

        let flat = ys.iter().all(|&y| y == ys[0]);
        if !flat {
            if let Some(spline) = CubicSpline::natural(&xs, &ys) {
                let mut peaks = spline.interior_maxima();
                peaks.sort_by(|p, q| q.1.total_cmp(&p.1).then(p.0.total_cmp(&q.0)));
                for (x, _) in peaks.into_iter().take(k - 2) {
                    memo.eval(x)?;
                }
            }
        }

        let (x_m, _) = memo.best.expect("at least one evaluation");
        let settled = previous.is_some_and(|p| (x_m - p).abs() <= config.rel_tol * p.abs());
        if flat || settled {
            break;
        }
        previous = Some(x_m);

        let width = (b - a) / (k - 1) as f64;
        a = x_m - width / 2.0;
        b = x_m + width / 2.0;
        if a < lo {
            (a, b) = (lo, lo + width);
        } else if b > hi {
            (a, b) = (hi - width, hi);
        }
    }

    let (x_m, y_m) = memo.best.expect("at least one evaluation");
    Ok(RatioSearchResult {
        x_m,
        y_m,
        samples,
        depth_used: brackets.len(),
        brackets,
        evaluations: memo.seen.len(),
    })
}

pub fn maximize_by_interpolation(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    config: &RatioSearchConfig,
) -> RatioSearchResult {
    let result: Result<_, std::convert::Infallible> = try_maximize_by_interpolation(|x| Ok(f(x)), lo, hi, config);
    match result {
        Ok(r) => r,
    }
}

/// `f(x)` for one network: the queue and propagation factors are computed
/// once and reused across ratios.
#[derive(Debug, Clone)]
pub struct RatioObjective<'a> {
    network: &'a Network,
    propagation: Propagation,
    schedule: QueueSchedule,
}

impl<'a> RatioObjective<'a> {
    pub fn new(network: &'a Network) -> Result<Self, PowerError> {
        Ok(Self {
            network,
            propagation: Propagation::new(network)?,
            schedule: dependent_edge_coloring(network),
        })
    }

    pub fn schedule(&self) -> &QueueSchedule {
        &self.schedule
    }

    pub fn propagation(&self) -> &Propagation {
        &self.propagation
    }

    pub fn budget(&self, x: f64) -> InterferenceBudget {
        InterferenceBudget::from_ratio(self.network, &self.propagation, x)
    }

    pub fn table(&self, x: f64) -> Result<PowerTable, PowerError> {
        build_power_table_with(self.network, &self.propagation, &self.schedule, &self.budget(x))
    }

    pub fn capacity(&self, x: f64) -> Result<BitsPerSecond, PowerError> {
        network_capacity_with(self.network, &self.propagation, &self.table(x)?)
    }

    /// Smallest full-power SIR over all links that have at least one
    /// interferer.
    pub fn worst_sir(&self) -> Option<f64> {
        let table = PowerTable::full_power(self.network, 1);
        self.network
            .link_ids()
            .filter(|&l| !self.network.contesting(l).is_empty())
            .map(|l| {
                let signal = self.propagation.signal_gain(l) * self.network.link(l).max_power_w;
                signal / slot_interference(self.network, &self.propagation, &table, l, 0)
            })
            .min_by(f64::total_cmp)
    }
}

pub fn capacity_at_ratio(network: &Network, x: f64) -> Result<BitsPerSecond, PowerError> {
    RatioObjective::new(network)?.capacity(x)
}

/// `(x0, x1)` with `x1` the worst full-power SIR, or `None` when the
/// network has no red edges and there is nothing to optimise.
pub fn initial_bracket(network: &Network, config: &RatioSearchConfig) -> Result<Option<(f64, f64)>, PowerError> {
    Ok(RatioObjective::new(network)?.worst_sir().map(|x1| (config.x0, x1)))
}

/// Without red edges the capacity does not depend on `x`; the result then
/// reports a single evaluation at `x0`.
pub fn optimize_allowed_interference(
    network: &Network,
    config: &RatioSearchConfig,
) -> Result<RatioSearchResult, OptimizeError> {
    config.check()?;
    let objective = RatioObjective::new(network)?;
    let (lo, hi) = match objective.worst_sir() {
        Some(x1) => (config.x0, x1),
        None => (config.x0, config.x0),
    };
    Ok(try_maximize_by_interpolation(
        |x| objective.capacity(x),
        lo,
        hi,
        config,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::LinkId;
    use crate::power::{baseline_capacity, build_power_table};
    use approx::assert_relative_eq;

    #[test]
    fn config_validation() {
        let bad = RatioSearchConfig {
            k: 2,
            ..Default::default()
        };
        assert!(matches!(bad.check(), Err(OptimizeError::Config(_))));
        let bad = RatioSearchConfig {
            x0: 0.0,
            ..Default::default()
        };
        assert!(bad.check().is_err());
        assert!(RatioSearchConfig::default().check().is_ok());
    }

    #[test]
    fn constant_objective_exits_after_one_level() {
        let r = maximize_by_interpolation(|_| 4.0, 1.0, 3.0, &RatioSearchConfig::default());
        assert_eq!(r.x_m, 1.0);
        assert_eq!(r.y_m, 4.0);
        assert_eq!(r.depth_used, 1);
        assert_eq!(r.evaluations, 9);
    }

    #[test]
    fn concave_parabola_within_three_levels() {
        let peak = 3.217;
        let f = |x: f64| -((x - peak) * (x - peak)) + 10.0;
        let cfg = RatioSearchConfig {
            k: 9,
            max_depth: 3,
            ..Default::default()
        };
        let r = maximize_by_interpolation(f, 0.5, 8.0, &cfg);
        assert!(r.depth_used <= 3);
        assert!((r.x_m - peak).abs() / peak <= 1e-3, "{r:?}");
    }

    #[test]
    fn bracket_shrinks_by_k_minus_one_each_level() {
        let f = |x: f64| (x * 1.3).sin() + 0.1 * x;
        let cfg = RatioSearchConfig {
            k: 7,
            max_depth: 5,
            rel_tol: 1e-12,
            ..Default::default()
        };
        let r = maximize_by_interpolation(f, 0.0, 10.0, &cfg);
        assert!(r.brackets.len() >= 2);
        for w in r.brackets.windows(2) {
            let outer = w[0].1 - w[0].0;
            let inner = w[1].1 - w[1].0;
            assert_relative_eq!(inner, outer / 6.0, max_relative = 1e-12);
            assert!(w[1].0 >= 0.0 && w[1].1 <= 10.0);
        }
    }

    #[test]
    fn evaluation_budget_and_best_is_max_of_evaluations() {
        let mut seen = Vec::new();
        let cfg = RatioSearchConfig {
            k: 5,
            max_depth: 4,
            rel_tol: 1e-15,
            ..Default::default()
        };
        let r = maximize_by_interpolation(
            |x| {
                let y = (3.0 * x).cos() * (-0.1 * x).exp();
                seen.push((x, y));
                y
            },
            0.0,
            6.0,
            &cfg,
        );
        assert!(seen.len() <= r.depth_used * (cfg.k + cfg.k - 2));
        let top = seen.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(r.y_m, top);
    }

    #[test]
    fn boundary_maximum_keeps_window_inside_bracket() {
        let r = maximize_by_interpolation(|x| x, 1.0, 2.0, &RatioSearchConfig::default());
        assert_eq!(r.x_m, 2.0);
        assert!(r.brackets.iter().all(|&(a, b)| a >= 1.0 && b <= 2.0));
    }

    #[test]
    fn degenerate_bracket_single_evaluation() {
        let r = maximize_by_interpolation(|x| x * x, 5.0, 2.0, &RatioSearchConfig::default());
        assert_eq!((r.x_m, r.y_m, r.evaluations), (2.0, 4.0, 1));
    }

    #[test]
    fn tiny_ratio_reproduces_full_power_baseline() {
        let net = fixtures::star();
        let prop = Propagation::new(&net).unwrap();
        let base = baseline_capacity(&net, &prop).unwrap();
        assert_relative_eq!(capacity_at_ratio(&net, 1e-12).unwrap(), base, max_relative = 1e-12);
    }

    #[test]
    fn doubling_ratio_halves_budget() {
        let net = fixtures::star();
        let obj = RatioObjective::new(&net).unwrap();
        let a = obj.budget(10.0);
        let b = obj.budget(20.0);
        for l in net.link_ids() {
            assert_relative_eq!(b.p_min(l), a.p_min(l) / 2.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn capacity_at_ratio_matches_manual_pipeline() {
        let net = fixtures::star();
        let prop = Propagation::new(&net).unwrap();
        let q = dependent_edge_coloring(&net);
        let p_min: Vec<f64> = net
            .links()
            .iter()
            .map(|l| {
                crate::radio::friis_received_power(
                    l.max_power_w,
                    l.rx_directivity,
                    l.tx_directivity,
                    net.link_length(l.id),
                    l.frequency_hz,
                )
                .unwrap()
                    / 10.0
            })
            .collect();
        let table = build_power_table(&net, &q, &InterferenceBudget::from_values(p_min)).unwrap();
        let manual = network_capacity_with(&net, &prop, &table).unwrap();
        assert_relative_eq!(capacity_at_ratio(&net, 10.0).unwrap(), manual, max_relative = 1e-12);
    }

    #[test]
    fn bracket_examples() {
        let cfg = RatioSearchConfig::default();
        assert_eq!(initial_bracket(&fixtures::isolated(), &cfg).unwrap(), None);

        // Star: the only victim is link 0.
        let net = fixtures::star();
        let prop = Propagation::new(&net).unwrap();
        let rx = net.rx_antenna(LinkId(0));
        let signal = crate::radio::friis_received_power(1.0, 1000.0, 1000.0, 2000.0, 18e9).unwrap();
        let interference: f64 = fixtures::STAR_INTERFERER_TX
            .iter()
            .map(|&(x, y)| crate::radio::interference_power_at(rx, crate::model::Point::new(x, y), 1.0).unwrap())
            .sum();
        let (x0, x1) = initial_bracket(&net, &cfg).unwrap().unwrap();
        assert_eq!(x0, cfg.x0);
        assert_relative_eq!(x1, signal / interference, max_relative = 1e-12);
        assert_relative_eq!(prop.signal_gain(LinkId(0)), signal, max_relative = 1e-12);
    }

    #[test]
    fn bracket_takes_minimum_over_victims() {
        use crate::builder::with_red_edges;
        // Mutual interference between two parallel links: two victims.
        let net = with_red_edges(&fixtures::path5(), &[(LinkId(1), LinkId(0)), (LinkId(3), LinkId(1))]);
        let obj = RatioObjective::new(&net).unwrap();
        let table = PowerTable::full_power(&net, 1);
        let sir =
            |l: LinkId| obj.propagation().signal_gain(l) / slot_interference(&net, obj.propagation(), &table, l, 0);
        let expected = sir(LinkId(0)).min(sir(LinkId(1)));
        assert_eq!(obj.worst_sir(), Some(expected));
    }

    #[test]
    fn network_without_interference_is_a_no_op() {
        let net = fixtures::isolated();
        let r = optimize_allowed_interference(&net, &RatioSearchConfig::default()).unwrap();
        assert_eq!(r.evaluations, 1);
        let prop = Propagation::new(&net).unwrap();
        assert_relative_eq!(r.y_m, baseline_capacity(&net, &prop).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn star_optimum_close_to_dense_grid() {
        let net = fixtures::star();
        let cfg = RatioSearchConfig {
            k: 9,
            max_depth: 4,
            ..Default::default()
        };
        let r = optimize_allowed_interference(&net, &cfg).unwrap();
        let obj = RatioObjective::new(&net).unwrap();
        let (lo, hi) = initial_bracket(&net, &cfg).unwrap().unwrap();
        let (gx, gy) = (0..1000)
            .map(|i| lo + (hi - lo) * i as f64 / 999.0)
            .map(|x| (x, obj.capacity(x).unwrap()))
            .fold((lo, f64::NEG_INFINITY), |acc, p| if p.1 > acc.1 { p } else { acc });
        assert!(
            r.y_m >= gy * (1.0 - 1e-9) || (r.x_m - gx).abs() <= 0.02 * gx,
            "{r:?} vs {gx} {gy}"
        );
        assert!(r.y_m >= 0.99 * gy);
    }
}
