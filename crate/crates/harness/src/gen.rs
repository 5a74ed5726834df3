//! Seeded random networks: nodes uniform in a square, links between nearby
//! nodes under a per-node degree cap.

use cci_core::builder::{NetworkBuilder, RadioParams};
use cci_core::model::{Network, NodeId, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Side length per square-root node, so that node density, and with it
/// link lengths and interference degree, stays put as `v` grows.
pub const DEFAULT_SPACING_M: f64 = 1000.0;

/// How far each antenna sits from its mast, meters.
pub const MOUNT_OFFSET_M: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenConfig {
    /// Node count.
    pub v: usize,
    /// Link count.
    pub e: usize,
    /// Maximum number of links touching one node.
    pub d: usize,
    pub seed: u64,
    /// Side of the square, meters.
    pub area_m: f64,
    pub radio: RadioParams,
}

impl GenConfig {
    /// Square side chosen from [`DEFAULT_SPACING_M`].
    pub fn new(v: usize, e: usize, d: usize, seed: u64) -> Self {
        Self {
            v,
            e,
            d,
            seed,
            area_m: DEFAULT_SPACING_M * (v as f64).sqrt(),
            radio: RadioParams::default(),
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn check(&self) -> Result<(), GenError> {
        if self.v < 2 {
            return Err(GenError::Config(format!("need at least 2 nodes, got {}", self.v)));
        }
        if self.e > self.v * self.d / 2 {
            return Err(GenError::Config(format!(
                "{} links cannot fit {} nodes of degree {}",
                self.e, self.v, self.d
            )));
        }
        let pairs = self.v * (self.v - 1) / 2;
        if self.e > pairs {
            return Err(GenError::Config(format!(
                "{} links exceed the {pairs} node pairs",
                self.e
            )));
        }
        if !(self.area_m > 0.0 && self.area_m.is_finite()) {
            return Err(GenError::Config(format!("area must be positive, got {}", self.area_m)));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("invalid generator configuration: {0}")]
    Config(String),
    #[error("could not place {wanted} links under the degree cap, placed {placed}")]
    Infeasible { wanted: usize, placed: usize },
}

/// Each link is drawn uniformly from this many of the shortest pairs still
/// open.
const WINDOW: usize = 4;

/// Fresh layouts tried before giving up.
const ATTEMPTS: usize = 8;

pub fn generate_random_network(cfg: &GenConfig) -> Result<Network, GenError> {
    cfg.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut placed = 0;
    for _ in 0..ATTEMPTS {
        match attempt(cfg, &mut rng) {
            Ok(net) => return Ok(net),
            Err(n) => placed = placed.max(n),
        }
    }
    Err(GenError::Infeasible { wanted: cfg.e, placed })
}

fn attempt(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Result<Network, usize> {
    let points: Vec<Point> = (0..cfg.v)
        .map(|_| Point::new(rng.gen_range(0.0..cfg.area_m), rng.gen_range(0.0..cfg.area_m)))
        .collect();

    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(cfg.v * (cfg.v - 1) / 2);
    for a in 0..cfg.v {
        for b in a + 1..cfg.v {
            pairs.push((points[a].distance(points[b]), a, b));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0).then((p.1, p.2).cmp(&(q.1, q.2))));

    // Pairs only ever become unusable, so a dead mark is permanent.
    let mut degree = vec![0usize; cfg.v];
    let mut dead = vec![false; pairs.len()];
    let mut cursor = 0;
    let mut window = Vec::with_capacity(WINDOW);
    let mut chosen = Vec::with_capacity(cfg.e);
    while chosen.len() < cfg.e {
        window.clear();
        let mut i = cursor;
        while window.len() < WINDOW && i < pairs.len() {
            if !dead[i] {
                let (dist, a, b) = pairs[i];
                if dist > 0.0 && degree[a] < cfg.d && degree[b] < cfg.d {
                    window.push(i);
                } else {
                    dead[i] = true;
                }
            }
            i += 1;
        }
        if window.is_empty() {
            return Err(chosen.len());
        }
        let pick = window[rng.gen_range(0..window.len())];
        dead[pick] = true;
        while cursor < pairs.len() && dead[cursor] {
            cursor += 1;
        }
        let (_, a, b) = pairs[pick];
        degree[a] += 1;
        degree[b] += 1;
        chosen.push(if rng.gen_bool(0.5) { (a, b) } else { (b, a) });
    }

    let mut builder = NetworkBuilder::new().with_mount_offset(MOUNT_OFFSET_M);
    for &p in &points {
        builder.add_node(p);
    }
    for (s, t) in chosen {
        builder.add_link(NodeId(s), NodeId(t), &cfg.radio);
    }
    Ok(builder.build())
}
