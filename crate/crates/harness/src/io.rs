//! File formats.
//!
//! Networks are JSON documents tagged `"schema": 1`. Geometry is in meters
//! and radians, frequencies in hertz, directivities linear, and power-like
//! fields (`max_power_dbm`, `noise_dbm`) in dBm. Everything is watts once
//! loaded. Reports are CSV (one row per trial plus a `mean` row) or JSON.

use std::io::Write;

use cci_core::model::{Antenna, InterferenceEdge, Link, LinkId, Network, Node, NodeId, Point, RedEdgeId};
use cci_core::radio::{dbm_to_watts, watts_to_dbm};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::experiment::{Metrics, MetricsReport};

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: [&str; 5] = [
    "trial",
    "total_capacity_gain_pct",
    "best_link_improvement_pct",
    "power_used_pct",
    "capacity_loss_pct",
];

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed network document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {0}, expected {SCHEMA_VERSION}")]
    Schema(u32),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntennaDoc {
    pub x_m: f64,
    pub y_m: f64,
    pub boresight_rad: f64,
    pub beamwidth_rad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub id: usize,
    pub antennas: Vec<AntennaDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkDoc {
    pub id: usize,
    pub source: usize,
    pub target: usize,
    pub source_antenna: usize,
    pub target_antenna: usize,
    pub frequency_hz: f64,
    pub bandwidth_hz: f64,
    pub tx_directivity: f64,
    pub rx_directivity: f64,
    pub max_power_dbm: f64,
    pub noise_dbm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedEdgeDoc {
    pub id: usize,
    pub base: usize,
    pub victim: usize,
    pub victim_node: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDoc {
    pub schema: u32,
    pub nodes: Vec<NodeDoc>,
    pub links: Vec<LinkDoc>,
    #[serde(default)]
    pub red_edges: Vec<RedEdgeDoc>,
}

impl From<&Network> for NetworkDoc {
    fn from(net: &Network) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            nodes: net
                .nodes()
                .iter()
                .map(|n| NodeDoc {
                    id: n.id.index(),
                    antennas: n
                        .antennas
                        .iter()
                        .map(|a| AntennaDoc {
                            x_m: a.position.x,
                            y_m: a.position.y,
                            boresight_rad: a.boresight,
                            beamwidth_rad: a.beamwidth,
                        })
                        .collect(),
                })
                .collect(),
            links: net
                .links()
                .iter()
                .map(|l| LinkDoc {
                    id: l.id.index(),
                    source: l.source.index(),
                    target: l.target.index(),
                    source_antenna: l.source_antenna,
                    target_antenna: l.target_antenna,
                    frequency_hz: l.frequency_hz,
                    bandwidth_hz: l.bandwidth_hz,
                    tx_directivity: l.tx_directivity,
                    rx_directivity: l.rx_directivity,
                    max_power_dbm: watts_to_dbm(l.max_power_w),
                    noise_dbm: watts_to_dbm(l.noise_w),
                })
                .collect(),
            red_edges: net
                .red_edges()
                .iter()
                .map(|r| RedEdgeDoc {
                    id: r.id.index(),
                    base: r.base.index(),
                    victim: r.victim.index(),
                    victim_node: r.victim_node.index(),
                })
                .collect(),
        }
    }
}

impl NetworkDoc {
    /// Structural problems such as dangling ids are left for
    /// [`cci_core::model::validate`] to report.
    pub fn to_network(&self) -> Result<Network, IoError> {
        if self.schema != SCHEMA_VERSION {
            return Err(IoError::Schema(self.schema));
        }
        let nodes = self
            .nodes
            .iter()
            .map(|n| Node {
                id: NodeId(n.id),
                antennas: n
                    .antennas
                    .iter()
                    .map(|a| Antenna {
                        position: Point::new(a.x_m, a.y_m),
                        boresight: a.boresight_rad,
                        beamwidth: a.beamwidth_rad,
                    })
                    .collect(),
            })
            .collect();
        let links = self
            .links
            .iter()
            .map(|l| Link {
                id: LinkId(l.id),
                source: NodeId(l.source),
                target: NodeId(l.target),
                source_antenna: l.source_antenna,
                target_antenna: l.target_antenna,
                frequency_hz: l.frequency_hz,
                bandwidth_hz: l.bandwidth_hz,
                tx_directivity: l.tx_directivity,
                rx_directivity: l.rx_directivity,
                max_power_w: dbm_to_watts(l.max_power_dbm),
                noise_w: dbm_to_watts(l.noise_dbm),
            })
            .collect();
        let reds = self
            .red_edges
            .iter()
            .map(|r| InterferenceEdge {
                id: RedEdgeId(r.id),
                base: LinkId(r.base),
                victim: LinkId(r.victim),
                victim_node: NodeId(r.victim_node),
            })
            .collect();
        Ok(Network::new(nodes, links, reds))
    }
}

pub fn network_to_json(net: &Network) -> String {
    serde_json::to_string_pretty(&NetworkDoc::from(net)).expect("network documents always serialize")
}

pub fn network_from_json(text: &str) -> Result<Network, IoError> {
    serde_json::from_str::<NetworkDoc>(text)?.to_network()
}

fn metric_fields(m: &Metrics) -> [String; 4] {
    [
        m.total_capacity_gain_pct.to_string(),
        m.best_link_improvement_pct.to_string(),
        m.power_used_pct.to_string(),
        m.capacity_loss_pct.to_string(),
    ]
}

pub fn write_report_csv(report: &MetricsReport, out: impl Write) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for t in &report.trials {
        let [a, b, c, d] = metric_fields(&t.metrics);
        w.write_record([t.trial.to_string(), a, b, c, d])?;
    }
    let [a, b, c, d] = metric_fields(&report.mean);
    w.write_record(["mean".to_string(), a, b, c, d])?;
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct MetricsDoc {
    total_capacity_gain_pct: f64,
    best_link_improvement_pct: f64,
    power_used_pct: f64,
    capacity_loss_pct: f64,
}

impl From<&Metrics> for MetricsDoc {
    fn from(m: &Metrics) -> Self {
        Self {
            total_capacity_gain_pct: m.total_capacity_gain_pct,
            best_link_improvement_pct: m.best_link_improvement_pct,
            power_used_pct: m.power_used_pct,
            capacity_loss_pct: m.capacity_loss_pct,
        }
    }
}

#[derive(Debug, Serialize)]
struct TrialDoc {
    trial: usize,
    seed: u64,
    links: usize,
    red_edges: usize,
    num_slots: usize,
    x_m: f64,
    baseline_bps: f64,
    treatment_bps: f64,
    #[serde(flatten)]
    metrics: MetricsDoc,
}

#[derive(Debug, Serialize)]
struct ReportDoc {
    trials: Vec<TrialDoc>,
    mean: MetricsDoc,
}

pub fn report_to_json(report: &MetricsReport) -> String {
    let doc = ReportDoc {
        trials: report
            .trials
            .iter()
            .map(|t| TrialDoc {
                trial: t.trial,
                seed: t.seed,
                links: t.links,
                red_edges: t.red_edges,
                num_slots: t.num_slots,
                x_m: t.x_m,
                baseline_bps: t.baseline_bps,
                treatment_bps: t.treatment_bps,
                metrics: (&t.metrics).into(),
            })
            .collect(),
        mean: (&report.mean).into(),
    };
    serde_json::to_string_pretty(&doc).expect("reports always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{run_experiment, ExperimentConfig};
    use crate::gen::GenConfig;
    use cci_core::fixtures;
    use cci_core::model::validate;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
    }

    #[test]
    fn network_round_trip() {
        let net = fixtures::star();
        let back = network_from_json(&network_to_json(&net)).unwrap();
        assert!(validate(&back).is_empty());
        assert_eq!(back.nodes(), net.nodes());
        assert_eq!(back.red_edges(), net.red_edges());
        for (a, b) in back.links().iter().zip(net.links()) {
            assert!(close(a.max_power_w, b.max_power_w) && close(a.noise_w, b.noise_w));
            assert_eq!(
                (a.source, a.target, a.frequency_hz),
                (b.source, b.target, b.frequency_hz)
            );
        }
    }

    #[test]
    fn power_is_dbm_on_disk() {
        let doc: serde_json::Value = serde_json::from_str(&network_to_json(&fixtures::pair())).unwrap();
        assert_eq!(doc["schema"], 1);
        assert!((doc["links"][0]["max_power_dbm"].as_f64().unwrap() - 30.0).abs() < 1e-12);
    }

    #[test]
    fn wrong_schema_or_garbage_rejected() {
        let text = network_to_json(&fixtures::pair()).replace("\"schema\": 1", "\"schema\": 7");
        assert!(matches!(network_from_json(&text), Err(IoError::Schema(7))));
        assert!(matches!(network_from_json("{"), Err(IoError::Json(_))));
    }

    #[test]
    fn csv_layout() {
        let report = run_experiment(&ExperimentConfig::new(GenConfig::new(8, 8, 4, 1), 3)).unwrap();
        let mut buf = Vec::new();
        write_report_csv(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(lines.len(), 5);
        assert!(lines[4].starts_with("mean,"));
        let json: serde_json::Value = serde_json::from_str(&report_to_json(&report)).unwrap();
        assert_eq!(json["trials"].as_array().unwrap().len(), 3);
    }
}
