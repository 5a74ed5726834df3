//! Incremental construction of [`Network`] values with one antenna per link
//! endpoint, each pointing at the far end of its link.

use crate::model::{Antenna, InterferenceEdge, Link, LinkId, Network, Node, NodeId, Point, RedEdgeId};

/// Radio parameters applied to a link, SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    pub frequency_hz: f64,
    pub bandwidth_hz: f64,
    pub tx_directivity: f64,
    pub rx_directivity: f64,
    pub max_power_w: f64,
    pub noise_w: f64,
    pub beamwidth: f64,
}

impl Default for RadioParams {
    /// An 18 GHz, 28 MHz channel with 30 dBi dishes, 1 W transmitters and a
    /// thermal noise floor at 290 K with a 5 dB noise figure.
    fn default() -> Self {
        let bandwidth_hz = 28e6;
        Self {
            frequency_hz: 18e9,
            bandwidth_hz,
            tx_directivity: 1000.0,
            rx_directivity: 1000.0,
            max_power_w: 1.0,
            noise_w: 1.380_649e-23 * 290.0 * bandwidth_hz * 10f64.powf(0.5),
            beamwidth: 0.1,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct NetworkBuilder {
    positions: Vec<Point>,
    nodes: Vec<Node>,
    links: Vec<Link>,
    red_edges: Vec<InterferenceEdge>,
    mount_offset_m: f64,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Distance by which each antenna is pushed from its node towards the
    /// far end of its link, so that antennas sharing a mast stay distinct.
    pub fn with_mount_offset(mut self, meters: f64) -> Self {
        self.mount_offset_m = meters;
        self
    }

    pub fn add_node(&mut self, position: Point) -> NodeId {
        let id = NodeId(self.nodes.len());
        self.positions.push(position);
        self.nodes.push(Node {
            id,
            antennas: Vec::new(),
        });
        id
    }

    pub fn node_position(&self, node: NodeId) -> Point {
        self.positions[node.0]
    }

    pub fn num_links(&self) -> usize {
        self.links.len()
    }

    pub fn add_link(&mut self, source: NodeId, target: NodeId, radio: &RadioParams) -> LinkId {
        let id = LinkId(self.links.len());
        let from = self.positions[source.0];
        let to = self.positions[target.0];
        let source_antenna = self.mount(source, from, to, radio.beamwidth);
        let target_antenna = self.mount(target, to, from, radio.beamwidth);
        self.links.push(Link {
            id,
            source,
            target,
            source_antenna,
            target_antenna,
            frequency_hz: radio.frequency_hz,
            bandwidth_hz: radio.bandwidth_hz,
            tx_directivity: radio.tx_directivity,
            rx_directivity: radio.rx_directivity,
            max_power_w: radio.max_power_w,
            noise_w: radio.noise_w,
        });
        id
    }

    fn mount(&mut self, node: NodeId, at: Point, towards: Point, beamwidth: f64) -> usize {
        let dist = at.distance(towards);
        let pos = if self.mount_offset_m > 0.0 && dist > 0.0 {
            let t = self.mount_offset_m / dist;
            Point::new(at.x + t * (towards.x - at.x), at.y + t * (towards.y - at.y))
        } else {
            at
        };
        let antennas = &mut self.nodes[node.0].antennas;
        antennas.push(Antenna::pointing(pos, towards, beamwidth));
        antennas.len() - 1
    }

    /// Adds a red edge; the victim node is the victim link's receiver.
    pub fn add_interference(&mut self, base: LinkId, victim: LinkId) -> RedEdgeId {
        let id = RedEdgeId(self.red_edges.len());
        self.red_edges.push(InterferenceEdge {
            id,
            base,
            victim,
            victim_node: self.links[victim.0].target,
        });
        id
    }

    pub fn build(self) -> Network {
        Network::new(self.nodes, self.links, self.red_edges)
    }
}

/// Returns a copy of `network` with its red edges replaced.
pub fn with_red_edges(network: &Network, pairs: &[(LinkId, LinkId)]) -> Network {
    let red_edges = pairs
        .iter()
        .enumerate()
        .map(|(i, &(base, victim))| InterferenceEdge {
            id: RedEdgeId(i),
            base,
            victim,
            victim_node: network.link(victim).target,
        })
        .collect();
    Network::new(network.nodes().to_vec(), network.links().to_vec(), red_edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;
    use std::f64::consts::PI;

    #[test]
    fn antennas_face_each_other() {
        let mut b = NetworkBuilder::new();
        let a = b.add_node(Point::new(0.0, 0.0));
        let c = b.add_node(Point::new(0.0, 10.0));
        let l = b.add_link(a, c, &RadioParams::default());
        let net = b.build();
        assert!((net.tx_antenna(l).boresight - PI / 2.0).abs() < 1e-12);
        assert!((net.rx_antenna(l).boresight - 3.0 * PI / 2.0).abs() < 1e-12);
        assert!(validate(&net).is_empty());
    }

    #[test]
    fn mount_offset_shortens_link() {
        let mut b = NetworkBuilder::new().with_mount_offset(1.0);
        let a = b.add_node(Point::new(0.0, 0.0));
        let c = b.add_node(Point::new(100.0, 0.0));
        let l = b.add_link(a, c, &RadioParams::default());
        let net = b.build();
        assert!((net.link_length(l) - 98.0).abs() < 1e-12);
    }
}
