//! Network data model: nodes carrying directional antennas, black link edges
//! and red interference edges.
//!
//! A [`Network`] is immutable once built. Incidence lists (which red edges a
//! link causes, which red edges contest it) are computed in [`Network::new`]
//! so that the schedulers can walk neighborhoods in `O(degree)`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

macro_rules! id_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub usize);

        impl $name {
            pub fn index(self) -> usize {
                self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_type!(
    /// Dense node index.
    NodeId
);
id_type!(
    /// Dense black-edge index.
    LinkId
);
id_type!(
    /// Dense red-edge index.
    RedEdgeId
);

/// A point in the plane, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Bearing from `self` towards `other`, radians in `(-π, π]`.
    pub fn bearing_to(self, other: Point) -> f64 {
        (other.y - self.y).atan2(other.x - self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// A directional antenna mounted at one end of a link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Antenna {
    pub position: Point,
    /// Pointing direction, radians in `[0, 2π)`.
    pub boresight: f64,
    /// Width parameter of the radiation pattern, radians.
    pub beamwidth: f64,
}

impl Antenna {
    /// Antenna at `position` pointing at `towards`.
    pub fn pointing(position: Point, towards: Point, beamwidth: f64) -> Self {
        Self {
            position,
            boresight: position.bearing_to(towards).rem_euclid(TAU),
            beamwidth,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub antennas: Vec<Antenna>,
}

/// A directed point-to-point link (black edge).
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub id: LinkId,
    pub source: NodeId,
    pub target: NodeId,
    /// Index into the source node's antennas.
    pub source_antenna: usize,
    /// Index into the target node's antennas.
    pub target_antenna: usize,
    pub frequency_hz: f64,
    pub bandwidth_hz: f64,
    pub tx_directivity: f64,
    pub rx_directivity: f64,
    pub max_power_w: f64,
    pub noise_w: f64,
}

/// Interference relation (red edge): transmissions on `base` reach the
/// receiver of `victim`, which sits on `victim_node`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceEdge {
    pub id: RedEdgeId,
    pub base: LinkId,
    pub victim: LinkId,
    pub victim_node: NodeId,
}

#[derive(Debug, Clone, Default)]
pub struct Network {
    nodes: Vec<Node>,
    links: Vec<Link>,
    red_edges: Vec<InterferenceEdge>,
    effects: Vec<Vec<RedEdgeId>>,
    contesting: Vec<Vec<RedEdgeId>>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.links == other.links && self.red_edges == other.red_edges
    }
}

impl Network {
    /// Builds a network and its incidence lists. References that do not
    /// resolve are skipped by the index and reported by [`validate`].
    pub fn new(nodes: Vec<Node>, links: Vec<Link>, red_edges: Vec<InterferenceEdge>) -> Self {
        let mut effects = vec![Vec::new(); links.len()];
        let mut contesting = vec![Vec::new(); links.len()];
        for red in &red_edges {
            if red.base.0 < links.len() && red.victim.0 < links.len() {
                effects[red.base.0].push(red.id);
                contesting[red.victim.0].push(red.id);
            }
        }
        Self {
            nodes,
            links,
            red_edges,
            effects,
            contesting,
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn red_edges(&self) -> &[InterferenceEdge] {
        &self.red_edges
    }

    pub fn num_links(&self) -> usize {
        self.links.len()
    }

    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id.0]
    }

    pub fn red_edge(&self, id: RedEdgeId) -> &InterferenceEdge {
        &self.red_edges[id.0]
    }

    pub fn link_ids(&self) -> impl Iterator<Item = LinkId> + '_ {
        (0..self.links.len()).map(LinkId)
    }

    /// Red edges caused by `link` (its effects `r(e)`).
    pub fn effects_of(&self, link: LinkId) -> &[RedEdgeId] {
        &self.effects[link.0]
    }

    /// Red edges whose victim is `link`.
    pub fn contesting(&self, link: LinkId) -> &[RedEdgeId] {
        &self.contesting[link.0]
    }

    pub fn tx_antenna(&self, link: LinkId) -> &Antenna {
        let l = &self.links[link.0];
        &self.nodes[l.source.0].antennas[l.source_antenna]
    }

    pub fn rx_antenna(&self, link: LinkId) -> &Antenna {
        let l = &self.links[link.0];
        &self.nodes[l.target.0].antennas[l.target_antenna]
    }

    /// Transmitter-to-receiver distance of a link.
    pub fn link_length(&self, link: LinkId) -> f64 {
        self.tx_antenna(link).position.distance(self.rx_antenna(link).position)
    }

    /// Maximum interference degree δ: max over links of caused plus
    /// contesting red edges.
    pub fn max_interference_degree(&self) -> usize {
        self.link_ids()
            .map(|l| self.effects_of(l).len() + self.contesting(l).len())
            .max()
            .unwrap_or(0)
    }

    /// Distinct carrier frequencies in ascending order.
    pub fn frequencies(&self) -> Vec<f64> {
        let mut fs: Vec<f64> = self.links.iter().map(|l| l.frequency_hz).collect();
        fs.sort_by(f64::total_cmp);
        fs.dedup();
        fs
    }

    /// Subnetwork induced by the given links: those links, their endpoint
    /// nodes and the red edges running between them, re-indexed densely
    /// in ascending original-id order.
    pub fn induced(&self, keep: &[LinkId]) -> Subnetwork {
        let mut keep: Vec<LinkId> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();

        let mut link_map = vec![None; self.links.len()];
        for (new, old) in keep.iter().enumerate() {
            link_map[old.0] = Some(LinkId(new));
        }

        let mut node_map: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        for old in &keep {
            let l = &self.links[old.0];
            node_map.entry(l.source).or_insert(NodeId(0));
            node_map.entry(l.target).or_insert(NodeId(0));
        }
        let node_origin: Vec<NodeId> = node_map.keys().copied().collect();
        for (new, old) in node_origin.iter().enumerate() {
            node_map.insert(*old, NodeId(new));
        }

        let nodes = node_origin
            .iter()
            .map(|old| Node {
                id: node_map[old],
                antennas: self.nodes[old.0].antennas.clone(),
            })
            .collect();

        let links = keep
            .iter()
            .enumerate()
            .map(|(new, old)| {
                let l = &self.links[old.0];
                Link {
                    id: LinkId(new),
                    source: node_map[&l.source],
                    target: node_map[&l.target],
                    ..l.clone()
                }
            })
            .collect();

        let mut red_origin = Vec::new();
        let mut red_edges = Vec::new();
        for red in &self.red_edges {
            let (Some(base), Some(victim)) = (
                link_map.get(red.base.0).copied().flatten(),
                link_map.get(red.victim.0).copied().flatten(),
            ) else {
                continue;
            };
            let Some(&victim_node) = node_map.get(&red.victim_node) else {
                continue;
            };
            red_edges.push(InterferenceEdge {
                id: RedEdgeId(red_edges.len()),
                base,
                victim,
                victim_node,
            });
            red_origin.push(red.id);
        }

        Subnetwork {
            network: Network::new(nodes, links, red_edges),
            link_origin: keep,
            node_origin,
            red_origin,
        }
    }
}

/// A network extracted from a larger one, with the mapping back to the
/// original ids (`link_origin[new] == old`).
#[derive(Debug, Clone, PartialEq)]
pub struct Subnetwork {
    pub network: Network,
    pub link_origin: Vec<LinkId>,
    pub node_origin: Vec<NodeId>,
    pub red_origin: Vec<RedEdgeId>,
}

/// Links with exactly the given carrier frequency. Unknown frequencies give
/// an empty subnetwork.
pub fn subgraph_by_frequency(network: &Network, frequency_hz: f64) -> Subnetwork {
    let keep: Vec<LinkId> = network
        .links()
        .iter()
        .filter(|l| l.frequency_hz == frequency_hz)
        .map(|l| l.id)
        .collect();
    network.induced(&keep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subject {
    Node(NodeId),
    Link(LinkId),
    RedEdge(RedEdgeId),
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Node(id) => write!(f, "node {id}"),
            Subject::Link(id) => write!(f, "link {id}"),
            Subject::RedEdge(id) => write!(f, "red edge {id}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    NonDenseId,
    BadAntenna,
    DanglingReference,
    SelfLoop,
    NonPositiveParameter,
    ZeroLengthLink,
    MissingAntenna,
    BaseIsVictim,
    VictimNodeNotReceiver,
    CrossFrequency,
    CoincidentInterferer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub subject: Subject,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:?}: {}", self.subject, self.rule, self.detail)
    }
}

/// Checks every structural and physical invariant; an empty result means
/// the network is usable by the schedulers.
pub fn validate(network: &Network) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |subject, rule, detail: String| out.push(Violation { subject, rule, detail });

    for (i, node) in network.nodes.iter().enumerate() {
        let subject = Subject::Node(node.id);
        if node.id.0 != i {
            push(subject, Rule::NonDenseId, format!("stored at index {i}"));
        }
        for (k, a) in node.antennas.iter().enumerate() {
            if !a.position.is_finite() {
                push(subject, Rule::BadAntenna, format!("antenna {k} position not finite"));
            }
            if !(a.beamwidth > 0.0 && a.beamwidth.is_finite()) {
                push(
                    subject,
                    Rule::BadAntenna,
                    format!("antenna {k} beamwidth {}", a.beamwidth),
                );
            }
            if !(0.0..TAU).contains(&a.boresight) {
                push(
                    subject,
                    Rule::BadAntenna,
                    format!("antenna {k} boresight {}", a.boresight),
                );
            }
        }
    }

    let node_count = network.nodes.len();
    let mut resolvable = vec![false; network.links.len()];
    for (i, link) in network.links.iter().enumerate() {
        let subject = Subject::Link(link.id);
        if link.id.0 != i {
            push(subject, Rule::NonDenseId, format!("stored at index {i}"));
        }
        if link.source.0 >= node_count || link.target.0 >= node_count {
            push(subject, Rule::DanglingReference, "endpoint node missing".into());
            continue;
        }
        if link.source == link.target {
            push(subject, Rule::SelfLoop, format!("source == target == {}", link.source));
        }
        let params = [
            ("frequency_hz", link.frequency_hz),
            ("bandwidth_hz", link.bandwidth_hz),
            ("max_power_w", link.max_power_w),
            ("noise_w", link.noise_w),
            ("tx_directivity", link.tx_directivity),
            ("rx_directivity", link.rx_directivity),
        ];
        for (name, value) in params {
            if !(value > 0.0 && value.is_finite()) {
                push(subject, Rule::NonPositiveParameter, format!("{name} = {value}"));
            }
        }
        let src = &network.nodes[link.source.0];
        let dst = &network.nodes[link.target.0];
        if link.source_antenna >= src.antennas.len() || link.target_antenna >= dst.antennas.len() {
            push(subject, Rule::MissingAntenna, "antenna index out of range".into());
            continue;
        }
        resolvable[i] = link.id.0 == i;
        if network.link_length(link.id) == 0.0 {
            push(subject, Rule::ZeroLengthLink, "antennas coincide".into());
        }
    }

    for (i, red) in network.red_edges.iter().enumerate() {
        let subject = Subject::RedEdge(red.id);
        if red.id.0 != i {
            push(subject, Rule::NonDenseId, format!("stored at index {i}"));
        }
        let ok = |l: LinkId| resolvable.get(l.0).copied().unwrap_or(false);
        if !ok(red.base) || !ok(red.victim) {
            push(subject, Rule::DanglingReference, "base or victim link missing".into());
            continue;
        }
        if red.base == red.victim {
            push(subject, Rule::BaseIsVictim, format!("base == victim == {}", red.base));
            continue;
        }
        let base = network.link(red.base);
        let victim = network.link(red.victim);
        if red.victim_node != victim.target {
            push(
                subject,
                Rule::VictimNodeNotReceiver,
                format!("victim_node {} but receiver is {}", red.victim_node, victim.target),
            );
        }
        if base.frequency_hz != victim.frequency_hz {
            push(
                subject,
                Rule::CrossFrequency,
                format!("{} Hz vs {} Hz", base.frequency_hz, victim.frequency_hz),
            );
        }
        let tx = network.tx_antenna(red.base).position;
        let rx = network.rx_antenna(red.victim).position;
        if tx == rx {
            push(
                subject,
                Rule::CoincidentInterferer,
                "interferer sits on receiver".into(),
            );
        }
    }
    out
}
