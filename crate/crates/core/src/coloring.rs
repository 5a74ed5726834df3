//! Time-slot queue construction.
//!
//! Every black edge becomes a vertex of the dependency graph `H`; every red
//! edge joins its base to its victim. A proper vertex coloring of `H` is a
//! legal queue: a link and the red edges it causes share one label, and no
//! red edge shares a label with the link it interferes.

use crate::model::{LinkId, Network};

/// Simple undirected graph over black edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    adjacency: Vec<Vec<usize>>,
}

impl DependencyGraph {
    /// Builds a simple graph from an edge list; duplicates and self loops
    /// are dropped.
    pub fn from_edges(vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); vertices];
        for (a, b) in edges {
            if a != b {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Self { adjacency }
    }

    pub fn num_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }
}

pub fn build_dependency_graph(network: &Network) -> DependencyGraph {
    DependencyGraph::from_edges(
        network.num_links(),
        network
            .red_edges()
            .iter()
            .map(|red| (red.base.index(), red.victim.index())),
    )
}

/// Greedy smallest-available-color in ascending vertex order. Colors are
/// dense from 0 and at most `Δ(H) + 1` of them are used.
pub fn greedy_vertex_color(h: &DependencyGraph) -> Vec<usize> {
    const UNSET: usize = usize::MAX;
    let mut color = vec![UNSET; h.num_vertices()];
    let mut taken: Vec<bool> = Vec::new();
    for v in 0..h.num_vertices() {
        let nbrs = h.neighbors(v);
        taken.clear();
        taken.resize(nbrs.len() + 1, false);
        for &u in nbrs {
            let c = color[u];
            if c < taken.len() {
                taken[c] = true;
            }
        }
        color[v] = taken.iter().position(|t| !t).unwrap_or(nbrs.len());
    }
    color
}

/// Slot label per link. The queue repeats with period `num_slots`; tick
/// `t` activates label `t mod num_slots`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueueSchedule {
    labels: Vec<usize>,
    num_slots: usize,
}

impl QueueSchedule {
    /// Wraps raw labels. `num_slots` may exceed the largest label + 1, which
    /// leaves idle slots in the cycle; it is raised if it is too small.
    pub fn from_labels(labels: Vec<usize>, num_slots: usize) -> Self {
        let needed = labels.iter().map(|&l| l + 1).max().unwrap_or(0);
        Self {
            labels,
            num_slots: num_slots.max(needed),
        }
    }

    pub fn label(&self, link: LinkId) -> usize {
        self.labels[link.index()]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_slots(&self) -> usize {
        self.num_slots
    }

    pub fn num_links(&self) -> usize {
        self.labels.len()
    }

    pub fn active_color(&self, tick: u64) -> Option<usize> {
        (self.num_slots > 0).then(|| (tick % self.num_slots as u64) as usize)
    }

    pub fn is_priority(&self, link: LinkId, slot: usize) -> bool {
        self.labels[link.index()] == slot
    }
}

pub fn dependent_edge_coloring(network: &Network) -> QueueSchedule {
    let colors = greedy_vertex_color(&build_dependency_graph(network));
    QueueSchedule::from_labels(colors, 0)
}

/// Checks both legal-queue properties: no red edge shares a label with its
/// victim, and every link shares its label with all of the red edges it
/// causes (red-edge labels are inherited from the base).
pub fn verify_legal_queue(network: &Network, schedule: &QueueSchedule) -> bool {
    if schedule.num_links() != network.num_links() {
        return false;
    }
    if schedule.labels().iter().any(|&l| l >= schedule.num_slots()) {
        return false;
    }
    let red_label: Vec<usize> = network.red_edges().iter().map(|red| schedule.label(red.base)).collect();
    let conflicts_separated = network
        .red_edges()
        .iter()
        .all(|red| red_label[red.id.index()] != schedule.label(red.victim));
    let effects_agree = network.link_ids().all(|link| {
        network
            .effects_of(link)
            .iter()
            .all(|red| red_label[red.index()] == schedule.label(link))
    });
    conflicts_separated && effects_agree
}
