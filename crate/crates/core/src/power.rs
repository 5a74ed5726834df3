//! Per-slot transmit powers and capacity evaluation.
//!
//! A link transmits at full power in its own slot. In every other slot it
//! transmits at the largest power that keeps its share of each priority
//! victim's interference budget: the budget `P_min` of a victim is split
//! equally over the blockers contesting it in that slot.

use thiserror::Error;

use crate::coloring::QueueSchedule;
use crate::model::{LinkId, Network, RedEdgeId};
use crate::radio::{self, BitsPerSecond, PhysicsError, Watts};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PowerError {
    #[error(transparent)]
    Physics(#[from] PhysicsError),
    #[error("schedule covers {schedule} links but the network has {network}")]
    ScheduleMismatch { schedule: usize, network: usize },
    #[error("power table covers {table} links but the network has {network}")]
    TableMismatch { table: usize, network: usize },
}

/// Propagation factors that do not depend on powers: received watts per
/// transmitted watt for every link, and the interference kernel
/// `z(θ)/(4πd²)` for every red edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagation {
    signal_gain: Vec<f64>,
    kernel: Vec<f64>,
}

impl Propagation {
    pub fn new(network: &Network) -> Result<Self, PhysicsError> {
        let signal_gain = network
            .links()
            .iter()
            .map(|l| {
                radio::friis_received_power(
                    1.0,
                    l.rx_directivity,
                    l.tx_directivity,
                    network.link_length(l.id),
                    l.frequency_hz,
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        let kernel = network
            .red_edges()
            .iter()
            .map(|red| {
                radio::interference_kernel(network.rx_antenna(red.victim), network.tx_antenna(red.base).position)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { signal_gain, kernel })
    }

    /// Friis received power per transmitted watt.
    pub fn signal_gain(&self, link: LinkId) -> f64 {
        self.signal_gain[link.index()]
    }

    /// Interference received per watt transmitted by the red edge's base.
    pub fn kernel(&self, red: RedEdgeId) -> f64 {
        self.kernel[red.index()]
    }
}

/// Allowed interference `P_min` at each link's receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceBudget {
    p_min: Vec<Watts>,
}

impl InterferenceBudget {
    pub fn from_values(p_min: Vec<Watts>) -> Self {
        Self { p_min }
    }

    pub fn uniform(network: &Network, p_min: Watts) -> Self {
        Self {
            p_min: vec![p_min; network.num_links()],
        }
    }

    /// `P_min(l) = P_r(l) / ratio` with `P_r` the link's full-power Friis
    /// signal.
    pub fn from_ratio(network: &Network, propagation: &Propagation, ratio: f64) -> Self {
        Self {
            p_min: network
                .links()
                .iter()
                .map(|l| propagation.signal_gain(l.id) * l.max_power_w / ratio)
                .collect(),
        }
    }

    pub fn p_min(&self, link: LinkId) -> Watts {
        self.p_min[link.index()]
    }

    pub fn values(&self) -> &[Watts] {
        &self.p_min
    }
}

/// Blocker sets `B^j_l`. A link is priority in exactly one slot (its
/// label), so the set is stored once per link.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockerSet {
    slot: Vec<usize>,
    members: Vec<Vec<RedEdgeId>>,
}

impl BlockerSet {
    /// Red edges contesting `link` during `slot`, or `None` if `link` is not
    /// priority in that slot.
    pub fn get(&self, link: LinkId, slot: usize) -> Option<&[RedEdgeId]> {
        (self.slot[link.index()] == slot).then(|| self.members[link.index()].as_slice())
    }

    pub fn count(&self, link: LinkId) -> usize {
        self.members[link.index()].len()
    }
}

pub fn blocker_sets(network: &Network, schedule: &QueueSchedule) -> BlockerSet {
    let members = network
        .link_ids()
        .map(|l| {
            network
                .contesting(l)
                .iter()
                .copied()
                .filter(|&r| schedule.label(network.red_edge(r).base) != schedule.label(l))
                .collect()
        })
        .collect();
    BlockerSet {
        slot: schedule.labels().to_vec(),
        members,
    }
}

/// Largest power `interferer` may use in `slot` so that each priority
/// victim receives at most its equal share `P_min / |B|` from it. Without a
/// priority victim in the slot the link keeps full power.
///
/// The binding victim is the one permitting the least power, i.e. the one
/// minimising `d² · P_min / (z(θ) · |B|)`.
pub fn reduced_power(
    interferer: LinkId,
    slot: usize,
    network: &Network,
    schedule: &QueueSchedule,
    budget: &InterferenceBudget,
) -> Result<Watts, PowerError> {
    let p_max = network.link(interferer).max_power_w;
    let mut allowed = p_max;
    for &r in network.effects_of(interferer) {
        let red = network.red_edge(r);
        if schedule.label(red.victim) != slot || schedule.label(interferer) == slot {
            continue;
        }
        let blockers = network
            .contesting(red.victim)
            .iter()
            .filter(|&&c| schedule.label(network.red_edge(c).base) != slot)
            .count();
        let share = budget.p_min(red.victim) / blockers as f64;
        let p = radio::power_for_interference(
            network.rx_antenna(red.victim),
            network.tx_antenna(interferer).position,
            share,
        )?;
        allowed = allowed.min(p);
    }
    Ok(allowed)
}

/// Transmit power per link and slot.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerTable {
    power: Vec<Vec<Watts>>,
    num_slots: usize,
}

impl PowerTable {
    pub fn from_rows(power: Vec<Vec<Watts>>, num_slots: usize) -> Self {
        Self { power, num_slots }
    }

    /// Every link at `P_max` in every slot.
    pub fn full_power(network: &Network, num_slots: usize) -> Self {
        Self {
            power: network.links().iter().map(|l| vec![l.max_power_w; num_slots]).collect(),
            num_slots,
        }
    }

    pub fn get(&self, link: LinkId, slot: usize) -> Watts {
        self.power[link.index()][slot]
    }

    pub fn row(&self, link: LinkId) -> &[Watts] {
        &self.power[link.index()]
    }

    pub fn num_slots(&self) -> usize {
        self.num_slots
    }

    pub fn num_links(&self) -> usize {
        self.power.len()
    }

    /// Average transmit power of one link over the cycle.
    pub fn mean_power(&self, link: LinkId) -> Watts {
        if self.num_slots == 0 {
            return 0.0;
        }
        self.row(link).iter().sum::<f64>() / self.num_slots as f64
    }

    /// Mean over slots of the summed transmit power of all links.
    pub fn mean_total_power(&self) -> Watts {
        (0..self.num_links()).map(|l| self.mean_power(LinkId(l))).sum()
    }
}

pub fn build_power_table(
    network: &Network,
    schedule: &QueueSchedule,
    budget: &InterferenceBudget,
) -> Result<PowerTable, PowerError> {
    let propagation = Propagation::new(network)?;
    build_power_table_with(network, &propagation, schedule, budget)
}

/// [`build_power_table`] with precomputed propagation factors.
pub fn build_power_table_with(
    network: &Network,
    propagation: &Propagation,
    schedule: &QueueSchedule,
    budget: &InterferenceBudget,
) -> Result<PowerTable, PowerError> {
    if schedule.num_links() != network.num_links() {
        return Err(PowerError::ScheduleMismatch {
            schedule: schedule.num_links(),
            network: network.num_links(),
        });
    }
    let blockers = blocker_sets(network, schedule);
    let mut table = PowerTable::full_power(network, schedule.num_slots());
    for link in network.link_ids() {
        let own = schedule.label(link);
        for &r in network.effects_of(link) {
            let victim = network.red_edge(r).victim;
            let slot = schedule.label(victim);
            if slot == own {
                continue;
            }
            let share = budget.p_min(victim) / blockers.count(victim) as f64;
            let allowed = share / propagation.kernel(r);
            let cell = &mut table.power[link.index()][slot];
            *cell = cell.min(allowed);
        }
    }
    Ok(table)
}

/// Interference at `link`'s receiver during `slot` from every red edge
/// contesting it.
pub fn slot_interference(
    network: &Network,
    propagation: &Propagation,
    table: &PowerTable,
    link: LinkId,
    slot: usize,
) -> Watts {
    network
        .contesting(link)
        .iter()
        .map(|&r| propagation.kernel(r) * table.get(network.red_edge(r).base, slot))
        .sum()
}

pub fn slot_sinr(link: LinkId, slot: usize, network: &Network, table: &PowerTable) -> Result<f64, PowerError> {
    let propagation = Propagation::new(network)?;
    Ok(slot_sinr_with(link, slot, network, &propagation, table))
}

pub fn slot_sinr_with(
    link: LinkId,
    slot: usize,
    network: &Network,
    propagation: &Propagation,
    table: &PowerTable,
) -> f64 {
    let signal = propagation.signal_gain(link) * table.get(link, slot);
    let interference = slot_interference(network, propagation, table, link, slot);
    signal / (network.link(link).noise_w + interference)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interference {
    /// Signal over noise plus received interference.
    Included,
    /// Signal over noise only.
    Ignored,
}

/// Average capacity of each link over the queue cycle.
pub fn link_capacities(
    network: &Network,
    propagation: &Propagation,
    table: &PowerTable,
    mode: Interference,
) -> Result<Vec<BitsPerSecond>, PowerError> {
    if table.num_links() != network.num_links() {
        return Err(PowerError::TableMismatch {
            table: table.num_links(),
            network: network.num_links(),
        });
    }
    let slots = table.num_slots();
    network
        .links()
        .iter()
        .map(|l| {
            let mut total = 0.0;
            for j in 0..slots {
                let signal = propagation.signal_gain(l.id) * table.get(l.id, j);
                let noise = match mode {
                    Interference::Included => l.noise_w + slot_interference(network, propagation, table, l.id, j),
                    Interference::Ignored => l.noise_w,
                };
                total += radio::shannon_capacity(l.bandwidth_hz, signal, noise)?;
            }
            Ok(if slots == 0 { 0.0 } else { total / slots as f64 })
        })
        .collect()
}

/// Per-tick aggregate capacity `C(G, Q)` averaged over the queue cycle.
pub fn network_capacity(network: &Network, table: &PowerTable) -> Result<BitsPerSecond, PowerError> {
    let propagation = Propagation::new(network)?;
    network_capacity_with(network, &propagation, table)
}

pub fn network_capacity_with(
    network: &Network,
    propagation: &Propagation,
    table: &PowerTable,
) -> Result<BitsPerSecond, PowerError> {
    Ok(link_capacities(network, propagation, table, Interference::Included)?
        .iter()
        .sum())
}

/// Capacity with every link at full power in a single shared slot.
pub fn baseline_capacity(network: &Network, propagation: &Propagation) -> Result<BitsPerSecond, PowerError> {
    network_capacity_with(network, propagation, &PowerTable::full_power(network, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::dependent_edge_coloring;
    use crate::fixtures;
    use crate::model::Point;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn star_setup() -> (Network, QueueSchedule, Propagation) {
        let net = fixtures::star();
        let q = dependent_edge_coloring(&net);
        let prop = Propagation::new(&net).unwrap();
        (net, q, prop)
    }

    // Independent recomputation of the kernel for one star interferer.
    fn star_kernel(k: usize) -> f64 {
        let (x, y) = fixtures::STAR_INTERFERER_TX[k];
        let d2 = x * x + y * y;
        let bearing = y.atan2(x);
        let theta = (PI - bearing.abs()).abs();
        let w = fixtures::radio().beamwidth;
        (-4.0 * theta * theta / (2f64.sqrt() * w * w)).exp() / (4.0 * PI * d2)
    }

    #[test]
    fn star_blockers() {
        let (net, q, _) = star_setup();
        let b = blocker_sets(&net, &q);
        assert_eq!(b.get(LinkId(0), 0).unwrap().len(), 4);
        assert_eq!(b.get(LinkId(0), 1), None);
        for k in 1..5 {
            assert_eq!(b.get(LinkId(k), 1), Some(&[][..]));
        }
    }

    #[test]
    fn no_red_edges_full_power_everywhere() {
        let net = fixtures::isolated();
        let q = dependent_edge_coloring(&net);
        let b = blocker_sets(&net, &q);
        assert_eq!(b.count(LinkId(0)) + b.count(LinkId(1)), 0);
        let t = build_power_table(&net, &q, &InterferenceBudget::uniform(&net, 1e-12)).unwrap();
        assert_eq!(t, PowerTable::full_power(&net, 1));
    }

    #[test]
    fn reduced_power_without_victim_is_full() {
        let (net, q, _) = star_setup();
        let budget = InterferenceBudget::uniform(&net, 1e-12);
        assert_eq!(reduced_power(LinkId(0), 1, &net, &q, &budget).unwrap(), 1.0);
    }

    // A single victim at θ = 0 with 4πd² = 1: the allowed power equals the
    // share of P_min.
    fn unit_kernel_pair(extra_blocker: bool) -> Network {
        use crate::builder::{NetworkBuilder, RadioParams};
        let radio = RadioParams::default();
        let mut b = NetworkBuilder::new();
        let d = 1.0 / (2.0 * PI.sqrt());
        let rx = b.add_node(Point::new(0.0, 0.0));
        let tx = b.add_node(Point::new(-100.0, 0.0));
        let victim = b.add_link(tx, rx, &radio);
        let i_tx = b.add_node(Point::new(-d, 0.0));
        let i_rx = b.add_node(Point::new(-d, 100.0));
        let interferer = b.add_link(i_tx, i_rx, &radio);
        b.add_interference(interferer, victim);
        if extra_blocker {
            let e_tx = b.add_node(Point::new(-50.0, 10.0));
            let e_rx = b.add_node(Point::new(-50.0, 200.0));
            let extra = b.add_link(e_tx, e_rx, &radio);
            b.add_interference(extra, victim);
        }
        b.build()
    }

    #[test]
    fn reduced_power_unit_kernel() {
        let net = unit_kernel_pair(false);
        let q = dependent_edge_coloring(&net);
        let budget = InterferenceBudget::uniform(&net, 1e-9);
        let p = reduced_power(LinkId(1), 0, &net, &q, &budget).unwrap();
        assert_relative_eq!(p, 1e-9, max_relative = 1e-12);

        let net = unit_kernel_pair(true);
        let q = dependent_edge_coloring(&net);
        let budget = InterferenceBudget::uniform(&net, 1e-9);
        let p = reduced_power(LinkId(1), 0, &net, &q, &budget).unwrap();
        assert_relative_eq!(p, 0.5e-9, max_relative = 1e-12);
    }

    #[test]
    fn reduced_power_roundtrips_through_interference() {
        let (net, q, _) = star_setup();
        let p_min = 2e-9;
        let budget = InterferenceBudget::uniform(&net, p_min);
        for k in 1..5 {
            let p = reduced_power(LinkId(k), 0, &net, &q, &budget).unwrap();
            let back =
                radio::interference_power_at(net.rx_antenna(LinkId(0)), net.tx_antenna(LinkId(k)).position, p).unwrap();
            assert_relative_eq!(back, p_min / 4.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn star_power_table_by_hand() {
        let (net, q, prop) = star_setup();
        let p_min = 1e-9;
        let budget = InterferenceBudget::uniform(&net, p_min);
        let t = build_power_table_with(&net, &prop, &q, &budget).unwrap();
        assert_eq!(t.num_slots(), 2);
        assert_eq!(t.row(LinkId(0)), &[1.0, 1.0]);
        for k in 1..5 {
            let expected = (p_min / 4.0 / star_kernel(k - 1)).min(1.0);
            assert!(expected < 1.0);
            assert_relative_eq!(t.get(LinkId(k), 0), expected, max_relative = 1e-12);
            assert_eq!(t.get(LinkId(k), 1), 1.0);
            assert_relative_eq!(
                t.get(LinkId(k), 0),
                reduced_power(LinkId(k), 0, &net, &q, &budget).unwrap(),
                max_relative = 1e-12
            );
        }
        assert!(t
            .row(LinkId(0))
            .iter()
            .chain(t.row(LinkId(3)))
            .all(|&p| p > 0.0 && p <= 1.0));
    }

    #[test]
    fn sinr_examples() {
        let net = fixtures::isolated();
        let t = PowerTable::full_power(&net, 1);
        let prop = Propagation::new(&net).unwrap();
        let link = net.link(LinkId(0));
        let expected = prop.signal_gain(LinkId(0)) / link.noise_w;
        assert_relative_eq!(
            slot_sinr(LinkId(0), 0, &net, &t).unwrap(),
            expected,
            max_relative = 1e-12
        );

        // Scale powers so that P_r = N and the interference equals N.
        let (star, q, prop) = star_setup();
        let n = star.link(LinkId(0)).noise_w;
        let mut rows = vec![vec![0.0; 2]; 5];
        rows[0][0] = n / prop.signal_gain(LinkId(0));
        rows[1][0] = n / prop.kernel(RedEdgeId(0));
        rows[2][0] = 1e-300;
        rows[3][0] = 1e-300;
        rows[4][0] = 1e-300;
        let t = PowerTable::from_rows(rows, q.num_slots());
        assert_relative_eq!(slot_sinr(LinkId(0), 0, &star, &t).unwrap(), 0.5, max_relative = 1e-9);
    }

    #[test]
    fn star_sinr_by_hand() {
        let (net, q, prop) = star_setup();
        let budget = InterferenceBudget::uniform(&net, 1e-9);
        let t = build_power_table_with(&net, &prop, &q, &budget).unwrap();
        let link = net.link(LinkId(0));
        let r = fixtures::radio();
        let signal = r.tx_directivity
            * r.rx_directivity
            * (radio::SPEED_OF_LIGHT / (4.0 * PI * 2000.0 * r.frequency_hz)).powi(2);
        for slot in 0..2 {
            let interference: f64 = (0..4).map(|k| star_kernel(k) * t.get(LinkId(k + 1), slot)).sum();
            let expected = signal / (link.noise_w + interference);
            assert_relative_eq!(
                slot_sinr(LinkId(0), slot, &net, &t).unwrap(),
                expected,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn capacity_examples() {
        let net = fixtures::isolated();
        let t = PowerTable::full_power(&net, 1);
        let direct: f64 = net
            .links()
            .iter()
            .map(|l| radio::pc_capacity(l, l.max_power_w, net.link_length(l.id)).unwrap())
            .sum();
        assert_relative_eq!(network_capacity(&net, &t).unwrap(), direct, max_relative = 1e-12);

        let (star, q, prop) = star_setup();
        let budget = InterferenceBudget::uniform(&star, 1e-9);
        let t = build_power_table_with(&star, &prop, &q, &budget).unwrap();
        let c = network_capacity(&star, &t).unwrap();

        // slot-by-slot re-summation
        let mut brute = 0.0;
        for slot in 0..t.num_slots() {
            for l in star.links() {
                let sinr = slot_sinr(l.id, slot, &star, &t).unwrap();
                brute += l.bandwidth_hz * (1.0 + sinr).log2();
            }
        }
        brute /= t.num_slots() as f64;
        assert_relative_eq!(c, brute, max_relative = 1e-12);

        let wide_links: Vec<_> = star
            .links()
            .iter()
            .map(|l| crate::model::Link {
                bandwidth_hz: 2.0 * l.bandwidth_hz,
                ..l.clone()
            })
            .collect();
        let wide = Network::new(star.nodes().to_vec(), wide_links, star.red_edges().to_vec());
        assert_relative_eq!(network_capacity(&wide, &t).unwrap(), 2.0 * c, max_relative = 1e-12);
    }

    #[test]
    fn star_dynamic_beats_full_power_baseline() {
        let (net, q, prop) = star_setup();
        let budget = InterferenceBudget::from_ratio(&net, &prop, 1000.0);
        let t = build_power_table_with(&net, &prop, &q, &budget).unwrap();
        let dynamic = network_capacity_with(&net, &prop, &t).unwrap();
        let baseline = baseline_capacity(&net, &prop).unwrap();
        assert!(dynamic > baseline, "{dynamic} <= {baseline}");
    }

    #[test]
    fn star_interference_cap_and_priority() {
        let (net, q, prop) = star_setup();
        for p_min in [1e-12, 1e-10, 1e-9] {
            let budget = InterferenceBudget::uniform(&net, p_min);
            let t = build_power_table_with(&net, &prop, &q, &budget).unwrap();
            let total = slot_interference(&net, &prop, &t, LinkId(0), 0);
            assert!(total <= p_min * (1.0 + 1e-9));
            for l in net.link_ids() {
                assert_eq!(t.get(l, q.label(l)), net.link(l).max_power_w);
            }
        }
    }

    #[test]
    fn mismatched_schedule_is_an_error() {
        let net = fixtures::star();
        let q = QueueSchedule::from_labels(vec![0, 1], 2);
        let err = build_power_table(&net, &q, &InterferenceBudget::uniform(&net, 1.0)).unwrap_err();
        assert_eq!(
            err,
            PowerError::ScheduleMismatch {
                schedule: 2,
                network: 5
            }
        );
    }
}
