//! Frequency planning by greedy link migration.
//!
//! A split moves links from the current carrier `G1` to a fresh one `G2`
//! one at a time, always taking the link with the largest power gain (PG).
//! PG scores a move by the change in average transmitted power of the
//! link and its surroundings, minus the change in average interference
//! carried by the red edges around it. Red edges between the two carriers
//! disappear.
//!
//! Queues are maintained incrementally while migrating: removing a link
//! keeps every other label, and an inserted link takes the smallest label
//! not used by its neighbours on the new carrier. Once no link has positive
//! PG both carriers are recolored from scratch; if that exposes new positive
//! PG values migration resumes.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, VecDeque};

use crate::coloring::{dependent_edge_coloring, verify_legal_queue, QueueSchedule};
use crate::model::{LinkId, Network, RedEdgeId, Subnetwork};
use crate::power::{
    build_power_table_with, network_capacity_with, InterferenceBudget, PowerError, PowerTable, Propagation,
};
use crate::radio::{BitsPerSecond, Watts};

/// Either kind of edge whose queue-average power can be taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueueEdge {
    Black(LinkId),
    Red(RedEdgeId),
}

/// Average power over one queue cycle: transmitted power for a link, minus
/// the received interference for a red edge.
pub fn avg_queue_power(edge: QueueEdge, network: &Network, propagation: &Propagation, table: &PowerTable) -> Watts {
    match edge {
        QueueEdge::Black(link) => table.mean_power(link),
        QueueEdge::Red(r) => {
            let ns = table.num_slots();
            if ns == 0 {
                return 0.0;
            }
            let k = propagation.kernel(r);
            let base = network.red_edge(r).base;
            -(0..ns).map(|j| k * table.get(base, j)).sum::<f64>() / ns as f64
        }
    }
}

/// Neighbourhood of a link that its power gain sums over.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Surrounding {
    /// Red edges whose victim is the link.
    pub contesting_red: Vec<RedEdgeId>,
    /// Red edges the link causes.
    pub effects: Vec<RedEdgeId>,
    /// Bases of `contesting_red`, deduplicated.
    pub contesting_bases: Vec<LinkId>,
}

pub fn surrounding_set(network: &Network, link: LinkId) -> Surrounding {
    let contesting_red = network.contesting(link).to_vec();
    let mut contesting_bases: Vec<LinkId> = contesting_red.iter().map(|&r| network.red_edge(r).base).collect();
    contesting_bases.sort_unstable();
    contesting_bases.dedup();
    Surrounding {
        contesting_red,
        effects: network.effects_of(link).to_vec(),
        contesting_bases,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgEntry {
    pub link: LinkId,
    pub pg: f64,
    pub pg_g1: f64,
    pub pg_g2: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Side {
    member: Vec<bool>,
    label: Vec<usize>,
    num_slots: usize,
}

impl Side {
    fn members(&self) -> Vec<LinkId> {
        (0..self.member.len()).filter(|&i| self.member[i]).map(LinkId).collect()
    }
}

#[derive(Debug, Clone, Copy)]
enum Change {
    Keep,
    Remove(LinkId),
    Insert(LinkId, usize),
}

/// A side with at most one link removed or inserted.
#[derive(Clone, Copy)]
struct View<'s> {
    side: &'s Side,
    change: Change,
    num_slots: usize,
}

impl<'s> View<'s> {
    fn current(side: &'s Side) -> Self {
        Self {
            side,
            change: Change::Keep,
            num_slots: side.num_slots,
        }
    }

    fn member(&self, l: LinkId) -> bool {
        match self.change {
            Change::Remove(e) if e == l => false,
            Change::Insert(e, _) if e == l => true,
            _ => self.side.member[l.index()],
        }
    }

    fn label(&self, l: LinkId) -> usize {
        match self.change {
            Change::Insert(e, label) if e == l => label,
            _ => self.side.label[l.index()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Links left on the old carrier and links moved to the new one, each with
/// a compacted queue and its power table.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitOutcome {
    pub stay: Subnetwork,
    pub moved: Subnetwork,
    pub migrated: Vec<LinkId>,
    pub stay_schedule: QueueSchedule,
    pub moved_schedule: QueueSchedule,
    pub stay_table: PowerTable,
    pub moved_table: PowerTable,
}

/// Stepwise state of one split of a single-carrier network.
#[derive(Debug, Clone)]
pub struct FrequencySplit<'a> {
    network: &'a Network,
    propagation: Propagation,
    budget: InterferenceBudget,
    g1: Side,
    g2: Side,
    pg: Vec<Option<PgEntry>>,
    order: BTreeSet<(Key, Reverse<LinkId>)>,
    migrated: Vec<LinkId>,
}

impl<'a> FrequencySplit<'a> {
    /// All links start on `G1` with the greedy queue; `G2` is empty.
    pub fn new(network: &'a Network, budget: InterferenceBudget) -> Result<Self, PowerError> {
        let propagation = Propagation::new(network)?;
        let q = dependent_edge_coloring(network);
        let m = network.num_links();
        let mut split = Self {
            network,
            propagation,
            budget,
            g1: Side {
                member: vec![true; m],
                label: q.labels().to_vec(),
                num_slots: q.num_slots(),
            },
            g2: Side {
                member: vec![false; m],
                label: vec![0; m],
                num_slots: 0,
            },
            pg: vec![None; m],
            order: BTreeSet::new(),
            migrated: Vec::new(),
        };
        split.refresh_all();
        Ok(split)
    }

    pub fn network(&self) -> &Network {
        self.network
    }

    pub fn budget(&self) -> &InterferenceBudget {
        &self.budget
    }

    pub fn migrated(&self) -> &[LinkId] {
        &self.migrated
    }

    pub fn on_new_frequency(&self, link: LinkId) -> bool {
        self.g2.member[link.index()]
    }

    /// Links still on `G1`, ascending.
    pub fn stay_members(&self) -> Vec<LinkId> {
        self.g1.members()
    }

    pub fn moved_members(&self) -> Vec<LinkId> {
        self.g2.members()
    }

    /// Current (possibly uncompacted) label of a link on whichever side
    /// holds it.
    pub fn label(&self, link: LinkId) -> usize {
        if self.g2.member[link.index()] {
            self.g2.label[link.index()]
        } else {
            self.g1.label[link.index()]
        }
    }

    pub fn num_slots(&self) -> (usize, usize) {
        (self.g1.num_slots, self.g2.num_slots)
    }

    /// Cached PG of a link on `G1`.
    pub fn pg(&self, link: LinkId) -> Option<&PgEntry> {
        self.pg[link.index()].as_ref()
    }

    /// Highest-PG link on `G1`; ties go to the smaller id.
    pub fn best(&self) -> Option<PgEntry> {
        self.order
            .last()
            .map(|&(_, Reverse(l))| self.pg[l.index()].expect("ordered links have a PG"))
    }

    /// Sum of the positive PG values on `G1`.
    pub fn positive_mass(&self) -> f64 {
        self.pg.iter().flatten().map(|p| p.pg.max(0.0)).sum()
    }

    /// Label a link would get on `G2` right now.
    fn insertion_label(&self, e: LinkId) -> usize {
        let net = self.network;
        let mut used: Vec<usize> = net
            .contesting(e)
            .iter()
            .map(|&r| net.red_edge(r).base)
            .chain(net.effects_of(e).iter().map(|&r| net.red_edge(r).victim))
            .filter(|&l| self.g2.member[l.index()])
            .map(|l| self.g2.label[l.index()])
            .collect();
        used.sort_unstable();
        used.dedup();
        used.iter()
            .enumerate()
            .find(|&(i, &l)| i != l)
            .map_or(used.len(), |(i, _)| i)
    }

    fn blockers(&self, view: &View, victim: LinkId) -> usize {
        let net = self.network;
        let own = view.label(victim);
        net.contesting(victim)
            .iter()
            .map(|&r| net.red_edge(r).base)
            .filter(|&b| view.member(b) && view.label(b) != own)
            .count()
    }

    /// Mean of the link's power row under `view`, summed in slot order
    /// exactly as a full power table would be.
    fn avg_power(&self, view: &View, link: LinkId) -> Watts {
        let ns = view.num_slots;
        if ns == 0 {
            return 0.0;
        }
        let net = self.network;
        let p_max = net.link(link).max_power_w;
        let own = view.label(link);
        let mut caps: Vec<(usize, f64)> = Vec::new();
        for &r in net.effects_of(link) {
            let victim = net.red_edge(r).victim;
            if !view.member(victim) {
                continue;
            }
            let slot = view.label(victim);
            if slot == own {
                continue;
            }
            let share = self.budget.p_min(victim) / self.blockers(view, victim) as f64;
            caps.push((slot, share / self.propagation.kernel(r)));
        }
        caps.sort_by_key(|c| c.0);
        let mut total = 0.0;
        let mut next = caps.iter().peekable();
        for j in 0..ns {
            let mut cell = p_max;
            while let Some(&&(slot, allowed)) = next.peek() {
                if slot != j {
                    break;
                }
                cell = cell.min(allowed);
                next.next();
            }
            total += cell;
        }
        total / ns as f64
    }

    /// PG of moving `link` from `G1` to `G2`, computed from the current
    /// state.
    pub fn power_gain(&self, e: LinkId) -> PgEntry {
        let net = self.network;
        let prop = &self.propagation;
        let before1 = View::current(&self.g1);
        let after1 = View {
            change: Change::Remove(e),
            ..before1
        };
        let label2 = self.insertion_label(e);
        let before2 = View::current(&self.g2);
        let after2 = View {
            side: &self.g2,
            change: Change::Insert(e, label2),
            num_slots: self.g2.num_slots.max(label2 + 1),
        };
        let s = surrounding_set(net, e);

        let mut pg_g1 = -self.avg_power(&before1, e);
        for &r in &s.contesting_red {
            let base = net.red_edge(r).base;
            if self.g1.member[base.index()] {
                pg_g1 += prop.kernel(r) * self.avg_power(&before1, base);
            }
        }
        for &r in &s.effects {
            if self.g1.member[net.red_edge(r).victim.index()] {
                pg_g1 += prop.kernel(r) * self.avg_power(&before1, e);
            }
        }
        for &b in &s.contesting_bases {
            if self.g1.member[b.index()] {
                pg_g1 += self.avg_power(&after1, b) - self.avg_power(&before1, b);
            }
        }

        let mut pg_g2 = self.avg_power(&after2, e);
        for &r in &s.contesting_red {
            let base = net.red_edge(r).base;
            if self.g2.member[base.index()] {
                pg_g2 -= prop.kernel(r) * self.avg_power(&after2, base);
            }
        }
        for &r in &s.effects {
            if self.g2.member[net.red_edge(r).victim.index()] {
                pg_g2 -= prop.kernel(r) * self.avg_power(&after2, e);
            }
        }
        for &b in &s.contesting_bases {
            if self.g2.member[b.index()] {
                pg_g2 += self.avg_power(&after2, b) - self.avg_power(&before2, b);
            }
        }

        PgEntry {
            link: e,
            pg: pg_g1 + pg_g2,
            pg_g1,
            pg_g2,
        }
    }

    fn set_pg(&mut self, link: LinkId, entry: Option<PgEntry>) {
        if let Some(old) = self.pg[link.index()].take() {
            self.order.remove(&(Key(old.pg), Reverse(link)));
        }
        if let Some(new) = entry {
            self.order.insert((Key(new.pg), Reverse(link)));
        }
        self.pg[link.index()] = entry;
    }

    fn refresh(&mut self, link: LinkId) {
        let entry = self.g1.member[link.index()].then(|| self.power_gain(link));
        self.set_pg(link, entry);
    }

    fn refresh_all(&mut self) {
        for link in self.network.link_ids() {
            self.refresh(link);
        }
    }

    /// Links whose PG reads any state touched by moving `e`: everything
    /// within three hops of `e` in the undirected dependency graph.
    fn affected_by(&self, e: LinkId) -> Vec<LinkId> {
        let net = self.network;
        let mut depth = vec![usize::MAX; net.num_links()];
        let mut queue = VecDeque::from([e]);
        depth[e.index()] = 0;
        let mut out = Vec::new();
        while let Some(l) = queue.pop_front() {
            out.push(l);
            let d = depth[l.index()];
            if d == 3 {
                continue;
            }
            let nbrs = net
                .contesting(l)
                .iter()
                .map(|&r| net.red_edge(r).base)
                .chain(net.effects_of(l).iter().map(|&r| net.red_edge(r).victim));
            for n in nbrs {
                if depth[n.index()] == usize::MAX {
                    depth[n.index()] = d + 1;
                    queue.push_back(n);
                }
            }
        }
        out
    }

    /// Moves `link` to `G2` unconditionally and updates the PG values it
    /// affects.
    pub fn migrate(&mut self, e: LinkId) {
        assert!(self.g1.member[e.index()], "{e} is not on the old carrier");
        let label = self.insertion_label(e);
        self.g1.member[e.index()] = false;
        self.g2.member[e.index()] = true;
        self.g2.label[e.index()] = label;
        let grew = label + 1 > self.g2.num_slots;
        self.g2.num_slots = self.g2.num_slots.max(label + 1);
        self.migrated.push(e);
        if grew {
            self.refresh_all();
        } else {
            for l in self.affected_by(e) {
                self.refresh(l);
            }
        }
    }

    /// Migrates the best link if its PG is positive.
    pub fn step(&mut self) -> Option<LinkId> {
        let best = self.best().filter(|b| b.pg > 0.0)?;
        self.migrate(best.link);
        Some(best.link)
    }

    /// Recolors both carriers from scratch and recomputes every PG.
    pub fn compact(&mut self) {
        for side in [&mut self.g1, &mut self.g2] {
            let members = side.members();
            let sub = self.network.induced(&members);
            let q = dependent_edge_coloring(&sub.network);
            for (new, old) in sub.link_origin.iter().enumerate() {
                side.label[old.index()] = q.label(LinkId(new));
            }
            side.num_slots = q.num_slots();
        }
        self.refresh_all();
    }

    /// Migrates until no link has positive PG after compaction.
    pub fn run(&mut self) {
        loop {
            while self.step().is_some() {}
            self.compact();
            if self.best().is_none_or(|b| b.pg <= 0.0) {
                break;
            }
        }
    }

    fn side_outcome(&self, side: &Side) -> Result<(Subnetwork, QueueSchedule, PowerTable), PowerError> {
        let sub = self.network.induced(&side.members());
        let labels = sub.link_origin.iter().map(|l| side.label[l.index()]).collect();
        let q = QueueSchedule::from_labels(labels, side.num_slots);
        debug_assert!(verify_legal_queue(&sub.network, &q));
        let budget = InterferenceBudget::from_values(sub.link_origin.iter().map(|&l| self.budget.p_min(l)).collect());
        let prop = Propagation::new(&sub.network)?;
        let table = build_power_table_with(&sub.network, &prop, &q, &budget)?;
        Ok((sub, q, table))
    }

    /// Splits the network according to the current state.
    pub fn outcome(&self) -> Result<SplitOutcome, PowerError> {
        let (stay, stay_schedule, stay_table) = self.side_outcome(&self.g1)?;
        let (moved, moved_schedule, moved_table) = self.side_outcome(&self.g2)?;
        Ok(SplitOutcome {
            stay,
            moved,
            migrated: self.migrated.clone(),
            stay_schedule,
            moved_schedule,
            stay_table,
            moved_table,
        })
    }
}

/// Runs one complete split of a single-carrier network.
pub fn assign_new_frequency(network: &Network, budget: InterferenceBudget) -> Result<SplitOutcome, PowerError> {
    let mut split = FrequencySplit::new(network, budget)?;
    split.run();
    split.outcome()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerConfig {
    /// Allowed-interference ratio used for every budget.
    pub ratio: f64,
    /// A split is kept only if it adds more than this much capacity.
    pub profit_threshold: BitsPerSecond,
    pub max_freqs: usize,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            ratio: 100.0,
            profit_threshold: 0.0,
            max_freqs: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGroup {
    /// Links of the original network on this frequency, ascending.
    pub links: Vec<LinkId>,
    pub subnetwork: Subnetwork,
    pub schedule: QueueSchedule,
    pub table: PowerTable,
    pub capacity: BitsPerSecond,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyPlan {
    /// Frequency index of every link.
    pub assignments: Vec<usize>,
    pub groups: Vec<FrequencyGroup>,
    /// `(frequency count, total capacity)`, starting with the input.
    pub profit_trace: Vec<(usize, BitsPerSecond)>,
}

impl FrequencyPlan {
    pub fn total_capacity(&self) -> BitsPerSecond {
        self.groups.iter().map(|g| g.capacity).sum()
    }

    pub fn num_frequencies(&self) -> usize {
        self.groups.len()
    }
}

fn ratio_budget(network: &Network, propagation: &Propagation, ratio: f64) -> InterferenceBudget {
    InterferenceBudget::from_ratio(network, propagation, ratio)
}

fn make_group(
    links: Vec<LinkId>,
    subnetwork: Subnetwork,
    schedule: QueueSchedule,
    table: PowerTable,
) -> Result<FrequencyGroup, PowerError> {
    let prop = Propagation::new(&subnetwork.network)?;
    let capacity = network_capacity_with(&subnetwork.network, &prop, &table)?;
    Ok(FrequencyGroup {
        links,
        subnetwork,
        schedule,
        table,
        capacity,
    })
}

fn initial_group(network: &Network, links: Vec<LinkId>, ratio: f64) -> Result<FrequencyGroup, PowerError> {
    let sub = network.induced(&links);
    let prop = Propagation::new(&sub.network)?;
    let q = dependent_edge_coloring(&sub.network);
    let table = build_power_table_with(&sub.network, &prop, &q, &ratio_budget(&sub.network, &prop, ratio))?;
    make_group(links, sub, q, table)
}

fn lift(origin: &[LinkId], sub: &Subnetwork) -> Vec<LinkId> {
    sub.link_origin.iter().map(|l| origin[l.index()]).collect()
}

/// Starts from one group per distinct input frequency and splits groups
/// while each split pays for itself.
pub fn plan_frequencies(network: &Network, config: &PlannerConfig) -> Result<FrequencyPlan, PowerError> {
    let mut groups = Vec::new();
    for f in network.frequencies() {
        let links = network
            .links()
            .iter()
            .filter(|l| l.frequency_hz == f)
            .map(|l| l.id)
            .collect();
        groups.push(initial_group(network, links, config.ratio)?);
    }
    let total = |gs: &[FrequencyGroup]| gs.iter().map(|g| g.capacity).sum::<f64>();
    let mut trace = vec![(groups.len(), total(&groups))];

    while groups.len() < config.max_freqs {
        let mut best: Option<(usize, f64)> = None;
        for (i, g) in groups.iter().enumerate() {
            let net = &g.subnetwork.network;
            let prop = Propagation::new(net)?;
            let mass = FrequencySplit::new(net, ratio_budget(net, &prop, config.ratio))?.positive_mass();
            if mass > 0.0 && best.is_none_or(|(_, m)| mass > m) {
                best = Some((i, mass));
            }
        }
        let Some((i, _)) = best else { break };

        let net = &groups[i].subnetwork.network;
        let prop = Propagation::new(net)?;
        let split = assign_new_frequency(net, ratio_budget(net, &prop, config.ratio))?;
        if split.migrated.is_empty() {
            break;
        }
        let origin = &groups[i].links;
        let stay = make_group(
            lift(origin, &split.stay),
            split.stay.clone(),
            split.stay_schedule,
            split.stay_table,
        )?;
        let moved = make_group(
            lift(origin, &split.moved),
            split.moved.clone(),
            split.moved_schedule,
            split.moved_table,
        )?;
        let before = total(&groups);
        let after = before - groups[i].capacity + stay.capacity + moved.capacity;
        if !(after - before > config.profit_threshold) {
            break;
        }
        groups[i] = stay;
        groups.push(moved);
        trace.push((groups.len(), total(&groups)));
    }

    let mut assignments = vec![0; network.num_links()];
    for (i, g) in groups.iter().enumerate() {
        for l in &g.links {
            assignments[l.index()] = i;
        }
    }
    Ok(FrequencyPlan {
        assignments,
        groups,
        profit_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::with_red_edges;
    use crate::coloring::verify_legal_queue;
    use crate::fixtures;
    use crate::model::validate;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn budget(net: &Network, x: f64) -> InterferenceBudget {
        InterferenceBudget::from_ratio(net, &Propagation::new(net).unwrap(), x)
    }

    #[test]
    fn avg_power_examples() {
        let net = fixtures::star();
        let prop = Propagation::new(&net).unwrap();
        let q = dependent_edge_coloring(&net);
        let table = build_power_table_with(&net, &prop, &q, &budget(&net, 1000.0)).unwrap();
        assert_eq!(avg_queue_power(QueueEdge::Black(LinkId(0)), &net, &prop, &table), 1.0);
        let e1 = (table.get(LinkId(1), 0) + table.get(LinkId(1), 1)) / 2.0;
        assert_relative_eq!(avg_queue_power(QueueEdge::Black(LinkId(1)), &net, &prop, &table), e1);
        let red = net.effects_of(LinkId(1))[0];
        assert_relative_eq!(
            avg_queue_power(QueueEdge::Red(red), &net, &prop, &table),
            -prop.kernel(red) * e1,
            max_relative = 1e-15
        );
        let silent = PowerTable::from_rows(vec![vec![0.0; 2]; 5], 2);
        assert_eq!(avg_queue_power(QueueEdge::Red(red), &net, &prop, &silent), 0.0);
    }

    #[test]
    fn surroundings_of_star() {
        let net = fixtures::star();
        let s0 = surrounding_set(&net, LinkId(0));
        assert_eq!(s0.contesting_red.len(), 4);
        assert_eq!(s0.contesting_bases, (1..=4).map(LinkId).collect::<Vec<_>>());
        assert!(s0.effects.is_empty());
        let s1 = surrounding_set(&net, LinkId(1));
        assert_eq!(s1.effects.len(), 1);
        assert!(s1.contesting_red.is_empty() && s1.contesting_bases.is_empty());
        assert_eq!(
            surrounding_set(&fixtures::isolated(), LinkId(0)),
            Surrounding::default()
        );
    }

    #[test]
    fn isolated_link_is_neutral() {
        let net = fixtures::isolated();
        let split = FrequencySplit::new(&net, budget(&net, 100.0)).unwrap();
        let pg = split.power_gain(LinkId(0));
        assert_eq!((pg.pg_g1, pg.pg_g2, pg.pg), (-1.0, 1.0, 0.0));
        let out = assign_new_frequency(&net, budget(&net, 100.0)).unwrap();
        assert!(out.migrated.is_empty());
        assert_eq!(out.stay.network.num_links(), 2);
    }

    #[test]
    fn star_victim_has_positive_gain() {
        let net = fixtures::star();
        let split = FrequencySplit::new(&net, budget(&net, 1000.0)).unwrap();
        let pg = split.power_gain(LinkId(0));
        assert!(pg.pg > 0.0, "{pg:?}");
    }

    #[test]
    fn star_split_removes_red_edges() {
        let net = fixtures::star();
        let out = assign_new_frequency(&net, budget(&net, 1000.0)).unwrap();
        assert!(!out.migrated.is_empty());
        let reds = out.stay.network.red_edges().len() + out.moved.network.red_edges().len();
        assert!(reds < net.red_edges().len());
        for (sub, q) in [(&out.stay, &out.stay_schedule), (&out.moved, &out.moved_schedule)] {
            assert!(validate(&sub.network).is_empty());
            assert!(verify_legal_queue(&sub.network, q));
        }
    }

    #[test]
    fn plan_examples() {
        let cfg = PlannerConfig {
            ratio: 1000.0,
            ..Default::default()
        };
        let iso = plan_frequencies(&fixtures::isolated(), &cfg).unwrap();
        assert_eq!(iso.num_frequencies(), 1);
        assert_eq!(iso.profit_trace.len(), 1);

        let star = fixtures::star();
        let plan = plan_frequencies(&star, &PlannerConfig { max_freqs: 2, ..cfg }).unwrap();
        assert_eq!(plan.num_frequencies(), 2);
        assert!(plan.profit_trace[1].1 > plan.profit_trace[0].1);

        let never = PlannerConfig {
            profit_threshold: f64::INFINITY,
            ..cfg
        };
        assert_eq!(plan_frequencies(&star, &never).unwrap().num_frequencies(), 1);
    }

    #[test]
    fn plan_keeps_existing_carriers_apart() {
        let net = fixtures::two_band();
        let plan = plan_frequencies(
            &net,
            &PlannerConfig {
                max_freqs: 2,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(plan.assignments, vec![0, 1, 0, 1]);
    }

    fn bank_with(pairs: &[(usize, usize)]) -> Network {
        let pairs: Vec<_> = pairs.iter().map(|&(a, b)| (LinkId(a), LinkId(b))).collect();
        with_red_edges(&fixtures::bank(8), &pairs)
    }

    fn red_pairs() -> impl Strategy<Value = Vec<(usize, usize)>> {
        prop::collection::vec((0usize..8, 0usize..8), 1..20)
            .prop_map(|v| v.into_iter().filter(|(a, b)| a != b).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn cached_gains_match_fresh_gains(pairs in red_pairs(), x in 1.0f64..1e4, steps in 1usize..6) {
            let net = bank_with(&pairs);
            let mut split = FrequencySplit::new(&net, budget(&net, x)).unwrap();
            for _ in 0..steps {
                let candidate = split.stay_members().into_iter().next();
                let Some(e) = split.best().map(|b| b.link).or(candidate) else { break };
                split.migrate(e);
                for l in split.stay_members() {
                    prop_assert_eq!(split.pg(l).copied(), Some(split.power_gain(l)));
                }
            }
        }

        #[test]
        fn split_terminates_optimal_and_valid(pairs in red_pairs(), x in 1.0f64..1e4) {
            let net = bank_with(&pairs);
            let mut split = FrequencySplit::new(&net, budget(&net, x)).unwrap();
            split.run();
            prop_assert!(split.migrated().len() <= net.num_links());
            for l in split.stay_members() {
                let pg = split.pg(l).unwrap();
                prop_assert!(pg.pg <= 0.0);
                prop_assert_eq!(pg.pg, pg.pg_g1 + pg.pg_g2);
            }
            let out = split.outcome().unwrap();
            prop_assert_eq!(out.stay.network.num_links() + out.moved.network.num_links(), net.num_links());
            for (sub, q) in [(&out.stay, &out.stay_schedule), (&out.moved, &out.moved_schedule)] {
                prop_assert!(validate(&sub.network).is_empty());
                prop_assert!(verify_legal_queue(&sub.network, q));
            }
        }

        #[test]
        fn accepted_splits_beat_threshold(pairs in red_pairs(), threshold in 0.0f64..1e8) {
            let net = bank_with(&pairs);
            let plan = plan_frequencies(&net, &PlannerConfig { profit_threshold: threshold, ..Default::default() }).unwrap();
            for w in plan.profit_trace.windows(2) {
                prop_assert!(w[1].1 - w[0].1 > threshold);
            }
            let mut seen = vec![0; net.num_links()];
            for (i, g) in plan.groups.iter().enumerate() {
                for l in &g.links {
                    seen[l.index()] += 1;
                    prop_assert_eq!(plan.assignments[l.index()], i);
                }
            }
            prop_assert!(seen.iter().all(|&c| c == 1));
            assert_relative_eq!(plan.total_capacity(), plan.profit_trace.last().unwrap().1, max_relative = 1e-12);
        }
    }
}
