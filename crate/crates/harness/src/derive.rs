//! Red edges from geometry: link `a` interferes link `b` when `b`'s
//! full-power signal is less than `sir_threshold` times what `a`'s
//! transmitter delivers to `b`'s receiver.

use cci_core::builder::with_red_edges;
use cci_core::model::{LinkId, Network};
use cci_core::power::Propagation;
use cci_core::radio::{interference_power_at, PhysicsError};

/// 20 dB.
pub const DEFAULT_SIR_THRESHOLD: f64 = 100.0;

/// Pairwise SIR at full power: `sir[b][a]` is the victim `b`'s signal over
/// the interference from `a` alone, infinite on the diagonal.
pub fn pairwise_sir(network: &Network) -> Result<Vec<Vec<f64>>, PhysicsError> {
    let prop = Propagation::new(network)?;
    let mut sir = vec![vec![f64::INFINITY; network.num_links()]; network.num_links()];
    for b in network.link_ids() {
        let signal = prop.signal_gain(b) * network.link(b).max_power_w;
        let rx = network.rx_antenna(b);
        for a in network.link_ids().filter(|&a| a != b) {
            let tx = network.tx_antenna(a).position;
            let i = interference_power_at(rx, tx, network.link(a).max_power_w)?;
            sir[b.index()][a.index()] = signal / i;
        }
    }
    Ok(sir)
}

/// Replaces the network's red edges with those implied by the threshold.
/// Links on different carriers never interfere.
pub fn derive_interference_edges(network: &Network, sir_threshold: f64) -> Result<Network, PhysicsError> {
    let sir = pairwise_sir(network)?;
    let mut pairs = Vec::new();
    for b in network.link_ids() {
        for a in network.link_ids() {
            let same_carrier = network.link(a).frequency_hz == network.link(b).frequency_hz;
            if a != b && same_carrier && sir[b.index()][a.index()] < sir_threshold {
                pairs.push((a, b));
            }
        }
    }
    pairs.sort_by_key(|&(a, b): &(LinkId, LinkId)| (a, b));
    Ok(with_red_edges(network, &pairs))
}
