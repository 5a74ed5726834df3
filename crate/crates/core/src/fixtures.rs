//! Small hand-built networks used throughout the test suites and by the CLI
//! demos.

use crate::builder::{NetworkBuilder, RadioParams};
use crate::model::{LinkId, Network, Point};

/// Radio used by every fixture: the builder defaults with a wider beam.
pub fn radio() -> RadioParams {
    RadioParams {
        beamwidth: 0.3,
        ..RadioParams::default()
    }
}

/// Three nodes, two links, one red edge (link 1 interferes link 0).
pub fn pair() -> Network {
    let r = radio();
    let mut b = NetworkBuilder::new();
    let a = b.add_node(Point::new(0.0, 0.0));
    let c = b.add_node(Point::new(2000.0, 0.0));
    let d = b.add_node(Point::new(300.0, 900.0));
    let l0 = b.add_link(a, c, &r);
    let l1 = b.add_link(d, a, &r);
    b.add_interference(l1, l0);
    b.build()
}

/// Two well separated links, no interference.
pub fn isolated() -> Network {
    let r = radio();
    let mut b = NetworkBuilder::new();
    let n: Vec<_> = [(0.0, 0.0), (1500.0, 0.0), (0.0, 50_000.0), (1500.0, 50_000.0)]
        .into_iter()
        .map(|(x, y)| b.add_node(Point::new(x, y)))
        .collect();
    b.add_link(n[0], n[1], &r);
    b.add_link(n[2], n[3], &r);
    b.build()
}

/// Positions of the star: victim link 0 runs from (-2000, 0) into a
/// receiver at the origin looking west; links 1..=4 transmit from points in
/// front of that receiver.
pub const STAR_INTERFERER_TX: [(f64, f64); 4] =
    [(-1500.0, 200.0), (-1200.0, -300.0), (-800.0, 150.0), (-600.0, -100.0)];

/// Length of the star's interfering links, meters.
pub const STAR_FEEDER_LENGTH: f64 = 12_000.0;

/// Link 0 is interfered by links 1..=4 (one red edge each, victims all
/// link 0). The dependency graph is a star. The interfering links are long
/// feeders with unity-gain antennas, so their own SNR is low.
pub fn star() -> Network {
    let r = radio();
    let feeder = RadioParams {
        tx_directivity: 1.0,
        rx_directivity: 1.0,
        ..r
    };
    let mut b = NetworkBuilder::new();
    let tx0 = b.add_node(Point::new(-2000.0, 0.0));
    let rx0 = b.add_node(Point::new(0.0, 0.0));
    let victim = b.add_link(tx0, rx0, &r);
    for (k, &(x, y)) in STAR_INTERFERER_TX.iter().enumerate() {
        let tx = b.add_node(Point::new(x, y));
        let side = if k % 2 == 0 { 1.0 } else { -1.0 };
        let rx = b.add_node(Point::new(x, y + side * STAR_FEEDER_LENGTH));
        b.add_link(tx, rx, &feeder);
    }
    for k in 1..=4 {
        b.add_interference(LinkId(k), victim);
    }
    b.build()
}

/// Three links interfering pairwise in a cycle; the dependency graph is a
/// triangle.
pub fn triangle() -> Network {
    let r = radio();
    let mut b = NetworkBuilder::new();
    let pts = [
        (0.0, 0.0),
        (1500.0, 0.0),
        (200.0, 300.0),
        (1700.0, 400.0),
        (100.0, -400.0),
        (1600.0, -300.0),
    ];
    let n: Vec<_> = pts.iter().map(|&(x, y)| b.add_node(Point::new(x, y))).collect();
    let l: Vec<_> = (0..3).map(|k| b.add_link(n[2 * k], n[2 * k + 1], &r)).collect();
    b.add_interference(l[0], l[1]);
    b.add_interference(l[1], l[2]);
    b.add_interference(l[2], l[0]);
    b.build()
}

/// Five parallel links where each interferes the next; the dependency
/// graph is a path.
pub fn path5() -> Network {
    let r = radio();
    let mut b = NetworkBuilder::new();
    let l: Vec<_> = (0..5)
        .map(|k| {
            let y = 250.0 * k as f64;
            let s = b.add_node(Point::new(0.0, y));
            let t = b.add_node(Point::new(2000.0, y));
            b.add_link(s, t, &r)
        })
        .collect();
    for w in l.windows(2) {
        b.add_interference(w[0], w[1]);
    }
    b.build()
}

/// Four links on two carriers: links 0 and 2 on the lower one with link 2
/// interfering link 0, links 1 and 3 on the upper one with link 1
/// interfering link 3.
pub fn two_band() -> Network {
    let low = radio();
    let high = RadioParams {
        frequency_hz: 23e9,
        ..low
    };
    let mut b = NetworkBuilder::new();
    let n: Vec<_> = (0..8)
        .map(|k| b.add_node(Point::new(1000.0 * (k / 2) as f64, 700.0 * (k % 2) as f64)))
        .collect();
    let l0 = b.add_link(n[0], n[1], &low);
    let l1 = b.add_link(n[2], n[3], &high);
    let l2 = b.add_link(n[4], n[5], &low);
    let l3 = b.add_link(n[6], n[7], &high);
    b.add_interference(l2, l0);
    b.add_interference(l1, l3);
    b.build()
}

/// `n` roughly parallel west-to-east links stacked 250 m apart, with
/// lengths cycling through 1.6, 2.0 and 2.6 km. No red edges; combine with
/// [`crate::builder::with_red_edges`].
pub fn bank(n: usize) -> Network {
    let r = radio();
    let mut b = NetworkBuilder::new();
    for k in 0..n {
        let y = 250.0 * k as f64;
        let len = [1600.0, 2000.0, 2600.0][k % 3];
        let s = b.add_node(Point::new(0.0, y));
        let t = b.add_node(Point::new(len, y + 40.0 * (k % 2) as f64));
        b.add_link(s, t, &r);
    }
    b.build()
}
