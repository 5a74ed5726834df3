//! Co-channel interference mitigation for point-to-point wireless networks.
//!
//! The pipeline, bottom-up:
//!
//! * [`model`]: nodes, directional antennas, black link edges and red
//!   interference edges.
//! * [`radio`]: Shannon, Friis and radiation-pattern kernels.
//! * [`coloring`]: time-slot queues from a proper coloring of the link
//!   dependency graph.
//! * [`power`]: per-slot power tables that cap interference at each
//!   priority receiver, and capacity evaluation.
//! * [`optimizer`]: search for the allowed-interference ratio maximising
//!   network capacity.
//! * [`planner`]: greedy migration of links onto additional frequencies.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod builder;
pub mod coloring;
pub mod fixtures;
pub mod model;
pub mod optimizer;
pub mod planner;
pub mod power;
pub mod radio;
pub mod spline;

pub use coloring::QueueSchedule;
pub use model::{LinkId, Network, NodeId, RedEdgeId};
pub use power::{InterferenceBudget, PowerTable, Propagation};
