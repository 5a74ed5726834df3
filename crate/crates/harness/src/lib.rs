//! Experiment harness around `cci-core`: random networks, red-edge
//! derivation, the dynamic-power experiment and file formats.

pub mod derive;
pub mod experiment;
pub mod gen;
pub mod io;
