//! Instance bundles, graph text files, bundled networks and the experiment
//! harness behind the `cocausal` binary.

pub mod bundle;
pub mod format;
pub mod harness;
pub mod networks;
