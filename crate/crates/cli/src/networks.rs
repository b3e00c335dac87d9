//! Structures of the small repository networks, vendored as graph files.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use cocausal_core::Dag;

use crate::format::{parse_dag, FormatError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Network {
    Asia,
    Earthquake,
    Sachs,
    Survey,
}

impl Network {
    pub const ALL: [Network; 4] = [Network::Asia, Network::Earthquake, Network::Sachs, Network::Survey];

    pub fn name(self) -> &'static str {
        match self {
            Network::Asia => "asia",
            Network::Earthquake => "earthquake",
            Network::Sachs => "sachs",
            Network::Survey => "survey",
        }
    }

    /// `(nodes, edges)` of the published structure.
    pub fn expected_counts(self) -> (usize, usize) {
        match self {
            Network::Asia => (8, 8),
            Network::Earthquake => (5, 4),
            Network::Sachs => (11, 17),
            Network::Survey => (6, 6),
        }
    }

    fn source(self) -> &'static str {
        match self {
            Network::Asia => include_str!("../networks/asia.txt"),
            Network::Earthquake => include_str!("../networks/earthquake.txt"),
            Network::Sachs => include_str!("../networks/sachs.txt"),
            Network::Survey => include_str!("../networks/survey.txt"),
        }
    }

    pub fn dag(self) -> Dag {
        let d = parse_dag(self.source()).expect("vendored network parses");
        debug_assert_eq!((d.n_observed(), d.edge_count()), self.expected_counts());
        d
    }
}

impl fmt::Display for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Network {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Network::ALL
            .into_iter()
            .find(|n| n.name() == s)
            .ok_or_else(|| format!("unknown network `{s}`"))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum NetworkError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{name}: expected {expected:?} nodes/edges, found {found:?}")]
    CountMismatch {
        name: String,
        expected: (usize, usize),
        found: (usize, usize),
    },
}

/// Reads a DAG file; if its file stem names a known network, the node and
/// edge counts must match that network.
pub fn load_network(path: &Path) -> Result<Dag, NetworkError> {
    let d = parse_dag(&std::fs::read_to_string(path)?)?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
    if let Ok(net) = stem.parse::<Network>() {
        let found = (d.n_observed(), d.edge_count());
        if found != net.expected_counts() {
            return Err(NetworkError::CountMismatch {
                name: net.name().into(),
                expected: net.expected_counts(),
                found,
            });
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vendored_counts() {
        for net in Network::ALL {
            let d = net.dag();
            assert_eq!((d.n_observed(), d.edge_count()), net.expected_counts(), "{net}");
            assert_eq!(d.n_latent(), 0);
        }
    }
}
