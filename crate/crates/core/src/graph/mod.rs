//! Mixed-graph data model: DAGs with latents, MAGs, separation criteria and
//! the node-distance metric.

mod dag;
mod incidence;
mod mag;
mod marks;
mod separation;

pub use dag::Dag;
pub use incidence::{incidence_set, node_diff, node_distance, Incidence, IncidenceSet};
pub use mag::{canonical_dag, dag_to_mag, validate_mag, Mag, MagViolation};
pub use marks::{Edge, EdgeMark};
pub use separation::{d_separated, m_separated};

pub(crate) use marks::EdgeMarks;
pub(crate) use separation::{ancestor_closure, connected};

use crate::node::NodeId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("graph must have at least one observed node")]
    NoObservedNodes,
    #[error("graph with {0} nodes exceeds the supported maximum of {max}", max = crate::MAX_NODES)]
    TooManyNodes(usize),
    #[error("unknown node {0}")]
    UnknownNode(u32),
    #[error("self loop on node {0}")]
    SelfLoop(u32),
    #[error("edge {from} -> {to} would create a directed cycle")]
    Cycle { from: u32, to: u32 },
    #[error("nodes {0} and {1} are already adjacent")]
    DuplicateEdge(u32, u32),
    #[error("edge {u} {v}: marks {mark_u:?}/{mark_v:?} are not allowed here")]
    IllegalMarks {
        u: u32,
        v: u32,
        mark_u: EdgeMark,
        mark_v: EdgeMark,
    },
    #[error("separation query endpoints must differ (got {0} twice)")]
    SameEndpoints(NodeId),
    #[error("conditioning set contains query endpoint {0}")]
    EndpointConditioned(NodeId),
    #[error("graphs have different observed node counts ({0} vs {1})")]
    NodeCountMismatch(usize, usize),
}

#[cfg(feature = "serde")]
mod serde_repr {
    use alloc::vec::Vec;

    use super::{Edge, GraphError, Mag};
    use crate::pag::Pag;

    /// Edge-list form shared by [`Mag`] and [`Pag`].
    #[derive(serde::Serialize, serde::Deserialize)]
    pub struct GraphRepr {
        nodes: usize,
        edges: Vec<Edge>,
    }

    impl From<Mag> for GraphRepr {
        fn from(g: Mag) -> Self {
            GraphRepr {
                nodes: g.node_count(),
                edges: g.edges().collect(),
            }
        }
    }

    impl TryFrom<GraphRepr> for Mag {
        type Error = GraphError;
        fn try_from(r: GraphRepr) -> Result<Self, GraphError> {
            Mag::from_edges(r.nodes, &r.edges)
        }
    }

    impl From<Pag> for GraphRepr {
        fn from(g: Pag) -> Self {
            GraphRepr {
                nodes: g.node_count(),
                edges: g.edges().collect(),
            }
        }
    }

    impl TryFrom<GraphRepr> for Pag {
        type Error = GraphError;
        fn try_from(r: GraphRepr) -> Result<Self, GraphError> {
            Pag::from_edges(r.nodes, &r.edges)
        }
    }
}

#[cfg(feature = "serde")]
pub use serde_repr::GraphRepr;
