use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{EdgeMark, GraphError, Mag};
use crate::node::{NodeId, NodeSet};

/// Type of an incidence entry, seen from the owning node `u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Incidence {
    /// `u -> v`
    Tail,
    /// `u <- v`
    Head,
    /// `u <-> v`
    Bidirected,
}

impl Incidence {
    /// Marks `(at owner, at neighbour)` of the corresponding edge.
    pub fn marks(self) -> (EdgeMark, EdgeMark) {
        match self {
            Incidence::Tail => (EdgeMark::Tail, EdgeMark::Arrow),
            Incidence::Head => (EdgeMark::Arrow, EdgeMark::Tail),
            Incidence::Bidirected => (EdgeMark::Arrow, EdgeMark::Arrow),
        }
    }
}

/// Typed neighbourhood of one node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IncidenceSet {
    pub owner: NodeId,
    pub entries: BTreeMap<NodeId, Incidence>,
}

impl IncidenceSet {
    pub fn new(owner: NodeId) -> Self {
        IncidenceSet {
            owner,
            entries: BTreeMap::new(),
        }
    }

    /// Builds the set from the three disjoint neighbour classes.
    pub fn from_parts(owner: NodeId, out: NodeSet, inc: NodeSet, bi: NodeSet) -> Self {
        let mut s = IncidenceSet::new(owner);
        for (set, kind) in [(out, Incidence::Tail), (inc, Incidence::Head), (bi, Incidence::Bidirected)] {
            for v in set.nodes() {
                s.entries.insert(v, kind);
            }
        }
        s
    }

    /// Undirected degree of the owner.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn neighbors(&self) -> NodeSet {
        self.entries.keys().copied().collect()
    }

    fn of_kind(&self, kind: Incidence) -> NodeSet {
        self.entries
            .iter()
            .filter(|(_, &k)| k == kind)
            .map(|(&v, _)| v)
            .collect()
    }

    pub fn out(&self) -> NodeSet {
        self.of_kind(Incidence::Tail)
    }

    pub fn inc(&self) -> NodeSet {
        self.of_kind(Incidence::Head)
    }

    pub fn bi(&self) -> NodeSet {
        self.of_kind(Incidence::Bidirected)
    }
}

/// Incidence set of `u` in `g`.
pub fn incidence_set(g: &Mag, u: NodeId) -> Result<IncidenceSet, GraphError> {
    let i = g.marks().check_node(u)?;
    let mut s = IncidenceSet::new(u);
    for v in g.marks().neighbors(i).iter() {
        let kind = match (g.marks().mark(i, v), g.marks().mark(v, i)) {
            (Some(EdgeMark::Tail), _) => Incidence::Tail,
            (_, Some(EdgeMark::Tail)) => Incidence::Head,
            _ => Incidence::Bidirected,
        };
        s.entries.insert(NodeId::from(v), kind);
    }
    Ok(s)
}

/// Nodes whose incidence sets differ between `g1` and `g2`.
pub fn node_diff(g1: &Mag, g2: &Mag) -> Result<NodeSet, GraphError> {
    let n = g1.node_count();
    if n != g2.node_count() {
        return Err(GraphError::NodeCountMismatch(n, g2.node_count()));
    }
    let (a, b) = (g1.marks(), g2.marks());
    let mut diff = NodeSet::EMPTY;
    // the mask triple fixes the incidence set exactly
    for u in 0..n {
        if a.adj()[u] != b.adj()[u] || a.arrow()[u] != b.arrow()[u] || a.arrow_far(u) != b.arrow_far(u) {
            diff.insert(u);
        }
    }
    Ok(diff)
}

/// `|node_diff(g1, g2)|`.
pub fn node_distance(g1: &Mag, g2: &Mag) -> Result<usize, GraphError> {
    node_diff(g1, g2).map(|d| d.len())
}

impl Mag {
    /// Rebuilds a graph from the incidence sets of all of its nodes.
    ///
    /// Each edge is written from both endpoints; if two sets disagree about
    /// an edge, the entry of the higher-numbered owner wins, so callers that
    /// assemble graphs from independently recovered neighbourhoods get a
    /// well-defined result.
    pub fn from_incidence_sets(n: usize, sets: &[IncidenceSet]) -> Result<Mag, GraphError> {
        let mut g = Mag::empty(n)?;
        let mut sorted: Vec<&IncidenceSet> = sets.iter().collect();
        sorted.sort_by_key(|s| s.owner);
        for s in sorted {
            g.overwrite_neighborhood(s)?;
        }
        Ok(g)
    }

    /// Replaces every edge incident to `s.owner` by the entries of `s`.
    pub fn overwrite_neighborhood(&mut self, s: &IncidenceSet) -> Result<(), GraphError> {
        let u = s.owner;
        let i = self.marks().check_node(u)?;
        for v in self.marks().neighbors(i).nodes() {
            self.remove_edge(u, v)?;
        }
        for (&v, &kind) in &s.entries {
            let (mu, mv) = kind.marks();
            self.set_edge(super::Edge::new(u, v, mu, mv))?;
        }
        Ok(())
    }
}
