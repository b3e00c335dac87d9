use alloc::vec::Vec;
use core::fmt;

use super::separation::dag_connected;
use super::{connected, Dag, Edge, EdgeMark, EdgeMarks, GraphError};
use crate::node::{NodeId, NodeSet};

/// Maximal ancestral graph over observed nodes.
///
/// Every edge is either directed (`Tail`/`Arrow`) or bidirected
/// (`Arrow`/`Arrow`). Ancestrality and maximality are *not* enforced on
/// construction, since recovered graphs may be assembled from disagreeing
/// neighbourhoods; use [`validate_mag`] to check them.
#[derive(Clone, PartialEq, Eq, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(into = "super::GraphRepr", try_from = "super::GraphRepr")
)]
pub struct Mag {
    marks: EdgeMarks,
}

impl Mag {
    /// Graph on `n` observed nodes with no edges.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        Ok(Mag {
            marks: EdgeMarks::new(n)?,
        })
    }

    pub fn from_edges(n: usize, edges: &[Edge]) -> Result<Self, GraphError> {
        let mut g = Mag::empty(n)?;
        for e in edges {
            g.add_edge(*e)?;
        }
        Ok(g)
    }

    /// Adds an edge; rejects circles, tail–tail edges, self loops and duplicates.
    pub fn add_edge(&mut self, e: Edge) -> Result<(), GraphError> {
        let (u, v) = (self.marks.check_node(e.u)?, self.marks.check_node(e.v)?);
        if u == v {
            return Err(GraphError::SelfLoop(e.u.0));
        }
        check_mag_marks(&e)?;
        if self.marks.adjacent(u, v) {
            return Err(GraphError::DuplicateEdge(e.u.0, e.v.0));
        }
        self.marks.set(u, v, e.mark_u, e.mark_v);
        Ok(())
    }

    /// Inserts the edge, replacing any existing edge between the same pair.
    pub fn set_edge(&mut self, e: Edge) -> Result<(), GraphError> {
        let (u, v) = (self.marks.check_node(e.u)?, self.marks.check_node(e.v)?);
        if u == v {
            return Err(GraphError::SelfLoop(e.u.0));
        }
        check_mag_marks(&e)?;
        self.marks.set(u, v, e.mark_u, e.mark_v);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: NodeId, v: NodeId) -> Result<bool, GraphError> {
        let (a, b) = (self.marks.check_node(u)?, self.marks.check_node(v)?);
        let had = self.marks.adjacent(a, b);
        self.marks.remove(a, b);
        Ok(had)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.marks.len()
    }

    pub fn edge_count(&self) -> usize {
        self.marks.edge_count()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.marks.edges()
    }

    pub fn adjacent(&self, u: NodeId, v: NodeId) -> bool {
        u.index() < self.node_count() && v.index() < self.node_count() && self.marks.adjacent(u.index(), v.index())
    }

    /// Mark at endpoint `at` of the edge between `at` and `other`.
    pub fn mark(&self, at: NodeId, other: NodeId) -> Option<EdgeMark> {
        if at.index() < self.node_count() && other.index() < self.node_count() {
            self.marks.mark(at.index(), other.index())
        } else {
            None
        }
    }

    pub fn neighbors(&self, u: NodeId) -> NodeSet {
        self.marks.neighbors(u.index())
    }

    /// Maximum undirected degree.
    pub fn max_degree(&self) -> usize {
        (0..self.node_count()).map(|u| self.marks.neighbors(u).len()).max().unwrap_or(0)
    }

    pub fn has_bidirected(&self) -> bool {
        self.edges()
            .any(|e| e.mark_u == EdgeMark::Arrow && e.mark_v == EdgeMark::Arrow)
    }

    /// Ancestor closure (directed edges only) of an observed set.
    pub fn ancestors(&self, set: NodeSet) -> NodeSet {
        super::ancestor_closure(&self.marks.directed_parents(), set)
    }

    pub(crate) fn marks(&self) -> &EdgeMarks {
        &self.marks
    }

    pub(crate) fn from_marks(marks: EdgeMarks) -> Self {
        debug_assert!(!marks.has_circle());
        Mag { marks }
    }

    pub(crate) fn connected_unchecked(&self, u: usize, v: usize, z: NodeSet, parents: &[u64]) -> bool {
        connected(self.marks.adj(), self.marks.arrow(), parents, u, v, z)
    }

    /// Every m-separation statement `u ⊥ v | Z` (u < v, Z ⊆ V \ {u, v}) in a
    /// fixed enumeration order. Exponential in the node count.
    pub fn separation_statements(&self) -> Vec<bool> {
        let parents = self.marks.directed_parents();
        let n = self.node_count();
        let mut out = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                let rest = NodeSet::full(n).without(u).without(v);
                for z in rest.subsets() {
                    out.push(!self.connected_unchecked(u, v, z, &parents));
                }
            }
        }
        out
    }

    /// `true` iff both graphs entail exactly the same m-separation statements.
    /// Stops at the first disagreement.
    pub fn markov_equivalent(&self, other: &Mag) -> bool {
        let n = self.node_count();
        if n != other.node_count() {
            return false;
        }
        // equal m-separation implies equal adjacencies
        if self.marks.adj() != other.marks.adj() {
            return false;
        }
        let (pa, pb) = (self.marks.directed_parents(), other.marks.directed_parents());
        for u in 0..n {
            for v in u + 1..n {
                let rest = NodeSet::full(n).without(u).without(v);
                for z in rest.subsets() {
                    if self.connected_unchecked(u, v, z, &pa) != other.connected_unchecked(u, v, z, &pb) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Unshielded colliders `(a, c, b)` with `a < b`, in lexicographic order.
    pub fn unshielded_colliders(&self) -> Vec<(NodeId, NodeId, NodeId)> {
        let n = self.node_count();
        let mut out = Vec::new();
        for c in 0..n {
            let into_c = self.marks.arrow()[c] & self.marks.adj()[c];
            for a in NodeSet(into_c).iter() {
                for b in NodeSet(into_c).iter().filter(|&b| b > a) {
                    if !self.marks.adjacent(a, b) {
                        out.push((NodeId::from(a), NodeId::from(c), NodeId::from(b)));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn check_mag_marks(e: &Edge) -> Result<(), GraphError> {
    use EdgeMark::*;
    match (e.mark_u, e.mark_v) {
        (Tail, Arrow) | (Arrow, Tail) | (Arrow, Arrow) => Ok(()),
        (mark_u, mark_v) => Err(GraphError::IllegalMarks {
            u: e.u.0,
            v: e.v.0,
            mark_u,
            mark_v,
        }),
    }
}

impl fmt::Debug for Mag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mag{:?}", self.marks)
    }
}

/// First violated MAG condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum MagViolation {
    #[error("directed cycle through node {0}")]
    DirectedCycle(NodeId),
    #[error("bidirected edge {0} <-> {1} joins ancestrally related nodes")]
    BidirectedAncestor(NodeId, NodeId),
    #[error("non-adjacent nodes {0} and {1} have no m-separating set")]
    NotMaximal(NodeId, NodeId),
}

/// Checks ancestrality and maximality, reporting the first violation.
///
/// Maximality is decided exhaustively over every `Z ⊆ V \ {u, v}` for each
/// non-adjacent pair, so the cost grows as `n² · 2ⁿ`.
pub fn validate_mag(g: &Mag) -> Result<(), MagViolation> {
    let n = g.node_count();
    let parents = g.marks.directed_parents();

    // a node on a directed cycle is a proper ancestor of itself
    for u in 0..n {
        let strict = super::ancestor_closure(&parents, NodeSet(parents[u]));
        if strict.contains(u) {
            return Err(MagViolation::DirectedCycle(NodeId::from(u)));
        }
    }

    for e in g.edges() {
        if e.mark_u == EdgeMark::Arrow && e.mark_v == EdgeMark::Arrow {
            let (u, v) = (e.u.index(), e.v.index());
            let anc_v = super::ancestor_closure(&parents, NodeSet::singleton(v));
            let anc_u = super::ancestor_closure(&parents, NodeSet::singleton(u));
            if anc_v.contains(u) || anc_u.contains(v) {
                return Err(MagViolation::BidirectedAncestor(e.u, e.v));
            }
        }
    }

    for u in 0..n {
        for v in u + 1..n {
            if g.marks.adjacent(u, v) {
                continue;
            }
            let rest = NodeSet::full(n).without(u).without(v);
            if !rest.subsets().any(|z| !g.connected_unchecked(u, v, z, &parents)) {
                return Err(MagViolation::NotMaximal(NodeId::from(u), NodeId::from(v)));
            }
        }
    }
    Ok(())
}

/// Marginalizes the latents of `d` into its unique MAG.
///
/// Two observed nodes are adjacent iff an inducing path relative to the
/// latents joins them, which holds iff they are d-connected given their
/// observed common-ancestor set `An({u, v}) ∩ V \ {u, v}`. Adjacent pairs are
/// oriented by ancestry: `u -> v` if `u` is an ancestor of `v`, the reverse if
/// `v` is an ancestor of `u`, and `u <-> v` otherwise.
pub fn dag_to_mag(d: &Dag) -> Mag {
    let n = d.n_observed();
    let observed = d.observed_mask();
    let anc: Vec<NodeSet> = (0..n).map(|u| d.ancestors_dense(NodeSet::singleton(u))).collect();
    let mut marks = EdgeMarks::new(n).expect("a Dag has at least one observed node");
    for u in 0..n {
        for v in u + 1..n {
            let z = anc[u].union(anc[v]).intersection(observed).without(u).without(v);
            if !dag_connected(d, u, v, z) {
                continue;
            }
            if anc[v].contains(u) {
                marks.set(u, v, EdgeMark::Tail, EdgeMark::Arrow);
            } else if anc[u].contains(v) {
                marks.set(u, v, EdgeMark::Arrow, EdgeMark::Tail);
            } else {
                marks.set(u, v, EdgeMark::Arrow, EdgeMark::Arrow);
            }
        }
    }
    Mag::from_marks(marks)
}

/// The canonical DAG of a MAG: directed edges are kept and every bidirected
/// edge `u <-> v` becomes a fresh latent `l` with `l -> u` and `l -> v`.
///
/// For a valid MAG, `dag_to_mag(&canonical_dag(g)) == g`.
pub fn canonical_dag(g: &Mag) -> Result<Dag, GraphError> {
    let bidirected: Vec<Edge> = g
        .edges()
        .filter(|e| e.mark_u == EdgeMark::Arrow && e.mark_v == EdgeMark::Arrow)
        .collect();
    let mut d = Dag::new(g.node_count(), 0)?;
    for e in g.edges() {
        match (e.mark_u, e.mark_v) {
            (EdgeMark::Tail, EdgeMark::Arrow) => {
                d.add_edge(e.u, e.v)?;
            }
            (EdgeMark::Arrow, EdgeMark::Tail) => {
                d.add_edge(e.v, e.u)?;
            }
            _ => {}
        }
    }
    for e in bidirected {
        let l = d.add_latent()?;
        d.add_edge(l, e.u)?;
        d.add_edge(l, e.v)?;
    }
    Ok(d)
}
