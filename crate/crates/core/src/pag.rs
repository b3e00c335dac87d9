//! Partial ancestral graphs built from a known MAG.
//!
//! [`skeleton_pag`] keeps only adjacencies. [`equivalence_class_pag`]
//! enumerates the Markov equivalence class over the skeleton and keeps the
//! marks shared by every member.

use alloc::vec::Vec;
use core::fmt;

use crate::graph::{Edge, EdgeMark, EdgeMarks, GraphError, Mag};
use crate::node::{NodeId, NodeSet};

/// Largest skeleton [`equivalence_class_pag`] will enumerate (3^9 = 19683
/// candidate orientations).
pub const MAX_CLASS_EDGES: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PagError {
    #[error("skeleton has {0} edges; class enumeration is limited to {max}", max = MAX_CLASS_EDGES)]
    TooManyEdges(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Mixed graph whose endpoints may also carry circles.
#[derive(Clone, PartialEq, Eq, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(into = "crate::graph::GraphRepr", try_from = "crate::graph::GraphRepr")
)]
pub struct Pag {
    marks: EdgeMarks,
}

impl Pag {
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        Ok(Pag {
            marks: EdgeMarks::new(n)?,
        })
    }

    pub fn from_edges(n: usize, edges: &[Edge]) -> Result<Self, GraphError> {
        let mut p = Pag::empty(n)?;
        for e in edges {
            let (u, v) = (p.marks.check_node(e.u)?, p.marks.check_node(e.v)?);
            if u == v {
                return Err(GraphError::SelfLoop(e.u.0));
            }
            if p.marks.adjacent(u, v) {
                return Err(GraphError::DuplicateEdge(e.u.0, e.v.0));
            }
            p.marks.set(u, v, e.mark_u, e.mark_v);
        }
        Ok(p)
    }

    /// The MAG itself read as a PAG with every mark determined.
    pub fn oriented(g: &Mag) -> Self {
        Pag { marks: g.marks().clone() }
    }

    pub fn node_count(&self) -> usize {
        self.marks.len()
    }

    pub fn edge_count(&self) -> usize {
        self.marks.edge_count()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.marks.edges()
    }

    /// PAG neighbours of `u`.
    pub fn adjacent_set(&self, u: NodeId) -> NodeSet {
        if u.index() < self.node_count() {
            self.marks.neighbors(u.index())
        } else {
            NodeSet::EMPTY
        }
    }

    pub fn adjacent(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacent_set(u).contains(v.index())
    }

    /// Mark at endpoint `at` of the edge between `at` and `other`.
    pub fn mark(&self, at: NodeId, other: NodeId) -> Option<EdgeMark> {
        if at.index() < self.node_count() && other.index() < self.node_count() {
            self.marks.mark(at.index(), other.index())
        } else {
            None
        }
    }

    /// Nodes `v` with `u -> v` already fixed in the PAG.
    pub fn directed_out(&self, u: NodeId) -> NodeSet {
        let i = u.index();
        let far_arrow = self.marks.arrow_far(i);
        NodeSet(far_arrow & self.adjacent_set(u).bits() & !self.marks.arrow()[i] & !self.marks.circle()[i])
    }

    /// Nodes `v` with `u <-> v` already fixed in the PAG.
    pub fn fixed_bidirected(&self, u: NodeId) -> NodeSet {
        let i = u.index();
        NodeSet(self.marks.arrow_far(i) & self.marks.arrow()[i] & self.adjacent_set(u).bits())
    }

    /// Maximum number of PAG neighbours of any node.
    pub fn max_degree(&self) -> usize {
        (0..self.node_count()).map(|u| self.marks.neighbors(u).len()).max().unwrap_or(0)
    }

    pub fn has_circle(&self) -> bool {
        self.marks.has_circle()
    }

    /// `true` iff `u` has the same neighbours with the same marks at both
    /// ends in `self` and `other`.
    pub fn same_incidence(&self, other: &Pag, u: NodeId) -> bool {
        let i = u.index();
        let (a, b) = (&self.marks, &other.marks);
        a.adj()[i] == b.adj()[i]
            && a.arrow()[i] == b.arrow()[i]
            && a.circle()[i] == b.circle()[i]
            && a.arrow_far(i) == b.arrow_far(i)
            && a.circle_far(i) == b.circle_far(i)
    }
}

impl fmt::Debug for Pag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pag{:?}", self.marks)
    }
}

/// Skeleton of `g` with a circle at every endpoint.
pub fn skeleton_pag(g: &Mag) -> Pag {
    let n = g.node_count();
    let mut marks = EdgeMarks::new(n).expect("a Mag has at least one node");
    for e in g.edges() {
        marks.set(e.u.index(), e.v.index(), EdgeMark::Circle, EdgeMark::Circle);
    }
    Pag { marks }
}

/// Invariant-mark PAG of the Markov equivalence class of `g`, by brute force.
///
/// Every orientation of the skeleton (tail-arrow, arrow-tail, bidirected per
/// edge) is kept if it is ancestral and entails the same m-separations as
/// `g`; maximality then follows from the shared separation relation. A mark
/// is kept where all members agree and becomes a circle elsewhere.
pub fn equivalence_class_pag(g: &Mag) -> Result<Pag, PagError> {
    let edges: Vec<Edge> = g.edges().collect();
    if edges.len() > MAX_CLASS_EDGES {
        return Err(PagError::TooManyEdges(edges.len()));
    }
    let members = equivalence_class(g, &edges);
    let mut marks = EdgeMarks::new(g.node_count())?;
    for (idx, e) in edges.iter().enumerate() {
        let first = members[0][idx];
        let mut mark_u = Some(first.0);
        let mut mark_v = Some(first.1);
        for m in &members[1..] {
            if mark_u != Some(m[idx].0) {
                mark_u = None;
            }
            if mark_v != Some(m[idx].1) {
                mark_v = None;
            }
        }
        marks.set(
            e.u.index(),
            e.v.index(),
            mark_u.unwrap_or(EdgeMark::Circle),
            mark_v.unwrap_or(EdgeMark::Circle),
        );
    }
    Ok(Pag { marks })
}

const ORIENTATIONS: [(EdgeMark, EdgeMark); 3] = [
    (EdgeMark::Tail, EdgeMark::Arrow),
    (EdgeMark::Arrow, EdgeMark::Tail),
    (EdgeMark::Arrow, EdgeMark::Arrow),
];

/// Mark pairs per skeleton edge for every class member (`g` included).
fn equivalence_class(g: &Mag, edges: &[Edge]) -> Vec<Vec<(EdgeMark, EdgeMark)>> {
    let n = g.node_count();
    let colliders = g.unshielded_colliders();
    let total = 3usize.pow(edges.len() as u32);
    let mut members = Vec::new();
    let mut choice: Vec<(EdgeMark, EdgeMark)> = Vec::with_capacity(edges.len());
    for code in 0..total {
        choice.clear();
        let mut c = code;
        let mut marks = EdgeMarks::new(n).expect("node count already validated");
        for e in edges {
            let o = ORIENTATIONS[c % 3];
            c /= 3;
            choice.push(o);
            marks.set(e.u.index(), e.v.index(), o.0, o.1);
        }
        let cand = Mag::from_marks(marks);
        if cand.unshielded_colliders() != colliders {
            continue;
        }
        if !is_ancestral(&cand) {
            continue;
        }
        if cand.markov_equivalent(g) {
            members.push(choice.clone());
        }
    }
    debug_assert!(!members.is_empty(), "g belongs to its own class");
    members
}

/// Ancestrality only: no directed cycle, no bidirected edge between
/// ancestrally related nodes.
pub(crate) fn is_ancestral(g: &Mag) -> bool {
    let parents = g.marks().directed_parents();
    let n = g.node_count();
    let strict: Vec<NodeSet> = (0..n)
        .map(|u| crate::graph::ancestor_closure(&parents, NodeSet(parents[u])))
        .collect();
    if (0..n).any(|u| strict[u].contains(u)) {
        return false;
    }
    g.edges()
        .filter(|e| e.mark_u == EdgeMark::Arrow && e.mark_v == EdgeMark::Arrow)
        .all(|e| !strict[e.v.index()].contains(e.u.index()) && !strict[e.u.index()].contains(e.v.index()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(i: u32) -> NodeId {
        NodeId(i)
    }

    #[test]
    fn skeleton_keeps_adjacency_only() {
        let g = Mag::from_edges(4, &[Edge::directed(n(0), n(1)), Edge::bidirected(n(1), n(2))]).unwrap();
        let p = skeleton_pag(&g);
        assert_eq!(p.edge_count(), 2);
        assert!(p.edges().all(|e| e.mark_u == EdgeMark::Circle && e.mark_v == EdgeMark::Circle));
        assert_eq!(skeleton_pag(&Mag::empty(3).unwrap()).edge_count(), 0);
    }

    #[test]
    fn single_edge_class_is_fully_circled() {
        let g = Mag::from_edges(2, &[Edge::directed(n(0), n(1))]).unwrap();
        let p = equivalence_class_pag(&g).unwrap();
        assert_eq!(p, skeleton_pag(&g));
    }

    #[test]
    fn collider_arrowheads_are_invariant() {
        // a -> c <- b
        let g = Mag::from_edges(3, &[Edge::directed(n(0), n(2)), Edge::directed(n(1), n(2))]).unwrap();
        let p = equivalence_class_pag(&g).unwrap();
        let want = Pag::from_edges(
            3,
            &[
                Edge::new(n(0), n(2), EdgeMark::Circle, EdgeMark::Arrow),
                Edge::new(n(1), n(2), EdgeMark::Circle, EdgeMark::Arrow),
            ],
        )
        .unwrap();
        assert_eq!(p, want);
    }

    #[test]
    fn oversized_skeleton_is_refused() {
        let edges: Vec<Edge> = (1..11).map(|v| Edge::directed(n(0), n(v))).collect();
        let g = Mag::from_edges(11, &edges).unwrap();
        assert_eq!(equivalence_class_pag(&g), Err(PagError::TooManyEdges(10)));
    }

    #[test]
    fn fixed_marks_are_exposed() {
        let g = Mag::from_edges(3, &[Edge::directed(n(0), n(1)), Edge::bidirected(n(1), n(2))]).unwrap();
        let p = Pag::oriented(&g);
        assert_eq!(p.directed_out(n(0)), NodeSet::singleton(1));
        assert_eq!(p.directed_out(n(1)), NodeSet::EMPTY);
        assert_eq!(p.fixed_bidirected(n(1)), NodeSet::singleton(2));
        assert!(p.same_incidence(&Pag::oriented(&g), n(1)));
        assert!(!p.same_incidence(&skeleton_pag(&g), n(1)));
    }
}
