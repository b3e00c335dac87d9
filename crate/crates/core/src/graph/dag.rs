use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::GraphError;
use crate::node::{DagNode, LatentId, NodeId, NodeSet, MAX_NODES};

/// Ground-truth causal DAG over observed and latent variables.
///
/// Observed node `i` occupies dense index `i`; latent `j` occupies `n + j`.
/// Acyclicity is checked on every insertion, so a `Dag` value is always acyclic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dag {
    n_observed: usize,
    n_latent: usize,
    parents: Vec<u64>,
    children: Vec<u64>,
}

impl Dag {
    pub fn new(n_observed: usize, n_latent: usize) -> Result<Self, GraphError> {
        if n_observed == 0 {
            return Err(GraphError::NoObservedNodes);
        }
        let total = n_observed + n_latent;
        if total > MAX_NODES {
            return Err(GraphError::TooManyNodes(total));
        }
        Ok(Dag {
            n_observed,
            n_latent,
            parents: vec![0; total],
            children: vec![0; total],
        })
    }

    /// Builds an observed-only DAG from `(parent, child)` index pairs.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut d = Dag::new(n, 0)?;
        for &(a, b) in edges {
            d.add_edge(NodeId::from(a), NodeId::from(b))?;
        }
        Ok(d)
    }

    #[inline]
    pub fn n_observed(&self) -> usize {
        self.n_observed
    }

    #[inline]
    pub fn n_latent(&self) -> usize {
        self.n_latent
    }

    #[inline]
    pub fn n_total(&self) -> usize {
        self.n_observed + self.n_latent
    }

    /// Dense index of a node, rejecting nodes this DAG does not declare.
    pub fn dense(&self, v: impl Into<DagNode>) -> Result<usize, GraphError> {
        match v.into() {
            DagNode::Observed(o) if o.index() < self.n_observed => Ok(o.index()),
            DagNode::Latent(l) if (l.0 as usize) < self.n_latent => Ok(self.n_observed + l.0 as usize),
            DagNode::Observed(o) => Err(GraphError::UnknownNode(o.0)),
            DagNode::Latent(l) => Err(GraphError::UnknownNode((self.n_observed as u32).saturating_add(l.0))),
        }
    }

    pub fn node(&self, dense: usize) -> DagNode {
        if dense < self.n_observed {
            DagNode::Observed(NodeId::from(dense))
        } else {
            DagNode::Latent(LatentId((dense - self.n_observed) as u32))
        }
    }

    pub fn observed_mask(&self) -> NodeSet {
        NodeSet::full(self.n_observed)
    }

    pub fn is_latent(&self, dense: usize) -> bool {
        dense >= self.n_observed
    }

    /// Appends a fresh latent node with no edges.
    pub fn add_latent(&mut self) -> Result<LatentId, GraphError> {
        if self.n_total() + 1 > MAX_NODES {
            return Err(GraphError::TooManyNodes(self.n_total() + 1));
        }
        self.parents.push(0);
        self.children.push(0);
        self.n_latent += 1;
        Ok(LatentId(self.n_latent as u32 - 1))
    }

    /// Adds `from -> to`. Returns `false` if the edge was already present.
    pub fn add_edge(&mut self, from: impl Into<DagNode>, to: impl Into<DagNode>) -> Result<bool, GraphError> {
        let (a, b) = (self.dense(from)?, self.dense(to)?);
        self.add_edge_dense(a, b)
    }

    pub(crate) fn add_edge_dense(&mut self, a: usize, b: usize) -> Result<bool, GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a as u32));
        }
        if self.parents[b] >> a & 1 == 1 {
            return Ok(false);
        }
        if self.ancestors_dense(NodeSet::singleton(a)).contains(b) {
            return Err(GraphError::Cycle {
                from: a as u32,
                to: b as u32,
            });
        }
        self.parents[b] |= 1 << a;
        self.children[a] |= 1 << b;
        Ok(true)
    }

    /// Removes `from -> to`. Returns `false` if it was absent.
    pub fn remove_edge(&mut self, from: impl Into<DagNode>, to: impl Into<DagNode>) -> Result<bool, GraphError> {
        let (a, b) = (self.dense(from)?, self.dense(to)?);
        Ok(self.remove_edge_dense(a, b))
    }

    pub(crate) fn remove_edge_dense(&mut self, a: usize, b: usize) -> bool {
        let had = self.parents[b] >> a & 1 == 1;
        self.parents[b] &= !(1 << a);
        self.children[a] &= !(1 << b);
        had
    }

    pub fn has_edge(&self, from: impl Into<DagNode>, to: impl Into<DagNode>) -> bool {
        match (self.dense(from), self.dense(to)) {
            (Ok(a), Ok(b)) => self.parents[b] >> a & 1 == 1,
            _ => false,
        }
    }

    #[inline]
    pub(crate) fn parents_dense(&self) -> &[u64] {
        &self.parents
    }

    #[inline]
    pub(crate) fn children_dense(&self) -> &[u64] {
        &self.children
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(|p| p.count_ones() as usize).sum()
    }

    /// Edges among observed nodes only.
    pub fn observed_edge_count(&self) -> usize {
        let obs = self.observed_mask().bits();
        self.parents[..self.n_observed]
            .iter()
            .map(|p| (p & obs).count_ones() as usize)
            .sum()
    }

    /// All edges as `(parent, child)` in dense-index order.
    pub fn edges(&self) -> impl Iterator<Item = (DagNode, DagNode)> + '_ {
        (0..self.n_total()).flat_map(move |b| {
            NodeSet(self.parents[b])
                .iter()
                .map(move |a| (self.node(a), self.node(b)))
        })
    }

    /// Dense `(parent, child)` pairs.
    pub fn dense_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_total()).flat_map(move |b| NodeSet(self.parents[b]).iter().map(move |a| (a, b)))
    }

    /// Children of latent `l` (dense indices).
    pub fn latent_children(&self, l: LatentId) -> NodeSet {
        NodeSet(self.children[self.n_observed + l.0 as usize])
    }

    /// Ancestor closure of a dense set (each node is its own ancestor).
    pub fn ancestors_dense(&self, set: NodeSet) -> NodeSet {
        super::ancestor_closure(&self.parents, set)
    }

    pub fn is_ancestor(&self, a: impl Into<DagNode>, b: impl Into<DagNode>) -> bool {
        match (self.dense(a), self.dense(b)) {
            (Ok(a), Ok(b)) => self.ancestors_dense(NodeSet::singleton(b)).contains(a),
            _ => false,
        }
    }

    /// The graph after `do(target)`: every edge into `target` is removed,
    /// whether it comes from an observed or a latent parent.
    pub fn mutilated(&self, target: NodeId) -> Result<Dag, GraphError> {
        let t = self.dense(target)?;
        let mut d = self.clone();
        for p in NodeSet(d.parents[t]).iter() {
            d.children[p] &= !(1 << t);
        }
        d.parents[t] = 0;
        Ok(d)
    }

    /// A copy with every latent node and latent edge dropped.
    pub fn without_latents(&self) -> Dag {
        let n = self.n_observed;
        let obs = self.observed_mask().bits();
        Dag {
            n_observed: n,
            n_latent: 0,
            parents: self.parents[..n].iter().map(|p| p & obs).collect(),
            children: self.children[..n].iter().map(|c| c & obs).collect(),
        }
    }

    /// A topological order of dense indices (parents first).
    pub fn topological_order(&self) -> Vec<usize> {
        let total = self.n_total();
        let mut indeg: Vec<u32> = self.parents.iter().map(|p| p.count_ones()).collect();
        let mut ready: Vec<usize> = (0..total).rev().filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(total);
        while let Some(x) = ready.pop() {
            order.push(x);
            for c in NodeSet(self.children[x]).iter().collect::<Vec<_>>().into_iter().rev() {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.push(c);
                }
            }
        }
        debug_assert_eq!(order.len(), total);
        order
    }
}

impl fmt::Debug for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dag[n={} l={}", self.n_observed, self.n_latent)?;
        for (a, b) in self.dense_edges() {
            write!(f, "; {a}->{b}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_cycles_and_self_loops() {
        let mut d = Dag::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            d.add_edge(NodeId(2), NodeId(0)),
            Err(GraphError::Cycle { from: 2, to: 0 })
        );
        assert_eq!(d.add_edge(NodeId(1), NodeId(1)), Err(GraphError::SelfLoop(1)));
        assert_eq!(d.add_edge(NodeId(0), NodeId(2)), Ok(true));
        assert_eq!(d.add_edge(NodeId(0), NodeId(2)), Ok(false));
    }

    #[test]
    fn mutilation_cuts_latent_parents() {
        let mut d = Dag::new(2, 0).unwrap();
        let l = d.add_latent().unwrap();
        d.add_edge(l, NodeId(0)).unwrap();
        d.add_edge(l, NodeId(1)).unwrap();
        let m = d.mutilated(NodeId(0)).unwrap();
        assert!(!m.has_edge(l, NodeId(0)));
        assert!(m.has_edge(l, NodeId(1)));
        assert_eq!(m.latent_children(l).len(), 1);
    }

    #[test]
    fn unknown_nodes_are_rejected() {
        let d = Dag::new(2, 1).unwrap();
        assert!(d.dense(NodeId(2)).is_err());
        assert!(d.dense(LatentId(1)).is_err());
        assert_eq!(d.dense(LatentId(0)), Ok(2));
    }

    #[test]
    fn topological_order_respects_edges() {
        let d = Dag::from_edges(4, &[(3, 1), (1, 0), (2, 0)]).unwrap();
        let order = d.topological_order();
        let pos = |x: usize| order.iter().position(|&y| y == x).unwrap();
        for (a, b) in d.dense_edges() {
            assert!(pos(a) < pos(b));
        }
    }
}
