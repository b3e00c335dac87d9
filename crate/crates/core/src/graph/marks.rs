use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::GraphError;
use crate::node::{NodeId, NodeSet, MAX_NODES};

/// Mark at one endpoint of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EdgeMark {
    Tail,
    Arrow,
    Circle,
}

impl EdgeMark {
    /// Character used for this mark on the left side of an edge token (`<-`, `o>`).
    pub fn left_char(self) -> char {
        match self {
            EdgeMark::Tail => '-',
            EdgeMark::Arrow => '<',
            EdgeMark::Circle => 'o',
        }
    }

    /// Character used for this mark on the right side of an edge token (`->`, `-o`).
    pub fn right_char(self) -> char {
        match self {
            EdgeMark::Tail => '-',
            EdgeMark::Arrow => '>',
            EdgeMark::Circle => 'o',
        }
    }

    pub fn from_left_char(c: char) -> Option<Self> {
        match c {
            '-' => Some(EdgeMark::Tail),
            '<' => Some(EdgeMark::Arrow),
            'o' => Some(EdgeMark::Circle),
            _ => None,
        }
    }

    pub fn from_right_char(c: char) -> Option<Self> {
        match c {
            '-' => Some(EdgeMark::Tail),
            '>' => Some(EdgeMark::Arrow),
            'o' => Some(EdgeMark::Circle),
            _ => None,
        }
    }
}

/// An edge in canonical form: `u < v`, with the mark at each endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub mark_u: EdgeMark,
    pub mark_v: EdgeMark,
}

impl Edge {
    /// Builds the canonical form of an edge given in either orientation.
    pub fn new(a: NodeId, b: NodeId, mark_a: EdgeMark, mark_b: EdgeMark) -> Self {
        if a <= b {
            Edge {
                u: a,
                v: b,
                mark_u: mark_a,
                mark_v: mark_b,
            }
        } else {
            Edge {
                u: b,
                v: a,
                mark_u: mark_b,
                mark_v: mark_a,
            }
        }
    }

    pub fn directed(from: NodeId, to: NodeId) -> Self {
        Edge::new(from, to, EdgeMark::Tail, EdgeMark::Arrow)
    }

    pub fn bidirected(a: NodeId, b: NodeId) -> Self {
        Edge::new(a, b, EdgeMark::Arrow, EdgeMark::Arrow)
    }
}

/// `0 -> 1`, `2 <> 3`, `1 o> 4`.
impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}{} {}",
            self.u,
            self.mark_u.left_char(),
            self.mark_v.right_char(),
            self.v
        )
    }
}

/// Endpoint marks of a mixed graph stored as per-node bit masks.
///
/// `arrow[u]` has bit `v` set iff the edge `u`–`v` carries an arrowhead at `u`;
/// likewise `circle[u]`. A tail is an adjacency with neither bit set. The
/// representation is canonical, so derived equality is graph equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) struct EdgeMarks {
    n: usize,
    adj: Vec<u64>,
    arrow: Vec<u64>,
    circle: Vec<u64>,
}

impl EdgeMarks {
    pub(crate) fn new(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoObservedNodes);
        }
        if n > MAX_NODES {
            return Err(GraphError::TooManyNodes(n));
        }
        Ok(EdgeMarks {
            n,
            adj: vec![0; n],
            arrow: vec![0; n],
            circle: vec![0; n],
        })
    }

    #[inline]
    pub(crate) fn len(&self) -> usize {
        self.n
    }

    pub(crate) fn check_node(&self, v: NodeId) -> Result<usize, GraphError> {
        let i = v.index();
        if i < self.n {
            Ok(i)
        } else {
            Err(GraphError::UnknownNode(v.0))
        }
    }

    #[inline]
    pub(crate) fn adj(&self) -> &[u64] {
        &self.adj
    }

    #[inline]
    pub(crate) fn arrow(&self) -> &[u64] {
        &self.arrow
    }

    #[inline]
    pub(crate) fn neighbors(&self, u: usize) -> NodeSet {
        NodeSet(self.adj[u])
    }

    #[inline]
    pub(crate) fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    /// Mark at endpoint `at` of the edge `at`–`other`, if adjacent.
    #[inline]
    pub(crate) fn mark(&self, at: usize, other: usize) -> Option<EdgeMark> {
        if !self.adjacent(at, other) {
            None
        } else if self.arrow[at] >> other & 1 == 1 {
            Some(EdgeMark::Arrow)
        } else if self.circle[at] >> other & 1 == 1 {
            Some(EdgeMark::Circle)
        } else {
            Some(EdgeMark::Tail)
        }
    }

    fn set_mark(&mut self, at: usize, other: usize, m: EdgeMark) {
        let bit = 1u64 << other;
        self.arrow[at] &= !bit;
        self.circle[at] &= !bit;
        match m {
            EdgeMark::Arrow => self.arrow[at] |= bit,
            EdgeMark::Circle => self.circle[at] |= bit,
            EdgeMark::Tail => {}
        }
    }

    /// Inserts or overwrites the edge `u`–`v`.
    pub(crate) fn set(&mut self, u: usize, v: usize, mark_u: EdgeMark, mark_v: EdgeMark) {
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
        self.set_mark(u, v, mark_u);
        self.set_mark(v, u, mark_v);
    }

    pub(crate) fn remove(&mut self, u: usize, v: usize) {
        for (a, b) in [(u, v), (v, u)] {
            let bit = !(1u64 << b);
            self.adj[a] &= bit;
            self.arrow[a] &= bit;
            self.circle[a] &= bit;
        }
    }

    pub(crate) fn edge_count(&self) -> usize {
        self.adj.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    pub(crate) fn has_circle(&self) -> bool {
        self.circle.iter().any(|&c| c != 0)
    }

    /// Canonical edges in lexicographic `(u, v)` order.
    pub(crate) fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.n).flat_map(move |u| {
            NodeSet(self.adj[u] & !((2u64 << u) - 1)).iter().map(move |v| Edge {
                u: NodeId::from(u),
                v: NodeId::from(v),
                mark_u: self.mark(u, v).expect("adjacent"),
                mark_v: self.mark(v, u).expect("adjacent"),
            })
        })
    }

    /// Directed parents: `x` with `x -> w` (tail at `x`, arrow at `w`).
    pub(crate) fn directed_parents(&self) -> Vec<u64> {
        (0..self.n)
            .map(|w| {
                NodeSet(self.arrow[w])
                    .iter()
                    .filter(|&x| self.arrow[x] >> w & 1 == 0 && self.circle[x] >> w & 1 == 0)
                    .fold(0u64, |acc, x| acc | 1 << x)
            })
            .collect()
    }

    /// Neighbours whose edge to `u` carries an arrowhead at the far end.
    pub(crate) fn arrow_far(&self, u: usize) -> u64 {
        NodeSet(self.adj[u])
            .iter()
            .filter(|&x| self.arrow[x] >> u & 1 == 1)
            .fold(0u64, |acc, x| acc | 1 << x)
    }

    /// Neighbours whose edge to `u` carries a circle at the far end.
    pub(crate) fn circle_far(&self, u: usize) -> u64 {
        NodeSet(self.adj[u])
            .iter()
            .filter(|&x| self.circle[x] >> u & 1 == 1)
            .fold(0u64, |acc, x| acc | 1 << x)
    }

    pub(crate) fn circle(&self) -> &[u64] {
        &self.circle
    }
}

impl fmt::Debug for EdgeMarks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[n={}", self.n)?;
        for e in self.edges() {
            write!(f, "; {e}")?;
        }
        write!(f, "]")
    }
}
