//! Node identifiers and compact node sets.

use core::fmt;

/// Hard upper bound on the number of nodes (observed plus latent) a graph may hold.
///
/// Node sets are packed into a single `u64`; every exhaustive routine in this
/// crate is exponential in the node count long before this limit matters.
pub const MAX_NODES: usize = 64;

/// An observed (endogenous) variable, indexed in `[0, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub const fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A latent (exogenous) variable. Latents live only inside a [`crate::Dag`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LatentId(pub u32);

/// Either kind of DAG vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DagNode {
    Observed(NodeId),
    Latent(LatentId),
}

impl From<NodeId> for DagNode {
    fn from(v: NodeId) -> Self {
        DagNode::Observed(v)
    }
}

impl From<LatentId> for DagNode {
    fn from(l: LatentId) -> Self {
        DagNode::Latent(l)
    }
}

/// A set of node indices packed into a bit mask.
///
/// For observed-node sets the bit index is the [`NodeId`] index. Inside a
/// [`crate::Dag`] the same type is used over dense indices where latent `j`
/// sits at `n + j`.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NodeSet(pub(crate) u64);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    #[inline]
    pub const fn from_bits(bits: u64) -> Self {
        NodeSet(bits)
    }

    #[inline]
    pub const fn bits(self) -> u64 {
        self.0
    }

    /// All indices in `[0, n)`.
    #[inline]
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_NODES);
        if n >= 64 {
            NodeSet(u64::MAX)
        } else {
            NodeSet((1u64 << n) - 1)
        }
    }

    #[inline]
    pub fn singleton(i: usize) -> Self {
        NodeSet(1u64 << i)
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u64 << i;
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1u64 << i);
    }

    #[inline]
    pub fn with(self, i: usize) -> Self {
        NodeSet(self.0 | 1u64 << i)
    }

    #[inline]
    pub fn without(self, i: usize) -> Self {
        NodeSet(self.0 & !(1u64 << i))
    }

    #[inline]
    pub fn union(self, other: NodeSet) -> Self {
        NodeSet(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: NodeSet) -> Self {
        NodeSet(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: NodeSet) -> Self {
        NodeSet(self.0 & !other.0)
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Ascending iterator over member indices.
    pub fn iter(self) -> NodeSetIter {
        NodeSetIter(self.0)
    }

    /// Ascending iterator over members as observed ids.
    pub fn nodes(self) -> impl Iterator<Item = NodeId> {
        self.iter().map(NodeId::from)
    }

    /// Iterates every subset of `self` (including the empty set and `self`).
    pub fn subsets(self) -> SubsetIter {
        SubsetIter {
            universe: self.0,
            next: Some(0),
        }
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        let mut s = NodeSet::EMPTY;
        for v in iter {
            s.insert(v.index());
        }
        s
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct NodeSetIter(u64);

impl Iterator for NodeSetIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for NodeSetIter {}

/// Gosper-free subset walk: `next = (cur - universe) & universe`.
pub struct SubsetIter {
    universe: u64,
    next: Option<u64>,
}

impl Iterator for SubsetIter {
    type Item = NodeSet;

    fn next(&mut self) -> Option<NodeSet> {
        let cur = self.next?;
        let succ = cur.wrapping_sub(self.universe) & self.universe;
        self.next = if succ == 0 { None } else { Some(succ) };
        Some(NodeSet(cur))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn subsets_enumerates_power_set() {
        let u = NodeSet::from_bits(0b1011);
        let all: Vec<u64> = u.subsets().map(NodeSet::bits).collect();
        assert_eq!(all.len(), 8);
        assert!(all.iter().all(|s| s & !0b1011 == 0));
        assert_eq!(NodeSet::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn iter_is_ascending() {
        let s: NodeSet = [NodeId(5), NodeId(1), NodeId(3)].into_iter().collect();
        assert_eq!(s.iter().collect::<Vec<_>>(), [1, 3, 5]);
        assert_eq!(s.len(), 3);
        assert!(s.contains(3) && !s.contains(2));
    }
}
