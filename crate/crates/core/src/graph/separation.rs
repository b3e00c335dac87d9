//! d-separation and m-separation via reachability over (node, arrived-into)
//! states.
//!
//! A walk enters node `w` either through an arrowhead at `w` or through a
//! tail. Leaving `w` through an edge that also has an arrowhead at `w` makes
//! `w` a collider, which is passable only when `w` is an ancestor of some
//! member of `Z`; every other passage makes `w` a non-collider, passable only
//! when `w` is not in `Z`. An m-connecting walk exists iff an m-connecting
//! path exists, so plain reachability decides separation.

use super::{Dag, GraphError, Mag};
use crate::node::{NodeId, NodeSet};

/// Ancestor closure of `set` under the given parent masks.
pub(crate) fn ancestor_closure(parents: &[u64], set: NodeSet) -> NodeSet {
    let mut closed = set.bits();
    let mut frontier = closed;
    while frontier != 0 {
        let x = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = parents[x] & !closed;
        closed |= fresh;
        frontier |= fresh;
    }
    NodeSet(closed)
}

fn push(x: usize, into: bool, seen: &mut [u64; 2], stack: &mut [(u8, bool); 128], top: &mut usize) {
    let s = &mut seen[into as usize];
    if *s >> x & 1 == 0 {
        *s |= 1 << x;
        stack[*top] = (x as u8, into);
        *top += 1;
    }
}

/// `true` iff some walk from `u` reaches `v` that is m-connecting given `z`.
///
/// `adj[w]` holds the neighbours of `w`, `arrow[w]` the neighbours whose edge
/// to `w` has an arrowhead at `w`, and `parents[w]` the directed parents used
/// for the ancestor relation. Circle marks are not supported.
pub(crate) fn connected(adj: &[u64], arrow: &[u64], parents: &[u64], u: usize, v: usize, z: NodeSet) -> bool {
    let anc_z = ancestor_closure(parents, z).bits();
    let z = z.bits();
    // seen[0]: reached through a tail, seen[1]: reached through an arrowhead
    let mut seen = [0u64; 2];
    let mut stack: [(u8, bool); 128] = [(0, false); 128];
    let mut top = 0usize;

    for x in NodeSet(adj[u]).iter() {
        push(x, arrow[x] >> u & 1 == 1, &mut seen, &mut stack, &mut top);
    }
    while top > 0 {
        top -= 1;
        let (w, into) = stack[top];
        let w = w as usize;
        if w == v {
            return true;
        }
        if w == u {
            continue;
        }
        let in_z = z >> w & 1 == 1;
        let mut next = 0u64;
        if into {
            if anc_z >> w & 1 == 1 {
                next |= adj[w] & arrow[w];
            }
            if !in_z {
                next |= adj[w] & !arrow[w];
            }
        } else if !in_z {
            next |= adj[w];
        }
        for x in NodeSet(next).iter() {
            push(x, arrow[x] >> w & 1 == 1, &mut seen, &mut stack, &mut top);
        }
    }
    false
}

fn check_query(n: usize, u: NodeId, v: NodeId, z: NodeSet) -> Result<(), GraphError> {
    for x in [u, v] {
        if x.index() >= n {
            return Err(GraphError::UnknownNode(x.0));
        }
    }
    if let Some(extra) = z.difference(NodeSet::full(n)).iter().next() {
        return Err(GraphError::UnknownNode(extra as u32));
    }
    if u == v {
        return Err(GraphError::SameEndpoints(u));
    }
    for x in [u, v] {
        if z.contains(x.index()) {
            return Err(GraphError::EndpointConditioned(x));
        }
    }
    Ok(())
}

/// `true` iff `u` and `v` are d-separated by `z` in `d`.
///
/// `z` ranges over observed nodes only; latent nodes are ordinary path nodes
/// and are never conditioned on.
pub fn d_separated(d: &Dag, u: NodeId, v: NodeId, z: NodeSet) -> Result<bool, GraphError> {
    check_query(d.n_observed(), u, v, z)?;
    Ok(!dag_connected(d, u.index(), v.index(), z))
}

pub(crate) fn dag_connected(d: &Dag, u: usize, v: usize, z: NodeSet) -> bool {
    let parents = d.parents_dense();
    let children = d.children_dense();
    let mut adj = [0u64; crate::MAX_NODES];
    for (i, slot) in adj.iter_mut().enumerate().take(d.n_total()) {
        *slot = parents[i] | children[i];
    }
    connected(&adj[..d.n_total()], parents, parents, u, v, z)
}

/// `true` iff `u` and `v` are m-separated by `z` in `g`.
pub fn m_separated(g: &Mag, u: NodeId, v: NodeId, z: NodeSet) -> Result<bool, GraphError> {
    check_query(g.node_count(), u, v, z)?;
    Ok(!g.connected_unchecked(u.index(), v.index(), z, &g.marks().directed_parents()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn n(i: u32) -> NodeId {
        NodeId(i)
    }

    #[test]
    fn collider_opens_when_conditioned() {
        // 0 -> 2 <- 1
        let d = Dag::from_edges(3, &[(0, 2), (1, 2)]).unwrap();
        assert!(d_separated(&d, n(0), n(1), NodeSet::EMPTY).unwrap());
        assert!(!d_separated(&d, n(0), n(1), NodeSet::singleton(2)).unwrap());
    }

    #[test]
    fn descendant_of_collider_opens() {
        // 0 -> 2 <- 1, 2 -> 3
        let d = Dag::from_edges(4, &[(0, 2), (1, 2), (2, 3)]).unwrap();
        assert!(!d_separated(&d, n(0), n(1), NodeSet::singleton(3)).unwrap());
    }

    #[test]
    fn disconnected_nodes_are_separated_by_anything() {
        let d = Dag::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        for z in NodeSet::from_bits(0b1100).subsets() {
            assert!(d_separated(&d, n(0), n(2), z.without(2)).unwrap_or(true));
        }
        assert!(d_separated(&d, n(0), n(2), NodeSet::singleton(3)).unwrap());
    }

    #[test]
    fn query_validation() {
        let d = Dag::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(d_separated(&d, n(0), n(0), NodeSet::EMPTY), Err(GraphError::SameEndpoints(n(0))));
        assert_eq!(
            d_separated(&d, n(0), n(1), NodeSet::singleton(1)),
            Err(GraphError::EndpointConditioned(n(1)))
        );
        assert_eq!(d_separated(&d, n(0), n(5), NodeSet::EMPTY), Err(GraphError::UnknownNode(5)));
    }

    #[test]
    fn bidirected_chain_with_unconditioned_collider() {
        // a <-> c <-> b : c is a collider, not in An(Z = {})
        let g = Mag::from_edges(3, &[Edge::bidirected(n(0), n(2)), Edge::bidirected(n(2), n(1))]).unwrap();
        assert!(m_separated(&g, n(0), n(1), NodeSet::EMPTY).unwrap());
        assert!(!m_separated(&g, n(0), n(1), NodeSet::singleton(2)).unwrap());
        let single = Mag::from_edges(2, &[Edge::bidirected(n(0), n(1))]).unwrap();
        assert!(!m_separated(&single, n(0), n(1), NodeSet::EMPTY).unwrap());
    }
}
