//! Slow, obviously-correct oracles used to cross-check the fast routines.
//!
//! Separation is decided by enumerating every simple path and applying the
//! path rules node by node.

use alloc::vec::Vec;

use crate::graph::{Dag, EdgeMark, Mag};
use crate::node::{NodeId, NodeSet};

/// `(neighbour, arrowhead at the current node, arrowhead at the neighbour)`.
type Step = (usize, bool, bool);

fn simple_paths_blocked(steps: &[Vec<Step>], anc_of: &dyn Fn(usize) -> NodeSet, u: usize, v: usize, z: NodeSet) -> bool {
    let anc_z = z.iter().fold(NodeSet::EMPTY, |acc, x| acc.union(anc_of(x)));
    !walk(steps, anc_z, z, u, None, v, NodeSet::singleton(u))
}

/// Depth-first search over simple paths; `into` is whether the last edge
/// had an arrowhead at `at` (`None` at the start node).
fn walk(
    steps: &[Vec<Step>],
    anc_z: NodeSet,
    z: NodeSet,
    at: usize,
    into: Option<bool>,
    target: usize,
    visited: NodeSet,
) -> bool {
    for &(next, head_here, head_next) in &steps[at] {
        if visited.contains(next) {
            continue;
        }
        if let Some(into) = into {
            let collider = into && head_here;
            let open = if collider { anc_z.contains(at) } else { !z.contains(at) };
            if !open {
                continue;
            }
        }
        if next == target {
            return true;
        }
        if walk(steps, anc_z, z, next, Some(head_next), target, visited.with(next)) {
            return true;
        }
    }
    false
}

/// d-separation in `d` by exhaustive simple-path enumeration.
pub fn d_separated_by_paths(d: &Dag, u: NodeId, v: NodeId, z: NodeSet) -> bool {
    let total = d.n_total();
    let mut steps: Vec<Vec<Step>> = alloc::vec![Vec::new(); total];
    for (a, b) in d.dense_edges() {
        steps[a].push((b, false, true));
        steps[b].push((a, true, false));
    }
    let anc = |x: usize| d.ancestors_dense(NodeSet::singleton(x));
    simple_paths_blocked(&steps, &anc, u.index(), v.index(), z)
}

/// m-separation in `g` by exhaustive simple-path enumeration.
pub fn m_separated_by_paths(g: &Mag, u: NodeId, v: NodeId, z: NodeSet) -> bool {
    let n = g.node_count();
    let mut steps: Vec<Vec<Step>> = alloc::vec![Vec::new(); n];
    for e in g.edges() {
        let (a, b) = (e.u.index(), e.v.index());
        let (ha, hb) = (e.mark_u == EdgeMark::Arrow, e.mark_v == EdgeMark::Arrow);
        steps[a].push((b, ha, hb));
        steps[b].push((a, hb, ha));
    }
    let anc = |x: usize| g.ancestors(NodeSet::singleton(x));
    simple_paths_blocked(&steps, &anc, u.index(), v.index(), z)
}

/// `u` is an ancestor of `v` in `d` by repeated parent expansion.
pub fn is_ancestor_by_search(d: &Dag, u: NodeId, v: NodeId) -> bool {
    let mut frontier = alloc::vec![v.index()];
    let mut seen = NodeSet::singleton(v.index());
    while let Some(x) = frontier.pop() {
        if x == u.index() {
            return true;
        }
        for (a, b) in d.dense_edges() {
            if b == x && !seen.contains(a) {
                seen.insert(a);
                frontier.push(a);
            }
        }
    }
    false
}
