use alloc::vec::Vec;

use rand::Rng;

use super::{rng, GenerationError};
use crate::graph::{canonical_dag, dag_to_mag, node_distance, Dag, Edge, EdgeMark, Mag};
use crate::node::{NodeId, NodeSet};
use crate::pag::is_ancestral;

/// Stopping rule for [`perturb_to_target_distance`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DistanceMode {
    /// Walk freely until the distance reaches the target.
    AtLeast,
    /// Never exceed the target; stop on hitting it, or return the farthest
    /// nonzero state seen once the step cap runs out.
    ExactlyAtMost,
}

/// Distance constraints checked on every visited graph.
pub(crate) struct Bounds<'a> {
    pub reference: &'a Mag,
    pub target: usize,
    pub mode: DistanceMode,
    /// Graphs the result must stay within `near_bound` of.
    pub near: &'a [&'a Mag],
    pub near_bound: usize,
    /// Graphs the result must stay at least `far_bound` away from.
    pub far: &'a [&'a Mag],
    pub far_bound: usize,
}

impl Bounds<'_> {
    fn dist(&self, g: &Mag) -> usize {
        node_distance(g, self.reference).expect("graphs share the observed node set")
    }

    fn side_ok(&self, g: &Mag) -> bool {
        self.near.iter().all(|h| node_distance(g, h).expect("same node set") <= self.near_bound)
            && self.far.iter().all(|h| node_distance(g, h).expect("same node set") >= self.far_bound)
    }

    fn done(&self, dist: usize, g: &Mag) -> bool {
        match self.mode {
            DistanceMode::AtLeast => dist >= self.target && self.side_ok(g),
            DistanceMode::ExactlyAtMost => dist == self.target,
        }
    }

    fn admissible(&self, dist: usize, g: &Mag) -> bool {
        match self.mode {
            DistanceMode::AtLeast => true,
            DistanceMode::ExactlyAtMost => dist <= self.target && self.side_ok(g),
        }
    }
}

pub(crate) fn default_step_cap(n: usize) -> usize {
    10 * n * n
}

/// Randomly edits `d` until its MAG sits at the requested node distance
/// from `reference`.
///
/// Without `markov_equiv`, every step inserts, deletes or reverses one
/// observed edge, chosen uniformly among the moves that keep the graph
/// acyclic; latent edges are never touched.
///
/// With `markov_equiv`, the MAG of `d` must already be Markov equivalent to
/// `reference`. The walk then changes the orientation of one MAG edge per
/// step, keeping only graphs that stay ancestral and Markov equivalent, and
/// the result is the canonical DAG of the final MAG (one latent per
/// bidirected edge).
pub fn perturb_to_target_distance(
    d: &Dag,
    reference: &Mag,
    target: usize,
    mode: DistanceMode,
    seed: u64,
    markov_equiv: bool,
) -> Result<Dag, GenerationError> {
    let bounds = Bounds {
        reference,
        target,
        mode,
        near: &[],
        near_bound: 0,
        far: &[],
        far_bound: 0,
    };
    if markov_equiv {
        let g = markov_walk(&dag_to_mag(d), &bounds, seed, default_step_cap(d.n_observed()))?;
        Ok(canonical_dag(&g)?)
    } else {
        dag_walk(d, &bounds, seed, default_step_cap(d.n_observed()))
    }
}

fn check_target(n: usize, target: usize) -> Result<(), GenerationError> {
    if target > n {
        return Err(GenerationError::InvalidParams(alloc::format!(
            "target distance {target} exceeds {n} nodes"
        )));
    }
    Ok(())
}

#[derive(Clone, Copy)]
enum Move {
    Insert(usize, usize),
    Delete(usize, usize),
    Reverse(usize, usize),
}

fn legal_moves(d: &Dag) -> Vec<Move> {
    let n = d.n_observed();
    let mut moves = Vec::new();
    for a in 0..n {
        let desc_free = |from: usize, to: usize| !d.ancestors_dense(NodeSet::singleton(from)).contains(to);
        for b in 0..n {
            if a == b {
                continue;
            }
            let (na, nb) = (NodeId::from(a), NodeId::from(b));
            if d.has_edge(na, nb) {
                moves.push(Move::Delete(a, b));
                let mut without = d.clone();
                without.remove_edge(na, nb).expect("observed nodes");
                // b -> a closes a cycle iff another path a ~> b remains
                if !without.ancestors_dense(NodeSet::singleton(b)).contains(a) {
                    moves.push(Move::Reverse(a, b));
                }
            } else if !d.has_edge(nb, na) && desc_free(a, b) {
                // a -> b is legal iff b is not an ancestor of a
                moves.push(Move::Insert(a, b));
            }
        }
    }
    moves
}

fn apply(d: &mut Dag, m: Move) {
    let n = NodeId::from;
    match m {
        Move::Insert(a, b) => {
            d.add_edge(n(a), n(b)).expect("move checked for acyclicity");
        }
        Move::Delete(a, b) => {
            d.remove_edge(n(a), n(b)).expect("observed nodes");
        }
        Move::Reverse(a, b) => {
            d.remove_edge(n(a), n(b)).expect("observed nodes");
            d.add_edge(n(b), n(a)).expect("move checked for acyclicity");
        }
    }
}

pub(crate) fn dag_walk(d: &Dag, bounds: &Bounds<'_>, seed: u64, cap: usize) -> Result<Dag, GenerationError> {
    check_target(d.n_observed(), bounds.target)?;
    let mut cur = d.clone();
    let mag = dag_to_mag(&cur);
    let mut dist = bounds.dist(&mag);
    if bounds.target == 0 || bounds.done(dist, &mag) {
        return Ok(cur);
    }
    let mut r = rng(seed, 2);
    let mut best: Option<(usize, Dag)> = None;
    for _ in 0..cap {
        let moves = legal_moves(&cur);
        if moves.is_empty() {
            break;
        }
        let mut next = cur.clone();
        apply(&mut next, moves[r.random_range(0..moves.len())]);
        let mag = dag_to_mag(&next);
        let nd = bounds.dist(&mag);
        if !bounds.admissible(nd, &mag) {
            continue;
        }
        cur = next;
        dist = nd;
        if bounds.done(dist, &mag) {
            return Ok(cur);
        }
        if bounds.mode == DistanceMode::ExactlyAtMost && dist > 0 && best.as_ref().is_none_or(|b| dist > b.0) {
            best = Some((dist, cur.clone()));
        }
    }
    match best {
        Some((_, g)) => Ok(g),
        None => Err(GenerationError::StepCap {
            seed,
            target: bounds.target,
            steps: cap,
            best: dist,
        }),
    }
}

const ORIENTATIONS: [(EdgeMark, EdgeMark); 3] = [
    (EdgeMark::Tail, EdgeMark::Arrow),
    (EdgeMark::Arrow, EdgeMark::Tail),
    (EdgeMark::Arrow, EdgeMark::Arrow),
];

/// Random walk inside the Markov equivalence class of `start`.
pub(crate) fn markov_walk(start: &Mag, bounds: &Bounds<'_>, seed: u64, cap: usize) -> Result<Mag, GenerationError> {
    check_target(start.node_count(), bounds.target)?;
    if !start.markov_equivalent(bounds.reference) {
        return Err(GenerationError::InvalidParams(
            "starting graph is not Markov equivalent to the reference".into(),
        ));
    }
    let colliders = bounds.reference.unshielded_colliders();
    let mut cur = start.clone();
    let mut dist = bounds.dist(&cur);
    if bounds.target == 0 || bounds.done(dist, &cur) {
        return Ok(cur);
    }
    let mut r = rng(seed, 3);
    let mut best: Option<(usize, Mag)> = None;
    for _ in 0..cap {
        let edges: Vec<Edge> = cur.edges().collect();
        if edges.is_empty() {
            break;
        }
        let e = edges[r.random_range(0..edges.len())];
        let alternatives: Vec<(EdgeMark, EdgeMark)> = ORIENTATIONS
            .iter()
            .copied()
            .filter(|&o| o != (e.mark_u, e.mark_v))
            .collect();
        let (mu, mv) = alternatives[r.random_range(0..alternatives.len())];
        let mut next = cur.clone();
        next.set_edge(Edge::new(e.u, e.v, mu, mv))?;
        if next.unshielded_colliders() != colliders || !is_ancestral(&next) || !next.markov_equivalent(bounds.reference)
        {
            continue;
        }
        let nd = bounds.dist(&next);
        if !bounds.admissible(nd, &next) {
            continue;
        }
        cur = next;
        dist = nd;
        if bounds.done(dist, &cur) {
            return Ok(cur);
        }
        if bounds.mode == DistanceMode::ExactlyAtMost && dist > 0 && best.as_ref().is_none_or(|b| dist > b.0) {
            best = Some((dist, cur.clone()));
        }
    }
    match best {
        Some((_, g)) => Ok(g),
        None => Err(GenerationError::StepCap {
            seed,
            target: bounds.target,
            steps: cap,
            best: dist,
        }),
    }
}
