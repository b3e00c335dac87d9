//! Per-node neighbourhood identification from atomic interventions.

use alloc::vec::Vec;

use super::DiscoveryError;
use crate::graph::{EdgeMark, IncidenceSet, Mag};
use crate::node::{NodeId, NodeSet};
use crate::oracle::{CiQuery, EntityOracle, OracleError};
use crate::pag::Pag;

/// Typed neighbourhood of one node as three disjoint masks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Nbr {
    pub out: NodeSet,
    pub inc: NodeSet,
    pub bi: NodeSet,
}

impl Nbr {
    pub fn to_incidence(self, owner: NodeId) -> IncidenceSet {
        IncidenceSet::from_parts(owner, self.out, self.inc, self.bi)
    }
}

fn dependent_under_do(o: &mut EntityOracle, u: NodeId, v: NodeId, w: NodeId) -> Result<bool, OracleError> {
    o.register_intervention(w)?;
    Ok(!o.ci_test(&CiQuery::under_do(u, v, w))?)
}

/// Out-neighbours of `u`: the PAG's fixed `u -> v` edges, plus every `v` on
/// a `u o-o v` or `u o-> v` edge that stays dependent on `u` under `do(u)`.
/// Registers `do(u)` only if such an edge exists.
pub fn identify_out_nbr(o: &mut EntityOracle, pag: &Pag, u: NodeId) -> Result<NodeSet, OracleError> {
    let mut out = pag.directed_out(u);
    for v in pag.adjacent_set(u).nodes() {
        let open = pag.mark(u, v) == Some(EdgeMark::Circle) && pag.mark(v, u) != Some(EdgeMark::Tail);
        if open && dependent_under_do(o, u, v, u)? {
            out.insert(v.index());
        }
    }
    Ok(out)
}

/// Bidirected neighbours of `u`: fixed `u <-> v` edges, plus every `v` on a
/// `u o-o v`, `u <-o v` or `u o-> v` edge for which `u ⊥ v | do(u)` and
/// `u ⊥ v | do(v)` both hold.
///
/// An arrowhead the PAG already fixes at an endpoint rules out that endpoint
/// being an ancestor of the other, so its test is skipped; the second test is
/// skipped once the first reports dependence.
pub fn identify_bidirected(o: &mut EntityOracle, pag: &Pag, u: NodeId) -> Result<NodeSet, OracleError> {
    let mut bi = pag.fixed_bidirected(u);
    for v in pag.adjacent_set(u).nodes() {
        let (mu, mv) = (pag.mark(u, v), pag.mark(v, u));
        let open = matches!(
            (mu, mv),
            (Some(EdgeMark::Circle), Some(EdgeMark::Circle))
                | (Some(EdgeMark::Arrow), Some(EdgeMark::Circle))
                | (Some(EdgeMark::Circle), Some(EdgeMark::Arrow))
        );
        if !open {
            continue;
        }
        if mu != Some(EdgeMark::Arrow) && dependent_under_do(o, u, v, u)? {
            continue;
        }
        if mv != Some(EdgeMark::Arrow) && dependent_under_do(o, u, v, v)? {
            continue;
        }
        bi.insert(v.index());
    }
    Ok(bi)
}

/// `N(u)` from both identification routines; `In = D(u) \ (Out ∪ Bi)`.
pub(crate) fn neighborhood(o: &mut EntityOracle, pag: &Pag, u: NodeId) -> Result<Nbr, OracleError> {
    let out = identify_out_nbr(o, pag, u)?;
    let bi = identify_bidirected(o, pag, u)?;
    let inc = pag.adjacent_set(u).difference(out.union(bi));
    Ok(Nbr { out, inc, bi })
}

/// Public form of [`neighborhood`].
pub fn identify_neighborhood(o: &mut EntityOracle, pag: &Pag, u: NodeId) -> Result<IncidenceSet, OracleError> {
    Ok(neighborhood(o, pag, u)?.to_incidence(u))
}

/// Whether `v ∈ Bi(u)`, given `Out(u)` from [`identify_out_nbr`] and a
/// registered `do(v)` where the PAG leaves the mark at `v` open.
pub(crate) fn bidirected_member(
    o: &mut EntityOracle,
    pag: &Pag,
    u: NodeId,
    v: NodeId,
    out_u: NodeSet,
) -> Result<bool, OracleError> {
    let (mu, mv) = match (pag.mark(u, v), pag.mark(v, u)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Ok(false),
    };
    if mu == EdgeMark::Tail || mv == EdgeMark::Tail || out_u.contains(v.index()) {
        return Ok(false);
    }
    if mv == EdgeMark::Arrow {
        return Ok(true);
    }
    Ok(!dependent_under_do(o, u, v, v)?)
}

/// Recovers the full MAG of one entity with `do(u)` for every node `u`.
pub fn recover_full_mag(o: &mut EntityOracle, pag: &Pag) -> Result<Mag, DiscoveryError> {
    let n = o.node_count();
    if pag.node_count() != n {
        return Err(DiscoveryError::NodeCountMismatch {
            entity: o.entity(),
            expected: n,
            found: pag.node_count(),
        });
    }
    for u in 0..n {
        o.register_intervention(NodeId::from(u))?;
    }
    let sets: Vec<IncidenceSet> = (0..n)
        .map(|u| identify_neighborhood(o, pag, NodeId::from(u)))
        .collect::<Result<_, _>>()?;
    Ok(Mag::from_incidence_sets(n, &sets)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{dag_to_mag, Dag, Edge};
    use crate::oracle::EntityId;
    use crate::pag::skeleton_pag;

    fn n(i: u32) -> NodeId {
        NodeId(i)
    }

    /// t -> x -> y -> z with latents on (x, y) and (t, y).
    fn two_latent_chain() -> Dag {
        let mut d = Dag::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        for (a, b) in [(1, 2), (0, 2)] {
            let l = d.add_latent().unwrap();
            d.add_edge(l, n(a)).unwrap();
            d.add_edge(l, n(b)).unwrap();
        }
        d
    }

    #[test]
    fn out_neighbours_on_latent_chain() {
        let d = two_latent_chain();
        let g = dag_to_mag(&d);
        let pag = skeleton_pag(&g);
        let mut o = EntityOracle::new(EntityId(0), d);
        assert_eq!(identify_out_nbr(&mut o, &pag, n(1)).unwrap(), NodeSet::singleton(2));
        assert_eq!(identify_out_nbr(&mut o, &pag, n(3)).unwrap(), NodeSet::EMPTY);
        assert_eq!(o.intervention_count(), 2);
    }

    #[test]
    fn oriented_pag_needs_no_interventions() {
        let d = two_latent_chain();
        let g = dag_to_mag(&d);
        let mut o = EntityOracle::new(EntityId(0), d);
        let pag = Pag::oriented(&g);
        for u in 0..4 {
            let s = identify_neighborhood(&mut o, &pag, n(u)).unwrap();
            assert_eq!(s, crate::graph::incidence_set(&g, n(u)).unwrap());
        }
        assert_eq!(o.intervention_count(), 0);
    }

    #[test]
    fn latent_pair_is_bidirected() {
        let mut d = Dag::new(2, 0).unwrap();
        let l = d.add_latent().unwrap();
        d.add_edge(l, n(0)).unwrap();
        d.add_edge(l, n(1)).unwrap();
        let pag = skeleton_pag(&dag_to_mag(&d));
        let mut o = EntityOracle::new(EntityId(0), d);
        assert_eq!(identify_bidirected(&mut o, &pag, n(0)).unwrap(), NodeSet::singleton(1));

        let d = Dag::from_edges(2, &[(0, 1)]).unwrap();
        let pag = skeleton_pag(&dag_to_mag(&d));
        let mut o = EntityOracle::new(EntityId(0), d);
        assert_eq!(identify_bidirected(&mut o, &pag, n(0)).unwrap(), NodeSet::EMPTY);
    }

    #[test]
    fn recover_g_on_empty_graph_still_intervenes_everywhere() {
        let d = Dag::new(5, 0).unwrap();
        let g = dag_to_mag(&d);
        let mut o = EntityOracle::new(EntityId(0), d);
        assert_eq!(recover_full_mag(&mut o, &skeleton_pag(&g)).unwrap(), g);
        assert_eq!(o.intervention_count(), 5);
    }

    #[test]
    fn chain_variants_are_told_apart() {
        // v1 -> v2, v3 -> v4 with one edge turned bidirected or reversed
        let base = [Edge::directed(n(0), n(1)), Edge::directed(n(2), n(3))];
        let variants = [
            base,
            [Edge::bidirected(n(0), n(1)), base[1]],
            [Edge::directed(n(1), n(0)), base[1]],
        ];
        for edges in variants {
            let g = Mag::from_edges(4, &edges).unwrap();
            let d = crate::graph::canonical_dag(&g).unwrap();
            let mut o = EntityOracle::new(EntityId(0), d);
            assert_eq!(recover_full_mag(&mut o, &skeleton_pag(&g)).unwrap(), g);
            assert_eq!(o.intervention_count(), 4);
        }
    }
}
