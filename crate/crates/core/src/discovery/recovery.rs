//! Per-entity graph recovery once clusters are known.

use alloc::vec::Vec;

use rand::Rng;

use super::neighborhood::{identify_out_nbr, neighborhood, Nbr};
use super::params::{stream_rng, STREAM_ASSIGN};
use super::report::total_ci_tests;
use super::{check_clusters, check_inputs, ClusterResult, DiscoveryError, RecoveryReport};
use crate::graph::{Edge, Mag};
use crate::node::{NodeId, NodeSet};
use crate::oracle::EntityOracle;
use crate::pag::Pag;

/// Dominant-graph recovery for (α, β)-clusters.
///
/// Inside each cluster every entity intervenes around one uniform node. For
/// a node `u`, the entities that drew it (`T_u`) each recover `N_i(u)`; the
/// neighbourhood shared by the most other members of `T_u` (lowest entity id
/// on ties) becomes the neighbourhood of `u` in the cluster graph, which is
/// assembled in increasing node order and handed to every member.
///
/// A node nobody drew is filled in by the lowest-numbered member of the
/// cluster and listed in `fallback_nodes`.
pub fn recover_dominant_mags(
    oracles: &mut [EntityOracle],
    pags: &[Pag],
    clusters: &ClusterResult,
    params: &super::AlgoParams,
) -> Result<RecoveryReport, DiscoveryError> {
    let n = check_inputs(oracles, pags)?;
    check_clusters(clusters, oracles.len())?;
    let ci_before = total_ci_tests(oracles);
    let mut rng = stream_rng(params.rng_seed, STREAM_ASSIGN);
    let mut report = RecoveryReport::default();
    let mut recovered: Vec<Option<Mag>> = alloc::vec![None; oracles.len()];

    for (c, block) in clusters.blocks().iter().enumerate() {
        let draws: Vec<usize> = block.iter().map(|_| rng.random_range(0..n)).collect();
        let mut graph = Mag::empty(n)?;
        for u in 0..n {
            let node = NodeId::from(u);
            let takers: Vec<usize> = block
                .iter()
                .zip(&draws)
                .filter(|&(_, &d)| d == u)
                .map(|(e, _)| e.index())
                .collect();
            let chosen: Nbr = if takers.is_empty() {
                let fallback = block[0].index();
                report.fallback_nodes.push((c, node));
                neighborhood(&mut oracles[fallback], &pags[fallback], node)?
            } else {
                let nbrs: Vec<Nbr> = takers
                    .iter()
                    .map(|&i| neighborhood(&mut oracles[i], &pags[i], node))
                    .collect::<Result<_, _>>()?;
                let counts: Vec<usize> = nbrs.iter().map(|x| nbrs.iter().filter(|y| *y == x).count() - 1).collect();
                // takers ascend, so keeping the first maximum picks the lowest entity id
                let best = (1..nbrs.len()).fold(0, |b, a| if counts[a] > counts[b] { a } else { b });
                nbrs[best]
            };
            graph.overwrite_neighborhood(&chosen.to_incidence(node))?;
        }
        for e in block {
            recovered[e.index()] = Some(graph.clone());
        }
    }
    report.recovered = recovered.into_iter().map(|g| g.expect("clusters cover every entity")).collect();
    report.finish(oracles, ci_before);
    Ok(report)
}

/// Exact recovery for α-clusters whose members share one MAG.
///
/// Nodes are dealt round-robin to the members (`φ(u)` is member `u mod |C|`),
/// each member finds `Out(u)` for its nodes, and every PAG edge `u – v` is
/// oriented `u -> v` if `v ∈ Out(u)`, `v -> u` if `u ∈ Out(v)`, and `u <-> v`
/// otherwise.
pub fn meta_recover(
    oracles: &mut [EntityOracle],
    pags: &[Pag],
    clusters: &ClusterResult,
) -> Result<RecoveryReport, DiscoveryError> {
    let n = check_inputs(oracles, pags)?;
    check_clusters(clusters, oracles.len())?;
    let ci_before = total_ci_tests(oracles);
    let mut report = RecoveryReport::default();
    let mut recovered: Vec<Option<Mag>> = alloc::vec![None; oracles.len()];

    for block in clusters.blocks() {
        let pag = &pags[block[0].index()];
        if let Some(e) = block.iter().find(|e| pags[e.index()] != *pag) {
            return Err(DiscoveryError::InconsistentCluster(*e));
        }
        let out: Vec<NodeSet> = (0..n)
            .map(|u| {
                let i = block[u % block.len()].index();
                identify_out_nbr(&mut oracles[i], pag, NodeId::from(u))
            })
            .collect::<Result<_, _>>()?;
        let mut graph = Mag::empty(n)?;
        for e in pag.edges() {
            let (u, v) = (e.u, e.v);
            let edge = if out[u.index()].contains(v.index()) {
                Edge::directed(u, v)
            } else if out[v.index()].contains(u.index()) {
                Edge::directed(v, u)
            } else {
                Edge::bidirected(u, v)
            };
            graph.add_edge(edge)?;
        }
        for e in block {
            recovered[e.index()] = Some(graph.clone());
        }
    }
    report.recovered = recovered.into_iter().map(|g| g.expect("clusters cover every entity")).collect();
    report.finish(oracles, ci_before);
    Ok(report)
}
