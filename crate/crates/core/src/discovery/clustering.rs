//! Cluster recovery: the (α, β) count-threshold rule and the three
//! α-clustering variants.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::Rng;

use super::neighborhood::{bidirected_member, identify_out_nbr, neighborhood, Nbr};
use super::params::{alpha_beta_sample_size, alpha_general_sample_size, alpha_sample_size, stream_rng, STREAM_PI};
use super::report::{total_ci_tests, PairCount};
use super::union_find::UnionFind;
use super::{check_inputs, AlgoParams, ClusterResult, DiscoveryError, RecoveryReport};
use crate::node::{NodeId, NodeSet};
use crate::oracle::{EntityId, EntityOracle};
use crate::pag::Pag;

/// Undirected graph on entities.
#[derive(Clone, Debug)]
pub(crate) struct EntityGraph {
    m: usize,
    adj: Vec<bool>,
}

impl EntityGraph {
    pub fn new(m: usize) -> Self {
        EntityGraph {
            m,
            adj: alloc::vec![false; m * m],
        }
    }

    pub fn set(&mut self, i: usize, j: usize, on: bool) {
        self.adj[i * self.m + j] = on;
        self.adj[j * self.m + i] = on;
    }

    pub fn has(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.m + j]
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.m);
        for i in 0..self.m {
            for j in i + 1..self.m {
                if self.has(i, j) {
                    uf.union(i, j);
                }
            }
        }
        uf.groups()
    }
}

/// Distinct members of `s`, ascending.
fn distinct(s: &[NodeId]) -> Vec<NodeId> {
    s.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
}

/// `N_i(u)` for every entity and every distinct `u ∈ S`, indexed like `nodes`.
fn neighborhoods(
    oracles: &mut [EntityOracle],
    pags: &[Pag],
    nodes: &[NodeId],
) -> Result<Vec<Vec<Nbr>>, DiscoveryError> {
    oracles
        .iter_mut()
        .zip(pags)
        .map(|(o, p)| {
            nodes
                .iter()
                .map(|&u| neighborhood(o, p, u).map_err(DiscoveryError::from))
                .collect()
        })
        .collect()
}

fn position(nodes: &[NodeId], u: NodeId) -> usize {
    nodes.binary_search(&u).expect("sample node is in the distinct list")
}

/// (α, β) clustering by thresholded neighbourhood agreement.
///
/// For every entity and every `u` in a uniform multiset `S`, `N_i(u)` is
/// recovered; `i` and `j` are joined when `Count(i, j)`, the number of draws
/// on which their neighbourhoods agree, reaches `(1 − (α + β)/2)·|S|`.
pub fn cluster_alpha_beta(
    oracles: &mut [EntityOracle],
    pags: &[Pag],
    params: &AlgoParams,
) -> Result<(ClusterResult, RecoveryReport), DiscoveryError> {
    params.check_alpha_beta()?;
    let n = check_inputs(oracles, pags)?;
    let m = oracles.len();
    let ci_before = total_ci_tests(oracles);
    let sample = params.draw_sample(n, alpha_beta_sample_size(m, params.alpha, params.beta, params.delta));
    let nodes = distinct(&sample);
    let nbr = neighborhoods(oracles, pags, &nodes)?;
    let slots: Vec<usize> = sample.iter().map(|&u| position(&nodes, u)).collect();

    // small slack so that an exact product such as 0.6 * 10 is not lost to rounding
    let threshold = (1.0 - (params.alpha + params.beta) / 2.0) * sample.len() as f64 - 1e-9;
    let mut graph = EntityGraph::new(m);
    let mut report = RecoveryReport {
        sample: sample.clone(),
        ..RecoveryReport::default()
    };
    for i in 0..m {
        for j in i + 1..m {
            let count = slots.iter().filter(|&&s| nbr[i][s] == nbr[j][s]).count();
            report.pair_counts.push(PairCount {
                i: EntityId::from(i),
                j: EntityId::from(j),
                count,
            });
            if count as f64 >= threshold {
                graph.set(i, j, true);
            }
        }
    }
    report.finish(oracles, ci_before);
    Ok((ClusterResult::from_groups(graph.components()), report))
}

/// Exact-agreement clustering shared by the α-algorithms: `i` and `j` are
/// joined iff their PAGs are equal and `agree(i, j, s)` holds for every
/// distinct sampled node index `s`.
fn exact_agreement(
    pags: &[Pag],
    nodes: usize,
    agree: impl Fn(usize, usize, usize) -> bool,
    report: &mut RecoveryReport,
) -> EntityGraph {
    let m = pags.len();
    let mut graph = EntityGraph::new(m);
    for i in 0..m {
        for j in i + 1..m {
            let count = if pags[i] == pags[j] {
                (0..nodes).filter(|&s| agree(i, j, s)).count()
            } else {
                0
            };
            report.pair_counts.push(PairCount {
                i: EntityId::from(i),
                j: EntityId::from(j),
                count,
            });
            if pags[i] == pags[j] && count == nodes {
                graph.set(i, j, true);
            }
        }
    }
    graph
}

/// Clustering without latents: only `Out_i(u)` and the PAG adjacency of each
/// sampled `u` are compared, `|S| = ⌈2 ln(M/δ)/α⌉`.
pub fn cluster_no_latents(
    oracles: &mut [EntityOracle],
    pags: &[Pag],
    params: &AlgoParams,
) -> Result<(ClusterResult, RecoveryReport), DiscoveryError> {
    params.check_alpha()?;
    let n = check_inputs(oracles, pags)?;
    let ci_before = total_ci_tests(oracles);
    let sample = params.draw_sample(n, alpha_sample_size(oracles.len(), params.alpha, params.delta));
    let nodes = distinct(&sample);
    let out = out_sets(oracles, pags, &nodes)?;
    let mut report = RecoveryReport {
        sample,
        ..RecoveryReport::default()
    };
    let graph = exact_agreement(
        pags,
        nodes.len(),
        |i, j, s| out[i][s] == out[j][s] && pags[i].adjacent_set(nodes[s]) == pags[j].adjacent_set(nodes[s]),
        &mut report,
    );
    report.finish(oracles, ci_before);
    Ok((ClusterResult::from_groups(graph.components()), report))
}

fn out_sets(oracles: &mut [EntityOracle], pags: &[Pag], nodes: &[NodeId]) -> Result<Vec<Vec<NodeSet>>, DiscoveryError> {
    oracles
        .iter_mut()
        .zip(pags)
        .map(|(o, p)| {
            nodes
                .iter()
                .map(|&u| identify_out_nbr(o, p, u).map_err(DiscoveryError::from))
                .collect()
        })
        .collect()
}

/// α-clustering with latents and bounded degree: full neighbourhoods of the
/// sampled nodes must agree exactly, `|S| = ⌈2 ln(M/δ)/α⌉`.
pub fn cluster_alpha_bounded(
    oracles: &mut [EntityOracle],
    pags: &[Pag],
    params: &AlgoParams,
) -> Result<(ClusterResult, RecoveryReport), DiscoveryError> {
    params.check_alpha()?;
    let n = check_inputs(oracles, pags)?;
    let ci_before = total_ci_tests(oracles);
    let sample = params.draw_sample(n, alpha_sample_size(oracles.len(), params.alpha, params.delta));
    let nodes = distinct(&sample);
    let nbr = neighborhoods(oracles, pags, &nodes)?;
    let mut report = RecoveryReport {
        sample,
        ..RecoveryReport::default()
    };
    let graph = exact_agreement(pags, nodes.len(), |i, j, s| nbr[i][s] == nbr[j][s], &mut report);
    report.finish(oracles, ci_before);
    Ok((ClusterResult::from_groups(graph.components()), report))
}

/// α-clustering for large clusters with unbounded degree.
///
/// Starts from out-neighbour and adjacency agreement on `S` with
/// `|S| = ⌈2 ln(2M/δ)/α⌉`, then refines: each round every entity intervenes
/// on one uniform node `π(i)`. In each component, the first entity-graph edge
/// `(i, j)` with `π(i) = π(j) = v` whose endpoints disagree on `v ∈ Bi(u)` for
/// some sampled `u` makes the whole component intervene on `v`, and every
/// component edge whose endpoints disagree that way is removed. Rounds stop
/// once no edge is removed, or after `c² + 1` rounds where `c` is the current
/// component count.
pub fn cluster_alpha_general(
    oracles: &mut [EntityOracle],
    pags: &[Pag],
    params: &AlgoParams,
) -> Result<(ClusterResult, RecoveryReport), DiscoveryError> {
    params.check_alpha()?;
    let n = check_inputs(oracles, pags)?;
    let m = oracles.len();
    let ci_before = total_ci_tests(oracles);
    let sample = params.draw_sample(n, alpha_general_sample_size(m, params.alpha, params.delta));
    let nodes = distinct(&sample);
    let out = out_sets(oracles, pags, &nodes)?;
    let mut report = RecoveryReport {
        sample,
        ..RecoveryReport::default()
    };
    let mut graph = exact_agreement(
        pags,
        nodes.len(),
        |i, j, s| out[i][s] == out[j][s] && pags[i].adjacent_set(nodes[s]) == pags[j].adjacent_set(nodes[s]),
        &mut report,
    );

    let mut rng = stream_rng(params.rng_seed, STREAM_PI);
    let mut itr = 0;
    loop {
        let components = graph.components();
        let cap = components.len() * components.len() + 1;
        if itr >= cap || m < 2 {
            break;
        }
        itr += 1;
        let pi: Vec<NodeId> = (0..m).map(|_| NodeId::from(rng.random_range(0..n))).collect();
        for (o, &v) in oracles.iter_mut().zip(&pi) {
            o.register_intervention(v)?;
        }

        // v ∈ Bi_i(u) for each distinct sampled u, after do(v) on entity i
        let bi_pattern = |o: &mut EntityOracle, i: usize, v: NodeId| -> Result<Vec<bool>, DiscoveryError> {
            nodes
                .iter()
                .enumerate()
                .map(|(s, &u)| {
                    if u == v || !pags[i].adjacent(u, v) {
                        return Ok(false);
                    }
                    bidirected_member(o, &pags[i], u, v, out[i][s]).map_err(DiscoveryError::from)
                })
                .collect()
        };

        let mut removed = false;
        for block in &components {
            let mut trigger = None;
            'find: for (a, &i) in block.iter().enumerate() {
                for &j in &block[a + 1..] {
                    if !graph.has(i, j) || pi[i] != pi[j] {
                        continue;
                    }
                    let v = pi[i];
                    if bi_pattern(&mut oracles[i], i, v)? != bi_pattern(&mut oracles[j], j, v)? {
                        trigger = Some(v);
                        break 'find;
                    }
                }
            }
            let Some(v) = trigger else { continue };
            let mut patterns = Vec::with_capacity(block.len());
            for &i in block {
                oracles[i].register_intervention(v)?;
                patterns.push(bi_pattern(&mut oracles[i], i, v)?);
            }
            for (a, &i) in block.iter().enumerate() {
                for (b, &j) in block.iter().enumerate().skip(a + 1) {
                    if graph.has(i, j) && patterns[a] != patterns[b] {
                        graph.set(i, j, false);
                        removed = true;
                    }
                }
            }
        }
        if !removed {
            break;
        }
    }
    report.iterations = itr;
    report.finish(oracles, ci_before);
    Ok((ClusterResult::from_groups(graph.components()), report))
}
