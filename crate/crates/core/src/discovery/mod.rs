//! Clustering and graph-recovery algorithms run against [`EntityOracle`]s.
//!
//! Every algorithm takes one oracle and one PAG per entity, registers its
//! interventions on the oracles' ledgers and returns a [`RecoveryReport`]
//! whose counts are read back from those ledgers.

mod baseline;
mod clustering;
mod neighborhood;
mod params;
mod recovery;
mod report;
mod union_find;

pub use baseline::{baseline_pag_cluster, greedy_sample_selection, BaselineClustering};
pub use clustering::{cluster_alpha_beta, cluster_alpha_bounded, cluster_alpha_general, cluster_no_latents};
pub use neighborhood::{identify_bidirected, identify_neighborhood, identify_out_nbr, recover_full_mag};
pub use params::{alpha_beta_sample_size, alpha_general_sample_size, alpha_sample_size, AlgoParams};
pub use recovery::{meta_recover, recover_dominant_mags};
pub use report::{ClusterResult, PairCount, PartitionError, RecoveryReport};

use crate::graph::GraphError;
use crate::oracle::{EntityId, EntityOracle, OracleError};
use crate::pag::Pag;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiscoveryError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),
    #[error("{oracles} oracles but {pags} PAGs")]
    LengthMismatch { oracles: usize, pags: usize },
    #[error("entity {entity}: expected {expected} nodes, found {found}")]
    NodeCountMismatch {
        entity: EntityId,
        expected: usize,
        found: usize,
    },
    #[error("no entities")]
    NoEntities,
    #[error("cluster containing entity {0} does not share one PAG")]
    InconsistentCluster(EntityId),
    #[error("cannot split {m} entities into {k} clusters")]
    TooManyClusters { k: usize, m: usize },
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Checks that there is one PAG per oracle and that all graphs share one
/// node count, which is returned.
pub(crate) fn check_inputs(oracles: &[EntityOracle], pags: &[Pag]) -> Result<usize, DiscoveryError> {
    if oracles.len() != pags.len() {
        return Err(DiscoveryError::LengthMismatch {
            oracles: oracles.len(),
            pags: pags.len(),
        });
    }
    let first = oracles.first().ok_or(DiscoveryError::NoEntities)?;
    let n = first.node_count();
    for (o, p) in oracles.iter().zip(pags) {
        for found in [o.node_count(), p.node_count()] {
            if found != n {
                return Err(DiscoveryError::NodeCountMismatch {
                    entity: o.entity(),
                    expected: n,
                    found,
                });
            }
        }
    }
    Ok(n)
}

/// Checks that `clusters` partitions exactly the given entities.
pub(crate) fn check_clusters(clusters: &ClusterResult, m: usize) -> Result<(), DiscoveryError> {
    ClusterResult::new(m, clusters.blocks().to_vec())?;
    Ok(())
}
