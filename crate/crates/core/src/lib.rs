//! Collaborative causal discovery over maximal ancestral graphs.
//!
//! The crate is `no_std` with `alloc`. Ground-truth DAGs are queried through
//! per-entity [`oracle::EntityOracle`]s that count atomic interventions;
//! [`discovery`] holds the clustering and recovery algorithms and
//! [`generate`] builds synthetic multi-entity instances.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod discovery;
pub mod generate;
pub mod graph;
pub mod metrics;
pub mod node;
pub mod oracle;
pub mod pag;
#[cfg(any(test, feature = "test-oracles"))]
pub mod reference;

pub use discovery::{
    baseline_pag_cluster, cluster_alpha_beta, cluster_alpha_bounded, cluster_alpha_general, cluster_no_latents,
    greedy_sample_selection, identify_bidirected, identify_neighborhood, identify_out_nbr, meta_recover,
    recover_dominant_mags, recover_full_mag, AlgoParams, BaselineClustering, ClusterResult, DiscoveryError,
    RecoveryReport,
};
pub use generate::{
    build_instance, gen_erdos_renyi, inject_latents, perturb_to_target_distance, ClusterInstance, DistanceMode,
    EntityTruth, GenerationError, InstanceParams,
};
pub use graph::{
    canonical_dag, d_separated, dag_to_mag, incidence_set, m_separated, node_diff, node_distance, validate_mag, Dag,
    Edge, EdgeMark, GraphError, Incidence, IncidenceSet, Mag, MagViolation,
};
pub use metrics::{pair_metrics, PairMetrics, UniverseMismatch};
pub use node::{DagNode, LatentId, NodeId, NodeSet, MAX_NODES};
pub use oracle::{CiQuery, EntityId, EntityOracle, InterventionLedger, OracleError, QueryRecord};
pub use pag::{equivalence_class_pag, skeleton_pag, Pag, PagError};
