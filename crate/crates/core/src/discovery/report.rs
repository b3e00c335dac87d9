use alloc::vec::Vec;

use crate::graph::Mag;
use crate::node::NodeId;
use crate::oracle::{EntityId, EntityOracle};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PartitionError {
    #[error("partition has an empty block")]
    EmptyBlock,
    #[error("entity {0} appears in more than one block")]
    Duplicate(EntityId),
    #[error("entity {0} is outside the universe or missing")]
    NotCovered(EntityId),
}

/// Partition of the entities `0..M` into clusters.
///
/// Stored canonically: members ascending inside each block, blocks ordered by
/// their smallest member, so equal partitions compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClusterResult {
    blocks: Vec<Vec<EntityId>>,
}

impl ClusterResult {
    /// Validates an exact cover of `0..m` and canonicalizes it.
    pub fn new(m: usize, mut blocks: Vec<Vec<EntityId>>) -> Result<Self, PartitionError> {
        let mut seen = alloc::vec![false; m];
        for b in &mut blocks {
            if b.is_empty() {
                return Err(PartitionError::EmptyBlock);
            }
            b.sort_unstable();
            for &e in b.iter() {
                match seen.get_mut(e.index()) {
                    None => return Err(PartitionError::NotCovered(e)),
                    Some(true) => return Err(PartitionError::Duplicate(e)),
                    Some(s) => *s = true,
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(PartitionError::NotCovered(EntityId::from(i)));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(ClusterResult { blocks })
    }

    /// Builds the partition in which entities with equal labels share a block.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut order: Vec<usize> = Vec::new();
        let mut blocks: Vec<Vec<EntityId>> = Vec::new();
        for (i, &l) in labels.iter().enumerate() {
            match order.iter().position(|&x| x == l) {
                Some(b) => blocks[b].push(EntityId::from(i)),
                None => {
                    order.push(l);
                    blocks.push(alloc::vec![EntityId::from(i)]);
                }
            }
        }
        ClusterResult { blocks }
    }

    pub(crate) fn from_groups(groups: Vec<Vec<usize>>) -> Self {
        ClusterResult {
            blocks: groups
                .into_iter()
                .map(|g| g.into_iter().map(EntityId::from).collect())
                .collect(),
        }
    }

    pub fn blocks(&self) -> &[Vec<EntityId>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn entity_count(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// Block index of every entity.
    pub fn labels(&self) -> Vec<usize> {
        let mut out = alloc::vec![0; self.entity_count()];
        for (b, block) in self.blocks.iter().enumerate() {
            for e in block {
                out[e.index()] = b;
            }
        }
        out
    }
}

/// Agreement tally for one entity pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairCount {
    pub i: EntityId,
    pub j: EntityId,
    pub count: usize,
}

/// Everything a run produced besides the partition itself.
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RecoveryReport {
    /// Sampled multiset `S`, in draw order.
    pub sample: Vec<NodeId>,
    /// Per-pair agreement counts, `i < j`.
    pub pair_counts: Vec<PairCount>,
    /// Ledger count of every entity after the run.
    pub interventions: Vec<usize>,
    /// Recovered graph of every entity (empty for clustering-only runs).
    pub recovered: Vec<Mag>,
    /// `(cluster index, node)` pairs filled by the fallback entity.
    pub fallback_nodes: Vec<(usize, NodeId)>,
    /// Refinement rounds (iterative clustering only).
    pub iterations: usize,
    /// CI tests issued across all entities during the run.
    pub ci_tests: u64,
}

impl RecoveryReport {
    pub(crate) fn finish(&mut self, oracles: &[EntityOracle], ci_before: u64) {
        self.interventions = oracles.iter().map(EntityOracle::intervention_count).collect();
        self.ci_tests = oracles.iter().map(EntityOracle::ci_test_count).sum::<u64>() - ci_before;
    }

    pub fn max_interventions(&self) -> usize {
        self.interventions.iter().copied().max().unwrap_or(0)
    }
}

pub(crate) fn total_ci_tests(oracles: &[EntityOracle]) -> u64 {
    oracles.iter().map(EntityOracle::ci_test_count).sum()
}
