//! Simulated per-entity access: CI tests answered by d-separation on the
//! entity's ground-truth DAG, with every atomic intervention recorded.

use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Dag, GraphError};
use crate::node::{DagNode, NodeId, NodeSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EntityId(pub u32);

impl EntityId {
    #[inline]
    pub const fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for EntityId {
    fn from(i: usize) -> Self {
        EntityId(i as u32)
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("entity {entity}: interventional query on {target} without a registered intervention")]
    BudgetViolation { entity: EntityId, target: NodeId },
    #[error("entity {entity}: latent nodes cannot be intervened on")]
    LatentIntervention { entity: EntityId },
    #[error("entity {entity}: {source}")]
    Graph { entity: EntityId, source: GraphError },
}

/// Distinct intervention targets of one entity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct InterventionLedger {
    targets: NodeSet,
}

impl InterventionLedger {
    pub fn targets(&self) -> NodeSet {
        self.targets
    }

    pub fn count(&self) -> usize {
        self.targets.len()
    }

    pub fn contains(&self, w: NodeId) -> bool {
        self.targets.contains(w.index())
    }
}

/// `u ⊥ v | z`, optionally in the distribution under `do(target)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CiQuery {
    pub u: NodeId,
    pub v: NodeId,
    pub z: NodeSet,
    pub target: Option<NodeId>,
}

impl CiQuery {
    pub fn observational(u: NodeId, v: NodeId, z: NodeSet) -> Self {
        CiQuery { u, v, z, target: None }
    }

    /// `u ⊥ v | do(w)` with an empty conditioning set.
    pub fn under_do(u: NodeId, v: NodeId, w: NodeId) -> Self {
        CiQuery {
            u,
            v,
            z: NodeSet::EMPTY,
            target: Some(w),
        }
    }
}

/// One answered query, as written to the audit log.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QueryRecord {
    pub entity: EntityId,
    pub query: CiQuery,
    pub independent: bool,
}

/// `3 0 4 1 2 target=1 -> indep`
impl fmt::Display for QueryRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.entity, self.query.u, self.query.v)?;
        for z in self.query.z.nodes() {
            write!(f, " {z}")?;
        }
        match self.query.target {
            Some(w) => write!(f, " target={w}")?,
            None => write!(f, " target=obs")?,
        }
        write!(f, " -> {}", if self.independent { "indep" } else { "dep" })
    }
}

#[derive(Clone, Debug)]
struct Noise {
    rho: f64,
    rng: ChaCha8Rng,
}

/// CI-test access to a single entity.
#[derive(Clone, Debug)]
pub struct EntityOracle {
    entity: EntityId,
    truth: Dag,
    ledger: InterventionLedger,
    ci_tests: u64,
    noise: Option<Noise>,
    log: Option<Vec<QueryRecord>>,
}

impl EntityOracle {
    pub fn new(entity: EntityId, truth: Dag) -> Self {
        EntityOracle {
            entity,
            truth,
            ledger: InterventionLedger::default(),
            ci_tests: 0,
            noise: None,
            log: None,
        }
    }

    /// Flips each answer independently with probability `rho`.
    pub fn with_noise(mut self, rho: f64, seed: u64) -> Self {
        if rho > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(self.entity.0 as u64);
            self.noise = Some(Noise { rho, rng });
        } else {
            self.noise = None;
        }
        self
    }

    /// Keeps every answered query for [`EntityOracle::query_log`].
    pub fn with_query_log(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    pub fn entity(&self) -> EntityId {
        self.entity
    }

    pub fn truth(&self) -> &Dag {
        &self.truth
    }

    pub fn node_count(&self) -> usize {
        self.truth.n_observed()
    }

    pub fn ledger(&self) -> &InterventionLedger {
        &self.ledger
    }

    pub fn intervention_count(&self) -> usize {
        self.ledger.count()
    }

    pub fn ci_test_count(&self) -> u64 {
        self.ci_tests
    }

    pub fn query_log(&self) -> &[QueryRecord] {
        self.log.as_deref().unwrap_or(&[])
    }

    /// Adds `w` to the ledger and returns the new count. Idempotent.
    pub fn register_intervention(&mut self, w: impl Into<DagNode>) -> Result<usize, OracleError> {
        match w.into() {
            DagNode::Latent(_) => Err(OracleError::LatentIntervention { entity: self.entity }),
            DagNode::Observed(o) => {
                if o.index() >= self.truth.n_observed() {
                    return Err(self.graph_err(GraphError::UnknownNode(o.0)));
                }
                self.ledger.targets.insert(o.index());
                Ok(self.ledger.count())
            }
        }
    }

    /// `true` iff the query reports independence.
    pub fn ci_test(&mut self, q: &CiQuery) -> Result<bool, OracleError> {
        let truth = match q.target {
            None => None,
            Some(w) => {
                if !self.ledger.contains(w) {
                    return Err(OracleError::BudgetViolation {
                        entity: self.entity,
                        target: w,
                    });
                }
                Some(self.truth.mutilated(w).map_err(|e| self.graph_err(e))?)
            }
        };
        let d = truth.as_ref().unwrap_or(&self.truth);
        let mut independent = crate::graph::d_separated(d, q.u, q.v, q.z).map_err(|e| self.graph_err(e))?;
        if let Some(noise) = &mut self.noise {
            if noise.rng.random_bool(noise.rho) {
                independent = !independent;
            }
        }
        self.ci_tests += 1;
        if let Some(log) = &mut self.log {
            log.push(QueryRecord {
                entity: self.entity,
                query: *q,
                independent,
            });
        }
        Ok(independent)
    }

    fn graph_err(&self, source: GraphError) -> OracleError {
        OracleError::Graph {
            entity: self.entity,
            source,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::node::LatentId;

    fn n(i: u32) -> NodeId {
        NodeId(i)
    }

    #[test]
    fn ledger_is_idempotent() {
        let mut o = EntityOracle::new(EntityId(0), Dag::from_edges(3, &[(0, 1)]).unwrap());
        assert_eq!(o.intervention_count(), 0);
        assert_eq!(o.register_intervention(n(1)), Ok(1));
        assert_eq!(o.register_intervention(n(1)), Ok(1));
        assert_eq!(o.register_intervention(n(2)), Ok(2));
        assert!(o.register_intervention(n(3)).is_err());
    }

    #[test]
    fn latents_cannot_be_targets() {
        let mut d = Dag::new(2, 0).unwrap();
        let l = d.add_latent().unwrap();
        let mut o = EntityOracle::new(EntityId(4), d);
        assert_eq!(
            o.register_intervention(l),
            Err(OracleError::LatentIntervention { entity: EntityId(4) })
        );
        assert_eq!(o.register_intervention(LatentId(0)).unwrap_err(), OracleError::LatentIntervention {
            entity: EntityId(4)
        });
    }

    #[test]
    fn unregistered_target_is_a_budget_violation() {
        let mut o = EntityOracle::new(EntityId(2), Dag::from_edges(2, &[(0, 1)]).unwrap());
        assert_eq!(
            o.ci_test(&CiQuery::under_do(n(0), n(1), n(0))),
            Err(OracleError::BudgetViolation {
                entity: EntityId(2),
                target: n(0)
            })
        );
        assert_eq!(o.ci_test_count(), 0);
    }

    #[test]
    fn intervention_answers_follow_ancestry() {
        // u -> v
        let mut o = EntityOracle::new(EntityId(0), Dag::from_edges(2, &[(0, 1)]).unwrap());
        o.register_intervention(n(0)).unwrap();
        o.register_intervention(n(1)).unwrap();
        assert!(!o.ci_test(&CiQuery::under_do(n(0), n(1), n(0))).unwrap());
        assert!(o.ci_test(&CiQuery::under_do(n(0), n(1), n(1))).unwrap());

        // a <- l -> b
        let mut d = Dag::new(2, 0).unwrap();
        let l = d.add_latent().unwrap();
        d.add_edge(l, n(0)).unwrap();
        d.add_edge(l, n(1)).unwrap();
        let mut o = EntityOracle::new(EntityId(1), d);
        assert!(!o.ci_test(&CiQuery::observational(n(0), n(1), NodeSet::EMPTY)).unwrap());
        o.register_intervention(n(0)).unwrap();
        o.register_intervention(n(1)).unwrap();
        assert!(o.ci_test(&CiQuery::under_do(n(0), n(1), n(0))).unwrap());
        assert!(o.ci_test(&CiQuery::under_do(n(0), n(1), n(1))).unwrap());
    }

    #[test]
    fn query_log_lines() {
        let d = Dag::from_edges(4, &[(0, 2), (1, 2)]).unwrap();
        let mut o = EntityOracle::new(EntityId(3), d).with_query_log();
        o.ci_test(&CiQuery::observational(n(0), n(1), NodeSet::from_bits(0b1100))).unwrap();
        o.register_intervention(n(2)).unwrap();
        o.ci_test(&CiQuery::under_do(n(0), n(2), n(2))).unwrap();
        let lines: Vec<_> = o.query_log().iter().map(|r| alloc::format!("{r}")).collect();
        assert_eq!(lines, ["3 0 1 2 3 target=obs -> dep", "3 0 2 target=2 -> indep"]);
    }

    #[test]
    fn full_noise_flips_every_answer() {
        let d = Dag::from_edges(2, &[(0, 1)]).unwrap();
        let mut o = EntityOracle::new(EntityId(0), d).with_noise(1.0, 9);
        assert!(o.ci_test(&CiQuery::observational(n(0), n(1), NodeSet::EMPTY)).unwrap());
    }
}
