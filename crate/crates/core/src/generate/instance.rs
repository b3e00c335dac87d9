use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::RngCore;

use super::perturb::{dag_walk, default_step_cap, markov_walk, Bounds, DistanceMode};
use super::{inject_latents, rng, GenerationError};
use crate::discovery::ClusterResult;
use crate::graph::{canonical_dag, dag_to_mag, node_distance, Dag, Mag};

/// Shape of a generated instance.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InstanceParams {
    pub entities: usize,
    pub clusters: usize,
    pub alpha: f64,
    pub beta: f64,
    /// Minimum fraction of each cluster holding the dominant MAG.
    pub gamma: f64,
    pub latents_per_dag: usize,
    /// Cross-cluster dominant graphs must be Markov equivalent.
    pub markov_equiv: bool,
    pub max_attempts: usize,
}

impl InstanceParams {
    /// The (α, β) setup: 2 latents per DAG, no equivalence constraint.
    pub fn alpha_beta(entities: usize, clusters: usize, alpha: f64, beta: f64, gamma: f64) -> Self {
        InstanceParams {
            entities,
            clusters,
            alpha,
            beta,
            gamma,
            latents_per_dag: 2,
            markov_equiv: false,
            max_attempts: 20,
        }
    }

    /// The α setup: every cluster member holds the same graph and the
    /// dominant graphs of different clusters are Markov equivalent.
    pub fn alpha_only(entities: usize, clusters: usize, alpha: f64) -> Self {
        InstanceParams {
            beta: 0.0,
            gamma: 1.0,
            markov_equiv: true,
            ..InstanceParams::alpha_beta(entities, clusters, alpha, 0.0, 1.0)
        }
    }

    /// `⌈αn⌉`
    pub fn alpha_nodes(&self, n: usize) -> usize {
        libm::ceil(self.alpha * n as f64 - 1e-9) as usize
    }

    /// `⌊βn⌋`
    pub fn beta_nodes(&self, n: usize) -> usize {
        libm::floor(self.beta * n as f64 + 1e-9) as usize
    }

    fn check(&self, n: usize) -> Result<(), GenerationError> {
        let bad = |s: &str| Err(GenerationError::InvalidParams(s.to_string()));
        if self.clusters == 0 || self.entities == 0 {
            return bad("need at least one entity and one cluster");
        }
        if !self.entities.is_multiple_of(self.clusters) {
            return bad("entity count must be divisible by the cluster count");
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) || !(self.beta >= 0.0 && self.beta < self.alpha) {
            return bad("need 0 <= beta < alpha <= 1");
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return bad("gamma must lie in (0, 1]");
        }
        if self.alpha_nodes(n) > n {
            return bad("alpha * n exceeds n");
        }
        Ok(())
    }
}

/// Ground truth of one entity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntityTruth {
    pub dag: Dag,
    pub mag: Mag,
    pub cluster: usize,
    /// Holds its cluster's dominant MAG.
    pub dominant: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterInstance {
    pub entities: Vec<EntityTruth>,
    pub truth_partition: ClusterResult,
    pub params: InstanceParams,
    pub seed: u64,
    /// Attempt (0-based) that produced this instance.
    pub attempt: usize,
}

impl ClusterInstance {
    pub fn node_count(&self) -> usize {
        self.entities[0].mag.node_count()
    }

    pub fn dags(&self) -> impl Iterator<Item = &Dag> {
        self.entities.iter().map(|e| &e.dag)
    }

    pub fn mags(&self) -> impl Iterator<Item = &Mag> {
        self.entities.iter().map(|e| &e.mag)
    }

    /// Largest MAG degree over all entities.
    pub fn max_degree(&self) -> usize {
        self.mags().map(Mag::max_degree).max().unwrap_or(0)
    }
}

fn derive(seed: u64, tag: u64) -> u64 {
    rng(seed, tag).next_u64()
}

/// Builds a clustered instance on top of the latent-free `base` network.
///
/// Cluster 0's dominant DAG is `base` plus fresh latents. Every further
/// dominant DAG either gets its own latents and is edited until its MAG is
/// at least `⌈αn⌉` away from all earlier dominants, or (with
/// `markov_equiv`) is drawn from the equivalence class of the first
/// dominant MAG at that distance. Each cluster holds `⌈γ·M/k⌉` copies of its
/// dominant graph; the other members are edits of the dominant DAG within
/// `⌊βn⌋` of every member of their own cluster and at least `⌈αn⌉` from
/// every member of the other clusters. The finished instance is checked
/// pairwise; failed attempts are retried with derived seeds.
pub fn build_instance(base: &Dag, params: &InstanceParams, seed: u64) -> Result<ClusterInstance, GenerationError> {
    let n = base.n_observed();
    params.check(n)?;
    let base = base.without_latents();
    let mut last = String::new();
    for attempt in 0..params.max_attempts.max(1) {
        let sub = if attempt == 0 { seed } else { derive(seed, 1000 + attempt as u64) };
        match build_once(&base, params, sub) {
            Ok(entities) => {
                let labels: Vec<usize> = entities.iter().map(|e| e.cluster).collect();
                return Ok(ClusterInstance {
                    entities,
                    truth_partition: ClusterResult::from_labels(&labels),
                    params: params.clone(),
                    seed,
                    attempt,
                });
            }
            Err(e) => last = alloc::format!("{e}"),
        }
    }
    Err(GenerationError::Exhausted {
        seed,
        attempts: params.max_attempts.max(1),
        last,
    })
}

fn build_once(base: &Dag, p: &InstanceParams, seed: u64) -> Result<Vec<EntityTruth>, GenerationError> {
    let n = base.n_observed();
    let (a_n, b_n) = (p.alpha_nodes(n), p.beta_nodes(n));
    let cap = default_step_cap(n);

    let first = inject_latents(base, p.latents_per_dag, derive(seed, 1))?;
    let first_mag = dag_to_mag(&first);
    let mut dominants: Vec<(Dag, Mag)> = alloc::vec![(first, first_mag.clone())];
    for c in 1..p.clusters {
        let earlier: Vec<&Mag> = dominants.iter().map(|d| &d.1).collect();
        let bounds = Bounds {
            reference: &first_mag,
            target: a_n,
            mode: DistanceMode::AtLeast,
            near: &[],
            near_bound: 0,
            far: &earlier,
            far_bound: a_n,
        };
        let dag = if p.markov_equiv {
            let g = markov_walk(&first_mag, &bounds, derive(seed, 10 + c as u64), cap)?;
            canonical_dag(&g)?
        } else {
            let start = inject_latents(base, p.latents_per_dag, derive(seed, 100 + c as u64))?;
            dag_walk(&start, &bounds, derive(seed, 200 + c as u64), cap)?
        };
        let mag = dag_to_mag(&dag);
        dominants.push((dag, mag));
    }

    let size = p.entities / p.clusters;
    let mut dom_count = (libm::ceil(p.gamma * size as f64 - 1e-9) as usize).clamp(1, size);
    if b_n < 2 {
        // any edge change moves both endpoints, so a variant would be a copy
        dom_count = size;
    }

    let mut entities: Vec<EntityTruth> = Vec::with_capacity(p.entities);
    for (c, (dag, mag)) in dominants.iter().enumerate() {
        for _ in 0..dom_count {
            entities.push(EntityTruth {
                dag: dag.clone(),
                mag: mag.clone(),
                cluster: c,
                dominant: true,
            });
        }
    }
    let mut variants: Vec<EntityTruth> = Vec::new();
    for (c, (dag, mag)) in dominants.iter().enumerate() {
        for v in 0..size - dom_count {
            let mut near: Vec<&Mag> = alloc::vec![mag];
            let mut far: Vec<&Mag> = Vec::new();
            for (o, (_, m)) in dominants.iter().enumerate() {
                if o != c {
                    far.push(m);
                }
            }
            for e in &variants {
                if e.cluster == c {
                    near.push(&e.mag);
                } else {
                    far.push(&e.mag);
                }
            }
            let bounds = Bounds {
                reference: mag,
                target: b_n,
                mode: DistanceMode::ExactlyAtMost,
                near: &near,
                near_bound: b_n,
                far: &far,
                far_bound: a_n,
            };
            let tag = 10_000 + (c * size + v) as u64;
            let mut result = Err(GenerationError::InvalidParams("unreachable".into()));
            for retry in 0..5u64 {
                result = dag_walk(dag, &bounds, derive(seed, tag + retry * 1_000_000), cap);
                if result.is_ok() {
                    break;
                }
            }
            let vdag = result?;
            let vmag = dag_to_mag(&vdag);
            variants.push(EntityTruth {
                dag: vdag,
                mag: vmag,
                cluster: c,
                dominant: false,
            });
        }
    }
    // cluster-contiguous order, dominant copies first
    for c in 0..p.clusters {
        let at = entities.iter().rposition(|e| e.cluster == c).expect("every cluster has a dominant") + 1;
        let mine: Vec<EntityTruth> = variants.iter().filter(|e| e.cluster == c).cloned().collect();
        entities.splice(at..at, mine);
    }

    check_clustering(&entities, a_n, b_n, p.markov_equiv)?;
    Ok(entities)
}

/// Pairwise check: within-cluster distance `<= b_n`, cross-cluster `>= a_n`.
fn check_clustering(entities: &[EntityTruth], a_n: usize, b_n: usize, markov: bool) -> Result<(), GenerationError> {
    // copies dominate, so compare distinct (cluster, MAG) pairs only
    let mut distinct: Vec<(usize, &Mag, usize)> = Vec::new();
    for (i, e) in entities.iter().enumerate() {
        if !distinct.iter().any(|(c, g, _)| *c == e.cluster && *g == &e.mag) {
            distinct.push((e.cluster, &e.mag, i));
        }
    }
    for (x, &(cx, gx, i)) in distinct.iter().enumerate() {
        for &(cy, gy, j) in &distinct[x + 1..] {
            let d = node_distance(gx, gy)?;
            let ok = if cx == cy {
                d <= b_n
            } else {
                d >= a_n && (!markov || gx.markov_equivalent(gy))
            };
            if !ok {
                return Err(GenerationError::InvalidParams(alloc::format!(
                    "entities {i} and {j} violate the clustering property (distance {d})"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::gen_erdos_renyi;
    use crate::graph::validate_mag;

    #[test]
    fn table_shape_counts() {
        let base = gen_erdos_renyi(10, 0.3, 5).unwrap();
        let p = InstanceParams::alpha_beta(40, 2, 0.6, 0.2, 0.9);
        let inst = build_instance(&base, &p, 5).unwrap();
        assert_eq!(inst.entities.len(), 40);
        for c in 0..2 {
            let members: Vec<_> = inst.entities.iter().filter(|e| e.cluster == c).collect();
            assert_eq!(members.len(), 20);
            assert_eq!(members.iter().filter(|e| e.dominant).count(), 18);
        }
        assert!(inst.mags().all(|g| validate_mag(g).is_ok()));
        assert_eq!(build_instance(&base, &p, 5).unwrap(), inst);
    }

    #[test]
    fn alpha_instances_are_copies() {
        let base = gen_erdos_renyi(8, 0.3, 2).unwrap();
        let inst = build_instance(&base, &InstanceParams::alpha_only(10, 2, 0.5), 2).unwrap();
        for e in &inst.entities {
            let dom = &inst.entities[e.cluster * 5].mag;
            assert_eq!(&e.mag, dom);
        }
        assert!(inst.entities[0].mag.markov_equivalent(&inst.entities[5].mag));
    }

    #[test]
    fn indivisible_entity_count_is_rejected() {
        let base = gen_erdos_renyi(6, 0.3, 0).unwrap();
        let p = InstanceParams::alpha_beta(7, 2, 0.6, 0.2, 0.9);
        assert!(matches!(build_instance(&base, &p, 0), Err(GenerationError::InvalidParams(_))));
    }
}
