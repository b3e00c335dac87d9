//! Synthetic multi-entity instances: random base DAGs, latent injection,
//! distance-controlled perturbation and dominant-MAG cluster assembly.

mod instance;
mod perturb;

pub use instance::{build_instance, ClusterInstance, EntityTruth, InstanceParams};
pub use perturb::{perturb_to_target_distance, DistanceMode};

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Dag, GraphError};
use crate::node::NodeId;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenerationError {
    #[error("invalid generation parameters: {0}")]
    InvalidParams(String),
    #[error("{count} latents requested but only {pairs} observed pairs exist")]
    TooManyLatents { count: usize, pairs: usize },
    #[error("no graph met the distance target {target} within {steps} steps (seed {seed}, best distance {best})")]
    StepCap {
        seed: u64,
        target: usize,
        steps: usize,
        best: usize,
    },
    #[error("instance generation failed after {attempts} attempts (seed {seed}): {last}")]
    Exhausted { seed: u64, attempts: usize, last: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub(crate) fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Random DAG: a uniform topological order, then every forward pair kept
/// independently with probability `p`.
pub fn gen_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Dag, GenerationError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GenerationError::InvalidParams(alloc::format!("edge probability {p} outside [0, 1]")));
    }
    let mut d = Dag::new(n, 0)?;
    let mut r = rng(seed, 0);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut r);
    for a in 0..n {
        for b in a + 1..n {
            if r.random_bool(p) {
                d.add_edge(NodeId::from(order[a]), NodeId::from(order[b]))?;
            }
        }
    }
    Ok(d)
}

/// Adds `count` latents, each the parent of a distinct uniformly chosen pair
/// of observed nodes.
pub fn inject_latents(d: &Dag, count: usize, seed: u64) -> Result<Dag, GenerationError> {
    let n = d.n_observed();
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    if count > pairs.len() {
        return Err(GenerationError::TooManyLatents {
            count,
            pairs: pairs.len(),
        });
    }
    let mut r = rng(seed, 1);
    let (chosen, _) = pairs.partial_shuffle(&mut r, count);
    let mut out = d.clone();
    for &(a, b) in chosen.iter() {
        let l = out.add_latent()?;
        out.add_edge(l, NodeId::from(a))?;
        out.add_edge(l, NodeId::from(b))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{dag_to_mag, Edge, Mag};
    use crate::node::LatentId;

    #[test]
    fn erdos_renyi_extremes() {
        assert_eq!(gen_erdos_renyi(6, 0.0, 3).unwrap().edge_count(), 0);
        assert_eq!(gen_erdos_renyi(6, 1.0, 3).unwrap().edge_count(), 15);
        assert!(gen_erdos_renyi(6, 1.5, 3).is_err());
        assert_eq!(gen_erdos_renyi(8, 0.3, 9), gen_erdos_renyi(8, 0.3, 9));
    }

    #[test]
    fn erdos_renyi_mean_edge_count() {
        // 45 forward pairs at p = 0.3
        let total: usize = (0..1000).map(|s| gen_erdos_renyi(10, 0.3, s).unwrap().edge_count()).sum();
        let mean = total as f64 / 1000.0;
        assert!((mean - 13.5).abs() <= 0.5, "mean {mean}");
    }

    #[test]
    fn latents_get_two_children() {
        let d = Dag::from_edges(5, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(inject_latents(&d, 0, 1).unwrap(), d);
        let l = inject_latents(&d, 2, 1).unwrap();
        assert_eq!(l.n_latent(), 2);
        for i in 0..2 {
            assert_eq!(l.latent_children(LatentId(i)).len(), 2);
        }
        assert!(matches!(
            inject_latents(&Dag::new(2, 0).unwrap(), 2, 0),
            Err(GenerationError::TooManyLatents { count: 2, pairs: 1 })
        ));
    }

    #[test]
    fn latent_over_a_direct_edge_stays_directed() {
        let mut d = Dag::from_edges(2, &[(0, 1)]).unwrap();
        let l = d.add_latent().unwrap();
        d.add_edge(l, NodeId(0)).unwrap();
        d.add_edge(l, NodeId(1)).unwrap();
        assert_eq!(dag_to_mag(&d), Mag::from_edges(2, &[Edge::directed(NodeId(0), NodeId(1))]).unwrap());
    }
}
