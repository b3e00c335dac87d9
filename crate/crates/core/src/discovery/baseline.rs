//! Intervention-free baselines that only look at the PAGs.

use alloc::vec::Vec;

use super::union_find::UnionFind;
use super::{ClusterResult, DiscoveryError};
use crate::node::NodeId;
use crate::pag::Pag;

/// Output of [`baseline_pag_cluster`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaselineClustering {
    pub clusters: ClusterResult,
    /// Every pair had the same weight, so the split carries no information.
    pub low_confidence: bool,
}

/// Splits entities into `k` blocks using PAG similarity alone.
///
/// The weight of a pair is the number of nodes whose PAG incidence agrees.
/// With `k = 2` the split is a global minimum cut (Stoer–Wagner); otherwise
/// the `k − 1` lightest edges of a maximum spanning forest are dropped.
pub fn baseline_pag_cluster(pags: &[Pag], k: usize) -> Result<BaselineClustering, DiscoveryError> {
    let m = pags.len();
    if m == 0 {
        return Err(DiscoveryError::NoEntities);
    }
    if k == 0 {
        return Err(DiscoveryError::InvalidParams("k must be at least 1"));
    }
    if k > m {
        return Err(DiscoveryError::TooManyClusters { k, m });
    }
    let n = pags[0].node_count();
    let mut w = alloc::vec![0u64; m * m];
    for i in 0..m {
        for j in i + 1..m {
            let same = if pags[i].node_count() == pags[j].node_count() {
                (0..n).filter(|&u| pags[i].same_incidence(&pags[j], NodeId::from(u))).count()
            } else {
                0
            };
            w[i * m + j] = same as u64;
            w[j * m + i] = same as u64;
        }
    }
    // every pair scoring like (0, 1) leaves nothing to cut on
    let low_confidence = m < 2 || (0..m).all(|i| (0..m).all(|j| i == j || w[i * m + j] == w[1]));

    let groups = if k == 1 {
        alloc::vec![(0..m).collect()]
    } else if k == 2 {
        let side = stoer_wagner(&w, m);
        let (a, b): (Vec<usize>, Vec<usize>) = (0..m).partition(|i| side[*i]);
        alloc::vec![a, b]
    } else {
        forest_cut(&w, m, k)
    };
    Ok(BaselineClustering {
        clusters: ClusterResult::from_groups(canonical(groups)),
        low_confidence,
    })
}

fn canonical(mut groups: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for g in &mut groups {
        g.sort_unstable();
    }
    groups.sort_unstable_by_key(|g| g[0]);
    groups
}

/// One side of a global minimum cut of the complete weighted graph.
fn stoer_wagner(w: &[u64], m: usize) -> Vec<bool> {
    let mut w = w.to_vec();
    // members[v]: original vertices merged into v
    let mut members: Vec<Vec<usize>> = (0..m).map(|v| alloc::vec![v]).collect();
    let mut alive: Vec<usize> = (0..m).collect();
    let mut best = (u64::MAX, Vec::new());
    while alive.len() > 1 {
        let mut added = alloc::vec![false; m];
        let mut key = alloc::vec![0u64; m];
        let (mut prev, mut last) = (alive[0], alive[0]);
        for step in 0..alive.len() {
            let next = *alive
                .iter()
                .filter(|&&v| !added[v])
                .max_by(|&&a, &&b| key[a].cmp(&key[b]).then(b.cmp(&a)))
                .expect("a vertex is left");
            added[next] = true;
            if step == alive.len() - 1 && key[next] < best.0 {
                best = (key[next], members[next].clone());
            }
            prev = last;
            last = next;
            for &v in &alive {
                if !added[v] {
                    key[v] += w[next * m + v];
                }
            }
        }
        // merge last into prev
        let moved = core::mem::take(&mut members[last]);
        members[prev].extend(moved);
        for &v in &alive {
            w[prev * m + v] += w[last * m + v];
            w[v * m + prev] = w[prev * m + v];
        }
        w[prev * m + prev] = 0;
        alive.retain(|&v| v != last);
    }
    let mut side = alloc::vec![false; m];
    for v in best.1 {
        side[v] = true;
    }
    side
}

/// Maximum spanning tree (Kruskal) minus its `k − 1` lightest edges.
fn forest_cut(w: &[u64], m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut pairs: Vec<(u64, usize, usize)> = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            pairs.push((w[i * m + j], i, j));
        }
    }
    pairs.sort_by(|a, b| b.0.cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut uf = UnionFind::new(m);
    let mut tree = Vec::new();
    for &(weight, i, j) in &pairs {
        if uf.union(i, j) {
            tree.push((weight, i, j));
        }
    }
    // tree is in descending weight order; keep all but the k − 1 lightest
    tree.truncate(tree.len() + 1 - k);
    let mut uf = UnionFind::new(m);
    for &(_, i, j) in &tree {
        uf.union(i, j);
    }
    uf.groups()
}

/// Nodes in increasing order of total PAG degree over all entities (ties by
/// node id), truncated to `budget`.
pub fn greedy_sample_selection(pags: &[Pag], budget: usize) -> Vec<NodeId> {
    let n = pags.iter().map(Pag::node_count).max().unwrap_or(0);
    let mut nodes: Vec<(usize, NodeId)> = (0..n)
        .map(|u| {
            let u = NodeId::from(u);
            (pags.iter().map(|p| p.adjacent_set(u).len()).sum(), u)
        })
        .collect();
    nodes.sort_unstable();
    nodes.into_iter().take(budget).map(|(_, u)| u).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Mag};
    use crate::oracle::EntityId;
    use crate::pag::skeleton_pag;

    fn n(i: u32) -> NodeId {
        NodeId(i)
    }

    fn brute_min_cut(w: &[u64], m: usize) -> u64 {
        (1..(1u32 << m) - 1)
            .map(|mask| {
                let mut cut = 0;
                for i in 0..m {
                    for j in 0..m {
                        if mask >> i & 1 == 1 && mask >> j & 1 == 0 {
                            cut += w[i * m + j];
                        }
                    }
                }
                cut
            })
            .min()
            .unwrap()
    }

    #[test]
    fn stoer_wagner_matches_brute_force() {
        let m = 6;
        let mut w = alloc::vec![0u64; m * m];
        let mut x = 7u64;
        for i in 0..m {
            for j in i + 1..m {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let v = x >> 60;
                w[i * m + j] = v;
                w[j * m + i] = v;
            }
        }
        let side = stoer_wagner(&w, m);
        let mut cut = 0;
        for i in 0..m {
            for j in 0..m {
                if side[i] && !side[j] {
                    cut += w[i * m + j];
                }
            }
        }
        assert_eq!(cut, brute_min_cut(&w, m));
        assert!(side.iter().any(|&s| s) && side.iter().any(|&s| !s));
    }

    #[test]
    fn different_skeletons_split() {
        let a = skeleton_pag(&Mag::from_edges(4, &[Edge::directed(n(0), n(1))]).unwrap());
        let b = skeleton_pag(&Mag::from_edges(4, &[Edge::directed(n(2), n(3))]).unwrap());
        let pags = [a.clone(), b.clone(), a, b];
        let r = baseline_pag_cluster(&pags, 2).unwrap();
        assert_eq!(r.clusters.blocks(), [[EntityId(0), EntityId(2)], [EntityId(1), EntityId(3)]]);
        assert!(!r.low_confidence);
    }

    #[test]
    fn identical_pags_are_low_confidence() {
        let p = skeleton_pag(&Mag::empty(3).unwrap());
        let r = baseline_pag_cluster(&[p.clone(), p.clone(), p], 2).unwrap();
        assert!(r.low_confidence);
        assert_eq!(r.clusters.len(), 2);
        assert!(matches!(
            baseline_pag_cluster(&[skeleton_pag(&Mag::empty(3).unwrap())], 2),
            Err(DiscoveryError::TooManyClusters { k: 2, m: 1 })
        ));
    }

    #[test]
    fn forest_cut_gives_k_blocks() {
        let pags: Vec<Pag> = (0..3)
            .flat_map(|c| {
                let g = Mag::from_edges(6, &[Edge::directed(n(2 * c), n(2 * c + 1))]).unwrap();
                [skeleton_pag(&g), skeleton_pag(&g)]
            })
            .collect();
        let r = baseline_pag_cluster(&pags, 3).unwrap();
        assert_eq!(r.clusters.labels(), [0, 0, 1, 1, 2, 2]);
    }

    #[test]
    fn greedy_prefers_low_degree() {
        // star centred on 0
        let g = Mag::from_edges(4, &[Edge::directed(n(0), n(1)), Edge::directed(n(0), n(2)), Edge::directed(n(0), n(3))])
            .unwrap();
        let p = skeleton_pag(&g);
        assert_eq!(greedy_sample_selection(&[p.clone(), p], 4), [n(1), n(2), n(3), n(0)]);
        let e = skeleton_pag(&Mag::empty(3).unwrap());
        assert_eq!(greedy_sample_selection(&[e], 2), [n(0), n(1)]);
    }
}
