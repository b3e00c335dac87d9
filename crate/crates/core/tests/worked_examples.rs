//! Small hand-built graphs with known answers.

use cocausal_core::{
    d_separated, dag_to_mag, equivalence_class_pag, identify_bidirected, identify_out_nbr, incidence_set,
    m_separated, node_diff, node_distance, skeleton_pag, validate_mag, Dag, Edge, EdgeMark, EntityId, EntityOracle,
    Incidence, Mag, NodeId, NodeSet, Pag,
};

const T: NodeId = NodeId(0);
const X: NodeId = NodeId(1);
const Y: NodeId = NodeId(2);
const Z: NodeId = NodeId(3);

/// t -> x -> y -> z with latents over (x, y) and (t, y).
fn d1() -> Dag {
    let mut d = Dag::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
    for (a, b) in [(X, Y), (T, Y)] {
        let l = d.add_latent().unwrap();
        d.add_edge(l, a).unwrap();
        d.add_edge(l, b).unwrap();
    }
    d
}

/// t -> x, t -> y, x -> y, y -> z with a latent over (x, y).
fn d2() -> Dag {
    let mut d = Dag::from_edges(4, &[(0, 1), (0, 2), (1, 2), (2, 3)]).unwrap();
    let l = d.add_latent().unwrap();
    d.add_edge(l, X).unwrap();
    d.add_edge(l, Y).unwrap();
    d
}

fn shared_mag() -> Mag {
    Mag::from_edges(
        4,
        &[Edge::directed(T, X), Edge::directed(X, Y), Edge::directed(T, Y), Edge::directed(Y, Z)],
    )
    .unwrap()
}

#[test]
fn two_latent_dags_share_one_mag() {
    assert_eq!(dag_to_mag(&d1()), shared_mag());
    assert_eq!(dag_to_mag(&d2()), shared_mag());
    assert!(validate_mag(&shared_mag()).is_ok());
}

#[test]
fn y_blocks_t_from_z() {
    assert!(d_separated(&d2(), T, Z, NodeSet::singleton(Y.index())).unwrap());
    assert!(!d_separated(&d2(), T, Z, NodeSet::EMPTY).unwrap());
    assert!(m_separated(&shared_mag(), T, Z, NodeSet::singleton(Y.index())).unwrap());
}

#[test]
fn incidence_of_y() {
    let s = incidence_set(&shared_mag(), Y).unwrap();
    let got: Vec<_> = s.entries.into_iter().collect();
    assert_eq!(got, [(T, Incidence::Head), (X, Incidence::Head), (Z, Incidence::Tail)]);
}

#[test]
fn skeleton_pag_is_all_circles() {
    let p = skeleton_pag(&shared_mag());
    let want = Pag::from_edges(
        4,
        &[
            Edge::new(T, X, EdgeMark::Circle, EdgeMark::Circle),
            Edge::new(X, Y, EdgeMark::Circle, EdgeMark::Circle),
            Edge::new(T, Y, EdgeMark::Circle, EdgeMark::Circle),
            Edge::new(Y, Z, EdgeMark::Circle, EdgeMark::Circle),
        ],
    )
    .unwrap();
    assert_eq!(p, want);
}

#[test]
fn out_neighbours_and_bidirected_on_shared_mag() {
    let pag = skeleton_pag(&shared_mag());
    for truth in [d1(), d2()] {
        let mut o = EntityOracle::new(EntityId(0), truth);
        assert_eq!(identify_out_nbr(&mut o, &pag, X).unwrap(), NodeSet::singleton(Y.index()));
        for u in 0..4 {
            assert!(identify_bidirected(&mut o, &pag, NodeId(u)).unwrap().is_empty());
        }
    }
}

#[test]
fn ancestral_violation_is_reported() {
    // a <-> b, a -> c, c -> b
    let (a, b, c) = (NodeId(0), NodeId(1), NodeId(2));
    let g = Mag::from_edges(3, &[Edge::bidirected(a, b), Edge::directed(a, c), Edge::directed(c, b)]).unwrap();
    assert!(validate_mag(&g).is_err());
}

#[test]
fn far_apart_mags_with_one_pag() {
    // a -> b versus a <- b, plus two untouched nodes: distance n/2
    let (a, b) = (NodeId(0), NodeId(1));
    let g1 = Mag::from_edges(4, &[Edge::directed(a, b)]).unwrap();
    let g2 = Mag::from_edges(4, &[Edge::directed(b, a)]).unwrap();
    assert_eq!(node_distance(&g1, &g2).unwrap(), 2);
    assert!(g1.markov_equivalent(&g2));
    assert_eq!(equivalence_class_pag(&g1).unwrap(), equivalence_class_pag(&g2).unwrap());

    // the same on a longer chain: every edge reversed leaves the class unchanged
    let chain: Vec<Edge> = (0..5).map(|i| Edge::directed(NodeId(i), NodeId(i + 1))).collect();
    let rev: Vec<Edge> = (0..5).map(|i| Edge::directed(NodeId(i + 1), NodeId(i))).collect();
    let (c1, c2) = (Mag::from_edges(6, &chain).unwrap(), Mag::from_edges(6, &rev).unwrap());
    assert_eq!(node_diff(&c1, &c2).unwrap(), NodeSet::full(6));
    assert_eq!(equivalence_class_pag(&c1).unwrap(), equivalence_class_pag(&c2).unwrap());
}
