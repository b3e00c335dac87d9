use proptest::prelude::*;

use cocausal::bundle::{read_bundle, write_bundle, MANIFEST};
use cocausal::format::{parse_dag, parse_mag, parse_pag, write_dag, write_mag, write_pag};
use cocausal::harness::{generate_instance, BaseNetwork, ExperimentConfig};
use cocausal::networks::{load_network, Network};
use cocausal_core::{dag_to_mag, gen_erdos_renyi, inject_latents, skeleton_pag, Dag, Pag};

fn dag(n: usize, p: f64, l: usize, seed: u64) -> Dag {
    let d = gen_erdos_renyi(n, p, seed).unwrap();
    inject_latents(&d, l.min(n * (n - 1) / 2), seed).unwrap()
}

proptest! {
    #[test]
    fn graph_files_round_trip(n in 2usize..12, p in 0.0..0.6f64, l in 0usize..4, seed in any::<u64>()) {
        let d = dag(n, p, l, seed);
        prop_assert_eq!(parse_dag(&write_dag(&d)).unwrap(), d.clone());
        let g = dag_to_mag(&d);
        prop_assert_eq!(parse_mag(&write_mag(&g)).unwrap(), g.clone());
        let pag = skeleton_pag(&g);
        prop_assert_eq!(parse_pag(&write_pag(&pag)).unwrap(), pag.clone());
        let oriented = Pag::oriented(&g);
        prop_assert_eq!(parse_pag(&write_pag(&oriented)).unwrap(), oriented);
    }
}

#[test]
fn bundle_round_trip() {
    let cfg = ExperimentConfig::table_alpha_beta(BaseNetwork::DEFAULT_ER);
    let inst = generate_instance(&cfg, 7).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let written = write_bundle(dir.path(), "er", &inst).unwrap();
    assert!(dir.path().join(MANIFEST).exists());
    assert_eq!(written.entities.len(), 40);
    let (manifest, back) = read_bundle(dir.path()).unwrap();
    assert_eq!(manifest, written);
    assert_eq!(back, inst);
}

#[test]
fn corrupt_bundles_are_rejected() {
    let cfg = ExperimentConfig::table_alpha_beta(BaseNetwork::Fixed(Network::Survey));
    let inst = generate_instance(&cfg, 1).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_bundle(dir.path(), "survey", &inst).unwrap();
    std::fs::write(dir.path().join("entity_0003.txt"), "nodes 4 latents 0\n0 -> 1\n").unwrap();
    let err = read_bundle(dir.path()).unwrap_err();
    assert!(format!("{err:#}").contains("entity_0003.txt"), "{err:#}");
    std::fs::remove_file(dir.path().join("entity_0003.txt")).unwrap();
    assert!(read_bundle(dir.path()).is_err());
}

#[test]
fn network_files_are_checked_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("earthquake.txt");
    std::fs::write(&good, write_dag(&Network::Earthquake.dag())).unwrap();
    assert_eq!(load_network(&good).unwrap(), Network::Earthquake.dag());
    let bad = dir.path().join("sachs.txt");
    std::fs::write(&bad, write_dag(&Network::Earthquake.dag())).unwrap();
    assert!(load_network(&bad).is_err());
}
