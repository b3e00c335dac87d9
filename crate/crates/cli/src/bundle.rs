//! Instance bundles: `instance.json` plus one truth-DAG file per entity.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use cocausal_core::{dag_to_mag, ClusterInstance, ClusterResult, Dag, EntityId, EntityTruth, InstanceParams};
use serde::{Deserialize, Serialize};

use crate::format::{parse_dag, write_dag};

pub const MANIFEST: &str = "instance.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    /// Base network name (`er` for random graphs).
    pub network: String,
    pub nodes: usize,
    pub params: InstanceParams,
    pub seed: u64,
    pub attempt: usize,
    pub partition: Vec<Vec<EntityId>>,
    pub dominant: Vec<bool>,
    /// Truth DAG file of each entity, relative to the bundle directory.
    pub entities: Vec<String>,
}

fn entity_file(i: usize) -> String {
    format!("entity_{i:04}.txt")
}

pub fn write_bundle(dir: &Path, network: &str, inst: &ClusterInstance) -> Result<Manifest> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut files = Vec::with_capacity(inst.entities.len());
    for (i, e) in inst.entities.iter().enumerate() {
        let name = entity_file(i);
        fs::write(dir.join(&name), write_dag(&e.dag))?;
        files.push(name);
    }
    let manifest = Manifest {
        network: network.to_string(),
        nodes: inst.node_count(),
        params: inst.params.clone(),
        seed: inst.seed,
        attempt: inst.attempt,
        partition: inst.truth_partition.blocks().to_vec(),
        dominant: inst.entities.iter().map(|e| e.dominant).collect(),
        entities: files,
    };
    fs::write(dir.join(MANIFEST), serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

pub fn read_bundle(dir: &Path) -> Result<(Manifest, ClusterInstance)> {
    let path = dir.join(MANIFEST);
    let manifest: Manifest = serde_json::from_str(
        &fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?,
    )
    .with_context(|| format!("parsing {}", path.display()))?;
    let m = manifest.entities.len();
    let partition = ClusterResult::new(m, manifest.partition.clone())?;
    if manifest.dominant.len() != m {
        bail!("manifest lists {} dominance flags for {m} entities", manifest.dominant.len());
    }
    let labels = partition.labels();
    let mut entities = Vec::with_capacity(m);
    for (i, file) in manifest.entities.iter().enumerate() {
        let p = dir.join(file);
        let dag: Dag = parse_dag(&fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?)
            .with_context(|| format!("parsing {}", p.display()))?;
        if dag.n_observed() != manifest.nodes {
            bail!("{} has {} nodes, manifest says {}", p.display(), dag.n_observed(), manifest.nodes);
        }
        entities.push(EntityTruth {
            mag: dag_to_mag(&dag),
            dag,
            cluster: labels[i],
            dominant: manifest.dominant[i],
        });
    }
    let inst = ClusterInstance {
        entities,
        truth_partition: partition,
        params: manifest.params.clone(),
        seed: manifest.seed,
        attempt: manifest.attempt,
    };
    Ok((manifest, inst))
}
