//! Experiment orchestration: instance generation, algorithm runs, metric
//! aggregation and CSV/JSON persistence.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;
use std::time::Instant;

use cocausal_core::{
    baseline_pag_cluster, build_instance, cluster_alpha_beta, cluster_alpha_bounded, cluster_alpha_general,
    cluster_no_latents, gen_erdos_renyi, greedy_sample_selection, meta_recover, pair_metrics, recover_dominant_mags,
    skeleton_pag, AlgoParams, ClusterInstance, ClusterResult, Dag, DiscoveryError, EntityId, EntityOracle,
    GenerationError, InstanceParams, Pag, RecoveryReport, UniverseMismatch,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::networks::Network;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("run with seed {seed}: {source}")]
    Generation { seed: u64, source: GenerationError },
    #[error("run with seed {seed}: {source}")]
    Discovery { seed: u64, source: DiscoveryError },
    #[error(transparent)]
    Metrics(#[from] UniverseMismatch),
    #[error("invalid experiment configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    AbBounded,
    ABounded,
    NoLatents,
    AGeneral,
    FciBaseline,
    Greedy,
}

impl Algo {
    pub const ALL: [Algo; 6] = [
        Algo::AbBounded,
        Algo::ABounded,
        Algo::NoLatents,
        Algo::AGeneral,
        Algo::FciBaseline,
        Algo::Greedy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algo::AbBounded => "ab-bounded",
            Algo::ABounded => "a-bounded",
            Algo::NoLatents => "no-latents",
            Algo::AGeneral => "a-general",
            Algo::FciBaseline => "fci-baseline",
            Algo::Greedy => "greedy",
        }
    }

    /// Whether the algorithm draws a sample and issues interventions.
    pub fn intervenes(self) -> bool {
        self != Algo::FciBaseline
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Algo::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

/// Base causal network of an experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseNetwork {
    /// A fresh Erdős–Rényi DAG per run.
    Er { nodes: usize, p: f64 },
    Fixed(Network),
}

impl BaseNetwork {
    pub const DEFAULT_ER: BaseNetwork = BaseNetwork::Er { nodes: 10, p: 0.3 };

    pub fn name(&self) -> &'static str {
        match self {
            BaseNetwork::Er { .. } => "er",
            BaseNetwork::Fixed(n) => n.name(),
        }
    }

    pub fn dag(&self, seed: u64) -> Result<Dag, GenerationError> {
        match *self {
            BaseNetwork::Er { nodes, p } => gen_erdos_renyi(nodes, p, seed),
            BaseNetwork::Fixed(n) => Ok(n.dag()),
        }
    }
}

impl FromStr for BaseNetwork {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "er" {
            Ok(BaseNetwork::DEFAULT_ER)
        } else {
            s.parse().map(BaseNetwork::Fixed)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub network: BaseNetwork,
    pub instance: InstanceParams,
    pub algos: Vec<Algo>,
    pub delta: f64,
    /// `None` uses the theory-sized sample of each algorithm.
    pub sample_size: Option<usize>,
    pub runs: usize,
    /// Run `r` uses seed `seed + r` for both generation and the algorithm.
    pub seed: u64,
    /// Also run MAG recovery on the predicted clusters.
    pub recover: bool,
    /// Probability of flipping each CI answer.
    pub noise: f64,
}

impl ExperimentConfig {
    /// The (α, β) experiment: M = 40, k = 2, α = 0.6, β = 0.2, γ = 0.9, |S| = 1.
    pub fn table_alpha_beta(network: BaseNetwork) -> Self {
        ExperimentConfig {
            network,
            instance: InstanceParams::alpha_beta(40, 2, 0.6, 0.2, 0.9),
            algos: vec![Algo::AbBounded, Algo::FciBaseline],
            delta: 0.05,
            sample_size: Some(1),
            runs: 10,
            seed: 0,
            recover: true,
            noise: 0.0,
        }
    }

    /// The α experiment with Markov-equivalent clusters: M = 40, k = 2, α = 0.6, |S| = 1.
    pub fn table_alpha(network: BaseNetwork) -> Self {
        ExperimentConfig {
            instance: InstanceParams::alpha_only(40, 2, 0.6),
            algos: vec![Algo::ABounded, Algo::FciBaseline],
            ..ExperimentConfig::table_alpha_beta(network)
        }
    }

    fn check(&self) -> Result<(), HarnessError> {
        if self.runs == 0 {
            return Err(HarnessError::Config("runs must be at least 1".into()));
        }
        if self.algos.is_empty() {
            return Err(HarnessError::Config("no algorithm selected".into()));
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(HarnessError::Config("noise must lie in [0, 1]".into()));
        }
        Ok(())
    }

    fn algo_params(&self, seed: u64) -> AlgoParams {
        let p = AlgoParams::new(self.instance.alpha, self.instance.beta, self.delta, seed);
        match self.sample_size {
            Some(s) => p.with_sample_size(s),
            None => p,
        }
    }
}

/// Outcome of one algorithm on one generated instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub seed: u64,
    pub attempt: usize,
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
    pub sample_size: usize,
    /// Maximum ledger count over entities after the run.
    pub max_interventions: usize,
    pub ci_tests: u64,
    pub clusters: usize,
    /// Entities whose recovered MAG equals the truth (recovery runs only).
    pub exact_recoveries: Option<usize>,
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub network: String,
    pub algo: Algo,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub sample_size: usize,
    pub precision_mean: f64,
    pub precision_std: Option<f64>,
    pub recall_mean: f64,
    pub recall_std: Option<f64>,
    pub accuracy_mean: f64,
    pub accuracy_std: Option<f64>,
    pub max_interventions: usize,
    pub runs: usize,
    pub seed: u64,
}

/// Full result of one algorithm over all runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub summary: ExperimentSummary,
    pub instance: InstanceParams,
    pub delta: f64,
    pub per_run: Vec<RunOutcome>,
    pub wall_time_ms: u128,
}

impl ExperimentRecord {
    /// Mean over runs of the per-run maximum ledger count.
    pub fn mean_max_interventions(&self) -> f64 {
        mean(&self.per_run.iter().map(|r| r.max_interventions as f64).collect::<Vec<_>>())
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation; absent below two values.
fn std_dev(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let mu = mean(xs);
    Some((xs.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (xs.len() - 1) as f64).sqrt())
}

/// Generates the instance of one run.
pub fn generate_instance(config: &ExperimentConfig, seed: u64) -> Result<ClusterInstance, HarnessError> {
    let base = config.network.dag(seed).map_err(|source| HarnessError::Generation { seed, source })?;
    build_instance(&base, &config.instance, seed).map_err(|source| HarnessError::Generation { seed, source })
}

pub fn oracles_for(inst: &ClusterInstance, noise: f64, seed: u64) -> Vec<EntityOracle> {
    inst.entities
        .iter()
        .enumerate()
        .map(|(i, e)| EntityOracle::new(EntityId::from(i), e.dag.clone()).with_noise(noise, seed))
        .collect()
}

pub fn pags_for(inst: &ClusterInstance) -> Vec<Pag> {
    inst.mags().map(skeleton_pag).collect()
}

/// Partition and report of `algo` on fresh oracles.
pub fn run_algo(
    algo: Algo,
    oracles: &mut [EntityOracle],
    pags: &[Pag],
    params: &AlgoParams,
    clusters_hint: usize,
    recover: bool,
) -> Result<(ClusterResult, RecoveryReport), DiscoveryError> {
    let ab = params.beta > 0.0;
    let (clusters, mut report) = match algo {
        Algo::AbBounded => cluster_alpha_beta(oracles, pags, params)?,
        Algo::ABounded => cluster_alpha_bounded(oracles, pags, params)?,
        Algo::NoLatents => cluster_no_latents(oracles, pags, params)?,
        Algo::AGeneral => cluster_alpha_general(oracles, pags, params)?,
        Algo::Greedy => {
            let budget = params.sample_size_override.unwrap_or(1);
            let fixed = params.clone().with_fixed_sample(greedy_sample_selection(pags, budget));
            if ab {
                cluster_alpha_beta(oracles, pags, &fixed)?
            } else {
                cluster_alpha_bounded(oracles, pags, &fixed)?
            }
        }
        Algo::FciBaseline => {
            let b = baseline_pag_cluster(pags, clusters_hint.min(pags.len()))?;
            let report = RecoveryReport {
                interventions: oracles.iter().map(EntityOracle::intervention_count).collect(),
                ..RecoveryReport::default()
            };
            return Ok((b.clusters, report));
        }
    };
    if recover {
        let rec = if ab || algo == Algo::AbBounded {
            recover_dominant_mags(oracles, pags, &clusters, params)?
        } else {
            meta_recover(oracles, pags, &clusters)?
        };
        report.recovered = rec.recovered;
        report.fallback_nodes = rec.fallback_nodes;
        report.interventions = rec.interventions;
        report.ci_tests += rec.ci_tests;
    }
    Ok((clusters, report))
}

fn run_once(config: &ExperimentConfig, seed: u64) -> Result<Vec<RunOutcome>, HarnessError> {
    let inst = generate_instance(config, seed)?;
    let pags = pags_for(&inst);
    let params = config.algo_params(seed ^ 0x5eed_a1c0_0000_0000);
    config
        .algos
        .iter()
        .map(|&algo| {
            let mut oracles = oracles_for(&inst, config.noise, seed);
            let (clusters, report) = run_algo(algo, &mut oracles, &pags, &params, inst.params.clusters, config.recover)
                .map_err(|source| HarnessError::Discovery { seed, source })?;
            let m = pair_metrics(&clusters, &inst.truth_partition)?;
            let exact_recoveries = (!report.recovered.is_empty())
                .then(|| inst.mags().zip(&report.recovered).filter(|(t, r)| t == r).count());
            Ok(RunOutcome {
                seed,
                attempt: inst.attempt,
                precision: m.precision,
                recall: m.recall,
                accuracy: m.accuracy,
                sample_size: report.sample.len(),
                max_interventions: report.max_interventions(),
                ci_tests: report.ci_tests,
                clusters: clusters.len(),
                exact_recoveries,
            })
        })
        .collect()
}

/// Runs every selected algorithm on `config.runs` generated instances.
///
/// Runs execute in parallel; results are ordered by seed and identical for
/// a given configuration.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>, HarnessError> {
    config.check()?;
    let start = Instant::now();
    let per_seed: Vec<Vec<RunOutcome>> = (0..config.runs as u64)
        .into_par_iter()
        .map(|r| run_once(config, config.seed + r))
        .collect::<Result<_, _>>()?;
    let wall_time_ms = start.elapsed().as_millis();
    Ok(config
        .algos
        .iter()
        .enumerate()
        .map(|(a, &algo)| {
            let per_run: Vec<RunOutcome> = per_seed.iter().map(|runs| runs[a].clone()).collect();
            let col = |f: fn(&RunOutcome) -> f64| per_run.iter().map(f).collect::<Vec<_>>();
            let (p, r, acc) = (col(|o| o.precision), col(|o| o.recall), col(|o| o.accuracy));
            ExperimentRecord {
                summary: ExperimentSummary {
                    network: config.network.name().to_string(),
                    algo,
                    alpha: config.instance.alpha,
                    beta: config.instance.beta,
                    gamma: config.instance.gamma,
                    sample_size: per_run.iter().map(|o| o.sample_size).max().unwrap_or(0),
                    precision_mean: mean(&p),
                    precision_std: std_dev(&p),
                    recall_mean: mean(&r),
                    recall_std: std_dev(&r),
                    accuracy_mean: mean(&acc),
                    accuracy_std: std_dev(&acc),
                    max_interventions: per_run.iter().map(|o| o.max_interventions).max().unwrap_or(0),
                    runs: config.runs,
                    seed: config.seed,
                },
                instance: config.instance.clone(),
                delta: config.delta,
                per_run,
                wall_time_ms,
            }
        })
        .collect())
}

pub fn write_csv<W: Write>(out: W, rows: &[ExperimentSummary]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ExperimentSummary>, HarnessError> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(HarnessError::from)
}

pub fn write_json<W: Write>(out: W, records: &[ExperimentRecord]) -> Result<(), HarnessError> {
    serde_json::to_writer_pretty(out, records)?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sample_size: usize,
    pub mean_max_interventions: f64,
    pub max_interventions: usize,
    pub runs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub network: String,
    pub algo: Algo,
    pub rows: Vec<SweepRow>,
    /// Mean maximum interventions never decreases with `|S|`.
    pub monotone: bool,
}

/// Clustering-phase interventions for each `|S|` in `sizes`, same instances
/// and seeds throughout. Only the first algorithm of `config` is used.
pub fn sample_size_sweep(config: &ExperimentConfig, sizes: &[usize]) -> Result<SweepTable, HarnessError> {
    let algo = *config
        .algos
        .first()
        .ok_or_else(|| HarnessError::Config("no algorithm selected".into()))?;
    let mut rows = Vec::with_capacity(sizes.len());
    for &s in sizes {
        let c = ExperimentConfig {
            algos: vec![algo],
            sample_size: Some(s),
            recover: false,
            ..config.clone()
        };
        let rec = run_experiment(&c)?.remove(0);
        rows.push(SweepRow {
            sample_size: s,
            mean_max_interventions: rec.mean_max_interventions(),
            max_interventions: rec.summary.max_interventions,
            runs: c.runs,
        });
    }
    let monotone = rows.windows(2).all(|w| w[0].mean_max_interventions <= w[1].mean_max_interventions);
    Ok(SweepTable {
        network: config.network.name().to_string(),
        algo,
        rows,
        monotone,
    })
}

pub fn write_sweep_csv<W: Write>(out: W, table: &SweepTable) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["network", "algo", "sample_size", "mean_max_interventions", "max_interventions", "runs"])?;
    for r in &table.rows {
        w.write_record([
            table.network.clone(),
            table.algo.to_string(),
            r.sample_size.to_string(),
            r.mean_max_interventions.to_string(),
            r.max_interventions.to_string(),
            r.runs.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
