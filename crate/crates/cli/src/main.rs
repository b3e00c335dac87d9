use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cocausal::bundle::{read_bundle, write_bundle};
use cocausal::format::write_mag;
use cocausal::harness::{
    self, generate_instance, oracles_for, pags_for, run_experiment, sample_size_sweep, write_csv, write_json,
    write_sweep_csv, Algo, BaseNetwork, ExperimentConfig, HarnessError,
};
use cocausal::networks::Network;
use cocausal_core::{
    meta_recover, node_distance, pair_metrics, recover_dominant_mags, AlgoParams, ClusterResult, GenerationError,
    InstanceParams, RecoveryReport,
};
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(name = "cocausal", version, about = "Collaborative causal discovery with atomic interventions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance bundle.
    Generate {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Bundle directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Cluster the entities of a bundle.
    Cluster {
        bundle: PathBuf,
        #[command(flatten)]
        algo: AlgoArgs,
        /// Partition and report (JSON).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover every entity's MAG given a partition.
    Recover {
        bundle: PathBuf,
        /// Output of `cluster`; the true partition is used when absent.
        #[arg(long)]
        partition: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Method::Dominant)]
        method: Method,
        #[command(flatten)]
        algo: AlgoArgs,
        /// Directory for the recovered graphs and report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run repeated experiments and emit a metrics CSV.
    Evaluate {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// CSV path; a JSON record is written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean maximum interventions for a range of sample sizes.
    Sweep {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Comma-separated sample sizes.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        sizes: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum NetworkArg {
    Asia,
    Earthquake,
    Sachs,
    Survey,
    Er,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgoArg {
    AbBounded,
    ABounded,
    NoLatents,
    AGeneral,
    FciBaseline,
    Greedy,
}

impl From<AlgoArg> for Algo {
    fn from(a: AlgoArg) -> Algo {
        match a {
            AlgoArg::AbBounded => Algo::AbBounded,
            AlgoArg::ABounded => Algo::ABounded,
            AlgoArg::NoLatents => Algo::NoLatents,
            AlgoArg::AGeneral => Algo::AGeneral,
            AlgoArg::FciBaseline => Algo::FciBaseline,
            AlgoArg::Greedy => Algo::Greedy,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    /// Dominant-MAG recovery for (α, β) clusters.
    Dominant,
    /// One node per member, for clusters sharing a single MAG.
    Meta,
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long, value_enum, default_value = "er")]
    network: NetworkArg,
    #[arg(long, default_value_t = 10)]
    er_nodes: usize,
    #[arg(long, default_value_t = 0.3)]
    er_p: f64,
    #[arg(long, default_value_t = 40)]
    entities: usize,
    #[arg(long, default_value_t = 2)]
    clusters: usize,
    #[arg(long, default_value_t = 0.6)]
    alpha: f64,
    #[arg(long, default_value_t = 0.2)]
    beta: f64,
    #[arg(long, default_value_t = 0.9)]
    gamma: f64,
    #[arg(long, default_value_t = 2)]
    latents: usize,
    /// Dominant graphs of different clusters are Markov equivalent.
    #[arg(long)]
    markov_equiv: bool,
}

impl InstanceArgs {
    fn network(&self) -> BaseNetwork {
        match self.network {
            NetworkArg::Asia => BaseNetwork::Fixed(Network::Asia),
            NetworkArg::Earthquake => BaseNetwork::Fixed(Network::Earthquake),
            NetworkArg::Sachs => BaseNetwork::Fixed(Network::Sachs),
            NetworkArg::Survey => BaseNetwork::Fixed(Network::Survey),
            NetworkArg::Er => BaseNetwork::Er {
                nodes: self.er_nodes,
                p: self.er_p,
            },
        }
    }

    fn params(&self) -> InstanceParams {
        InstanceParams {
            latents_per_dag: self.latents,
            markov_equiv: self.markov_equiv,
            ..InstanceParams::alpha_beta(self.entities, self.clusters, self.alpha, self.beta, self.gamma)
        }
    }
}

#[derive(Args)]
struct AlgoArgs {
    #[arg(long, value_enum, default_value = "ab-bounded")]
    algo: AlgoArg,
    /// Defaults to the bundle's value.
    #[arg(long)]
    alpha: Option<f64>,
    /// Defaults to the bundle's value.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Overrides the theory-sized sample.
    #[arg(long)]
    sample_size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl AlgoArgs {
    fn params(&self, inst: &InstanceParams) -> AlgoParams {
        let p = AlgoParams::new(
            self.alpha.unwrap_or(inst.alpha),
            self.beta.unwrap_or(inst.beta),
            self.delta,
            self.seed,
        );
        match self.sample_size {
            Some(s) => p.with_sample_size(s),
            None => p,
        }
    }
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// Repeat to compare several algorithms on the same instances.
    #[arg(long, value_enum, default_values = ["ab-bounded", "fci-baseline"])]
    algo: Vec<AlgoArg>,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Overrides the theory-sized sample.
    #[arg(long)]
    sample_size: Option<usize>,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip MAG recovery after clustering.
    #[arg(long)]
    no_recover: bool,
    /// Probability of flipping each CI answer.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
}

impl ExperimentArgs {
    fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            network: self.inst.network(),
            instance: self.inst.params(),
            algos: self.algo.iter().map(|&a| a.into()).collect(),
            delta: self.delta,
            sample_size: self.sample_size,
            runs: self.runs,
            seed: self.seed,
            recover: !self.no_recover,
            noise: self.noise,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ClusterOutput {
    algo: Algo,
    partition: ClusterResult,
    report: RecoveryReport,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { inst, seed, out } => {
            let config = ExperimentConfig {
                network: inst.network(),
                instance: inst.params(),
                ..ExperimentConfig::table_alpha_beta(inst.network())
            };
            let instance = generate_instance(&config, seed)?;
            let m = write_bundle(&out, config.network.name(), &instance)?;
            println!(
                "wrote {} entities ({} nodes, attempt {}) to {}",
                m.entities.len(),
                m.nodes,
                m.attempt,
                out.display()
            );
        }
        Command::Cluster { bundle, algo, out } => {
            let (_, inst) = read_bundle(&bundle)?;
            let params = algo.params(&inst.params);
            let mut oracles = oracles_for(&inst, 0.0, params.rng_seed);
            let pags = pags_for(&inst);
            let (partition, report) =
                harness::run_algo(algo.algo.into(), &mut oracles, &pags, &params, inst.params.clusters, false)?;
            let m = pair_metrics(&partition, &inst.truth_partition)?;
            println!(
                "{} clusters, |S| = {}, max interventions {}, precision {:.3} recall {:.3} accuracy {:.3}",
                partition.len(),
                report.sample.len(),
                report.max_interventions(),
                m.precision,
                m.recall,
                m.accuracy
            );
            let result = ClusterOutput {
                algo: algo.algo.into(),
                partition,
                report,
            };
            if let Some(path) = out {
                serde_json::to_writer_pretty(output(Some(&path))?, &result)?;
            }
        }
        Command::Recover {
            bundle,
            partition,
            method,
            algo,
            out,
        } => {
            let (_, inst) = read_bundle(&bundle)?;
            let clusters = match &partition {
                Some(p) => {
                    let c: ClusterOutput = serde_json::from_reader(File::open(p)?)
                        .with_context(|| format!("reading partition {}", p.display()))?;
                    c.partition
                }
                None => inst.truth_partition.clone(),
            };
            let params = algo.params(&inst.params);
            let mut oracles = oracles_for(&inst, 0.0, params.rng_seed);
            let pags = pags_for(&inst);
            let report = match method {
                Method::Dominant => recover_dominant_mags(&mut oracles, &pags, &clusters, &params)?,
                Method::Meta => meta_recover(&mut oracles, &pags, &clusters)?,
            };
            let mut exact = 0;
            let mut worst = 0;
            for (truth, rec) in inst.mags().zip(&report.recovered) {
                let d = node_distance(truth, rec)?;
                exact += usize::from(d == 0);
                worst = worst.max(d);
            }
            println!(
                "recovered {exact}/{} exactly, worst distance {worst}, max interventions {}",
                report.recovered.len(),
                report.max_interventions()
            );
            if let Some(dir) = out {
                fs::create_dir_all(&dir)?;
                for (i, g) in report.recovered.iter().enumerate() {
                    fs::write(dir.join(format!("recovered_{i:04}.txt")), write_mag(g))?;
                }
                serde_json::to_writer_pretty(File::create(dir.join("report.json"))?, &report)?;
            }
        }
        Command::Evaluate { exp, out } => {
            let records = run_experiment(&exp.config())?;
            let rows: Vec<_> = records.iter().map(|r| r.summary.clone()).collect();
            write_csv(output(out.as_deref())?, &rows)?;
            if let Some(path) = out {
                write_json(File::create(path.with_extension("json"))?, &records)?;
            }
        }
        Command::Sweep { exp, sizes, out } => {
            if sizes.is_empty() {
                bail!("no sample sizes given");
            }
            let table = sample_size_sweep(&exp.config(), &sizes)?;
            write_sweep_csv(output(out.as_deref())?, &table)?;
            if !table.monotone {
                eprintln!("warning: interventions decrease somewhere along the sweep");
            }
        }
    }
    Ok(())
}

fn is_generation_failure(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<GenerationError>().is_some()
            || matches!(c.downcast_ref::<HarnessError>(), Some(HarnessError::Generation { .. }))
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_generation_failure(&e) {
                ExitCode::from(3)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
