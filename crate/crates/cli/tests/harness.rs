use cocausal::harness::{
    read_csv, run_experiment, sample_size_sweep, write_csv, write_json, Algo, BaseNetwork, ExperimentConfig,
    ExperimentRecord, HarnessError,
};
use cocausal::networks::Network;
use cocausal_core::InstanceParams;

fn quick(algos: Vec<Algo>, runs: usize) -> ExperimentConfig {
    ExperimentConfig {
        algos,
        runs,
        ..ExperimentConfig::table_alpha_beta(BaseNetwork::Fixed(Network::Earthquake))
    }
}

#[test]
fn csv_round_trip() {
    let records = run_experiment(&quick(vec![Algo::AbBounded, Algo::FciBaseline, Algo::Greedy], 3)).unwrap();
    let rows: Vec<_> = records.iter().map(|r| r.summary.clone()).collect();
    let mut buf = Vec::new();
    write_csv(&mut buf, &rows).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "network,algo,alpha,beta,gamma,sample_size,precision_mean,precision_std,recall_mean,recall_std,\
         accuracy_mean,accuracy_std,max_interventions,runs,seed"
    );
    assert_eq!(read_csv(buf.as_slice()).unwrap(), rows);
}

#[test]
fn json_round_trip() {
    let records = run_experiment(&quick(vec![Algo::AbBounded], 2)).unwrap();
    let mut buf = Vec::new();
    write_json(&mut buf, &records).unwrap();
    let back: Vec<ExperimentRecord> = serde_json::from_slice(&buf).unwrap();
    assert_eq!(back, records);
}

#[test]
fn single_run_has_no_spread() {
    let records = run_experiment(&quick(vec![Algo::AbBounded], 1)).unwrap();
    let s = &records[0].summary;
    assert_eq!((s.precision_std, s.recall_std, s.accuracy_std), (None, None, None));
    let mut buf = Vec::new();
    write_csv(&mut buf, std::slice::from_ref(s)).unwrap();
    let row = String::from_utf8(buf).unwrap().lines().nth(1).unwrap().to_string();
    let cells: Vec<&str> = row.split(',').collect();
    assert_eq!((cells[7], cells[9], cells[11]), ("", "", ""));

    let two = run_experiment(&quick(vec![Algo::AbBounded], 2)).unwrap();
    assert!(two[0].summary.accuracy_std.is_some());
}

#[test]
fn summary_maxima_come_from_the_runs() {
    let records = run_experiment(&quick(vec![Algo::AbBounded, Algo::FciBaseline], 4)).unwrap();
    for r in &records {
        let max = r.per_run.iter().map(|o| o.max_interventions).max().unwrap();
        assert_eq!(r.summary.max_interventions, max);
        assert_eq!(r.per_run.iter().map(|o| o.seed).collect::<Vec<_>>(), [0, 1, 2, 3]);
    }
    assert_eq!(records[1].summary.max_interventions, 0);
}

#[test]
fn generation_failures_carry_the_seed() {
    let cfg = ExperimentConfig {
        instance: InstanceParams::alpha_beta(7, 2, 0.6, 0.2, 0.9),
        ..quick(vec![Algo::AbBounded], 1)
    };
    assert!(matches!(run_experiment(&cfg), Err(HarnessError::Generation { seed: 0, .. })));
    let cfg = ExperimentConfig { runs: 0, ..quick(vec![Algo::AbBounded], 1) };
    assert!(matches!(run_experiment(&cfg), Err(HarnessError::Config(_))));
}

#[test]
fn sweep_is_monotone_and_bounded() {
    let cfg = ExperimentConfig::table_alpha_beta(BaseNetwork::Fixed(Network::Earthquake));
    let table = sample_size_sweep(&cfg, &[0, 1, 2, 3]).unwrap();
    assert!(table.monotone);
    assert_eq!(table.rows[0].mean_max_interventions, 0.0);
    // |S| = 1 costs about three interventions on this network
    let one = table.rows[1].mean_max_interventions;
    assert!((2.0..=4.0).contains(&one), "{one}");

    // per run, the clustering ledger never exceeds (Δ + 1)|S|
    for size in 1..=3 {
        let c = ExperimentConfig {
            algos: vec![Algo::AbBounded],
            sample_size: Some(size),
            recover: false,
            ..cfg.clone()
        };
        for seed in 0..c.runs as u64 {
            let inst = cocausal::harness::generate_instance(&c, seed).unwrap();
            let run = &run_experiment(&ExperimentConfig { seed, runs: 1, ..c.clone() }).unwrap()[0].per_run[0];
            assert!(run.max_interventions <= (inst.max_degree() + 1) * size);
        }
    }
}

#[test]
fn baseline_accuracy_is_near_the_published_value() {
    let records = run_experiment(&ExperimentConfig {
        algos: vec![Algo::FciBaseline],
        ..ExperimentConfig::table_alpha_beta(BaseNetwork::DEFAULT_ER)
    })
    .unwrap();
    let acc = records[0].summary.accuracy_mean;
    assert!((acc - 0.62).abs() <= 0.2, "{acc}");
}

#[test]
#[ignore = "with noiseless skeleton PAGs the lowest-degree nodes separate the clusters well"]
fn greedy_trails_random_sampling_on_earthquake() {
    let records = run_experiment(&ExperimentConfig {
        algos: vec![Algo::Greedy, Algo::AbBounded],
        recover: false,
        ..ExperimentConfig::table_alpha_beta(BaseNetwork::Fixed(Network::Earthquake))
    })
    .unwrap();
    let (greedy, ours) = (records[0].summary.accuracy_mean, records[1].summary.accuracy_mean);
    assert!((greedy - 0.487).abs() <= 0.15, "greedy {greedy}");
    assert!(ours > greedy, "ours {ours}, greedy {greedy}");
}
