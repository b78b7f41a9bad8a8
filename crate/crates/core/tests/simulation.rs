use macrates::mac::{ChannelState, InstantaneousRegion, ThroughputRegion};
use macrates::policies::greedy_allocate;
use macrates::sim::{bundled, policy_name, run_limited_duration, run_scenario, ModelConfig, ScenarioKind, GREEDY};
use macrates::{RankOracle, SolverOptions, UserSet};

// power iteration, independent of the library's linear solve
fn stationary(p: &[Vec<f64>]) -> Vec<f64> {
    let n = p.len();
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..10_000 {
        let mut next = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                next[j] += pi[i] * p[i][j];
            }
        }
        pi = next;
    }
    pi
}

#[test]
fn greedy_time_average_approaches_stationary_expectation() {
    let mut cfg = ModelConfig::parse(bundled::FILE_UPLOAD).unwrap();
    cfg.controller_gains.clear();
    cfg.slots = 100_000;
    cfg.replications = 4;
    let chain = &cfg.chains[0];
    let pi = stationary(chain.transition());
    let mut expected = [0.0; 2];
    for (s, &g) in chain.states().iter().enumerate() {
        let region = InstantaneousRegion::new(&cfg.mac, &ChannelState::new(vec![g, g]).unwrap()).unwrap();
        let r = greedy_allocate(&region, &cfg.utility, &SolverOptions::default()).unwrap();
        for i in 0..2 {
            expected[i] += pi[s] * r[i];
        }
    }
    let report = run_limited_duration(&cfg, 11).unwrap();
    for run in report.runs_for(GREEDY) {
        let avg = run.avg_rate_at(cfg.slots);
        for i in 0..2 {
            assert!((avg[i] - expected[i]).abs() < 0.01, "user {i}: {} vs {}", avg[i], expected[i]);
        }
    }
}

#[test]
fn queue_based_served_rates_stay_in_throughput_region() {
    let mut cfg = ModelConfig::parse(bundled::STABILITY_PROBE).unwrap();
    cfg.slots = 50_000;
    cfg.replications = 2;
    let region = ThroughputRegion::new(&cfg.mac, &cfg.chains).unwrap();
    let report = run_limited_duration(&cfg, 12).unwrap();
    for &k in &cfg.controller_gains {
        for run in report.runs_for(&policy_name(k)) {
            let avg = run.avg_rate_at(cfg.slots);
            for s in (1..4).map(UserSet::from_bits) {
                let load: f64 = s.iter().map(|i| avg[i]).sum();
                // sampling slack for a finite fading path
                assert!(load <= 1.01 * region.rank(s), "K={k} {s:?}: {load} > {}", region.rank(s));
            }
        }
    }
}

#[test]
fn stability_probe_csv_has_one_row_per_case_and_rep() {
    let mut cfg = ModelConfig::parse(bundled::STABILITY_PROBE).unwrap();
    cfg.slots = 100_000;
    cfg.replications = 3;
    let report = run_scenario(ScenarioKind::StabilityProbe, &cfg, 13).unwrap();
    let mut buf = Vec::new();
    report.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 9);
    for case in ["inside", "outside", "zero"] {
        let verdicts: Vec<&str> = rows
            .iter()
            .filter(|r| r.starts_with(&format!("{case},")))
            .map(|r| r.split(',').nth(2).unwrap())
            .collect();
        assert_eq!(verdicts.len(), 3, "{case}");
        let want = if case == "outside" { "unstable" } else { "stable" };
        assert!(verdicts.iter().all(|v| *v == want), "{case}: {verdicts:?}");
    }
}

#[test]
fn path_signatures_fix_information_flow() {
    use macrates::sim::paths::{simulate_greedy_path, simulate_queue_path, FadingPath, GreedyAllocator};
    use macrates::{CongestionController, MacConfig, Result, RunTrace};
    use rand_chacha::ChaCha8Rng;
    // greedy: fading path only; queue-based: fading path, controller and its own rng
    let _greedy: fn(&FadingPath, &mut GreedyAllocator) -> Result<Vec<f64>> = simulate_greedy_path;
    let _queue: fn(&MacConfig, &FadingPath, &CongestionController, &mut ChaCha8Rng) -> Result<RunTrace> =
        simulate_queue_path::<ChaCha8Rng>;
}
