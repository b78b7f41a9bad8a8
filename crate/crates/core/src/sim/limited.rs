//! Fixed-horizon comparison of time-average rates against the offline optimum.

use std::io::Write;

use crate::error::{domain, Result};
use crate::mac::RateVector;
use crate::policies::{offline_optimum, ArrivalMode, CongestionController};
use crate::polymatroid::SolverOptions;
use crate::sim::config::ModelConfig;
use crate::sim::metrics::RunningAverage;
use crate::sim::paths::{simulate_greedy_path, simulate_queue_path, FadingPath, GreedyAllocator};
use crate::sim::rng::{run_replications, substream, Stream};
use crate::sim::{io_error, policy_name, GREEDY};

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyRun {
    pub policy: String,
    pub rep: usize,
    /// Running average rate after each slot, flattened slot-major.
    pub avg_rates: Vec<f64>,
    pub distance: Vec<f64>,
    /// Time-average total backlog; `None` for the greedy path.
    pub mean_queue: Option<f64>,
}

impl PolicyRun {
    fn from_rates<'a>(
        policy: String,
        rep: usize,
        num_users: usize,
        rates: impl Iterator<Item = &'a [f64]>,
        optimum: &RateVector,
        mean_queue: Option<f64>,
    ) -> Result<Self> {
        let mut acc = RunningAverage::new(num_users);
        let mut avg_rates = Vec::new();
        let mut distance = Vec::new();
        for r in rates {
            acc.push(r)?;
            avg_rates.extend(acc.mean());
            distance.push(acc.distance_to(optimum.as_slice()));
        }
        Ok(Self { policy, rep, avg_rates, distance, mean_queue })
    }

    pub fn slots(&self) -> usize {
        self.distance.len()
    }

    /// Distance after slot `t` (1-based).
    pub fn distance_at(&self, t: usize) -> f64 {
        self.distance[t - 1]
    }

    pub fn avg_rate_at(&self, t: usize) -> &[f64] {
        let m = self.avg_rates.len() / self.distance.len();
        &self.avg_rates[(t - 1) * m..t * m]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitedDurationReport {
    pub num_users: usize,
    pub optimum: RateVector,
    pub policies: Vec<String>,
    /// Ordered by replication, then policy.
    pub runs: Vec<PolicyRun>,
}

impl LimitedDurationReport {
    pub fn runs_for<'a>(&'a self, policy: &'a str) -> impl Iterator<Item = &'a PolicyRun> + 'a {
        self.runs.iter().filter(move |r| r.policy == policy)
    }

    /// Replication mean of the distance after slot `t`.
    pub fn mean_distance_at(&self, policy: &str, t: usize) -> Result<f64> {
        let d: Vec<f64> = self.runs_for(policy).map(|r| r.distance_at(t)).collect();
        if d.is_empty() {
            return Err(domain(format!("no runs for policy `{policy}`")));
        }
        Ok(d.iter().sum::<f64>() / d.len() as f64)
    }

    /// Replication mean of the time-average backlog.
    pub fn mean_queue(&self, policy: &str) -> Result<f64> {
        let q: Vec<f64> = self.runs_for(policy).filter_map(|r| r.mean_queue).collect();
        if q.is_empty() {
            return Err(domain(format!("no queue statistics for policy `{policy}`")));
        }
        Ok(q.iter().sum::<f64>() / q.len() as f64)
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        let mut header = String::from("slot,policy,rep");
        for i in 1..=self.num_users {
            header.push_str(&format!(",avg_rate_{i}"));
        }
        header.push_str(",distance_to_opt\n");
        w.write_all(header.as_bytes()).map_err(io_error)?;
        let mut line = String::new();
        for run in &self.runs {
            for t in 1..=run.slots() {
                line.clear();
                line.push_str(&format!("{t},{},{}", run.policy, run.rep));
                for r in run.avg_rate_at(t) {
                    line.push_str(&format!(",{r}"));
                }
                line.push_str(&format!(",{}\n", run.distance_at(t)));
                w.write_all(line.as_bytes()).map_err(io_error)?;
            }
        }
        Ok(())
    }
}

/// Greedy and queue-based paths over common fading realizations.
pub fn run_limited_duration(cfg: &ModelConfig, seed: u64) -> Result<LimitedDurationReport> {
    let opts = SolverOptions::default();
    let optimum = offline_optimum(&cfg.mac, &cfg.chains, &cfg.utility, &opts)?;
    let m = cfg.num_users();
    let mode = if cfg.jitter { ArrivalMode::Jittered } else { ArrivalMode::Mean };
    let controllers = cfg
        .controller_gains
        .iter()
        .map(|&k| {
            CongestionController::new(k, cfg.arrival_cap, cfg.utility.alpha(), cfg.utility.weights().to_vec())
                .map(|c| c.with_mode(mode))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut policies = vec![GREEDY.to_string()];
    policies.extend(cfg.controller_gains.iter().map(|&k| policy_name(k)));

    let per_rep = run_replications(cfg.replications, |rep| {
        let path = FadingPath::generate(&cfg.chains, cfg.slots, &mut substream(seed, rep, Stream::Fading))?;
        let mut greedy = GreedyAllocator::new(cfg.mac.clone(), cfg.utility.clone(), opts);
        let rates = simulate_greedy_path(&path, &mut greedy)?;
        let mut runs = vec![PolicyRun::from_rates(
            policies[0].clone(),
            rep,
            m,
            rates.chunks(m),
            &optimum,
            None,
        )?];
        for (k, ctl) in controllers.iter().enumerate() {
            let trace = simulate_queue_path(&cfg.mac, &path, ctl, &mut substream(seed, rep, Stream::Controller(k)))?;
            runs.push(PolicyRun::from_rates(
                policies[k + 1].clone(),
                rep,
                m,
                (0..trace.len()).map(|t| trace.rates(t)),
                &optimum,
                Some(trace.mean_total_queue()),
            )?);
        }
        Ok(runs)
    })?;

    Ok(LimitedDurationReport {
        num_users: m,
        optimum,
        policies,
        runs: per_rep.into_iter().flatten().collect(),
    })
}
