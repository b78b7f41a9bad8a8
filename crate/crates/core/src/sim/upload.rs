//! Finite file upload: completion times and the utility of upload rates.

use std::io::Write;

use rand::Rng;

use crate::error::{domain, runtime, Result};
use crate::fading::FadingProcess;
use crate::mac::{InstantaneousRegion, MacConfig};
use crate::policies::{maxweight_allocate, ArrivalMode, CongestionController};
use crate::polymatroid::{SolverOptions, UserSet};
use crate::queueing::QueueVector;
use crate::sim::config::ModelConfig;
use crate::sim::paths::GreedyAllocator;
use crate::sim::rng::{run_replications, substream, Stream};
use crate::sim::{io_error, policy_name, GREEDY};
use crate::utility::Utility;

#[derive(Debug, Clone, PartialEq)]
pub struct UploadRun {
    pub file_size: f64,
    pub policy: String,
    pub rep: usize,
    /// Slot (1-based) in which each user's last nat was served.
    pub completion: Vec<u64>,
    pub upload_rate: Vec<f64>,
    pub utility: f64,
    /// Total amount served per user; equals the file size.
    pub served: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FileUploadReport {
    pub num_users: usize,
    pub file_sizes: Vec<f64>,
    pub policies: Vec<String>,
    /// Ordered by file size, replication, then policy.
    pub runs: Vec<UploadRun>,
}

impl FileUploadReport {
    /// Replication mean of the achieved utility.
    pub fn mean_utility(&self, file_size: f64, policy: &str) -> Result<f64> {
        let u: Vec<f64> = self
            .runs
            .iter()
            .filter(|r| r.file_size == file_size && r.policy == policy)
            .map(|r| r.utility)
            .collect();
        if u.is_empty() {
            return Err(domain(format!("no runs for file size {file_size} and policy `{policy}`")));
        }
        Ok(u.iter().sum::<f64>() / u.len() as f64)
    }

    /// `mean u(greedy) - mean u(policy)` at each file size.
    pub fn utility_gap(&self, policy: &str) -> Result<Vec<f64>> {
        self.file_sizes
            .iter()
            .map(|&f| Ok(self.mean_utility(f, GREEDY)? - self.mean_utility(f, policy)?))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        let m = self.num_users;
        let mut header = String::from("file_size,policy,rep");
        for i in 1..=m {
            header.push_str(&format!(",completion_{i}"));
        }
        for i in 1..=m {
            header.push_str(&format!(",upload_rate_{i}"));
        }
        header.push_str(",utility\n");
        w.write_all(header.as_bytes()).map_err(io_error)?;
        for r in &self.runs {
            let mut line = format!("{},{},{}", r.file_size, r.policy, r.rep);
            for c in &r.completion {
                line.push_str(&format!(",{c}"));
            }
            for u in &r.upload_rate {
                line.push_str(&format!(",{u}"));
            }
            line.push_str(&format!(",{}\n", r.utility));
            w.write_all(line.as_bytes()).map_err(io_error)?;
        }
        Ok(())
    }
}

/// Greedy upload: each slot the active users split the instantaneous region
/// by the greedy rule and send straight from their remaining file.
pub fn upload_greedy<R: Rng + ?Sized>(
    greedy: &mut GreedyAllocator,
    fading: &mut FadingProcess,
    file_sizes: &[f64],
    slot_cap: u64,
    rng: &mut R,
) -> Result<(Vec<u64>, Vec<f64>)> {
    let m = file_sizes.len();
    let mut remaining = file_sizes.to_vec();
    let mut served_total = vec![0.0; m];
    let mut completion = vec![0u64; m];
    let mut t = 0u64;
    while remaining.iter().any(|&r| r > 0.0) {
        t += 1;
        if t > slot_cap {
            return Err(cap_error("greedy", slot_cap, &remaining, &[]));
        }
        if t > 1 {
            fading.step(rng);
        }
        let active = (0..m).filter(|&i| remaining[i] > 0.0).fold(UserSet::EMPTY, UserSet::with);
        let gains = fading.gains();
        let alloc = greedy.allocate(fading.joint_index(), gains.gains(), active)?;
        for i in active.iter() {
            let s = alloc[i].min(remaining[i]);
            served_total[i] += s;
            if alloc[i] >= remaining[i] {
                remaining[i] = 0.0;
                completion[i] = t;
            } else {
                remaining[i] -= s;
            }
        }
    }
    Ok((completion, served_total))
}

/// Queue-based upload: the controller moves the unbuffered file into the
/// queue (never more than is left) and max-weight serves the queue.
pub fn upload_queue<R: Rng + ?Sized>(
    mac: &MacConfig,
    controller: &CongestionController,
    fading: &mut FadingProcess,
    file_sizes: &[f64],
    slot_cap: u64,
    fading_rng: &mut R,
    controller_rng: &mut R,
) -> Result<(Vec<u64>, Vec<f64>)> {
    let m = file_sizes.len();
    let mut unbuffered = file_sizes.to_vec();
    let mut queues = QueueVector::zeros(m);
    let mut served_total = vec![0.0; m];
    let mut completion = vec![0u64; m];
    let mut done = vec![false; m];
    let mut t = 0u64;
    while done.iter().any(|d| !d) {
        t += 1;
        if t > slot_cap {
            return Err(cap_error("queue", slot_cap, &unbuffered, queues.as_slice()));
        }
        if t > 1 {
            fading.step(fading_rng);
        }
        let region = InstantaneousRegion::new(mac, &fading.gains())?;
        let mu = maxweight_allocate(&queues, &region)?;
        for i in 0..m {
            if done[i] {
                continue;
            }
            let want = controller.arrival(i, queues[i], controller_rng);
            let a = if want >= unbuffered[i] {
                let a = unbuffered[i];
                unbuffered[i] = 0.0;
                a
            } else {
                unbuffered[i] -= want;
                want
            };
            let backlog = queues[i] + a;
            let s = backlog.min(mu[i]);
            served_total[i] += s;
            let left = if mu[i] >= backlog { 0.0 } else { backlog - s };
            queues.set(i, left);
            if left == 0.0 && unbuffered[i] == 0.0 {
                done[i] = true;
                completion[i] = t;
            }
        }
    }
    Ok((completion, served_total))
}

fn cap_error(policy: &str, cap: u64, unbuffered: &[f64], queues: &[f64]) -> crate::Error {
    runtime(format!(
        "{policy} upload did not finish within {cap} slots (remaining file {unbuffered:?}, queues {queues:?})"
    ))
}

/// Sweeps the configured file sizes; every user uploads a file of the same
/// size. Greedy and queue-based runs share the fading realization of their
/// replication.
pub fn run_file_upload(cfg: &ModelConfig, seed: u64) -> Result<FileUploadReport> {
    let file_sizes = cfg
        .file_sizes
        .clone()
        .ok_or_else(|| crate::error::config("file_upload requires scenario.file_sizes"))?;
    let m = cfg.num_users();
    let opts = SolverOptions::default();
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

    let mut runs = Vec::new();
    for &f in &file_sizes {
        let sizes = vec![f; m];
        let per_rep = run_replications(cfg.replications, |rep| {
            let mut out = Vec::with_capacity(policies.len());
            let mut greedy = GreedyAllocator::new(cfg.mac.clone(), cfg.utility.clone(), opts);
            let mut frng = substream(seed, rep, Stream::Fading);
            let mut fading = FadingProcess::start(cfg.chains.clone(), &mut frng)?;
            let (completion, served) = upload_greedy(&mut greedy, &mut fading, &sizes, cfg.slot_cap, &mut frng)?;
            out.push(finish(cfg, f, &policies[0], rep, completion, served));
            for (k, ctl) in controllers.iter().enumerate() {
                let mut frng = substream(seed, rep, Stream::Fading);
                let mut crng = substream(seed, rep, Stream::Controller(k));
                let mut fading = FadingProcess::start(cfg.chains.clone(), &mut frng)?;
                let (completion, served) =
                    upload_queue(&cfg.mac, ctl, &mut fading, &sizes, cfg.slot_cap, &mut frng, &mut crng)?;
                out.push(finish(cfg, f, &policies[k + 1], rep, completion, served));
            }
            Ok(out)
        })?;
        runs.extend(per_rep.into_iter().flatten());
    }
    Ok(FileUploadReport { num_users: m, file_sizes, policies, runs })
}

fn finish(cfg: &ModelConfig, f: f64, policy: &str, rep: usize, completion: Vec<u64>, served: Vec<f64>) -> UploadRun {
    let upload_rate: Vec<f64> = completion.iter().map(|&t| f / t as f64).collect();
    let utility = cfg.utility.value(&upload_rate);
    UploadRun { file_size: f, policy: policy.to_string(), rep, completion, upload_rate, utility, served }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(powers: &str, weights: &str, extra: &str) -> ModelConfig {
        ModelConfig::parse(&format!(
            r#"
            [mac]
            num_users = 2
            powers = {powers}
            noise = 1.0
            [fading]
            [[fading.chains]]
            states = [1.0]
            transition = [[1.0]]
            [utility]
            alpha = 2.0
            weights = {weights}
            {extra}
            "#
        ))
        .unwrap()
    }

    #[test]
    fn symmetric_users_finish_together_under_greedy() {
        let c = cfg("[2.0, 2.0]", "[1.0, 1.0]", "[controller]\nK = [10]\n[scenario]\nfile_sizes = [5.0, 50.0]\nreplications = 2");
        let report = run_file_upload(&c, 3).unwrap();
        for r in report.runs.iter().filter(|r| r.policy == GREEDY) {
            assert_eq!(r.completion[0], r.completion[1], "{r:?}");
        }
    }

    #[test]
    fn served_amounts_add_up_to_the_file() {
        let c = ModelConfig::parse(
            r#"
            [mac]
            num_users = 2
            powers = [3.0, 1.0]
            noise = 1.0
            [fading]
            [[fading.chains]]
            states = [0.3, 1.7]
            transition = [[0.5, 0.5], [0.5, 0.5]]
            [utility]
            alpha = 1.0
            weights = [1.0, 1.0]
            [controller]
            K = [1.0, 10.0]
            jitter = true
            [scenario]
            file_sizes = [7.3, 123.4]
            replications = 3
            "#,
        )
        .unwrap();
        let report = run_file_upload(&c, 8).unwrap();
        assert_eq!(report.runs.len(), 2 * 3 * 3);
        for r in &report.runs {
            for i in 0..2 {
                assert!((r.served[i] - r.file_size).abs() <= 1e-12 * r.file_size, "{r:?}");
                assert!(r.completion[i] >= 1);
            }
        }
    }

    #[test]
    fn slot_cap_stops_runaway_uploads() {
        let c = cfg("[1.0, 1.0]", "[1.0, 1.0]", "[controller]\nK = []\n[scenario]\nfile_sizes = [1000.0]\nslot_cap = 50\nreplications = 1");
        let err = run_file_upload(&c, 1).unwrap_err();
        assert!(matches!(&err, crate::Error::Runtime(m) if m.contains("50 slots")), "{err}");
    }

    #[test]
    fn csv_schema() {
        let c = cfg("[2.0, 1.0]", "[1.5, 1.0]", "[controller]\nK = [10]\n[scenario]\nfile_sizes = [10.0]\nreplications = 2");
        let report = run_file_upload(&c, 4).unwrap();
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "file_size,policy,rep,completion_1,completion_2,upload_rate_1,upload_rate_2,utility"
        );
        assert_eq!(lines.len(), 1 + 2 * 2);
        assert!(lines[1].starts_with("10,greedy,0,"));
        assert!(lines[2].starts_with("10,queue_k10,0,"));
    }
}
