//! Stability probes on either side of the throughput region boundary.
//!
//! * `inside`: arrivals at `inside_load` times a vertex of `C_a`, served by
//!   the block scheme at rates `lambda + eps` with `P_e` at half the
//!   admissible bound.
//! * `outside`: arrivals at `outside_load` times the same vertex, so the sum
//!   rate exceeds `f(full set)`, served at the vertex rates every slot.
//! * `zero`: no arrivals, block scheme as for `inside`.

use std::fmt;
use std::io::Write;

use crate::error::{config, Result};
use crate::mac::{RateVector, ThroughputRegion};
use crate::policies::{block_scheme_step, required_error_bound, BlockScheme};
use crate::polymatroid::{vertex, RankOracle, UserSet};
use crate::queueing::{empirical_drift, stability_verdict, ArrivalKind, ArrivalProcess, QueueVector, RunTrace, Verdict};
use crate::sim::config::ModelConfig;
use crate::sim::io_error;
use crate::sim::rng::{run_replications, substream, Stream};

/// Loads closer than this to the boundary are rejected.
pub const BOUNDARY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeCase {
    Inside,
    Outside,
    Zero,
}

impl ProbeCase {
    pub const ALL: [ProbeCase; 3] = [ProbeCase::Inside, ProbeCase::Outside, ProbeCase::Zero];

    pub fn as_str(self) -> &'static str {
        match self {
            ProbeCase::Inside => "inside",
            ProbeCase::Outside => "outside",
            ProbeCase::Zero => "zero",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ProbeCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `min_S (f(S) - lambda(S)) / |S|`: the largest `eps` with `lambda + eps`
/// inside the region. Negative outside.
pub fn interior_margin(region: &impl RankOracle, lambda: &[f64]) -> f64 {
    let m = region.arity();
    (1..1u32 << m)
        .map(UserSet::from_bits)
        .map(|s| {
            let load: f64 = s.iter().map(|i| lambda[i]).sum();
            (region.rank(s) - load) / s.len() as f64
        })
        .fold(f64::INFINITY, f64::min)
}

/// Per-case arrival rates and service parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSetup {
    pub case: ProbeCase,
    pub lambda: Vec<f64>,
    pub margin: f64,
    pub service: Service,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Service {
    Block { epsilon: f64, scheme: BlockScheme },
    Fixed(RateVector),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSetup {
    pub vertex: RateVector,
    pub sum_capacity: f64,
    pub arrivals: ArrivalKind,
    pub cases: Vec<CaseSetup>,
}

impl ProbeSetup {
    pub fn new(cfg: &ModelConfig) -> Result<Self> {
        cfg.validate_for(crate::sim::config::ScenarioKind::StabilityProbe)?;
        let arrivals = cfg.arrivals.expect("validated");
        let region = ThroughputRegion::new(&cfg.mac, &cfg.chains)?;
        let m = region.arity();
        let identity: Vec<usize> = (0..m).collect();
        let v = vertex(&region, &identity)?.rates;
        let sum_capacity = region.rank(UserSet::full(m));
        let mut cases = Vec::new();
        for case in ProbeCase::ALL {
            let load = match case {
                ProbeCase::Inside => cfg.inside_load,
                ProbeCase::Outside => cfg.outside_load,
                ProbeCase::Zero => 0.0,
            };
            let lambda: Vec<f64> = v.as_slice().iter().map(|x| load * x).collect();
            let margin = interior_margin(&region, &lambda);
            if margin.abs() <= BOUNDARY_TOLERANCE {
                return Err(config(format!(
                    "{case} arrival rates {lambda:?} lie on the region boundary (margin {margin:e})"
                )));
            }
            let service = match case {
                ProbeCase::Outside => Service::Fixed(v.clone()),
                _ => {
                    if margin < 0.0 {
                        return Err(config(format!("{case} arrival rates {lambda:?} lie outside the region")));
                    }
                    let epsilon = margin / 2.0;
                    let rates = RateVector::new(lambda.iter().map(|l| l + epsilon).collect())?;
                    let pe = required_error_bound(&lambda, epsilon)? / 2.0;
                    Service::Block { epsilon, scheme: BlockScheme::new(cfg.block_length, rates, pe)? }
                }
            };
            cases.push(CaseSetup { case, lambda, margin, service });
        }
        Ok(Self { vertex: v, sum_capacity, arrivals, cases })
    }

    pub fn case(&self, case: ProbeCase) -> &CaseSetup {
        &self.cases[case.index()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub case: ProbeCase,
    pub rep: usize,
    pub verdict: Verdict,
    pub growth_slope: f64,
    pub mean_sum_queue: f64,
    pub drift_slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityProbeReport {
    pub setup: ProbeSetup,
    /// Ordered by case, then replication.
    pub rows: Vec<ProbeRow>,
}

impl StabilityProbeReport {
    pub fn rows_for(&self, case: ProbeCase) -> impl Iterator<Item = &ProbeRow> {
        self.rows.iter().filter(move |r| r.case == case)
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(b"case,rep,verdict,growth_slope,mean_sum_queue,drift_slope\n")
            .map_err(io_error)?;
        for r in &self.rows {
            let line = format!(
                "{},{},{},{},{},{}\n",
                r.case,
                r.rep,
                r.verdict.as_str(),
                r.growth_slope,
                r.mean_sum_queue,
                r.drift_slope
            );
            w.write_all(line.as_bytes()).map_err(io_error)?;
        }
        Ok(())
    }
}

/// Simulates one case for `slots` slots.
///
/// Block service: records inside a block show the backlog at block start
/// plus the arrivals so far; the decoded payload is credited in the block's
/// last slot.
pub fn simulate_case(setup: &ProbeSetup, case: ProbeCase, slots: usize, seed: u64, rep: usize) -> Result<RunTrace> {
    let cs = setup.case(case);
    let m = cs.lambda.len();
    let arrivals = ArrivalProcess::new(setup.arrivals, cs.lambda.clone())?;
    let mut arng = substream(seed, rep, Stream::Arrivals(case.index()));
    let mut drng = substream(seed, rep, Stream::Decoding(case.index()));
    let mut trace = RunTrace::with_capacity(m, slots);
    let mut queues = QueueVector::zeros(m);
    let mut a = vec![0.0; m];
    match &cs.service {
        Service::Fixed(rates) => {
            let mut served = vec![0.0; m];
            for t in 0..slots {
                arrivals.sample(&mut arng, &mut a);
                for i in 0..m {
                    served[i] = (queues[i] + a[i]).min(rates[i]);
                }
                trace.push(t as u64 + 1, 0, queues.as_slice(), &served, &a)?;
                for i in 0..m {
                    queues.set(i, queues[i] + a[i] - served[i]);
                }
            }
        }
        Service::Block { scheme, .. } => {
            let n = scheme.block_length();
            let mut block: Vec<Vec<f64>> = Vec::with_capacity(n);
            let mut t = 0;
            while t < slots {
                block.clear();
                let start = queues.clone();
                let mut partial = start.as_slice().to_vec();
                for _ in 0..n {
                    arrivals.sample(&mut arng, &mut a);
                    block.push(a.clone());
                }
                let next = block_scheme_step(&start, &block, scheme, &mut drng)?;
                let sent = scheme.transmitting(&start);
                for (tau, arr) in block.iter().enumerate() {
                    if t >= slots {
                        break;
                    }
                    let served: Vec<f64> = if tau + 1 == n {
                        (0..m)
                            .map(|i| if sent[i] { start[i] + block.iter().map(|b| b[i]).sum::<f64>() - next[i] } else { 0.0 })
                            .collect()
                    } else {
                        vec![0.0; m]
                    };
                    trace.push(t as u64 + 1, 0, &partial, &served, arr)?;
                    for i in 0..m {
                        partial[i] += arr[i];
                    }
                    t += 1;
                }
                queues = next;
            }
        }
    }
    Ok(trace)
}

fn summarize(setup: &ProbeSetup, case: ProbeCase, rep: usize, trace: &RunTrace) -> Result<ProbeRow> {
    let m = trace.num_users();
    let report = stability_verdict(trace, UserSet::full(m))?;
    let horizon = match &setup.case(case).service {
        Service::Block { scheme, .. } => scheme.block_length(),
        Service::Fixed(_) => 1,
    };
    let drift = empirical_drift(trace, horizon)?;
    Ok(ProbeRow {
        case,
        rep,
        verdict: report.verdict,
        growth_slope: report.growth_slope,
        mean_sum_queue: report.mean_sum_queue,
        drift_slope: drift.slope,
    })
}

/// Runs one case for a single replication and summarizes it.
pub fn probe_case(setup: &ProbeSetup, case: ProbeCase, slots: usize, seed: u64, rep: usize) -> Result<ProbeRow> {
    let trace = simulate_case(setup, case, slots, seed, rep)?;
    summarize(setup, case, rep, &trace)
}

pub fn run_stability_probe(cfg: &ModelConfig, seed: u64) -> Result<StabilityProbeReport> {
    let setup = ProbeSetup::new(cfg)?;
    let mut rows = Vec::new();
    for case in ProbeCase::ALL {
        rows.extend(run_replications(cfg.replications, |rep| probe_case(&setup, case, cfg.slots, seed, rep))?);
    }
    Ok(StabilityProbeReport { setup, rows })
}
