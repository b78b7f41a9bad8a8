//! The allocation mechanisms under comparison.
//!
//! * [`greedy_allocate`]: per-state utility maximization from channel state
//!   alone.
//! * [`maxweight_allocate`] with a [`CongestionController`]: the queue-based
//!   scheduler and its arrival regulator.
//! * [`offline_optimum`]: the utility maximizer over the throughput region,
//!   used as the benchmark `R*`.
//! * [`BlockScheme`]: block transmission at a fixed interior rate with
//!   independent decoding failures, used to probe stability.

use rand::Rng;

use crate::error::{config, domain, Result};
use crate::fading::GainChain;
use crate::mac::{MacConfig, RateVector, ThroughputRegion};
use crate::polymatroid::{maximize_concave, maximize_linear, RankOracle, SolverOptions, TableOracle};
use crate::queueing::QueueVector;
use crate::utility::Utility;

/// Utility-maximizing allocation over the current instantaneous region.
///
/// Takes no queue information.
pub fn greedy_allocate(
    region: &impl RankOracle,
    utility: &(impl Utility + ?Sized),
    opts: &SolverOptions,
) -> Result<RateVector> {
    Ok(maximize_concave(region, utility, opts)?.rates)
}

/// Max-weight service: the argmax of `sum_i Q_i R_i` over the region.
pub fn maxweight_allocate(queues: &QueueVector, region: &impl RankOracle) -> Result<RateVector> {
    maximize_linear(region, queues.as_slice())
}

/// How [`CongestionController::arrival`] turns the conditional mean into a
/// sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArrivalMode {
    /// Emit the conditional mean itself.
    #[default]
    Mean,
    /// Mean times `U(0.5, 1.5)`.
    Jittered,
}

/// Queue-driven arrival regulator with mean `min{K (w_i / Q_i)^(1/alpha), D}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CongestionController {
    gain: f64,
    cap: f64,
    alpha: f64,
    weights: Vec<f64>,
    mode: ArrivalMode,
}

impl CongestionController {
    pub fn new(gain: f64, cap: f64, alpha: f64, weights: Vec<f64>) -> Result<Self> {
        if !(gain.is_finite() && gain > 0.0) {
            return Err(config(format!("controller gain K must be finite and > 0, got {gain}")));
        }
        if !(cap.is_finite() && cap > 0.0) {
            return Err(config(format!("arrival cap D must be finite and > 0, got {cap}")));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(config(format!("controller alpha must be finite and > 0, got {alpha}")));
        }
        if weights.is_empty() || weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(config("controller weights must be finite and > 0"));
        }
        Ok(Self { gain, cap, alpha, weights, mode: ArrivalMode::Mean })
    }

    #[must_use]
    pub fn with_mode(mut self, mode: ArrivalMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn mode(&self) -> ArrivalMode {
        self.mode
    }

    pub fn num_users(&self) -> usize {
        self.weights.len()
    }

    /// Conditional mean arrival of `user` given its backlog; `D` at `Q = 0`.
    pub fn mean_arrival(&self, user: usize, queue: f64) -> f64 {
        if queue <= 0.0 {
            return self.cap;
        }
        let raw = self.gain * (self.weights[user] / queue).powf(1.0 / self.alpha);
        raw.min(self.cap)
    }

    /// Upper bound on `E[a^2 | Q]`.
    pub fn second_moment_bound(&self) -> f64 {
        match self.mode {
            ArrivalMode::Mean => self.cap * self.cap,
            ArrivalMode::Jittered => self.cap * self.cap * (13.0 / 12.0),
        }
    }

    pub fn arrival<R: Rng + ?Sized>(&self, user: usize, queue: f64, rng: &mut R) -> f64 {
        let mean = self.mean_arrival(user, queue);
        match self.mode {
            ArrivalMode::Mean => mean,
            ArrivalMode::Jittered => mean * rng.gen_range(0.5..1.5),
        }
    }
}

/// The benchmark `R*`: utility maximizer over the throughput region.
pub fn offline_optimum(
    mac: &MacConfig,
    chains: &[GainChain],
    utility: &(impl Utility + ?Sized),
    opts: &SolverOptions,
) -> Result<RateVector> {
    let region = ThroughputRegion::new(mac, chains)?;
    if region.arity() <= TableOracle::MAX_ARITY.min(16) {
        let table = TableOracle::tabulate(&region)?;
        Ok(maximize_concave(&table, utility, opts)?.rates)
    } else {
        Ok(maximize_concave(&region, utility, opts)?.rates)
    }
}

/// Largest decoding error probability for which the block scheme at rates
/// `lambda + eps` keeps a negative drift: `eps / (2 (max_i lambda_i + eps))`.
pub fn required_error_bound(mean_arrivals: &[f64], epsilon: f64) -> Result<f64> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(domain(format!("epsilon must be finite and > 0, got {epsilon}")));
    }
    if let Some(l) = mean_arrivals.iter().find(|l| !l.is_finite() || **l < 0.0) {
        return Err(domain(format!("mean arrivals must be finite and >= 0, got {l}")));
    }
    let max = mean_arrivals.iter().copied().fold(0.0, f64::max);
    Ok(epsilon / (2.0 * (max + epsilon)))
}

/// Block transmission at fixed rates: every `n` slots user `i` sends a
/// codeword of `n R_i` nats if its backlog covers it, and the codeword is
/// lost with probability `P_e`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockScheme {
    block_length: usize,
    target_rates: RateVector,
    error_prob: f64,
}

impl BlockScheme {
    pub fn new(block_length: usize, target_rates: RateVector, error_prob: f64) -> Result<Self> {
        if block_length == 0 {
            return Err(domain("block length must be >= 1"));
        }
        if !(0.0..=1.0).contains(&error_prob) {
            return Err(domain(format!("error probability must be in [0, 1], got {error_prob}")));
        }
        Ok(Self { block_length, target_rates, error_prob })
    }

    pub fn block_length(&self) -> usize {
        self.block_length
    }

    pub fn target_rates(&self) -> &RateVector {
        &self.target_rates
    }

    pub fn error_prob(&self) -> f64 {
        self.error_prob
    }

    /// `n R_i`, the codeword payload of user `i`.
    pub fn payload(&self, user: usize) -> f64 {
        self.block_length as f64 * self.target_rates[user]
    }

    /// Whether `P_e` meets [`required_error_bound`] for the given arrivals.
    pub fn meets_error_bound(&self, mean_arrivals: &[f64], epsilon: f64) -> Result<bool> {
        Ok(self.error_prob <= required_error_bound(mean_arrivals, epsilon)?)
    }

    /// Users that transmit in a block starting from `queues`.
    pub fn transmitting(&self, queues: &QueueVector) -> Vec<bool> {
        (0..queues.len()).map(|i| queues[i] >= self.payload(i)).collect()
    }

    /// Draws decoding outcomes `S_i` (false with probability `P_e`).
    pub fn draw_outcomes<R: Rng + ?Sized>(&self, num_users: usize, rng: &mut R) -> Vec<bool> {
        (0..num_users).map(|_| rng.gen::<f64>() >= self.error_prob).collect()
    }
}

/// One block of the fixed-rate scheme with given decoding outcomes.
///
/// `block_arrivals[tau][i]` is user `i`'s arrival in slot `tau` of the block.
pub fn block_scheme_step_with_outcomes(
    queues: &QueueVector,
    block_arrivals: &[Vec<f64>],
    scheme: &BlockScheme,
    decoded: &[bool],
) -> Result<QueueVector> {
    let m = queues.len();
    if scheme.target_rates.len() != m || decoded.len() != m {
        return Err(domain("block scheme dimensions differ from the queue vector"));
    }
    if block_arrivals.iter().any(|a| a.len() != m) {
        return Err(domain("block arrivals dimensions differ from the queue vector"));
    }
    let mut next = queues.clone();
    for i in 0..m {
        let arrived: f64 = block_arrivals.iter().map(|a| a[i]).sum();
        let payload = scheme.payload(i);
        let q = queues[i];
        let value = if q < payload {
            q + arrived
        } else {
            let served = if decoded[i] { payload } else { 0.0 };
            q - served + arrived
        };
        next.set(i, value.max(0.0));
    }
    Ok(next)
}

/// One block of the fixed-rate scheme, drawing decoding outcomes from `rng`.
pub fn block_scheme_step<R: Rng + ?Sized>(
    queues: &QueueVector,
    block_arrivals: &[Vec<f64>],
    scheme: &BlockScheme,
    rng: &mut R,
) -> Result<QueueVector> {
    let decoded = scheme.draw_outcomes(queues.len(), rng);
    block_scheme_step_with_outcomes(queues, block_arrivals, scheme, &decoded)
}
