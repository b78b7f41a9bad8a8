//! Discrete-time queues, per-slot run traces and the Lyapunov-based
//! stability diagnostics computed from them.

use rand::Rng;

use crate::error::{domain, Result};
use crate::polymatroid::UserSet;

/// Per-user backlogs in nats.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QueueVector(Vec<f64>);

impl QueueVector {
    pub fn new(backlogs: Vec<f64>) -> Result<Self> {
        if let Some(q) = backlogs.iter().find(|q| !q.is_finite() || **q < 0.0) {
            return Err(domain(format!("backlogs must be finite and >= 0, got {q}")));
        }
        Ok(Self(backlogs))
    }

    pub fn zeros(num_users: usize) -> Self {
        Self(vec![0.0; num_users])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub(crate) fn set(&mut self, user: usize, value: f64) {
        debug_assert!(value >= 0.0 && value.is_finite());
        self.0[user] = value;
    }
}

impl std::ops::Index<usize> for QueueVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// `(Q + a - mu)^+`.
#[inline]
pub fn queue_update(queue: f64, arrival: f64, service: f64) -> f64 {
    (queue + arrival - service).max(0.0)
}

/// `V(Q) = sum_i Q_i^2`.
pub fn lyapunov_value(queues: &[f64]) -> f64 {
    queues.iter().map(|q| q * q).sum()
}

/// Shape of the per-slot arrival distribution. Every kind has mean `lambda_i`
/// and a finite second moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArrivalKind {
    /// `A = lambda` every slot.
    Deterministic,
    /// `A = lambda / p` with probability `p`, else zero.
    BernoulliScaled { p: f64 },
    /// `A = lambda * U(0.5, 1.5)`.
    UniformJitter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalProcess {
    kind: ArrivalKind,
    means: Vec<f64>,
}

impl ArrivalProcess {
    pub fn new(kind: ArrivalKind, means: Vec<f64>) -> Result<Self> {
        if let Some(m) = means.iter().find(|m| !m.is_finite() || **m < 0.0) {
            return Err(domain(format!("mean arrival rates must be finite and >= 0, got {m}")));
        }
        if let ArrivalKind::BernoulliScaled { p } = kind {
            if !(p > 0.0 && p <= 1.0) {
                return Err(domain(format!("bernoulli arrival probability must be in (0, 1], got {p}")));
            }
        }
        Ok(Self { kind, means })
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn kind(&self) -> ArrivalKind {
        self.kind
    }

    /// `E[A_i^2]`.
    pub fn second_moment(&self, user: usize) -> f64 {
        let m = self.means[user];
        match self.kind {
            ArrivalKind::Deterministic => m * m,
            ArrivalKind::BernoulliScaled { p } => m * m / p,
            // E[U^2] for U ~ U(0.5, 1.5) is 1 + 1/12
            ArrivalKind::UniformJitter => m * m * (13.0 / 12.0),
        }
    }

    /// Draws one slot of arrivals for every user.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for (o, &m) in out.iter_mut().zip(&self.means) {
            *o = match self.kind {
                ArrivalKind::Deterministic => m,
                ArrivalKind::BernoulliScaled { p } => {
                    if rng.gen::<f64>() < p {
                        m / p
                    } else {
                        0.0
                    }
                }
                ArrivalKind::UniformJitter => m * rng.gen_range(0.5..1.5),
            };
        }
    }
}

/// Append-only per-slot record stream with running totals.
///
/// Each record holds the backlog at the start of the slot, the rates
/// credited in the slot, and the arrivals in the slot.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    num_users: usize,
    slots: Vec<u64>,
    state_ids: Vec<usize>,
    queues: Vec<f64>,
    rates: Vec<f64>,
    arrivals: Vec<f64>,
    rate_totals: Vec<f64>,
    arrival_totals: Vec<f64>,
    queue_totals: Vec<f64>,
}

impl RunTrace {
    pub fn new(num_users: usize) -> Self {
        Self {
            num_users,
            slots: Vec::new(),
            state_ids: Vec::new(),
            queues: Vec::new(),
            rates: Vec::new(),
            arrivals: Vec::new(),
            rate_totals: vec![0.0; num_users],
            arrival_totals: vec![0.0; num_users],
            queue_totals: vec![0.0; num_users],
        }
    }

    pub fn with_capacity(num_users: usize, slots: usize) -> Self {
        let mut t = Self::new(num_users);
        t.slots.reserve(slots);
        t.state_ids.reserve(slots);
        t.queues.reserve(slots * num_users);
        t.rates.reserve(slots * num_users);
        t.arrivals.reserve(slots * num_users);
        t
    }

    pub fn push(
        &mut self,
        slot: u64,
        state_id: usize,
        queues: &[f64],
        rates: &[f64],
        arrivals: &[f64],
    ) -> Result<()> {
        let m = self.num_users;
        if queues.len() != m || rates.len() != m || arrivals.len() != m {
            return Err(domain(format!("trace record dimensions differ from {m} users")));
        }
        self.slots.push(slot);
        self.state_ids.push(state_id);
        self.queues.extend_from_slice(queues);
        self.rates.extend_from_slice(rates);
        self.arrivals.extend_from_slice(arrivals);
        for i in 0..m {
            self.rate_totals[i] += rates[i];
            self.arrival_totals[i] += arrivals[i];
            self.queue_totals[i] += queues[i];
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn slot(&self, t: usize) -> u64 {
        self.slots[t]
    }

    pub fn state_id(&self, t: usize) -> usize {
        self.state_ids[t]
    }

    pub fn queues(&self, t: usize) -> &[f64] {
        &self.queues[t * self.num_users..(t + 1) * self.num_users]
    }

    pub fn rates(&self, t: usize) -> &[f64] {
        &self.rates[t * self.num_users..(t + 1) * self.num_users]
    }

    pub fn arrivals(&self, t: usize) -> &[f64] {
        &self.arrivals[t * self.num_users..(t + 1) * self.num_users]
    }

    pub fn rate_totals(&self) -> &[f64] {
        &self.rate_totals
    }

    pub fn arrival_totals(&self) -> &[f64] {
        &self.arrival_totals
    }

    pub fn queue_totals(&self) -> &[f64] {
        &self.queue_totals
    }

    /// Time-average of `sum_i Q_i` over the whole trace.
    pub fn mean_total_queue(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.queue_totals.iter().sum::<f64>() / self.len() as f64
        }
    }

    /// `sum_{i in S} Q_i(t)` for every recorded slot.
    pub fn subset_queue_series(&self, subset: UserSet) -> Vec<f64> {
        (0..self.len())
            .map(|t| subset.iter().map(|i| self.queues(t)[i]).sum())
            .collect()
    }
}

/// Ordinary least squares fit `y = slope * x + intercept`; zero slope when
/// the abscissae have no spread.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 {
        (0.0, my)
    } else {
        let slope = sxy / sxx;
        (slope, my - slope * mx)
    }
}

/// Paired samples `(sum_i Q_i(t), V(Q(t+T)) - V(Q(t)))` and their fit.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftEstimate {
    pub horizon: usize,
    pub samples: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
}

/// `T`-slot drift of `V` at every anchor `t` with `t + T` inside the trace,
/// regressed on the total backlog at the anchor.
pub fn empirical_drift(trace: &RunTrace, horizon: usize) -> Result<DriftEstimate> {
    if horizon == 0 {
        return Err(domain("drift horizon must be >= 1"));
    }
    if trace.len() <= horizon {
        return Err(domain(format!(
            "trace of {} slots is too short for horizon {horizon}",
            trace.len()
        )));
    }
    let v: Vec<f64> = (0..trace.len()).map(|t| lyapunov_value(trace.queues(t))).collect();
    let samples: Vec<(f64, f64)> = (0..trace.len() - horizon)
        .map(|t| (trace.queues(t).iter().sum(), v[t + horizon] - v[t]))
        .collect();
    let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    Ok(DriftEstimate { horizon, samples, slope, intercept })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Unstable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub verdict: Verdict,
    /// Fitted slope of the subset backlog over the last half of the trace.
    pub growth_slope: f64,
    /// `(1/t) sum_tau sum_{i in S} Q_i(tau)` over the whole trace.
    pub mean_sum_queue: f64,
}

/// Linear-growth instability test.
///
/// Sublinear growth such as `sqrt(t)` produces a fitted slope that shrinks
/// with trace length, so it is only classified stable once the trace is long
/// enough for that slope to drop below the threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityTest {
    pub slope_threshold: f64,
    pub min_slots: usize,
}

impl Default for StabilityTest {
    fn default() -> Self {
        Self { slope_threshold: 1e-3, min_slots: 10_000 }
    }
}

impl StabilityTest {
    pub fn verdict(&self, trace: &RunTrace, subset: UserSet) -> Result<StabilityReport> {
        self.verdict_for_series(&trace.subset_queue_series(subset))
    }

    pub fn verdict_for_series(&self, series: &[f64]) -> Result<StabilityReport> {
        if series.len() < self.min_slots {
            return Err(domain(format!(
                "stability test needs at least {} slots, got {}",
                self.min_slots,
                series.len()
            )));
        }
        let start = series.len() / 2;
        let tail = &series[start..];
        let xs: Vec<f64> = (0..tail.len()).map(|t| t as f64).collect();
        let (slope, _) = least_squares(&xs, tail);
        let verdict = if slope > self.slope_threshold { Verdict::Unstable } else { Verdict::Stable };
        Ok(StabilityReport {
            verdict,
            growth_slope: slope,
            mean_sum_queue: series.iter().sum::<f64>() / series.len() as f64,
        })
    }
}

/// [`StabilityTest::verdict`] with the default threshold `1e-3` nats/slot.
pub fn stability_verdict(trace: &RunTrace, subset: UserSet) -> Result<StabilityReport> {
    StabilityTest::default().verdict(trace, subset)
}
