//! The two allocation paths driven over a fading realization.
//!
//! [`GreedyAllocator`] sees only channel states; [`simulate_queue_path`] sees
//! only channel states and its own backlogs. Neither takes the offline
//! optimum.

use std::collections::HashMap;

use rand::Rng;

use crate::error::Result;
use crate::fading::{FadingProcess, GainChain};
use crate::mac::{ChannelState, InstantaneousRegion, MacConfig, RateVector};
use crate::policies::{greedy_allocate, maxweight_allocate, CongestionController};
use crate::polymatroid::{Restricted, SolverOptions, UserSet};
use crate::queueing::{QueueVector, RunTrace};
use crate::utility::AlphaFairUtility;

/// A recorded fading realization: joint state ids and gains per slot.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingPath {
    num_users: usize,
    ids: Vec<usize>,
    gains: Vec<f64>,
}

impl FadingPath {
    /// `slots` consecutive states starting from the initial draw.
    pub fn generate<R: Rng + ?Sized>(chains: &[GainChain], slots: usize, rng: &mut R) -> Result<Self> {
        let mut process = FadingProcess::start(chains.to_vec(), rng)?;
        let num_users = chains.len();
        let mut ids = Vec::with_capacity(slots);
        let mut gains = Vec::with_capacity(slots * num_users);
        for t in 0..slots {
            ids.push(process.joint_index());
            gains.extend_from_slice(process.gains().gains());
            if t + 1 < slots {
                process.step(rng);
            }
        }
        Ok(Self { num_users, ids, gains })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn state_id(&self, t: usize) -> usize {
        self.ids[t]
    }

    pub fn gains(&self, t: usize) -> &[f64] {
        &self.gains[t * self.num_users..(t + 1) * self.num_users]
    }
}

/// Greedy allocation with per-(state, active set) memoization.
#[derive(Debug, Clone)]
pub struct GreedyAllocator {
    mac: MacConfig,
    utility: AlphaFairUtility,
    opts: SolverOptions,
    cache: HashMap<(usize, u32), RateVector>,
}

impl GreedyAllocator {
    pub fn new(mac: MacConfig, utility: AlphaFairUtility, opts: SolverOptions) -> Self {
        Self { mac, utility, opts, cache: HashMap::new() }
    }

    /// Allocation among `active` users in channel state `gains`; inactive
    /// users get zero. `state_id` must identify `gains` uniquely.
    pub fn allocate(&mut self, state_id: usize, gains: &[f64], active: UserSet) -> Result<&RateVector> {
        let key = (state_id, active.bits());
        if !self.cache.contains_key(&key) {
            let rates = self.solve(gains, active)?;
            self.cache.insert(key, rates);
        }
        Ok(&self.cache[&key])
    }

    fn solve(&self, gains: &[f64], active: UserSet) -> Result<RateVector> {
        let m = self.mac.num_users();
        let region = InstantaneousRegion::new(&self.mac, &ChannelState::new(gains.to_vec())?)?;
        if active == UserSet::full(m) {
            return greedy_allocate(&region, &self.utility, &self.opts);
        }
        let users: Vec<usize> = active.iter().collect();
        let mut full = vec![0.0; m];
        if !users.is_empty() {
            let sub = Restricted::new(&region, users.clone())?;
            let rates = greedy_allocate(&sub, &self.utility.restrict(&users)?, &self.opts)?;
            for (k, &u) in users.iter().enumerate() {
                full[u] = rates[k];
            }
        }
        RateVector::new(full)
    }
}

/// Greedy rates for every slot of `path`, flattened slot-major.
pub fn simulate_greedy_path(path: &FadingPath, greedy: &mut GreedyAllocator) -> Result<Vec<f64>> {
    let all = UserSet::full(path.num_users());
    let mut out = Vec::with_capacity(path.len() * path.num_users());
    for t in 0..path.len() {
        out.extend_from_slice(greedy.allocate(path.state_id(t), path.gains(t), all)?.as_slice());
    }
    Ok(out)
}

/// Controller arrivals, max-weight service and queue updates over `path`.
///
/// Each record holds `Q(t)`, the served amount `min(Q_i + a_i, mu_i)` and
/// `a(t)`.
pub fn simulate_queue_path<R: Rng + ?Sized>(
    mac: &MacConfig,
    path: &FadingPath,
    controller: &CongestionController,
    rng: &mut R,
) -> Result<RunTrace> {
    let m = path.num_users();
    let mut trace = RunTrace::with_capacity(m, path.len());
    let mut queues = QueueVector::zeros(m);
    let mut arrivals = vec![0.0; m];
    let mut served = vec![0.0; m];
    for t in 0..path.len() {
        let region = InstantaneousRegion::new(mac, &ChannelState::new(path.gains(t).to_vec())?)?;
        let mu = maxweight_allocate(&queues, &region)?;
        for i in 0..m {
            arrivals[i] = controller.arrival(i, queues[i], rng);
            served[i] = (queues[i] + arrivals[i]).min(mu[i]);
        }
        trace.push(t as u64 + 1, path.state_id(t), queues.as_slice(), &served, &arrivals)?;
        for i in 0..m {
            queues.set(i, queues[i] + arrivals[i] - served[i]);
        }
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymatroid::contains;
    use crate::sim::rng::{substream, Stream};

    fn two_state() -> GainChain {
        GainChain::new(vec![0.5, 2.0], vec![vec![0.7, 0.3], vec![0.4, 0.6]]).unwrap()
    }

    #[test]
    fn path_is_reproducible() {
        let chains = vec![two_state(), two_state()];
        let a = FadingPath::generate(&chains, 500, &mut substream(1, 0, Stream::Fading)).unwrap();
        let b = FadingPath::generate(&chains, 500, &mut substream(1, 0, Stream::Fading)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 500);
        // ids decode to gains
        for t in 0..a.len() {
            let id = a.state_id(t);
            let g = [[0.5, 2.0][id % 2], [0.5, 2.0][id / 2]];
            assert_eq!(a.gains(t), &g);
        }
    }

    #[test]
    fn greedy_rates_lie_in_each_slot_region() {
        let mac = MacConfig::new(vec![2.0, 1.0], 1.0).unwrap();
        let chains = vec![two_state(), two_state()];
        let path = FadingPath::generate(&chains, 50, &mut substream(2, 0, Stream::Fading)).unwrap();
        let mut g = GreedyAllocator::new(
            mac.clone(),
            AlphaFairUtility::new(1.0, vec![1.0, 1.0]).unwrap(),
            SolverOptions::default(),
        );
        let rates = simulate_greedy_path(&path, &mut g).unwrap();
        for t in 0..path.len() {
            let region = InstantaneousRegion::new(&mac, &ChannelState::new(path.gains(t).to_vec()).unwrap()).unwrap();
            assert!(contains(&region, &rates[2 * t..2 * t + 2]).unwrap());
        }
    }

    #[test]
    fn restricted_greedy_gives_single_user_its_capacity() {
        let mac = MacConfig::new(vec![3.0, 1.0], 1.0).unwrap();
        let mut g = GreedyAllocator::new(
            mac,
            AlphaFairUtility::new(2.0, vec![1.0, 1.0]).unwrap(),
            SolverOptions::default(),
        );
        let r = g.allocate(0, &[1.0, 1.0], UserSet::singleton(1)).unwrap().clone();
        assert_eq!(r[0], 0.0);
        assert!((r[1] - 0.5 * 2f64.ln()).abs() < 1e-6);
        let none = g.allocate(0, &[1.0, 1.0], UserSet::EMPTY).unwrap();
        assert_eq!(none.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn queue_path_conserves_work() {
        let mac = MacConfig::new(vec![2.0, 2.0], 1.0).unwrap();
        let chains = vec![two_state(), two_state()];
        let path = FadingPath::generate(&chains, 2000, &mut substream(3, 0, Stream::Fading)).unwrap();
        let ctl = CongestionController::new(5.0, 3.0, 2.0, vec![1.5, 1.0]).unwrap();
        let trace = simulate_queue_path(&mac, &path, &ctl, &mut substream(3, 0, Stream::Controller(0))).unwrap();
        let last = trace.len() - 1;
        for i in 0..2 {
            let final_q = trace.queues(last)[i] + trace.arrivals(last)[i] - trace.rates(last)[i];
            let balance = trace.arrival_totals()[i] - trace.rate_totals()[i];
            assert!((final_q - balance).abs() < 1e-6 * trace.arrival_totals()[i]);
            assert!((0..trace.len()).all(|t| trace.queues(t)[i] >= 0.0));
        }
        // empty start: the first slot arrives at the cap
        assert_eq!(trace.arrivals(0), &[3.0, 3.0]);
    }
}
