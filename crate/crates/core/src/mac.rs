//! Channel parameters and the rank functions of the capacity regions.
//!
//! The instantaneous region for gains `h` is the polymatroid with rank
//! `f(S) = C(sum_{i in S} h_i P_i, N_0)`; the throughput region averages that
//! rank over the stationary law of the fading process.

use std::ops::Index;

use crate::error::{config, domain, Result};
use crate::fading::{FadingProcess, GainChain};
use crate::polymatroid::{RankOracle, UserSet};

/// Largest joint fading state space that [`ThroughputRegion`] will sum over.
pub const MAX_JOINT_STATES: usize = 1_000_000;

/// Capacity of an AWGN channel in nats: `0.5 * ln(1 + P/N)`.
pub fn shannon_capacity(power: f64, noise: f64) -> Result<f64> {
    if !power.is_finite() || !noise.is_finite() {
        return Err(domain(format!(
            "capacity arguments must be finite (power={power}, noise={noise})"
        )));
    }
    if power < 0.0 {
        return Err(domain(format!("power must be >= 0, got {power}")));
    }
    if noise <= 0.0 {
        return Err(domain(format!("noise must be > 0, got {noise}")));
    }
    Ok(capacity_unchecked(power, noise))
}

#[inline]
fn capacity_unchecked(power: f64, noise: f64) -> f64 {
    0.5 * (power / noise).ln_1p()
}

/// User count, fixed transmit powers and receiver noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct MacConfig {
    powers: Vec<f64>,
    noise: f64,
}

impl MacConfig {
    pub fn new(powers: Vec<f64>, noise: f64) -> Result<Self> {
        if powers.is_empty() {
            return Err(config("a channel needs at least one user"));
        }
        if powers.len() > crate::polymatroid::MAX_ARITY {
            return Err(config(format!(
                "at most {} users are supported, got {}",
                crate::polymatroid::MAX_ARITY,
                powers.len()
            )));
        }
        if let Some((i, p)) = powers
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(config(format!("power of user {i} must be finite and >= 0, got {p}")));
        }
        if !noise.is_finite() || noise <= 0.0 {
            return Err(config(format!("noise must be finite and > 0, got {noise}")));
        }
        Ok(Self { powers, noise })
    }

    pub fn num_users(&self) -> usize {
        self.powers.len()
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }
}

/// Realized channel gains, one per user.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelState {
    gains: Vec<f64>,
}

impl ChannelState {
    pub fn new(gains: Vec<f64>) -> Result<Self> {
        if let Some(g) = gains.iter().find(|g| !g.is_finite() || **g < 0.0) {
            return Err(domain(format!("channel gains must be finite and >= 0, got {g}")));
        }
        Ok(Self { gains })
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn num_users(&self) -> usize {
        self.gains.len()
    }
}

/// Nonnegative per-user rates in nats per slot.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RateVector(Vec<f64>);

impl RateVector {
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        if let Some(r) = rates.iter().find(|r| !r.is_finite() || **r < 0.0) {
            return Err(domain(format!("rates must be finite and >= 0, got {r}")));
        }
        Ok(Self(rates))
    }

    pub fn zeros(num_users: usize) -> Self {
        Self(vec![0.0; num_users])
    }

    /// Wraps solver output, clearing round-off below zero.
    pub(crate) fn from_solver(mut rates: Vec<f64>) -> Self {
        for r in &mut rates {
            if *r < 0.0 {
                *r = 0.0;
            }
        }
        Self(rates)
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

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Euclidean distance to another rate vector of the same length.
    pub fn distance(&self, other: &RateVector) -> f64 {
        euclidean(&self.0, &other.0)
    }
}

impl Index<usize> for RateVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `C(sum_{i in S} h_i P_i, N_0)` for the given state.
pub fn instantaneous_rank(config: &MacConfig, state: &ChannelState, subset: UserSet) -> Result<f64> {
    let region = InstantaneousRegion::new(config, state)?;
    check_subset(subset, config.num_users())?;
    Ok(region.rank(subset))
}

/// Expected instantaneous rank under the stationary law of `fading`.
pub fn throughput_rank(config: &MacConfig, fading: &FadingProcess, subset: UserSet) -> Result<f64> {
    let region = ThroughputRegion::new(config, fading.chains())?;
    check_subset(subset, config.num_users())?;
    Ok(region.rank(subset))
}

fn check_subset(subset: UserSet, num_users: usize) -> Result<()> {
    if subset.is_subset(UserSet::full(num_users)) {
        Ok(())
    } else {
        Err(domain(format!(
            "subset {subset:?} refers to users outside 0..{num_users}"
        )))
    }
}

/// The instantaneous capacity region for one channel state.
#[derive(Debug, Clone, PartialEq)]
pub struct InstantaneousRegion {
    received: Vec<f64>,
    noise: f64,
}

impl InstantaneousRegion {
    pub fn new(config: &MacConfig, state: &ChannelState) -> Result<Self> {
        if state.num_users() != config.num_users() {
            return Err(domain(format!(
                "channel state has {} gains for {} users",
                state.num_users(),
                config.num_users()
            )));
        }
        let received = state
            .gains()
            .iter()
            .zip(config.powers())
            .map(|(h, p)| h * p)
            .collect();
        Ok(Self { received, noise: config.noise() })
    }

    /// Received power `h_i P_i` per user.
    pub fn received_powers(&self) -> &[f64] {
        &self.received
    }
}

impl RankOracle for InstantaneousRegion {
    fn arity(&self) -> usize {
        self.received.len()
    }

    fn rank(&self, set: UserSet) -> f64 {
        let power: f64 = set.iter().map(|i| self.received[i]).sum();
        capacity_unchecked(power, self.noise)
    }
}

/// The throughput region: expectation of the instantaneous rank over the
/// product of per-user stationary laws, summed exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputRegion {
    num_users: usize,
    noise: f64,
    /// (probability, received powers) per joint state with positive mass.
    atoms: Vec<(f64, Vec<f64>)>,
}

impl ThroughputRegion {
    pub fn new(mac: &MacConfig, chains: &[GainChain]) -> Result<Self> {
        let m = mac.num_users();
        if chains.len() != m {
            return Err(config_err_chains(chains.len(), m));
        }
        let mut joint = 1usize;
        for c in chains {
            joint = joint.checked_mul(c.num_states()).filter(|&j| j <= MAX_JOINT_STATES).ok_or_else(|| {
                config(format!(
                    "joint fading state space exceeds {MAX_JOINT_STATES} states"
                ))
            })?;
        }
        let laws = chains
            .iter()
            .map(|c| c.stationary_distribution())
            .collect::<Result<Vec<_>>>()?;

        let mut atoms = Vec::with_capacity(joint);
        let mut idx = vec![0usize; m];
        loop {
            let p: f64 = idx.iter().zip(&laws).map(|(&s, law)| law[s]).product();
            if p > 0.0 {
                let received = idx
                    .iter()
                    .zip(chains)
                    .zip(mac.powers())
                    .map(|((&s, c), pw)| c.states()[s] * pw)
                    .collect();
                atoms.push((p, received));
            }
            // mixed-radix increment
            let mut u = 0;
            loop {
                if u == m {
                    return Ok(Self { num_users: m, noise: mac.noise(), atoms });
                }
                idx[u] += 1;
                if idx[u] < chains[u].num_states() {
                    break;
                }
                idx[u] = 0;
                u += 1;
            }
        }
    }

    /// Number of joint states carrying positive stationary probability.
    pub fn support_size(&self) -> usize {
        self.atoms.len()
    }
}

fn config_err_chains(chains: usize, users: usize) -> crate::Error {
    config(format!("fading describes {chains} users but the channel has {users}"))
}

impl RankOracle for ThroughputRegion {
    fn arity(&self) -> usize {
        self.num_users
    }

    fn rank(&self, set: UserSet) -> f64 {
        if set.is_empty() {
            return 0.0;
        }
        self.atoms
            .iter()
            .map(|(p, received)| {
                let power: f64 = set.iter().map(|i| received[i]).sum();
                p * capacity_unchecked(power, self.noise)
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymatroid::validate_polymatroid;

    fn sym2() -> (MacConfig, ChannelState) {
        (
            MacConfig::new(vec![1.0, 1.0], 1.0).unwrap(),
            ChannelState::new(vec![1.0, 1.0]).unwrap(),
        )
    }

    #[test]
    fn shannon_values() {
        assert_eq!(shannon_capacity(0.0, 1.0).unwrap(), 0.0);
        assert!((shannon_capacity(1.0, 1.0).unwrap() - 0.346574).abs() < 1e-6);
        assert!((shannon_capacity(3.0, 1.0).unwrap() - 2f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn shannon_domain_errors() {
        assert!(shannon_capacity(-1.0, 1.0).is_err());
        assert!(shannon_capacity(1.0, 0.0).is_err());
        assert!(shannon_capacity(f64::NAN, 1.0).is_err());
        assert!(shannon_capacity(1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn instantaneous_rank_examples() {
        let (c, s) = sym2();
        let r = |idx: &[usize]| instantaneous_rank(&c, &s, UserSet::from_indices(idx, 2).unwrap()).unwrap();
        assert_eq!(r(&[]), 0.0);
        assert!((r(&[0]) - 0.346574).abs() < 1e-6);
        assert!((r(&[0, 1]) - 0.549306).abs() < 1e-6);
        assert!(instantaneous_rank(&c, &s, UserSet::singleton(2)).is_err());
    }

    #[test]
    fn config_rejects_bad_inputs() {
        assert!(MacConfig::new(vec![], 1.0).is_err());
        assert!(MacConfig::new(vec![1.0, -0.1], 1.0).is_err());
        assert!(MacConfig::new(vec![1.0], 0.0).is_err());
        assert!(MacConfig::new(vec![f64::INFINITY], 1.0).is_err());
        assert!(ChannelState::new(vec![f64::NAN]).is_err());
        assert!(RateVector::new(vec![-1.0]).is_err());
    }

    #[test]
    fn throughput_rank_examples() {
        let cfg = MacConfig::new(vec![1.0], 1.0).unwrap();
        let chain = GainChain::new(vec![0.5, 1.5], vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let region = ThroughputRegion::new(&cfg, &[chain]).unwrap();
        let expected = 0.5 * (0.5 * 1.5f64.ln() + 0.5 * 2.5f64.ln());
        assert!((region.rank(UserSet::singleton(0)) - expected).abs() < 1e-12);
        assert!((expected - 0.330439).abs() < 1e-6);
        assert_eq!(region.rank(UserSet::EMPTY), 0.0);

        let one = GainChain::constant(1.0);
        let region = ThroughputRegion::new(&cfg, &[one]).unwrap();
        assert!((region.rank(UserSet::singleton(0)) - 0.346574).abs() < 1e-6);
    }

    #[test]
    fn one_state_throughput_equals_instantaneous() {
        let cfg = MacConfig::new(vec![2.0, 0.7, 1.3], 0.5).unwrap();
        let gains = [0.3, 1.7, 2.2];
        let chains: Vec<_> = gains.iter().map(|&g| GainChain::constant(g)).collect();
        let avg = ThroughputRegion::new(&cfg, &chains).unwrap();
        let inst = InstantaneousRegion::new(&cfg, &ChannelState::new(gains.to_vec()).unwrap()).unwrap();
        for bits in 0..8 {
            let s = UserSet::from_bits(bits);
            assert_eq!(avg.rank(s), inst.rank(s));
        }
    }

    #[test]
    fn throughput_region_is_polymatroid() {
        let cfg = MacConfig::new(vec![1.0, 2.0, 0.5], 1.0).unwrap();
        let a = GainChain::new(vec![0.1, 2.0, 4.0], vec![
            vec![0.5, 0.5, 0.0],
            vec![0.2, 0.6, 0.2],
            vec![0.0, 0.7, 0.3],
        ])
        .unwrap();
        let b = GainChain::new(vec![0.5, 1.5], vec![vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap();
        let region = ThroughputRegion::new(&cfg, &[a.clone(), b, a]).unwrap();
        assert_eq!(region.support_size(), 18);
        assert!(validate_polymatroid(&region).unwrap().is_ok());
    }

    #[test]
    fn joint_state_limit_enforced() {
        let cfg = MacConfig::new(vec![1.0; 7], 1.0).unwrap();
        let n = 8;
        let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![1.0 / n as f64; n]).collect();
        let chain = GainChain::new((0..n).map(|i| i as f64).collect(), rows).unwrap();
        // 8^7 > 10^6
        let chains = vec![chain; 7];
        assert!(matches!(ThroughputRegion::new(&cfg, &chains), Err(crate::Error::Config(_))));
    }

    #[test]
    fn rank_monotone_in_parameters() {
        let base = InstantaneousRegion::new(
            &MacConfig::new(vec![1.0, 2.0], 1.0).unwrap(),
            &ChannelState::new(vec![0.5, 0.8]).unwrap(),
        )
        .unwrap();
        let more_gain = InstantaneousRegion::new(
            &MacConfig::new(vec![1.0, 2.0], 1.0).unwrap(),
            &ChannelState::new(vec![0.9, 0.8]).unwrap(),
        )
        .unwrap();
        let more_noise = InstantaneousRegion::new(
            &MacConfig::new(vec![1.0, 2.0], 1.5).unwrap(),
            &ChannelState::new(vec![0.5, 0.8]).unwrap(),
        )
        .unwrap();
        for bits in 0..4 {
            let s = UserSet::from_bits(bits);
            assert!(more_gain.rank(s) >= base.rank(s));
            assert!(more_noise.rank(s) <= base.rank(s));
        }
    }
}
