//! Shared fixtures for the criterion benches.

use macrates::sim::{bundled, ModelConfig};
use macrates::{AlphaFairUtility, ChannelState, GainChain, InstantaneousRegion, MacConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// An `m`-user instantaneous region with gains and powers in `[0.1, 5]`.
pub fn random_region(m: usize, seed: u64) -> InstantaneousRegion {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let powers: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..5.0)).collect();
    let gains: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..5.0)).collect();
    let mac = MacConfig::new(powers, 1.0).unwrap();
    InstantaneousRegion::new(&mac, &ChannelState::new(gains).unwrap()).unwrap()
}

pub fn random_weights(m: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    (0..m).map(|_| rng.gen_range(0.1..2.0)).collect()
}

pub fn proportional_fair(m: usize) -> AlphaFairUtility {
    AlphaFairUtility::new(1.0, vec![1.0; m]).unwrap()
}

/// `m` users with independent copies of a three-state chain.
pub fn independent_fading(m: usize) -> (MacConfig, Vec<GainChain>) {
    let chain = GainChain::new(
        vec![0.3, 1.0, 2.0],
        vec![vec![0.6, 0.3, 0.1], vec![0.2, 0.6, 0.2], vec![0.1, 0.3, 0.6]],
    )
    .unwrap();
    (MacConfig::new(vec![2.0; m], 1.0).unwrap(), vec![chain; m])
}

/// The bundled high-variation config cut to `slots` slots and one replication.
pub fn short_run(slots: usize) -> ModelConfig {
    let mut cfg = ModelConfig::parse(bundled::HIGH_VARIATION).unwrap();
    cfg.slots = slots;
    cfg.replications = 1;
    cfg
}
