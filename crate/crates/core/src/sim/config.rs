//! Scenario configuration files.
//!
//! The file is TOML with sections `[mac]`, `[fading]`, `[utility]`,
//! `[controller]` and `[scenario]`; unknown keys are rejected.
//!
//! ```toml
//! [mac]
//! num_users = 2
//! powers = [4.0, 4.0]
//! noise = 1.0
//!
//! [fading]
//! assignment = [0, 0]          # chain index per user
//! [[fading.chains]]
//! states = [0.2, 2.8]
//! transition = [[0.85, 0.15], [0.35, 0.65]]
//!
//! [utility]
//! alpha = 2.0
//! weights = [1.5, 1.0]
//!
//! [controller]
//! K = [1, 10, 100]
//! # D defaults to twice the sum-rate capacity at the largest gains
//!
//! [scenario]
//! slots = 10000
//! replications = 10
//! file_sizes = [10, 100, 1000, 10000]
//! ```

use std::fmt;
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{config, Error, Result};
use crate::fading::GainChain;
use crate::mac::{shannon_capacity, MacConfig, ThroughputRegion};
use crate::polymatroid::{RankOracle, UserSet};
use crate::queueing::ArrivalKind;
use crate::utility::AlphaFairUtility;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    LimitedDuration,
    FileUpload,
    StabilityProbe,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::LimitedDuration => "limited_duration",
            ScenarioKind::FileUpload => "file_upload",
            ScenarioKind::StabilityProbe => "stability_probe",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "limited_duration" => Ok(ScenarioKind::LimitedDuration),
            "file_upload" => Ok(ScenarioKind::FileUpload),
            "stability_probe" => Ok(ScenarioKind::StabilityProbe),
            other => Err(config(format!("unknown scenario `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mac: MacSection,
    fading: FadingSection,
    utility: UtilitySection,
    #[serde(default)]
    controller: ControllerSection,
    #[serde(default)]
    scenario: ScenarioSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct MacSection {
    num_users: usize,
    powers: Vec<f64>,
    noise: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FadingSection {
    chains: Vec<ChainSection>,
    assignment: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainSection {
    states: Vec<f64>,
    transition: Vec<Vec<f64>>,
    initial: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct UtilitySection {
    alpha: f64,
    weights: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ControllerSection {
    #[serde(rename = "K")]
    k: Option<OneOrMany>,
    #[serde(rename = "D")]
    d: Option<f64>,
    jitter: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioSection {
    slots: Option<usize>,
    replications: Option<usize>,
    file_sizes: Option<Vec<f64>>,
    slot_cap: Option<u64>,
    block_length: Option<usize>,
    inside_load: Option<f64>,
    outside_load: Option<f64>,
    arrivals: Option<ArrivalSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArrivalSection {
    kind: String,
    p: Option<f64>,
}

/// Parsed model description, independent of the scenario that runs it.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub mac: MacConfig,
    /// One chain per user, after applying the assignment.
    pub chains: Vec<GainChain>,
    pub utility: AlphaFairUtility,
    /// Queue-based policies to run, one per `K`; may be empty.
    pub controller_gains: Vec<f64>,
    pub arrival_cap: f64,
    pub jitter: bool,
    pub slots: usize,
    pub replications: usize,
    pub file_sizes: Option<Vec<f64>>,
    pub slot_cap: u64,
    pub block_length: usize,
    pub inside_load: f64,
    pub outside_load: f64,
    pub arrivals: Option<ArrivalKind>,
}

pub const DEFAULT_SLOTS: usize = 10_000;
pub const DEFAULT_REPLICATIONS: usize = 10;
pub const DEFAULT_SLOT_CAP: u64 = 10_000_000;
pub const DEFAULT_BLOCK_LENGTH: usize = 10;
pub const DEFAULT_K_SWEEP: [f64; 3] = [1.0, 10.0, 100.0];

impl ModelConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| config(format!("invalid config file: {e}")))?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawConfig) -> Result<Self> {
        let m = raw.mac.num_users;
        if raw.mac.powers.len() != m {
            return Err(config(format!(
                "mac.powers has {} entries but mac.num_users = {m}",
                raw.mac.powers.len()
            )));
        }
        let mac = MacConfig::new(raw.mac.powers, raw.mac.noise)
            .map_err(|e| config(format!("[mac]: {}", strip(e))))?;

        if raw.fading.chains.is_empty() {
            return Err(config("fading.chains must list at least one chain"));
        }
        let mut pool = Vec::with_capacity(raw.fading.chains.len());
        for (i, c) in raw.fading.chains.into_iter().enumerate() {
            let mut chain = GainChain::new(c.states, c.transition)
                .map_err(|e| config(format!("fading.chains[{i}]: {}", strip(e))))?;
            if let Some(init) = c.initial {
                chain = chain
                    .with_initial(init)
                    .map_err(|e| config(format!("fading.chains[{i}].initial: {}", strip(e))))?;
            }
            pool.push(chain);
        }
        let assignment = match raw.fading.assignment {
            Some(a) => a,
            None if pool.len() == 1 => vec![0; m],
            None if pool.len() == m => (0..m).collect(),
            None => {
                return Err(config(format!(
                    "fading.assignment is required when {} chains describe {m} users",
                    pool.len()
                )))
            }
        };
        if assignment.len() != m {
            return Err(config(format!(
                "fading.assignment has {} entries for {m} users",
                assignment.len()
            )));
        }
        let chains = assignment
            .iter()
            .map(|&c| {
                pool.get(c)
                    .cloned()
                    .ok_or_else(|| config(format!("fading.assignment refers to missing chain {c}")))
            })
            .collect::<Result<Vec<_>>>()?;

        if raw.utility.weights.len() != m {
            return Err(config(format!(
                "utility.weights has {} entries for {m} users",
                raw.utility.weights.len()
            )));
        }
        let utility = AlphaFairUtility::new(raw.utility.alpha, raw.utility.weights)
            .map_err(|e| config(format!("[utility]: {}", strip(e))))?;

        let controller_gains = match raw.controller.k {
            None => DEFAULT_K_SWEEP.to_vec(),
            Some(OneOrMany::One(k)) => vec![k],
            Some(OneOrMany::Many(ks)) => ks,
        };
        if controller_gains.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
            return Err(config("controller.K values must be finite and > 0"));
        }
        if !controller_gains.is_empty() && utility.alpha() <= 0.0 {
            return Err(config(
                "controller.K needs utility.alpha > 0; set K = [] to run the greedy path alone",
            ));
        }
        let arrival_cap = match raw.controller.d {
            Some(d) if d.is_finite() && d > 0.0 => d,
            Some(d) => return Err(config(format!("controller.D must be finite and > 0, got {d}"))),
            None => default_arrival_cap(&mac, &chains)?,
        };

        let s = raw.scenario;
        let slots = s.slots.unwrap_or(DEFAULT_SLOTS);
        if slots == 0 {
            return Err(config("scenario.slots must be >= 1"));
        }
        let replications = s.replications.unwrap_or(DEFAULT_REPLICATIONS);
        if replications == 0 {
            return Err(config("scenario.replications must be >= 1"));
        }
        if let Some(sizes) = &s.file_sizes {
            if sizes.is_empty() || sizes.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
                return Err(config("scenario.file_sizes must be a nonempty list of positive sizes"));
            }
        }
        let block_length = s.block_length.unwrap_or(DEFAULT_BLOCK_LENGTH);
        if block_length == 0 {
            return Err(config("scenario.block_length must be >= 1"));
        }
        let inside_load = s.inside_load.unwrap_or(0.9);
        let outside_load = s.outside_load.unwrap_or(1.1);
        if !(inside_load.is_finite() && inside_load >= 0.0 && inside_load < 1.0) {
            return Err(config("scenario.inside_load must be in [0, 1)"));
        }
        if !(outside_load.is_finite() && outside_load > 1.0) {
            return Err(config("scenario.outside_load must be > 1"));
        }
        let arrivals = s.arrivals.map(parse_arrivals).transpose()?;

        Ok(Self {
            mac,
            chains,
            utility,
            controller_gains,
            arrival_cap,
            jitter: raw.controller.jitter.unwrap_or(false),
            slots,
            replications,
            file_sizes: s.file_sizes,
            slot_cap: s.slot_cap.unwrap_or(DEFAULT_SLOT_CAP),
            block_length,
            inside_load,
            outside_load,
            arrivals,
        })
    }

    pub fn num_users(&self) -> usize {
        self.mac.num_users()
    }

    /// Checks the fields a scenario needs before it runs.
    pub fn validate_for(&self, kind: ScenarioKind) -> Result<()> {
        match kind {
            ScenarioKind::LimitedDuration => Ok(()),
            ScenarioKind::FileUpload => {
                if self.file_sizes.is_none() {
                    return Err(config("file_upload requires scenario.file_sizes"));
                }
                // every user needs positive throughput or its upload never ends
                let region = ThroughputRegion::new(&self.mac, &self.chains)?;
                if let Some(u) = (0..self.num_users()).find(|&u| region.rank(UserSet::singleton(u)) <= 0.0) {
                    return Err(config(format!(
                        "file_upload: user {u} has zero throughput capacity and can never finish"
                    )));
                }
                Ok(())
            }
            ScenarioKind::StabilityProbe => {
                if self.arrivals.is_none() {
                    return Err(config("stability_probe requires [scenario.arrivals]"));
                }
                if self.slots < crate::queueing::StabilityTest::default().min_slots {
                    return Err(config(format!(
                        "stability_probe needs scenario.slots >= {}",
                        crate::queueing::StabilityTest::default().min_slots
                    )));
                }
                Ok(())
            }
        }
    }
}

/// `2 C(sum_i max_h_i P_i, N_0)`: twice the sum capacity at the best gains.
pub fn default_arrival_cap(mac: &MacConfig, chains: &[GainChain]) -> Result<f64> {
    let power: f64 = chains
        .iter()
        .zip(mac.powers())
        .map(|(c, p)| c.states().iter().copied().fold(0.0, f64::max) * p)
        .sum();
    let cap = 2.0 * shannon_capacity(power, mac.noise())?;
    if cap > 0.0 {
        Ok(cap)
    } else {
        Err(config("controller.D default is zero: every gain level is zero"))
    }
}

fn parse_arrivals(a: ArrivalSection) -> Result<ArrivalKind> {
    match (a.kind.as_str(), a.p) {
        ("deterministic", None) => Ok(ArrivalKind::Deterministic),
        ("uniform", None) => Ok(ArrivalKind::UniformJitter),
        ("bernoulli", p) => {
            let p = p.unwrap_or(0.5);
            if p > 0.0 && p <= 1.0 {
                Ok(ArrivalKind::BernoulliScaled { p })
            } else {
                Err(config(format!("scenario.arrivals.p must be in (0, 1], got {p}")))
            }
        }
        (k @ ("deterministic" | "uniform"), Some(_)) => {
            Err(config(format!("scenario.arrivals.p is only valid for bernoulli, not {k}")))
        }
        (other, _) => Err(config(format!(
            "scenario.arrivals.kind must be deterministic, bernoulli or uniform, got `{other}`"
        ))),
    }
}

fn strip(e: Error) -> String {
    match e {
        Error::Domain(m) | Error::Config(m) | Error::Runtime(m) => m,
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [mac]
        num_users = 2
        powers = [1.0, 1.0]
        noise = 1.0

        [fading]
        [[fading.chains]]
        states = [1.0]
        transition = [[1.0]]

        [utility]
        alpha = 1.0
        weights = [1.0, 1.0]
    "#;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = ModelConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.chains.len(), 2);
        assert_eq!(c.controller_gains, DEFAULT_K_SWEEP.to_vec());
        assert_eq!(c.slots, DEFAULT_SLOTS);
        assert_eq!(c.replications, DEFAULT_REPLICATIONS);
        // 2 * 0.5 ln(1 + 2)
        assert!((c.arrival_cap - 3f64.ln()).abs() < 1e-12);
        assert!(c.validate_for(ScenarioKind::LimitedDuration).is_ok());
        assert!(c.validate_for(ScenarioKind::FileUpload).is_err());
        assert!(c.validate_for(ScenarioKind::StabilityProbe).is_err());
    }

    #[test]
    fn unknown_keys_fail_closed() {
        let text = MINIMAL.replace("noise = 1.0", "noise = 1.0\nbandwidth = 3.0");
        let err = ModelConfig::parse(&text).unwrap_err();
        assert!(matches!(&err, Error::Config(m) if m.contains("bandwidth")), "{err}");
        let text = format!("{MINIMAL}\n[extra]\nx = 1\n");
        assert!(ModelConfig::parse(&text).is_err());
    }

    #[test]
    fn errors_name_the_field() {
        let text = MINIMAL.replace("powers = [1.0, 1.0]", "powers = [1.0]");
        let err = ModelConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("mac.powers"), "{err}");

        let text = MINIMAL.replace("transition = [[1.0]]", "transition = [[0.5]]");
        let err = ModelConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("fading.chains[0]"), "{err}");

        let text = MINIMAL.replace("weights = [1.0, 1.0]", "weights = [1.0, -1.0]");
        let err = ModelConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("[utility]"), "{err}");
    }

    #[test]
    fn degenerate_regions_are_rejected() {
        let text = MINIMAL.replace("noise = 1.0", "noise = 0.0");
        assert!(ModelConfig::parse(&text).is_err());
        let text = MINIMAL.replace("states = [1.0]", "states = [inf]");
        assert!(ModelConfig::parse(&text).is_err());
        let dead = format!(
            "{}\n[controller]\nD = 1.0\n[scenario]\nfile_sizes = [10.0]\n",
            MINIMAL.replace("states = [1.0]", "states = [0.0]")
        );
        let c = ModelConfig::parse(&dead).unwrap();
        assert!(c.validate_for(ScenarioKind::FileUpload).is_err());
    }

    #[test]
    fn controller_and_arrivals() {
        let text = format!(
            "{MINIMAL}\n[controller]\nK = 5\nD = 2.5\njitter = true\n[scenario]\nslots = 20000\n[scenario.arrivals]\nkind = \"bernoulli\"\np = 0.25\n"
        );
        let c = ModelConfig::parse(&text).unwrap();
        assert_eq!(c.controller_gains, vec![5.0]);
        assert_eq!(c.arrival_cap, 2.5);
        assert!(c.jitter);
        assert_eq!(c.arrivals, Some(ArrivalKind::BernoulliScaled { p: 0.25 }));
        assert!(c.validate_for(ScenarioKind::StabilityProbe).is_ok());

        let bad = format!("{MINIMAL}\n[scenario.arrivals]\nkind = \"poisson\"\n");
        assert!(ModelConfig::parse(&bad).is_err());
    }

    #[test]
    fn integer_literals_are_accepted_for_reals() {
        let text = MINIMAL.replace("noise = 1.0", "noise = 2").replace("powers = [1.0, 1.0]", "powers = [1, 3]");
        let c = ModelConfig::parse(&text).unwrap();
        assert_eq!(c.mac.noise(), 2.0);
        assert_eq!(c.mac.powers(), &[1.0, 3.0]);
    }

    #[test]
    fn linear_utility_needs_an_empty_sweep() {
        let linear = MINIMAL.replace("alpha = 1.0", "alpha = 0.0");
        let err = ModelConfig::parse(&linear).unwrap_err().to_string();
        assert!(err.contains("controller.K"), "{err}");
        let c = ModelConfig::parse(&format!("{linear}\n[controller]\nK = []\n")).unwrap();
        assert!(c.controller_gains.is_empty());
    }

    #[test]
    fn assignment_maps_chains_to_users() {
        let text = r#"
            [mac]
            num_users = 3
            powers = [1.0, 1.0, 1.0]
            noise = 1.0
            [fading]
            assignment = [1, 0, 1]
            [[fading.chains]]
            states = [1.0]
            transition = [[1.0]]
            [[fading.chains]]
            states = [2.0]
            transition = [[1.0]]
            [utility]
            alpha = 0.0
            weights = [1.0, 1.0, 1.0]
            [controller]
            K = []
        "#;
        let c = ModelConfig::parse(text).unwrap();
        let g: Vec<f64> = c.chains.iter().map(|c| c.states()[0]).collect();
        assert_eq!(g, vec![2.0, 1.0, 2.0]);
        assert!(ModelConfig::parse(&text.replace("[1, 0, 1]", "[1, 0, 2]")).is_err());
    }

    #[test]
    fn scenario_names_round_trip() {
        for k in [ScenarioKind::LimitedDuration, ScenarioKind::FileUpload, ScenarioKind::StabilityProbe] {
            assert_eq!(k.as_str().parse::<ScenarioKind>().unwrap(), k);
        }
        assert!("bogus".parse::<ScenarioKind>().is_err());
    }
}
