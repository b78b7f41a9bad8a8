//! Finite-state Markov channel gains, one independent chain per user.

use rand::Rng;

use crate::error::{config, domain, Result};
pub use crate::mac::ChannelState;

const ROW_SUM_TOLERANCE: f64 = 1e-12;
const STATIONARY_TOLERANCE: f64 = 1e-12;

/// A Markov chain over gain levels.
#[derive(Debug, Clone, PartialEq)]
pub struct GainChain {
    states: Vec<f64>,
    transition: Vec<Vec<f64>>,
    initial: Option<Vec<f64>>,
}

impl GainChain {
    /// Validates a row-stochastic, irreducible chain over `states` gains.
    pub fn new(states: Vec<f64>, transition: Vec<Vec<f64>>) -> Result<Self> {
        let n = states.len();
        if n == 0 {
            return Err(config("a gain chain needs at least one state"));
        }
        if let Some(g) = states.iter().find(|g| !g.is_finite() || **g < 0.0) {
            return Err(config(format!("gain levels must be finite and >= 0, got {g}")));
        }
        if transition.len() != n {
            return Err(config(format!(
                "transition matrix has {} rows for {n} states",
                transition.len()
            )));
        }
        for (i, row) in transition.iter().enumerate() {
            if row.len() != n {
                return Err(config(format!(
                    "transition row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(p) = row.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(config(format!("transition row {i} has entry {p} outside [0, 1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(config(format!("transition row {i} sums to {sum}, not 1")));
            }
        }
        let chain = Self { states, transition, initial: None };
        if !chain.is_irreducible() {
            return Err(config("gain chain is reducible: some state cannot reach another"));
        }
        Ok(chain)
    }

    /// A chain that never leaves gain `g`.
    pub fn constant(g: f64) -> Self {
        Self { states: vec![g], transition: vec![vec![1.0]], initial: None }
    }

    /// Overrides the default stationary initial law.
    pub fn with_initial(mut self, initial: Vec<f64>) -> Result<Self> {
        if initial.len() != self.states.len() {
            return Err(config("initial distribution length differs from state count"));
        }
        let sum: f64 = initial.iter().sum();
        if initial.iter().any(|p| !(0.0..=1.0).contains(p)) || (sum - 1.0).abs() > ROW_SUM_TOLERANCE
        {
            return Err(config("initial distribution must be a probability vector"));
        }
        self.initial = Some(initial);
        Ok(self)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[f64] {
        &self.states
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    fn is_irreducible(&self) -> bool {
        let n = self.states.len();
        let reach = |forward: bool| {
            let mut seen = vec![false; n];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(i) = stack.pop() {
                for j in 0..n {
                    let p = if forward { self.transition[i][j] } else { self.transition[j][i] };
                    if p > 0.0 && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(true) && reach(false)
    }

    /// The unique `pi` with `pi P = pi`, `sum pi = 1`.
    pub fn stationary_distribution(&self) -> Result<Vec<f64>> {
        if !self.is_irreducible() {
            return Err(config("stationary law undefined for a reducible chain"));
        }
        let n = self.states.len();
        let mut pi =
            solve_stationary(&self.transition).unwrap_or_else(|| vec![1.0 / n as f64; n]);
        // refine, or converge from uniform when elimination failed
        let mut iters = 0;
        while self.residual(&pi) > STATIONARY_TOLERANCE && iters < 100_000 {
            pi = self.propagate(&pi);
            iters += 1;
        }
        let sum: f64 = pi.iter().sum();
        for p in &mut pi {
            *p = (*p / sum).max(0.0);
        }
        Ok(pi)
    }

    fn propagate(&self, pi: &[f64]) -> Vec<f64> {
        let n = pi.len();
        let mut next = vec![0.0; n];
        for (i, &p) in pi.iter().enumerate() {
            for j in 0..n {
                next[j] += p * self.transition[i][j];
            }
        }
        next
    }

    /// `||pi P - pi||_inf`.
    pub fn residual(&self, pi: &[f64]) -> f64 {
        self.propagate(pi)
            .iter()
            .zip(pi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Draws the next state from row `state`.
    pub fn next_state<R: Rng + ?Sized>(&self, state: usize, rng: &mut R) -> usize {
        sample_index(&self.transition[state], rng)
    }

    /// Stationary mean and standard deviation of the gain.
    pub fn gain_moments(&self) -> Result<(f64, f64)> {
        let pi = self.stationary_distribution()?;
        let mean: f64 = pi.iter().zip(&self.states).map(|(p, g)| p * g).sum();
        let var: f64 = pi
            .iter()
            .zip(&self.states)
            .map(|(p, g)| p * (g - mean) * (g - mean))
            .sum();
        Ok((mean, var.max(0.0).sqrt()))
    }
}

/// Gaussian elimination on `(P^T - I) pi = 0` with the last equation
/// replaced by `sum pi = 1`.
fn solve_stationary(p: &[Vec<f64>]) -> Option<Vec<f64>> {
    let n = p.len();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> =
                (0..n).map(|j| p[j][i] - if i == j { 1.0 } else { 0.0 }).collect();
            row.push(0.0);
            row
        })
        .collect();
    a[n - 1] = vec![1.0; n + 1];

    for col in 0..n {
        let pivot = (col..n).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        for r in 0..n {
            if r != col {
                let factor = a[r][col] / a[col][col];
                if factor != 0.0 {
                    for c in col..=n {
                        a[r][c] -= factor * a[col][c];
                    }
                }
            }
        }
    }
    let pi: Vec<f64> = (0..n).map(|i| a[i][n] / a[i][i]).collect();
    pi.iter().all(|x| x.is_finite()).then_some(pi)
}

fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // round-off in the row sum: fall back to the last state with mass
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// `sigma_H / mean_H` of the stationary gain.
pub fn variation_ratio(chain: &GainChain) -> Result<f64> {
    let (mean, std) = chain.gain_moments()?;
    if mean <= 0.0 {
        return Err(domain("variation ratio undefined for a zero-mean gain"));
    }
    Ok(std / mean)
}

/// Independent per-user gain chains and their current states.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingProcess {
    chains: Vec<GainChain>,
    current: Vec<usize>,
}

impl FadingProcess {
    /// Starts every chain from its initial law (stationary unless overridden).
    pub fn start<R: Rng + ?Sized>(chains: Vec<GainChain>, rng: &mut R) -> Result<Self> {
        if chains.is_empty() {
            return Err(config("fading process needs at least one user"));
        }
        let mut current = Vec::with_capacity(chains.len());
        for c in &chains {
            let law = match &c.initial {
                Some(init) => init.clone(),
                None => c.stationary_distribution()?,
            };
            current.push(sample_index(&law, rng));
        }
        Ok(Self { chains, current })
    }

    /// Starts from explicit per-user state indices.
    pub fn from_states(chains: Vec<GainChain>, current: Vec<usize>) -> Result<Self> {
        if chains.len() != current.len() {
            return Err(config("one initial state per chain is required"));
        }
        if let Some(u) = (0..chains.len()).find(|&u| current[u] >= chains[u].num_states()) {
            return Err(config(format!("initial state of user {u} out of range")));
        }
        Ok(Self { chains, current })
    }

    pub fn chains(&self) -> &[GainChain] {
        &self.chains
    }

    pub fn num_users(&self) -> usize {
        self.chains.len()
    }

    pub fn current_states(&self) -> &[usize] {
        &self.current
    }

    /// Mixed-radix index of the joint state (user 0 least significant).
    pub fn joint_index(&self) -> usize {
        let mut idx = 0;
        let mut radix = 1;
        for (s, c) in self.current.iter().zip(&self.chains) {
            idx += s * radix;
            radix *= c.num_states();
        }
        idx
    }

    pub fn joint_state_count(&self) -> usize {
        self.chains.iter().map(GainChain::num_states).product()
    }

    pub fn gains(&self) -> ChannelState {
        let gains = self
            .current
            .iter()
            .zip(&self.chains)
            .map(|(&s, c)| c.states[s])
            .collect();
        ChannelState::new(gains).expect("chain gains validated at construction")
    }

    /// Advances every chain one transition, users in index order.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> ChannelState {
        for (s, c) in self.current.iter_mut().zip(&self.chains) {
            *s = c.next_state(*s, rng);
        }
        self.gains()
    }
}
