//! Summary statistics over rate records.

use crate::error::{domain, Result};
use crate::mac::RateVector;

/// `d(t) = || (1/t) sum_{tau <= t} R(tau) - R* ||_2` for every prefix.
pub fn distance_trace<'a, I>(records: I, reference: &RateVector) -> Result<Vec<f64>>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut acc = RunningAverage::new(reference.len());
    let mut out = Vec::new();
    for r in records {
        acc.push(r)?;
        out.push(acc.distance_to(reference.as_slice()));
    }
    if out.is_empty() {
        return Err(domain("distance trace needs at least one rate record"));
    }
    Ok(out)
}

/// Cumulative mean of a stream of rate vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct RunningAverage {
    sums: Vec<f64>,
    count: u64,
}

impl RunningAverage {
    pub fn new(num_users: usize) -> Self {
        Self { sums: vec![0.0; num_users], count: 0 }
    }

    pub fn push(&mut self, rates: &[f64]) -> Result<()> {
        if rates.len() != self.sums.len() {
            return Err(domain(format!(
                "rate record has {} entries, expected {}",
                rates.len(),
                self.sums.len()
            )));
        }
        for (s, r) in self.sums.iter_mut().zip(rates) {
            *s += r;
        }
        self.count += 1;
        Ok(())
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> Vec<f64> {
        let n = self.count.max(1) as f64;
        self.sums.iter().map(|s| s / n).collect()
    }

    pub fn distance_to(&self, reference: &[f64]) -> f64 {
        let n = self.count.max(1) as f64;
        self.sums
            .iter()
            .zip(reference)
            .map(|(s, r)| (s / n - r).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Sample mean and standard error.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
