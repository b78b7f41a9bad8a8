//! Concave utilities of rate vectors.

use crate::error::{domain, Result};

/// Default floor applied to rate arguments before evaluating `f_alpha`.
pub const DEFAULT_FLOOR: f64 = 1e-9;

/// A concave, differentiable utility of a rate vector.
pub trait Utility {
    fn arity(&self) -> usize;
    fn value(&self, rates: &[f64]) -> f64;
    /// Writes `grad u(rates)` into `out`.
    fn gradient(&self, rates: &[f64], out: &mut [f64]);
}

impl<T: Utility + ?Sized> Utility for &T {
    fn arity(&self) -> usize {
        (**self).arity()
    }

    fn value(&self, rates: &[f64]) -> f64 {
        (**self).value(rates)
    }

    fn gradient(&self, rates: &[f64], out: &mut [f64]) {
        (**self).gradient(rates, out)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("alpha must be finite and >= 0, got {alpha}")))
    }
}

#[inline]
fn fair_value(x: f64, alpha: f64, weight: f64, floor: f64) -> f64 {
    let x = x.max(floor);
    if alpha == 1.0 {
        weight * x.ln()
    } else {
        weight * x.powf(1.0 - alpha) / (1.0 - alpha)
    }
}

#[inline]
fn fair_gradient(x: f64, alpha: f64, weight: f64, floor: f64) -> f64 {
    let x = x.max(floor);
    if alpha == 0.0 {
        weight
    } else {
        weight * x.powf(-alpha)
    }
}

/// `w * f_alpha(max(x, floor))` with `f_1 = ln` and
/// `f_alpha(x) = x^(1-alpha) / (1-alpha)` otherwise.
pub fn alpha_fair_value(x: f64, alpha: f64, weight: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if x.is_nan() || x < 0.0 {
        return Err(domain(format!("rate must be >= 0, got {x}")));
    }
    Ok(fair_value(x, alpha, weight, DEFAULT_FLOOR))
}

/// `w * max(x, floor)^(-alpha)`.
pub fn alpha_fair_gradient(x: f64, alpha: f64, weight: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if x.is_nan() || x < 0.0 {
        return Err(domain(format!("rate must be >= 0, got {x}")));
    }
    Ok(fair_gradient(x, alpha, weight, DEFAULT_FLOOR))
}

/// `u(R) = sum_i w_i f_alpha(max(R_i, floor))`.
///
/// `alpha = 0` is the linear utility `sum_i w_i R_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaFairUtility {
    alpha: f64,
    weights: Vec<f64>,
    floor: f64,
}

impl AlphaFairUtility {
    pub fn new(alpha: f64, weights: Vec<f64>) -> Result<Self> {
        Self::with_floor(alpha, weights, DEFAULT_FLOOR)
    }

    pub fn with_floor(alpha: f64, weights: Vec<f64>, floor: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if weights.is_empty() {
            return Err(domain("utility needs at least one weight"));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w <= 0.0) {
            return Err(domain(format!("weights must be finite and > 0, got {w}")));
        }
        if !floor.is_finite() || floor <= 0.0 {
            return Err(domain(format!("floor must be finite and > 0, got {floor}")));
        }
        Ok(Self { alpha, weights, floor })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The same utility over a subset of users, in the given order.
    pub fn restrict(&self, users: &[usize]) -> Result<Self> {
        let weights = users
            .iter()
            .map(|&u| {
                self.weights
                    .get(u)
                    .copied()
                    .ok_or_else(|| domain(format!("user {u} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::with_floor(self.alpha, weights, self.floor)
    }
}

impl Utility for AlphaFairUtility {
    fn arity(&self) -> usize {
        self.weights.len()
    }

    fn value(&self, rates: &[f64]) -> f64 {
        rates
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| fair_value(x, self.alpha, w, self.floor))
            .sum()
    }

    fn gradient(&self, rates: &[f64], out: &mut [f64]) {
        for ((o, &x), &w) in out.iter_mut().zip(rates).zip(&self.weights) {
            *o = fair_gradient(x, self.alpha, w, self.floor);
        }
    }
}
