//! Optimization over a polymatroid `{R >= 0 : R(S) <= f(S) for all S}` given
//! only by its rank oracle `f`.
//!
//! Linear objectives are maximized exactly by the greedy vertex: sort users by
//! weight and hand each its marginal rank. Concave objectives use
//! conditional-gradient (Frank-Wolfe) iterations whose linear subproblem is
//! that same greedy step.

use std::fmt;

use crate::error::{domain, Error, Result};
use crate::mac::RateVector;
use crate::utility::Utility;
use crate::TOLERANCE;

/// Largest arity representable by [`UserSet`].
pub const MAX_ARITY: usize = 32;

/// Largest arity for which [`validate_polymatroid`] enumerates subset pairs.
pub const MAX_VALIDATE_ARITY: usize = 10;

/// Largest arity for which [`contains`] scans all subset constraints.
pub const MAX_CONTAINS_ARITY: usize = 20;

/// A subset of users stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct UserSet(u32);

impl UserSet {
    pub const EMPTY: UserSet = UserSet(0);

    pub fn full(num_users: usize) -> Self {
        debug_assert!(num_users <= MAX_ARITY);
        if num_users == MAX_ARITY {
            UserSet(u32::MAX)
        } else {
            UserSet((1u32 << num_users) - 1)
        }
    }

    pub fn singleton(user: usize) -> Self {
        UserSet(1u32 << user)
    }

    pub fn from_bits(bits: u32) -> Self {
        UserSet(bits)
    }

    /// Builds a set from user indices, rejecting indices `>= arity`.
    pub fn from_indices(users: &[usize], arity: usize) -> Result<Self> {
        let mut set = UserSet::EMPTY;
        for &u in users {
            if u >= arity || u >= MAX_ARITY {
                return Err(domain(format!("user index {u} out of range for {arity} users")));
            }
            set = set.with(u);
        }
        Ok(set)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, user: usize) -> bool {
        user < MAX_ARITY && self.0 & (1 << user) != 0
    }

    #[must_use]
    pub fn with(self, user: usize) -> Self {
        UserSet(self.0 | (1 << user))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: UserSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: UserSet) -> Self {
        UserSet(self.0 | other.0)
    }

    pub fn intersection(self, other: UserSet) -> Self {
        UserSet(self.0 & other.0)
    }

    /// Members in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }
}

impl fmt::Debug for UserSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A set function `S -> f(S)` in nats per slot.
///
/// Implementations must be deterministic, normalized (`f(EMPTY) == 0`),
/// monotone and submodular. [`validate_polymatroid`] checks this for small
/// arities.
pub trait RankOracle {
    fn arity(&self) -> usize;
    fn rank(&self, set: UserSet) -> f64;
}

impl<T: RankOracle + ?Sized> RankOracle for &T {
    fn arity(&self) -> usize {
        (**self).arity()
    }

    fn rank(&self, set: UserSet) -> f64 {
        (**self).rank(set)
    }
}

/// Adapts a closure into a rank oracle.
pub struct FnOracle<F> {
    arity: usize,
    f: F,
}

impl<F: Fn(UserSet) -> f64> FnOracle<F> {
    pub fn new(arity: usize, f: F) -> Self {
        Self { arity, f }
    }
}

impl<F: Fn(UserSet) -> f64> RankOracle for FnOracle<F> {
    fn arity(&self) -> usize {
        self.arity
    }

    fn rank(&self, set: UserSet) -> f64 {
        (self.f)(set)
    }
}

/// A rank oracle with every subset value precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct TableOracle {
    arity: usize,
    values: Vec<f64>,
}

impl TableOracle {
    pub const MAX_ARITY: usize = 24;

    pub fn tabulate(oracle: &impl RankOracle) -> Result<Self> {
        let arity = oracle.arity();
        if arity > Self::MAX_ARITY {
            return Err(domain(format!(
                "cannot tabulate {arity} users (limit {})",
                Self::MAX_ARITY
            )));
        }
        let values = (0..1u32 << arity)
            .map(|b| oracle.rank(UserSet::from_bits(b)))
            .collect();
        Ok(Self { arity, values })
    }
}

impl RankOracle for TableOracle {
    fn arity(&self) -> usize {
        self.arity
    }

    fn rank(&self, set: UserSet) -> f64 {
        self.values[set.bits() as usize]
    }
}

/// The polymatroid restricted to a subset of users, reindexed `0..users.len()`.
pub struct Restricted<'a, O: ?Sized> {
    inner: &'a O,
    users: Vec<usize>,
}

impl<'a, O: RankOracle + ?Sized> Restricted<'a, O> {
    pub fn new(inner: &'a O, users: Vec<usize>) -> Result<Self> {
        if let Some(&u) = users.iter().find(|&&u| u >= inner.arity()) {
            return Err(domain(format!("user {u} out of range for {} users", inner.arity())));
        }
        Ok(Self { inner, users })
    }

    pub fn users(&self) -> &[usize] {
        &self.users
    }
}

impl<O: RankOracle + ?Sized> RankOracle for Restricted<'_, O> {
    fn arity(&self) -> usize {
        self.users.len()
    }

    fn rank(&self, set: UserSet) -> f64 {
        let mapped = set
            .iter()
            .fold(UserSet::EMPTY, |acc, i| acc.with(self.users[i]));
        self.inner.rank(mapped)
    }
}

/// One failed polymatroid axiom.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Normalization { value: f64 },
    Monotonicity { subset: UserSet, superset: UserSet, excess: f64 },
    Submodularity { s: UserSet, t: UserSet, excess: f64 },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks normalization, monotonicity over every nested pair and
/// submodularity over every unordered pair of subsets.
pub fn validate_polymatroid(oracle: &impl RankOracle) -> Result<ValidationReport> {
    let m = oracle.arity();
    if m > MAX_VALIDATE_ARITY {
        return Err(domain(format!(
            "validation enumerates 4^M subset pairs; arity {m} exceeds {MAX_VALIDATE_ARITY}"
        )));
    }
    let table = TableOracle::tabulate(oracle)?;
    let f = |b: u32| table.values[b as usize];
    let mut report = ValidationReport::default();

    if f(0).abs() > TOLERANCE {
        report.violations.push(Violation::Normalization { value: f(0) });
    }
    let n = 1u32 << m;
    for t in 0..n {
        // every proper subset of t
        let mut s = t;
        while s != 0 {
            s = (s - 1) & t;
            let excess = f(s) - f(t);
            if excess > TOLERANCE {
                report.violations.push(Violation::Monotonicity {
                    subset: UserSet(s),
                    superset: UserSet(t),
                    excess,
                });
            }
        }
    }
    for s in 0..n {
        for t in (s + 1)..n {
            let excess = f(s | t) + f(s & t) - f(s) - f(t);
            if excess > TOLERANCE {
                report.violations.push(Violation::Submodularity {
                    s: UserSet(s),
                    t: UserSet(t),
                    excess,
                });
            }
        }
    }
    Ok(report)
}

/// Whether `point` satisfies every subset constraint (within
/// [`TOLERANCE`]) and is nonnegative.
pub fn contains(oracle: &impl RankOracle, point: &[f64]) -> Result<bool> {
    let m = oracle.arity();
    if point.len() != m {
        return Err(domain(format!("point has {} entries for {m} users", point.len())));
    }
    if m > MAX_CONTAINS_ARITY {
        return Err(domain(format!(
            "membership scans 2^M constraints; arity {m} exceeds {MAX_CONTAINS_ARITY}"
        )));
    }
    if point.iter().any(|x| !x.is_finite() || *x < -TOLERANCE) {
        return Ok(false);
    }
    let n = 1usize << m;
    let mut sums = vec![0.0; n];
    for b in 1..n {
        let low = b.trailing_zeros() as usize;
        sums[b] = sums[b & (b - 1)] + point[low];
        if sums[b] > oracle.rank(UserSet(b as u32)) + TOLERANCE {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A vertex of the polymatroid and the ordering that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexAllocation {
    pub permutation: Vec<usize>,
    pub rates: RateVector,
}

/// The marginal allocation `R[pi(k)] = f(pi(..=k)) - f(pi(..k))`.
pub fn vertex(oracle: &impl RankOracle, permutation: &[usize]) -> Result<VertexAllocation> {
    let m = oracle.arity();
    if permutation.len() != m {
        return Err(domain(format!(
            "permutation has {} entries for {m} users",
            permutation.len()
        )));
    }
    let mut seen = UserSet::EMPTY;
    for &u in permutation {
        if u >= m || seen.contains(u) {
            return Err(domain(format!("{permutation:?} is not a permutation of 0..{m}")));
        }
        seen = seen.with(u);
    }
    Ok(VertexAllocation {
        permutation: permutation.to_vec(),
        rates: vertex_unchecked(oracle, permutation),
    })
}

fn vertex_unchecked(oracle: &impl RankOracle, permutation: &[usize]) -> RateVector {
    let mut rates = vec![0.0; oracle.arity()];
    let mut prefix = UserSet::EMPTY;
    let mut prev = 0.0;
    for &u in permutation {
        prefix = prefix.with(u);
        let cur = oracle.rank(prefix);
        rates[u] = cur - prev;
        prev = cur;
    }
    RateVector::from_solver(rates)
}

/// Users ordered by descending weight, ties by ascending index.
pub fn greedy_order(weights: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..weights.len()).collect();
    // stable sort keeps ascending index among equal weights
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]));
    order
}

/// Exact maximizer of `sum_i w_i R_i` over the polymatroid.
pub fn maximize_linear(oracle: &impl RankOracle, weights: &[f64]) -> Result<RateVector> {
    let m = oracle.arity();
    if weights.len() != m {
        return Err(domain(format!("{} weights for {m} users", weights.len())));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(domain(format!("weights must be finite and >= 0, got {w}")));
    }
    Ok(vertex_unchecked(oracle, &greedy_order(weights)))
}

/// Linear maximization for arbitrary finite weights: users with negative
/// weight are held at zero.
fn linear_step(oracle: &impl RankOracle, weights: &[f64]) -> Vec<f64> {
    let order = greedy_order(weights);
    let mut v = vec![0.0; weights.len()];
    let mut prefix = UserSet::EMPTY;
    let mut prev = 0.0;
    for u in order {
        if weights[u] < 0.0 {
            break;
        }
        prefix = prefix.with(u);
        let cur = oracle.rank(prefix);
        v[u] = (cur - prev).max(0.0);
        prev = cur;
    }
    v
}

/// Step-size schedule for the conditional-gradient iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    /// `2 / (k + 2)` at iteration `k`.
    Classic,
    /// Exact maximization of the utility along the segment to the new vertex.
    LineSearch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Target Frank-Wolfe duality gap.
    pub tol: f64,
    pub max_iters: usize,
    pub step: StepRule,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-6, max_iters: 10_000, step: StepRule::LineSearch }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcaveSolution {
    pub rates: RateVector,
    /// `max_v grad u(x) . (v - x)` at the returned point.
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Maximizes a concave utility over the polymatroid.
///
/// Returns the first iterate whose duality gap is at most `opts.tol`, or the
/// last iterate with `converged == false` once `opts.max_iters` is reached.
pub fn maximize_concave(
    oracle: &impl RankOracle,
    utility: &(impl Utility + ?Sized),
    opts: &SolverOptions,
) -> Result<ConcaveSolution> {
    let m = oracle.arity();
    if utility.arity() != m {
        return Err(domain(format!(
            "utility over {} users for a region of {m}",
            utility.arity()
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(domain(format!("tolerance must be > 0, got {}", opts.tol)));
    }

    let mut x = initial_point(oracle);
    let mut grad = vec![0.0; m];
    let mut dir = vec![0.0; m];
    let mut trial = vec![0.0; m];

    for k in 0..=opts.max_iters {
        utility.gradient(&x, &mut grad);
        if let Some(g) = grad.iter().find(|g| !g.is_finite()) {
            return Err(Error::Solver {
                iteration: k,
                message: format!("utility gradient {g} at iterate {x:?}"),
            });
        }
        let v = linear_step(oracle, &grad);
        let mut gap = 0.0;
        for i in 0..m {
            dir[i] = v[i] - x[i];
            gap += grad[i] * dir[i];
        }
        if gap <= opts.tol || k == opts.max_iters {
            return Ok(ConcaveSolution {
                rates: RateVector::from_solver(x),
                gap: gap.max(0.0),
                iterations: k,
                converged: gap <= opts.tol,
            });
        }
        let gamma = match opts.step {
            StepRule::Classic => 2.0 / (k as f64 + 2.0),
            StepRule::LineSearch => line_search(utility, &x, &dir, &mut trial, &mut grad),
        };
        for i in 0..m {
            x[i] += gamma * dir[i];
        }
    }
    unreachable!("loop returns at max_iters")
}

/// Identity vertex, blended with the barycenter of all single-transposition
/// vertices when it has a zero coordinate.
fn initial_point(oracle: &impl RankOracle) -> Vec<f64> {
    let m = oracle.arity();
    let identity: Vec<usize> = (0..m).collect();
    let start = vertex_unchecked(oracle, &identity).into_vec();
    if m < 2 || start.iter().all(|&r| r > 0.0) {
        return start;
    }
    let mut bary = vec![0.0; m];
    let mut count = 0.0;
    for i in 0..m {
        for j in (i + 1)..m {
            let mut perm = identity.clone();
            perm.swap(i, j);
            for (b, r) in bary.iter_mut().zip(vertex_unchecked(oracle, &perm).as_slice()) {
                *b += r;
            }
            count += 1.0;
        }
    }
    start
        .iter()
        .zip(&bary)
        .map(|(s, b)| 0.5 * s + 0.5 * b / count)
        .collect()
}

/// Bisection on the directional derivative `grad u(x + g d) . d` over
/// `g` in `[0, 1]`.
fn line_search(
    utility: &(impl Utility + ?Sized),
    x: &[f64],
    dir: &[f64],
    trial: &mut [f64],
    grad: &mut [f64],
) -> f64 {
    let slope_at = |g: f64, trial: &mut [f64], grad: &mut [f64]| {
        for i in 0..x.len() {
            trial[i] = x[i] + g * dir[i];
        }
        utility.gradient(trial, grad);
        grad.iter().zip(dir).map(|(a, b)| a * b).sum::<f64>()
    };
    if slope_at(1.0, trial, grad) >= 0.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let s = slope_at(mid, trial, grad);
        if s.is_nan() || s < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mac::{ChannelState, InstantaneousRegion, MacConfig};
    use crate::utility::AlphaFairUtility;

    fn sym2() -> InstantaneousRegion {
        InstantaneousRegion::new(
            &MacConfig::new(vec![1.0, 1.0], 1.0).unwrap(),
            &ChannelState::new(vec![1.0, 1.0]).unwrap(),
        )
        .unwrap()
    }

    const F1: f64 = 0.346_573_590_279_972_6; // 0.5 ln 2
    const F12: f64 = 0.549_306_144_334_054_8; // 0.5 ln 3

    #[test]
    fn user_set_basics() {
        let s = UserSet::from_indices(&[0, 2], 3).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(s.len(), 2);
        assert!(s.is_subset(UserSet::full(3)));
        assert!(!UserSet::full(3).is_subset(s));
        assert!(UserSet::from_indices(&[3], 3).is_err());
        assert_eq!(UserSet::full(32).len(), 32);
    }

    #[test]
    fn validation_accepts_gaussian_and_zero() {
        let region = InstantaneousRegion::new(
            &MacConfig::new(vec![1.0, 2.5, 0.3], 0.7).unwrap(),
            &ChannelState::new(vec![0.9, 0.1, 3.0]).unwrap(),
        )
        .unwrap();
        assert!(validate_polymatroid(&region).unwrap().is_ok());
        assert!(validate_polymatroid(&FnOracle::new(4, |_| 0.0)).unwrap().is_ok());
    }

    #[test]
    fn validation_reports_squared_cardinality() {
        let oracle = FnOracle::new(2, |s: UserSet| (s.len() * s.len()) as f64);
        let report = validate_polymatroid(&oracle).unwrap();
        assert_eq!(
            report.violations,
            vec![Violation::Submodularity {
                s: UserSet::singleton(0),
                t: UserSet::singleton(1),
                excess: 2.0
            }]
        );
    }

    #[test]
    fn validation_reports_normalization_and_monotonicity() {
        let oracle = FnOracle::new(2, |s: UserSet| if s.len() == 2 { 0.5 } else { 1.0 });
        let report = validate_polymatroid(&oracle).unwrap();
        assert!(report.violations.contains(&Violation::Normalization { value: 1.0 }));
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Monotonicity { superset, .. } if *superset == UserSet::full(2))));
    }

    #[test]
    fn validation_refuses_large_arity() {
        assert!(validate_polymatroid(&FnOracle::new(11, |_| 0.0)).is_err());
    }

    #[test]
    fn membership() {
        let r = sym2();
        assert!(contains(&r, &[0.0, 0.0]).unwrap());
        assert!(contains(&r, &[F1, F12 - F1]).unwrap());
        assert!(contains(&r, &[0.346573, 0.202733]).unwrap());
        assert!(!contains(&r, &[0.35, 0.35]).unwrap());
        assert!(!contains(&r, &[-0.1, 0.0]).unwrap());
        assert!(contains(&r, &[0.1]).is_err());
    }

    #[test]
    fn vertices() {
        let r = sym2();
        let v = vertex(&r, &[0, 1]).unwrap();
        assert!((v.rates[0] - F1).abs() < 1e-12);
        assert!((v.rates[1] - (F12 - F1)).abs() < 1e-12);
        assert!((v.rates[1] - 0.202733).abs() < 1e-6);
        let w = vertex(&r, &[1, 0]).unwrap();
        assert!((w.rates[0] - (F12 - F1)).abs() < 1e-12);
        assert!((w.rates[1] - F1).abs() < 1e-12);
        assert!(vertex(&r, &[0, 0]).is_err());
        assert!(vertex(&r, &[0]).is_err());

        let single = FnOracle::new(1, |s: UserSet| if s.is_empty() { 0.0 } else { 0.7 });
        assert_eq!(vertex(&single, &[0]).unwrap().rates.as_slice(), &[0.7]);
    }

    #[test]
    fn linear_maximization() {
        let r = sym2();
        let a = maximize_linear(&r, &[2.0, 1.0]).unwrap();
        assert!((a[0] - F1).abs() < 1e-12);
        let obj = 2.0 * a[0] + a[1];
        assert!((obj - 0.895880).abs() < 1e-6);
        assert_eq!(maximize_linear(&r, &[1.0, 1.0]).unwrap(), a);
        let b = maximize_linear(&r, &[0.0, 1.0]).unwrap();
        assert!((b[1] - F1).abs() < 1e-12);
        assert!((b[0] - (F12 - F1)).abs() < 1e-12);
        assert!(maximize_linear(&r, &[-1.0, 1.0]).is_err());
        assert!(maximize_linear(&r, &[f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn concave_log_symmetric() {
        let r = sym2();
        let u = AlphaFairUtility::new(1.0, vec![1.0, 1.0]).unwrap();
        let sol = maximize_concave(&r, &u, &SolverOptions::default()).unwrap();
        assert!(sol.converged, "{sol:?}");
        assert!((sol.rates[0] - 0.274653).abs() < 1e-5, "{:?}", sol);
        assert!((sol.rates[1] - 0.274653).abs() < 1e-5);
        assert!(contains(&r, sol.rates.as_slice()).unwrap());
    }

    #[test]
    fn concave_linear_matches_vertex() {
        let r = sym2();
        let u = AlphaFairUtility::new(0.0, vec![2.0, 1.0]).unwrap();
        let sol = maximize_concave(&r, &u, &SolverOptions::default()).unwrap();
        let lin = maximize_linear(&r, &[2.0, 1.0]).unwrap();
        assert!(sol.rates.distance(&lin) < 1e-6);
    }

    #[test]
    fn concave_gap_reported_when_iterations_exhausted() {
        let r = sym2();
        let u = AlphaFairUtility::new(2.0, vec![1.5, 1.0]).unwrap();
        let opts = SolverOptions { tol: 1e-14, max_iters: 3, step: StepRule::Classic };
        let sol = maximize_concave(&r, &u, &opts).unwrap();
        assert!(!sol.converged);
        assert_eq!(sol.iterations, 3);
        assert!(sol.gap > 1e-14);
    }

    #[test]
    fn concave_rejects_bad_tolerance_and_arity() {
        let r = sym2();
        let u = AlphaFairUtility::new(1.0, vec![1.0, 1.0]).unwrap();
        let opts = SolverOptions { tol: 0.0, ..Default::default() };
        assert!(maximize_concave(&r, &u, &opts).is_err());
        let u3 = AlphaFairUtility::new(1.0, vec![1.0; 3]).unwrap();
        assert!(maximize_concave(&r, &u3, &SolverOptions::default()).is_err());
    }

    #[test]
    fn zero_region_gives_origin() {
        let r = FnOracle::new(2, |_| 0.0);
        let u = AlphaFairUtility::new(1.0, vec![1.0, 1.0]).unwrap();
        let sol = maximize_concave(&r, &u, &SolverOptions::default()).unwrap();
        assert_eq!(sol.rates.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn initial_point_blends_when_vertex_touches_axis() {
        // user 1 has no capacity left after user 0 at the identity vertex
        let r = FnOracle::new(2, |s: UserSet| match s.bits() {
            0 => 0.0,
            1 => 1.0,
            2 => 0.5,
            _ => 1.0,
        });
        let x = initial_point(&r);
        assert!((x[0] - 0.75).abs() < 1e-12 && (x[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn restricted_oracle_reindexes() {
        let r = InstantaneousRegion::new(
            &MacConfig::new(vec![1.0, 2.0, 3.0], 1.0).unwrap(),
            &ChannelState::new(vec![1.0, 1.0, 1.0]).unwrap(),
        )
        .unwrap();
        let sub = Restricted::new(&r, vec![2, 0]).unwrap();
        assert_eq!(sub.arity(), 2);
        assert_eq!(sub.rank(UserSet::singleton(0)), r.rank(UserSet::singleton(2)));
        assert_eq!(sub.rank(UserSet::full(2)), r.rank(UserSet::from_bits(0b101)));
        assert!(Restricted::new(&r, vec![3]).is_err());
    }
}
