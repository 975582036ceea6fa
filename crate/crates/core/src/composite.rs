//! Composite rules on dyadic partitions and the level-by-level refinement
//! driver with its derivative-estimate stopping criterion.

use std::fmt::Write as _;

use crate::error_model::{factorial, peano};
use crate::format::sig17;
use crate::integrand::Integrand;
use crate::measure::{dyadic_mass, DyadicInterval, LevelMasses, MomentCache, MAX_DYADIC_ORDER};
use crate::rules::QuadratureRule;
use crate::sum::{blocked_cell_sum, blocked_cell_sum_max, NeumaierSum};
use crate::{Error, Result};

/// Deepest level accepted by [`composite_eval`] and [`run_composite`].
pub const MAX_COMPOSITE_LEVEL: u32 = 24;

/// Peano constants at or below this magnitude switch the driver to the
/// successive-difference test.
pub const BYPASS_PEANO_TOL: f64 = 1e-14;

/// Points with `error <= ORDER_FLOOR_ULPS * ε * |exact|` are ignored when
/// fitting an order.
pub const ORDER_FLOOR_ULPS: f64 = 100.0;

/// Applies `rule`, rescaled onto `interval`:
/// `μ_α(I) · Σ β_q f((j + ζ_q) / 2^k)`.
pub fn local_apply<F>(rule: &QuadratureRule, f: &F, interval: DyadicInterval) -> Result<f64>
where
    F: Integrand + ?Sized,
{
    let mass = dyadic_mass(rule.alpha(), interval);
    local_sum(rule, f, interval.j(), interval.width()).map(|s| mass * s)
}

#[inline]
fn local_sum<F>(rule: &QuadratureRule, f: &F, j: u64, width: f64) -> Result<f64>
where
    F: Integrand + ?Sized,
{
    let left = j as f64;
    let mut acc = 0.0;
    for (&z, &w) in rule.nodes().iter().zip(rule.weights()) {
        acc += w * f.eval((left + z) * width)?;
    }
    Ok(acc)
}

/// The composite rule `𝕀_p^{2^k}(f)` on the uniform level-`k` partition.
pub fn composite_eval<F>(rule: &QuadratureRule, f: &F, k: u32) -> Result<f64>
where
    F: Integrand + ?Sized,
{
    if k > MAX_COMPOSITE_LEVEL {
        return Err(Error::OrderTooLarge {
            requested: k,
            max: MAX_COMPOSITE_LEVEL,
        });
    }
    let masses = LevelMasses::new(rule.alpha(), k);
    let width = (-(k as f64)).exp2();
    blocked_cell_sum(k, |j| Ok(masses.mass(j) * local_sum(rule, f, j, width)?))
}

/// A partition of [0, 1) into dyadic intervals, possibly of mixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicPartition {
    intervals: Vec<DyadicInterval>,
    proper: bool,
}

impl DyadicPartition {
    /// Validates that `intervals` tile [0, 1) without gaps or overlaps.
    /// The intervals are stored sorted left to right.
    pub fn new(mut intervals: Vec<DyadicInterval>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidPartition("no intervals".into()));
        }
        let depth = intervals.iter().map(|i| i.k()).max().unwrap_or(0);
        // Endpoints in units of 2^-depth; u128 keeps 2^63 representable.
        let start = |i: &DyadicInterval| (i.j() as u128) << (depth - i.k());
        let end = |i: &DyadicInterval| (i.j() as u128 + 1) << (depth - i.k());
        intervals.sort_by_key(|i| (start(i), i.k()));

        let mut cursor = 0u128;
        for interval in &intervals {
            let lo = start(interval);
            if lo < cursor {
                return Err(Error::InvalidPartition(format!(
                    "{interval} overlaps its neighbour"
                )));
            }
            if lo > cursor {
                return Err(Error::InvalidPartition(format!("gap before {interval}")));
            }
            cursor = end(interval);
        }
        if cursor != 1u128 << depth {
            return Err(Error::InvalidPartition("intervals do not reach 1".into()));
        }
        let proper = intervals.iter().all(|i| i.k() == depth);
        Ok(Self { intervals, proper })
    }

    /// The uniform partition `{X_j^k : j < 2^k}`.
    pub fn proper(k: u32) -> Result<Self> {
        if k > MAX_COMPOSITE_LEVEL {
            return Err(Error::OrderTooLarge {
                requested: k,
                max: MAX_COMPOSITE_LEVEL,
            });
        }
        let intervals = (0..1u64 << k)
            .map(|j| DyadicInterval::new(j, k))
            .collect::<Result<_>>()?;
        Ok(Self {
            intervals,
            proper: true,
        })
    }

    pub fn intervals(&self) -> &[DyadicInterval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// True when every interval has the same order.
    pub fn is_proper(&self) -> bool {
        self.proper
    }

    /// Replaces every interval by its two children.
    pub fn refine(&self) -> Result<Self> {
        if self.intervals.iter().any(|i| i.k() >= MAX_DYADIC_ORDER) {
            return Err(Error::OrderTooLarge {
                requested: MAX_DYADIC_ORDER + 1,
                max: MAX_DYADIC_ORDER,
            });
        }
        let mut intervals = Vec::with_capacity(2 * self.intervals.len());
        for interval in &self.intervals {
            let (l, r) = interval.children()?;
            intervals.push(l);
            intervals.push(r);
        }
        Ok(Self {
            intervals,
            proper: self.proper,
        })
    }

    /// Sum of local rule applications over the partition.
    pub fn integrate<F>(&self, rule: &QuadratureRule, f: &F) -> Result<f64>
    where
        F: Integrand + ?Sized,
    {
        let mut acc = NeumaierSum::new();
        for &interval in &self.intervals {
            acc.add(local_apply(rule, f, interval)?);
        }
        Ok(acc.total())
    }
}

/// Level bounds and tolerance for [`run_composite`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopConfig {
    pub tol: f64,
    pub k_min: u32,
    pub k_max: u32,
}

impl Default for StopConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            k_min: 2,
            k_max: 20,
        }
    }
}

impl StopConfig {
    pub fn new(tol: f64, k_min: u32, k_max: u32) -> Result<Self> {
        let cfg = Self { tol, k_min, k_max };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.k_min > self.k_max {
            return Err(Error::InvalidConfig(format!(
                "k_min = {} exceeds k_max = {}",
                self.k_min, self.k_max
            )));
        }
        if self.k_max > MAX_COMPOSITE_LEVEL {
            return Err(Error::InvalidConfig(format!(
                "k_max = {} exceeds the maximum level {MAX_COMPOSITE_LEVEL}",
                self.k_max
            )));
        }
        Ok(())
    }
}

/// Per-level composite values, optionally with their true errors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceHistory {
    pub levels: Vec<u32>,
    pub values: Vec<f64>,
    pub errors: Option<Vec<f64>>,
    pub exact: Option<f64>,
    pub fitted_order: Option<f64>,
}

impl ConvergenceHistory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Evaluates `rule` at each of `levels` and, when `exact` is known,
    /// records errors and fits an order.
    pub fn sweep<F, I>(rule: &QuadratureRule, f: &F, levels: I, exact: Option<f64>) -> Result<Self>
    where
        F: Integrand + ?Sized,
        I: IntoIterator<Item = u32>,
    {
        let mut history = Self::new();
        for k in levels {
            history.push(k, composite_eval(rule, f, k)?)?;
        }
        if let Some(exact) = exact {
            history.set_exact(exact);
        }
        Ok(history)
    }

    /// Appends a level; levels must be strictly increasing.
    pub fn push(&mut self, level: u32, value: f64) -> Result<()> {
        if self.levels.last().is_some_and(|&last| level <= last) {
            return Err(Error::InvalidConfig(format!(
                "history levels must increase, got {level} after {:?}",
                self.levels.last()
            )));
        }
        self.levels.push(level);
        self.values.push(value);
        if let (Some(errors), Some(exact)) = (self.errors.as_mut(), self.exact) {
            errors.push((value - exact).abs());
        }
        Ok(())
    }

    /// Records absolute errors against `exact` and refits the order.
    pub fn set_exact(&mut self, exact: f64) {
        self.exact = Some(exact);
        self.errors = Some(self.values.iter().map(|v| (v - exact).abs()).collect());
        self.fitted_order = measure_order(self).ok();
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// CSV with header `level,value,abs_error`; the error column is empty
    /// when no exact value is known.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,value,abs_error\n");
        for (i, (k, v)) in self.levels.iter().zip(&self.values).enumerate() {
            let err = self
                .errors
                .as_ref()
                .map(|e| sig17(e[i]))
                .unwrap_or_default();
            let _ = writeln!(out, "{k},{},{err}", sig17(*v));
        }
        out
    }
}

/// Least-squares slope of `log2(error)` against `-k`, over the levels whose
/// error sits above the rounding floor `100 ε |exact|`.
pub fn measure_order(history: &ConvergenceHistory) -> Result<f64> {
    const NEEDED: usize = 3;
    let (Some(errors), Some(exact)) = (history.errors.as_ref(), history.exact) else {
        return Err(Error::InsufficientPoints {
            usable: 0,
            needed: NEEDED,
        });
    };
    let floor = ORDER_FLOOR_ULPS * f64::EPSILON * exact.abs();
    let points: Vec<(f64, f64)> = history
        .levels
        .iter()
        .zip(errors)
        .filter(|(_, &e)| e > floor && e.is_finite())
        .map(|(&k, &e)| (-(k as f64), e.log2()))
        .collect();
    if points.len() < NEEDED {
        return Err(Error::InsufficientPoints {
            usable: points.len(),
            needed: NEEDED,
        });
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The derivative-estimate criterion (or the successive-difference test
    /// in bypass mode) was met.
    Tolerance,
    /// `k_max` was reached first.
    MaxLevel,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::Tolerance => "tol",
            StopReason::MaxLevel => "k_max",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompositeOutcome {
    pub value: f64,
    pub final_level: u32,
    /// A-posteriori error estimate; heuristic. NaN if no estimate exists
    /// (a run that never leaves level 0).
    pub est_error: f64,
    pub stopped_by: StopReason,
    /// Effective degree `r` used by the criterion.
    pub degree: u32,
    pub peano_constant: f64,
    /// The Peano constant vanished or `r = 0`; the driver compared
    /// successive levels instead of estimating derivatives.
    pub estimator_bypassed: bool,
    /// The derivative estimate was not finite at some level; the run was
    /// continued to `k_max`.
    pub nonfinite_estimate: bool,
    pub history: ConvergenceHistory,
}

/// One refinement step: the level-`k` composite value together with
/// `max_j |𝕀(f, X_j^{k-1}) - 𝕀(f, X_{2j}^k) - 𝕀(f, X_{2j+1}^k)| / μ(X_j^{k-1})`.
fn refine_level<F>(rule: &QuadratureRule, f: &F, k: u32) -> Result<(f64, f64)>
where
    F: Integrand + ?Sized,
{
    let parent_masses = LevelMasses::new(rule.alpha(), k - 1);
    let child_masses = LevelMasses::new(rule.alpha(), k);
    let parent_width = (-((k - 1) as f64)).exp2();
    let child_width = (-(k as f64)).exp2();
    blocked_cell_sum_max(k - 1, |j| {
        let mu = parent_masses.mass(j);
        let parent = mu * local_sum(rule, f, j, parent_width)?;
        let left = child_masses.mass(2 * j) * local_sum(rule, f, 2 * j, child_width)?;
        let right = child_masses.mass(2 * j + 1) * local_sum(rule, f, 2 * j + 1, child_width)?;
        let children = left + right;
        Ok((children, (parent - children).abs() / mu))
    })
}

/// Refines the uniform composite rule level by level until the
/// derivative-estimate criterion
/// `k ≥ min{⌊(1/r) log₂(|κ| K̄ / ((r+1)! tol))⌋₊ + 1, k_max}` holds,
/// where `κ` is the Peano constant and `K̄` the largest scaled
/// parent-minus-children difference of the previous level.
///
/// Rules whose Peano constant vanishes (or have `r = 0`) fall back to
/// stopping when two successive levels differ by less than `tol`.
pub fn run_composite<F>(rule: &QuadratureRule, f: &F, cfg: StopConfig) -> Result<CompositeOutcome>
where
    F: Integrand + ?Sized,
{
    let cache = MomentCache::new(rule.alpha());
    run_composite_with(rule, &cache, f, cfg)
}

/// [`run_composite`] with a caller-supplied moment cache.
pub fn run_composite_with<F>(
    rule: &QuadratureRule,
    cache: &MomentCache,
    f: &F,
    cfg: StopConfig,
) -> Result<CompositeOutcome>
where
    F: Integrand + ?Sized,
{
    cfg.validate()?;
    if cache.alpha() != rule.alpha() {
        return Err(Error::InvalidConfig(
            "moment cache and rule use different alpha".into(),
        ));
    }
    let p = peano(rule, cache)?;
    let r = p.degree;
    let kappa = p.constant.abs();
    let bypass = r == 0 || kappa <= BYPASS_PEANO_TOL;

    let mut outcome = CompositeOutcome {
        value: f64::NAN,
        final_level: 0,
        est_error: f64::NAN,
        stopped_by: StopReason::MaxLevel,
        degree: r,
        peano_constant: p.constant,
        estimator_bypassed: bypass,
        nonfinite_estimate: false,
        history: ConvergenceHistory::new(),
    };

    if cfg.k_max == 0 {
        outcome.value = composite_eval(rule, f, 0)?;
        outcome.history.push(0, outcome.value)?;
        return Ok(outcome);
    }

    let r1 = r + 1;
    let fact = factorial(r1);
    let start = cfg.k_min.max(1);
    let mut previous = if bypass {
        Some(composite_eval(rule, f, start - 1)?)
    } else {
        None
    };

    for k in start..=cfg.k_max {
        let (value, max_ratio) = refine_level(rule, f, k)?;
        outcome.history.push(k, value)?;
        outcome.value = value;
        outcome.final_level = k;

        if bypass || outcome.nonfinite_estimate {
            let prev = previous.replace(value).expect("previous level is tracked");
            let diff = (value - prev).abs();
            outcome.est_error = diff;
            if bypass && diff < cfg.tol && k >= cfg.k_min {
                outcome.stopped_by = StopReason::Tolerance;
                break;
            }
            continue;
        }

        // K̄_{k-1}; the common factor 2^{k(r+1)} cancels in the estimate.
        let scale = ((k * r1) as f64).exp2() * fact / ((r1 as f64).exp2() - 1.0) / kappa;
        let kbar = scale * max_ratio;
        let est = kappa * kbar / (fact * ((k * r1) as f64).exp2());
        if !kbar.is_finite() || !est.is_finite() {
            outcome.nonfinite_estimate = true;
            outcome.est_error = f64::NAN;
            previous = Some(value);
            continue;
        }
        outcome.est_error = est;
        previous = Some(value);

        let ratio = kappa * kbar / (fact * cfg.tol);
        let target = if ratio > 1.0 {
            (ratio.log2() / r as f64).floor() as u64 + 1
        } else {
            1
        };
        if k >= cfg.k_min && u64::from(k) >= target {
            outcome.stopped_by = StopReason::Tolerance;
            break;
        }
    }
    Ok(outcome)
}
