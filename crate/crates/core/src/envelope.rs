//! Concavification on binary beliefs.
//!
//! [`cav_threshold`] is the closed form for indicator utilities; [`cav_grid`]
//! samples a utility on a uniform grid together with its declared breakpoints
//! and takes the upper concave hull of the samples. Breakpoints are sampled at
//! the point itself and at offsets of [`BREAKPOINT_OFFSET`] on either side, so
//! the hull sees both one-sided limits and the attained value.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::belief::{Belief, PosteriorDistribution};
use crate::error::{PersuasionError, Result};

pub const BREAKPOINT_OFFSET: f64 = 1e-9;
pub const DEFAULT_RESOLUTION: usize = 10_001;

type Eval = dyn Fn(f64) -> f64 + Send + Sync;

/// A bounded utility of the binary belief `q = Pr(state 1)`.
#[derive(Clone)]
pub struct PiecewiseUtility {
    eval: Arc<Eval>,
    breakpoints: Vec<f64>,
    attained: Option<Vec<f64>>,
}

impl fmt::Debug for PiecewiseUtility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PiecewiseUtility")
            .field("breakpoints", &self.breakpoints)
            .field("attained", &self.attained)
            .finish_non_exhaustive()
    }
}

impl PiecewiseUtility {
    pub fn new<F>(eval: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(eval),
            breakpoints: Vec::new(),
            attained: None,
        }
    }

    /// `𝟙{q ≥ t}` with the upper value attained at `t`.
    pub fn indicator(threshold: f64) -> Result<Self> {
        Self::new(move |q| if q >= threshold { 1.0 } else { 0.0 }).with_breakpoints(vec![threshold])
    }

    /// Declares breakpoints; they must be strictly increasing and lie in `[0, 1]`.
    pub fn with_breakpoints(mut self, breakpoints: Vec<f64>) -> Result<Self> {
        if breakpoints.iter().any(|b| !(0.0..=1.0).contains(b)) {
            return Err(PersuasionError::DomainError(
                "breakpoints must lie in [0, 1]".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PersuasionError::DomainError(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        self.breakpoints = breakpoints;
        self.attained = None;
        Ok(self)
    }

    /// Overrides the sampled value at each declared breakpoint.
    pub fn with_attained_values(mut self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.breakpoints.len() {
            return Err(PersuasionError::DomainError(format!(
                "{} attained values for {} breakpoints",
                values.len(),
                self.breakpoints.len()
            )));
        }
        self.attained = Some(values);
        Ok(self)
    }

    pub fn eval(&self, q: f64) -> f64 {
        (self.eval)(q)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Value at a breakpoint, honoring declared attained values.
    fn value_at_breakpoint(&self, i: usize) -> f64 {
        match &self.attained {
            Some(v) => v[i],
            None => self.eval(self.breakpoints[i]),
        }
    }

    /// Grid of `resolution` uniform points plus breakpoints and their offsets,
    /// sorted by belief with duplicates collapsed to their largest value.
    pub fn sample(&self, resolution: usize) -> Vec<(f64, f64)> {
        let step = 1.0 / (resolution - 1) as f64;
        let mut xs: Vec<f64> = (0..resolution)
            .map(|i| (i as f64 * step).min(1.0))
            .collect();
        for &b in &self.breakpoints {
            for x in [b - BREAKPOINT_OFFSET, b + BREAKPOINT_OFFSET] {
                if (0.0..=1.0).contains(&x) {
                    xs.push(x);
                }
            }
        }
        let mut points: Vec<(f64, f64)> = xs.par_iter().map(|&x| (x, self.eval(x))).collect();
        points.extend(
            (0..self.breakpoints.len()).map(|i| (self.breakpoints[i], self.value_at_breakpoint(i))),
        );
        points.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
        points.dedup_by(|a, b| a.0 == b.0);
        points
    }
}

/// Hull vertex as `(belief, mixing weight, value)`.
pub type Support = (f64, f64, f64);

/// Upper concave hull of a finite point set, vertices sorted by belief.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperHull {
    vertices: Vec<(f64, f64)>,
}

impl UpperHull {
    /// Monotone-chain pass over points sorted by `x` with distinct `x`.
    pub fn from_sorted(points: &[(f64, f64)]) -> Self {
        let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
        for &pt in points {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                // drop b if it lies on or below the chord a–pt
                let cross = (b.0 - a.0) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 - a.0);
                if cross >= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(pt);
        }
        Self { vertices: hull }
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Envelope value at `x` and the (at most two) hull vertices certifying it.
    pub fn evaluate(&self, x: f64) -> Option<(f64, Vec<Support>)> {
        let v = &self.vertices;
        let first = v.first()?;
        let last = v.last()?;
        if x < first.0 || x > last.0 {
            return None;
        }
        let j = v.partition_point(|pt| pt.0 < x);
        if v[j].0 == x {
            return Some((v[j].1, vec![(v[j].0, 1.0, v[j].1)]));
        }
        let (a, b) = (v[j - 1], v[j]);
        let lambda = (x - a.0) / (b.0 - a.0);
        let value = (1.0 - lambda) * a.1 + lambda * b.1;
        Some((value, vec![(a.0, 1.0 - lambda, a.1), (b.0, lambda, b.1)]))
    }
}

/// Envelope value at a query belief with a Bayes-plausible certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeResult {
    pub value: f64,
    pub support: PosteriorDistribution,
    /// Utility value at each support atom, aligned with `support.atoms()`.
    pub support_values: Vec<f64>,
}

impl EnvelopeResult {
    fn from_points(points: Vec<(f64, f64, f64)>) -> Result<Self> {
        let points: Vec<_> = points.into_iter().filter(|p| p.1 > 0.0).collect();
        let support = PosteriorDistribution::from_weighted(
            points
                .iter()
                .map(|&(q, w, _)| Ok((Belief::binary(q)?, w)))
                .collect::<Result<_>>()?,
        )?;
        let support_values = support
            .atoms()
            .iter()
            .map(|a| {
                points
                    .iter()
                    .find(|p| (p.0 - a.belief.high()).abs() <= 1e-12)
                    .map(|p| p.2)
                    .unwrap_or(f64::NAN)
            })
            .collect();
        let value = points.iter().map(|p| p.1 * p.2).sum();
        Ok(Self {
            value,
            support,
            support_values,
        })
    }

    /// Largest gap between `value` and the certificate `Σ w·f(atom)`.
    pub fn certificate_gap(&self, utility: impl Fn(f64) -> f64) -> f64 {
        let certified: f64 = self
            .support
            .atoms()
            .iter()
            .map(|a| a.weight * utility(a.belief.high()))
            .sum();
        (certified - self.value).abs()
    }
}

/// Concavification of `𝟙{q ≥ t}` at `p`.
pub fn cav_threshold(threshold: f64, query: f64) -> Result<EnvelopeResult> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(PersuasionError::InvalidThreshold(threshold));
    }
    if !(0.0..=1.0).contains(&query) {
        return Err(PersuasionError::DomainError(format!(
            "query {query} outside [0, 1]"
        )));
    }
    if query >= threshold {
        return EnvelopeResult::from_points(vec![(query, 1.0, 1.0)]);
    }
    let w = query / threshold;
    EnvelopeResult::from_points(vec![(0.0, 1.0 - w, 0.0), (threshold, w, 1.0)])
}

/// Grid-based concavification at a binary belief.
pub fn cav_grid(
    utility: &PiecewiseUtility,
    query: &Belief,
    resolution: usize,
) -> Result<EnvelopeResult> {
    if !query.is_binary() {
        return Err(PersuasionError::UnsupportedDimension {
            states: query.dim(),
        });
    }
    cav_grid_at(utility, query.high(), resolution)
}

/// [`cav_grid`] with the query given as the probability of state 1.
pub fn cav_grid_at(
    utility: &PiecewiseUtility,
    query: f64,
    resolution: usize,
) -> Result<EnvelopeResult> {
    if resolution < 2 {
        return Err(PersuasionError::DomainError(
            "grid resolution must be at least 2".into(),
        ));
    }
    if !(0.0..=1.0).contains(&query) {
        return Err(PersuasionError::DomainError(format!(
            "query {query} outside [0, 1]"
        )));
    }
    let hull = UpperHull::from_sorted(&utility.sample(resolution));
    let (_, points) = hull
        .evaluate(query)
        .ok_or_else(|| PersuasionError::Numerical("query outside sampled hull".into()))?;
    EnvelopeResult::from_points(points)
}

/// Locates jumps of a piecewise-constant function by scanning a uniform grid
/// and bisecting every interval where the value changes. Each returned point
/// is the right end of a bracket narrower than `1e-13`.
pub fn scan_breakpoints(f: impl Fn(f64) -> f64 + Sync, resolution: usize) -> Vec<f64> {
    let n = resolution.max(2);
    let step = 1.0 / (n - 1) as f64;
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| f((i as f64 * step).min(1.0)))
        .collect();
    let mut out = Vec::new();
    for i in 1..n {
        if values[i] != values[i - 1] {
            let (mut lo, mut hi) = ((i - 1) as f64 * step, (i as f64 * step).min(1.0));
            let left = values[i - 1];
            while hi - lo > 1e-13 {
                let mid = 0.5 * (lo + hi);
                if f(mid) == left {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(hi);
        }
    }
    out
}

/// Smallest `x ∈ [lo, hi]` with `pred(x)` for a predicate that is false then true.
/// Returns `None` if `pred(hi)` is false.
pub fn first_true(
    mut lo: f64,
    mut hi: f64,
    mut pred: impl FnMut(f64) -> Result<bool>,
) -> Result<Option<f64>> {
    if !pred(hi)? {
        return Ok(None);
    }
    if pred(lo)? {
        return Ok(Some(lo));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}
