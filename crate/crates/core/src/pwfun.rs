//! Piecewise-linear and piecewise-constant functions of one real variable.
//!
//! Every quantity in the solver (velocities, characteristics, cumulative
//! distributions, densities) lives in one of these two types, and all the
//! operations below are closed on them, so results are exact up to IEEE
//! rounding.

use crate::error::{Error, Result};

/// Sorted union of two strictly increasing breakpoint lists, exact duplicates
/// removed.
pub fn merge_breakpoints(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = if j >= b.len() || (i < a.len() && a[i] <= b[j]) {
            i += 1;
            a[i - 1]
        } else {
            j += 1;
            b[j - 1]
        };
        if out.last().is_none_or(|&last| next > last) {
            out.push(next);
        }
    }
    out
}

fn check_increasing(xs: &[f64]) -> Result<()> {
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidFunction("breakpoints must be finite".into()));
    }
    if let Some(w) = xs.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidFunction(format!(
            "breakpoints must be strictly increasing, found {} then {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Continuous piecewise-linear function on ℝ with affine tails.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
    left_slope: f64,
    right_slope: f64,
}

impl PiecewiseLinear {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, left_slope: f64, right_slope: f64) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::InvalidFunction(
                "at least one breakpoint is required".into(),
            ));
        }
        if xs.len() != ys.len() {
            return Err(Error::InvalidFunction(format!(
                "{} breakpoints but {} values",
                xs.len(),
                ys.len()
            )));
        }
        check_increasing(&xs)?;
        if ys.iter().any(|y| !y.is_finite()) || !left_slope.is_finite() || !right_slope.is_finite()
        {
            return Err(Error::InvalidFunction(
                "values and slopes must be finite".into(),
            ));
        }
        Ok(Self {
            xs,
            ys,
            left_slope,
            right_slope,
        })
    }

    pub fn constant(c: f64) -> Self {
        Self {
            xs: vec![0.0],
            ys: vec![c],
            left_slope: 0.0,
            right_slope: 0.0,
        }
    }

    pub fn identity() -> Self {
        Self {
            xs: vec![0.0],
            ys: vec![0.0],
            left_slope: 1.0,
            right_slope: 1.0,
        }
    }

    pub fn from_points(points: &[(f64, f64)], left_slope: f64, right_slope: f64) -> Result<Self> {
        let (xs, ys) = points.iter().copied().unzip();
        Self::new(xs, ys, left_slope, right_slope)
    }

    /// Samples `f` at the given breakpoints.
    pub fn from_fn(
        breakpoints: Vec<f64>,
        f: impl Fn(f64) -> f64,
        left_slope: f64,
        right_slope: f64,
    ) -> Result<Self> {
        let ys = breakpoints.iter().map(|&x| f(x)).collect();
        Self::new(breakpoints, ys, left_slope, right_slope)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    pub fn left_slope(&self) -> f64 {
        self.left_slope
    }

    pub fn right_slope(&self) -> f64 {
        self.right_slope
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Limit at −∞ when the left tail is flat.
    pub fn left_limit(&self) -> Option<f64> {
        (self.left_slope == 0.0).then(|| self.ys[0])
    }

    /// Limit at +∞ when the right tail is flat.
    pub fn right_limit(&self) -> Option<f64> {
        (self.right_slope == 0.0).then(|| self.ys[self.ys.len() - 1])
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0] + self.left_slope * (x - self.xs[0]);
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1] + self.right_slope * (x - self.xs[n - 1]);
        }
        let i = self.xs.partition_point(|&b| b <= x);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (y0, y1) = (self.ys[i - 1], self.ys[i]);
        if x == x0 {
            return y0;
        }
        y0 + (y1 - y0) * ((x - x0) / (x1 - x0))
    }

    /// Slopes of the bounded pieces, left to right.
    pub fn slopes(&self) -> impl Iterator<Item = f64> + '_ {
        self.xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
    }

    pub fn derivative(&self) -> PiecewiseConstant {
        let mut values = Vec::with_capacity(self.xs.len() + 1);
        values.push(self.left_slope);
        values.extend(self.slopes());
        values.push(self.right_slope);
        PiecewiseConstant {
            xs: self.xs.clone(),
            values,
        }
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.left_slope >= 0.0
            && self.right_slope >= 0.0
            && self.ys.windows(2).all(|w| w[1] >= w[0])
    }

    /// Smallest `x` with `self(x) == value` for a nondecreasing function, or
    /// `None` when `value` lies outside the range. A flat tail at `value`
    /// reports its finite endpoint.
    pub fn preimage(&self, value: f64) -> Option<f64> {
        let n = self.xs.len();
        if value < self.ys[0] {
            return (self.left_slope > 0.0)
                .then(|| self.xs[0] - (self.ys[0] - value) / self.left_slope);
        }
        if value > self.ys[n - 1] {
            return (self.right_slope > 0.0)
                .then(|| self.xs[n - 1] + (value - self.ys[n - 1]) / self.right_slope);
        }
        let i = self.ys.partition_point(|&y| y < value);
        if self.ys[i] == value {
            return Some(self.xs[i]);
        }
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (y0, y1) = (self.ys[i - 1], self.ys[i]);
        Some((x0 + (value - y0) * ((x1 - x0) / (y1 - y0))).clamp(x0, x1))
    }

    /// `self ∘ inner` for a nondecreasing `inner`.
    ///
    /// Breakpoints of the result are those of `inner` merged with the
    /// `inner`-preimages of the breakpoints of `self`, so the composition is
    /// affine on every piece.
    pub fn compose(&self, inner: &PiecewiseLinear) -> Result<PiecewiseLinear> {
        if !inner.is_nondecreasing() {
            return Err(Error::NotMonotone(
                "inner function of a composition must be nondecreasing".into(),
            ));
        }
        let mut pre: Vec<f64> = self.xs.iter().filter_map(|&b| inner.preimage(b)).collect();
        pre.sort_by(f64::total_cmp);
        pre.dedup();
        let xs = merge_breakpoints(&inner.xs, &pre);
        let ys = xs
            .iter()
            .map(|&a| self.evaluate(inner.evaluate(a)))
            .collect();
        let left_slope = if inner.left_slope > 0.0 {
            self.left_slope * inner.left_slope
        } else {
            0.0
        };
        let right_slope = if inner.right_slope > 0.0 {
            self.right_slope * inner.right_slope
        } else {
            0.0
        };
        PiecewiseLinear::new(xs, ys, left_slope, right_slope)
    }

    /// Drops breakpoints closer than `tol_x` to their predecessor and interior
    /// breakpoints whose removal moves no dropped value by `tol_v` or more.
    /// With both tolerances zero the input is returned unchanged.
    pub fn consolidate(&self, tol_x: f64, tol_v: f64) -> PiecewiseLinear {
        let mut xs = vec![self.xs[0]];
        let mut ys = vec![self.ys[0]];
        for (&x, &y) in self.xs.iter().zip(&self.ys).skip(1) {
            if x - xs[xs.len() - 1] >= tol_x && x > xs[xs.len() - 1] {
                xs.push(x);
                ys.push(y);
            }
        }
        if xs.len() > 2 && tol_v > 0.0 {
            let (mut kx, mut ky) = (vec![xs[0]], vec![ys[0]]);
            let mut anchor = 0;
            for i in 1..xs.len() - 1 {
                let (ax, ay) = (xs[anchor], ys[anchor]);
                let (nx, ny) = (xs[i + 1], ys[i + 1]);
                let removable = (anchor + 1..=i).all(|k| {
                    let line = ay + (ny - ay) * ((xs[k] - ax) / (nx - ax));
                    (ys[k] - line).abs() < tol_v
                });
                if !removable {
                    kx.push(xs[i]);
                    ky.push(ys[i]);
                    anchor = i;
                }
            }
            kx.push(xs[xs.len() - 1]);
            ky.push(ys[ys.len() - 1]);
            xs = kx;
            ys = ky;
        }
        PiecewiseLinear {
            xs,
            ys,
            left_slope: self.left_slope,
            right_slope: self.right_slope,
        }
    }

    /// Largest absolute difference to `other` over the union of breakpoints,
    /// plus a tail-slope mismatch check. Returns `f64::INFINITY` when the tails
    /// diverge.
    pub fn sup_distance(&self, other: &PiecewiseLinear) -> f64 {
        if self.left_slope != other.left_slope || self.right_slope != other.right_slope {
            return f64::INFINITY;
        }
        merge_breakpoints(&self.xs, &other.xs)
            .into_iter()
            .map(|x| (self.evaluate(x) - other.evaluate(x)).abs())
            .fold(0.0, f64::max)
    }
}

/// Piecewise-constant function, defined almost everywhere.
///
/// `values[0]` is the left tail, `values[n]` the right tail, and
/// `values[i]` the value on `(xs[i-1], xs[i])`. At a breakpoint the
/// right-limit is returned.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseConstant {
    xs: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseConstant {
    pub fn new(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != xs.len() + 1 {
            return Err(Error::InvalidFunction(format!(
                "{} breakpoints need {} piece values, got {}",
                xs.len(),
                xs.len() + 1,
                values.len()
            )));
        }
        check_increasing(&xs)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction("piece values must be finite".into()));
        }
        Ok(Self { xs, values })
    }

    pub fn constant(c: f64) -> Self {
        Self {
            xs: Vec::new(),
            values: vec![c],
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn left_tail(&self) -> f64 {
        self.values[0]
    }

    pub fn right_tail(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.values[self.xs.partition_point(|&b| b <= x)]
    }

    /// Bounded pieces as `(start, end, value)`.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.xs
            .windows(2)
            .zip(&self.values[1..])
            .map(|(w, &v)| (w[0], w[1], v))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> PiecewiseConstant {
        PiecewiseConstant {
            xs: self.xs.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Nonnegative everywhere with vanishing tails.
    pub fn is_density(&self) -> bool {
        self.left_tail() == 0.0 && self.right_tail() == 0.0 && self.values.iter().all(|&v| v >= 0.0)
    }

    /// `∫_a^b g`. Either bound may be infinite provided the corresponding
    /// tail vanishes.
    pub fn integrate(&self, a: f64, b: f64) -> Result<f64> {
        if a.is_nan() || b.is_nan() || a > b {
            return Err(Error::InvalidArgument(format!(
                "integration bounds must satisfy a <= b, got ({a}, {b})"
            )));
        }
        if a == b {
            return Ok(0.0);
        }
        if a == f64::NEG_INFINITY && self.left_tail() != 0.0 {
            return Err(Error::NonIntegrable(format!(
                "left tail value {} over an unbounded interval",
                self.left_tail()
            )));
        }
        if b == f64::INFINITY && self.right_tail() != 0.0 {
            return Err(Error::NonIntegrable(format!(
                "right tail value {} over an unbounded interval",
                self.right_tail()
            )));
        }
        let mut sum = 0.0;
        for (k, &v) in self.values.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let lo = if k == 0 {
                f64::NEG_INFINITY
            } else {
                self.xs[k - 1]
            };
            let hi = if k == self.xs.len() {
                f64::INFINITY
            } else {
                self.xs[k]
            };
            let (lo, hi) = (lo.max(a), hi.min(b));
            if hi > lo {
                sum += v * (hi - lo);
            }
        }
        Ok(sum)
    }

    /// `x ↦ ∫_{-∞}^x g`; requires a vanishing left tail.
    pub fn antiderivative(&self) -> Result<PiecewiseLinear> {
        if self.left_tail() != 0.0 {
            return Err(Error::NonIntegrable(
                "antiderivative from -inf needs a zero left tail".into(),
            ));
        }
        if self.xs.is_empty() {
            return Ok(PiecewiseLinear::constant(0.0));
        }
        let mut ys = Vec::with_capacity(self.xs.len());
        let mut acc = 0.0;
        ys.push(acc);
        for (lo, hi, v) in self.pieces() {
            acc += v * (hi - lo);
            ys.push(acc);
        }
        PiecewiseLinear::new(self.xs.clone(), ys, 0.0, self.right_tail())
    }

    /// Drops pieces shorter than `tol_x` and merges neighbours whose values
    /// differ by less than `tol_v` (the left value is kept).
    pub fn consolidate(&self, tol_x: f64, tol_v: f64) -> PiecewiseConstant {
        let mut xs: Vec<f64> = Vec::with_capacity(self.xs.len());
        let mut values = vec![self.values[0]];
        for (i, &x) in self.xs.iter().enumerate() {
            let next = self.values[i + 1];
            if let Some(&last) = xs.last() {
                if x - last < tol_x {
                    // the short piece (last, x) disappears
                    let n = values.len();
                    values[n - 1] = next;
                    continue;
                }
            }
            xs.push(x);
            values.push(next);
        }
        let mut mx: Vec<f64> = Vec::with_capacity(xs.len());
        let mut mv = vec![values[0]];
        for (i, &x) in xs.iter().enumerate() {
            let next = values[i + 1];
            if (next - mv[mv.len() - 1]).abs() < tol_v {
                continue;
            }
            mx.push(x);
            mv.push(next);
        }
        PiecewiseConstant { xs: mx, values: mv }
    }
}

/// The nondecreasing map `x ↦ base(x) + Σ_{a ≤ x} h_a`: a strictly increasing
/// continuous part plus upward jumps `(a, h_a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneGraph {
    base: PiecewiseLinear,
    jumps: Vec<(f64, f64)>,
}

impl MonotoneGraph {
    pub fn new(base: PiecewiseLinear, jumps: Vec<(f64, f64)>) -> Result<Self> {
        if base.left_slope <= 0.0 || base.right_slope <= 0.0 || base.slopes().any(|s| s <= 0.0) {
            return Err(Error::NotMonotone(
                "continuous part of a monotone graph must be strictly increasing".into(),
            ));
        }
        let locs: Vec<f64> = jumps.iter().map(|j| j.0).collect();
        check_increasing(&locs)?;
        if let Some(&(a, h)) = jumps.iter().find(|j| !(j.1 > 0.0 && j.1.is_finite())) {
            return Err(Error::InvalidFunction(format!(
                "jump at {a} must have positive finite height, got {h}"
            )));
        }
        Ok(Self { base, jumps })
    }

    pub fn base(&self) -> &PiecewiseLinear {
        &self.base
    }

    pub fn jumps(&self) -> &[(f64, f64)] {
        &self.jumps
    }

    /// `G(x⁻)`.
    pub fn value_left(&self, x: f64) -> f64 {
        self.base.evaluate(x)
            + self
                .jumps
                .iter()
                .filter(|j| j.0 < x)
                .map(|j| j.1)
                .sum::<f64>()
    }

    /// `G(x⁺) = G(x)`.
    pub fn value_right(&self, x: f64) -> f64 {
        self.base.evaluate(x)
            + self
                .jumps
                .iter()
                .filter(|j| j.0 <= x)
                .map(|j| j.1)
                .sum::<f64>()
    }

    /// The generalized inverse `α ↦ sup{x : G(x⁻) ≤ α}` as a piecewise-linear
    /// function. Each jump of height `h` becomes a flat segment of length `h`.
    pub fn pseudo_inverse(&self) -> PiecewiseLinear {
        let locs: Vec<f64> = self.jumps.iter().map(|j| j.0).collect();
        let points = merge_breakpoints(&self.base.xs, &locs);
        let mut alphas: Vec<f64> = Vec::with_capacity(points.len() + locs.len());
        let mut xs: Vec<f64> = Vec::with_capacity(points.len() + locs.len());
        let mut push = |alpha: f64, x: f64| {
            if alphas.last().is_none_or(|&last| alpha > last) {
                alphas.push(alpha);
                xs.push(x);
            }
        };
        let mut jump_sum = 0.0;
        let mut next_jump = 0;
        for &p in &points {
            let below = self.base.evaluate(p) + jump_sum;
            push(below, p);
            if next_jump < self.jumps.len() && self.jumps[next_jump].0 == p {
                jump_sum += self.jumps[next_jump].1;
                next_jump += 1;
                push(self.base.evaluate(p) + jump_sum, p);
            }
        }
        PiecewiseLinear {
            xs: alphas,
            ys: xs,
            left_slope: 1.0 / self.base.left_slope,
            right_slope: 1.0 / self.base.right_slope,
        }
    }

    /// Scalar form of [`pseudo_inverse`](Self::pseudo_inverse).
    pub fn pseudo_inverse_at(&self, alpha: f64) -> f64 {
        self.pseudo_inverse().evaluate(alpha)
    }
}
