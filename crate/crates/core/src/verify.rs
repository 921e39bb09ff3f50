//! Verification suites and brute-force oracles.
//!
//! Each suite returns a [`CheckReport`] holding the worst error seen and the
//! few samples responsible for it. Suites are pure functions of their inputs;
//! the random generators here are seeded by the caller.

use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{evolve, predict_singular_times};
use crate::lagrangian::{AlphaParametrization, InitialDatum};
use crate::measure::{pushforward_decompose, value_scale, Atom, Endpoint};
use crate::pwfun::{PiecewiseConstant, PiecewiseLinear};
use crate::Tolerances;

const KEEP_OFFENDERS: usize = 5;

/// Default number of oracle grid points.
pub const DEFAULT_CELLS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Offender {
    pub location: Option<f64>,
    pub time: Option<f64>,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub details: Vec<Offender>,
}

struct Tracker {
    name: String,
    tolerance: f64,
    max_error: f64,
    worst: Vec<Offender>,
}

impl Tracker {
    fn new(name: &str, tolerance: f64) -> Self {
        Tracker {
            name: name.to_owned(),
            tolerance,
            max_error: 0.0,
            worst: Vec::new(),
        }
    }

    fn record(&mut self, location: Option<f64>, time: Option<f64>, error: f64) {
        let error = if error.is_nan() { f64::INFINITY } else { error };
        self.max_error = self.max_error.max(error);
        if error == 0.0 {
            return;
        }
        let pos = self.worst.partition_point(|o| o.error >= error);
        if pos < KEEP_OFFENDERS {
            self.worst.insert(
                pos,
                Offender {
                    location,
                    time,
                    error,
                },
            );
            self.worst.truncate(KEEP_OFFENDERS);
        }
    }

    fn finish(self) -> CheckReport {
        CheckReport {
            passed: self.max_error <= self.tolerance,
            name: self.name,
            max_error: self.max_error,
            tolerance: self.tolerance,
            details: self.worst,
        }
    }
}

/// `|μ(t)(ℝ) - E|` over the given times.
pub fn suite_conservation(
    param: &AlphaParametrization,
    times: &[f64],
    tolerance: f64,
) -> Result<CheckReport> {
    let mut tracker = Tracker::new("conservation", tolerance);
    for &t in times {
        let mu = evolve(param, t)?.mu;
        tracker.record(None, Some(t), (mu.total_mass() - param.energy()).abs());
    }
    Ok(tracker.finish())
}

/// Characteristic form of the weak formulation: `d/dt u(y(α,t),t) =
/// (α - x̄(α))/2` must equal `F(y(α,t),t)/2`.
///
/// At an atom `F` jumps; the residual is the distance of `α - x̄(α)` from the
/// interval `[μ(t)((-∞,y)), μ(t)((-∞,y])]`, evaluated with a relative slack of
/// `1e-11` in `y`.
pub fn suite_weak_form(
    param: &AlphaParametrization,
    times: &[f64],
    grid: &[f64],
    tolerance: f64,
) -> Result<CheckReport> {
    let mut tracker = Tracker::new("weak_form", tolerance);
    for &t in times {
        let mu = evolve(param, t)?.mu;
        for &alpha in grid {
            let y = param.y_at(alpha, t);
            let slack = 1e-11 * (1.0 + y.abs());
            let lower = mu.cdf(y - slack, Endpoint::Open);
            let upper = mu.cdf(y + slack, Endpoint::Closed);
            let target = param.cumulative_energy(alpha);
            let miss = (lower - target).max(target - upper).max(0.0);
            tracker.record(Some(alpha), Some(t), 0.5 * miss);
        }
    }
    Ok(tracker.finish())
}

/// Central difference of `y` in `t` against `u_along`. `y` is quadratic in
/// `t`, so the difference is exact up to rounding, even at singular times.
pub fn suite_characteristic_ode(
    param: &AlphaParametrization,
    grid: &[f64],
    times: &[f64],
    h: f64,
    tolerance: f64,
) -> Result<CheckReport> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "step must be positive, got {h}"
        )));
    }
    let mut tracker = Tracker::new("characteristic_ode", tolerance);
    for &t in times {
        for &alpha in grid {
            let fd = (param.y_at(alpha, t + h) - param.y_at(alpha, t - h)) / (2.0 * h);
            tracker.record(Some(alpha), Some(t), (fd - param.u_along(alpha, t)).abs());
        }
    }
    Ok(tracker.finish())
}

/// `sup{ξ : x_map(ξ) ≤ x}` for a nondecreasing map; `±∞` when unbounded.
fn sublevel_sup(x_map: &PiecewiseLinear, x: f64) -> f64 {
    let xs = x_map.breakpoints();
    let ys = x_map.values();
    let n = xs.len();
    let count = ys.partition_point(|&y| y <= x);
    if count == 0 {
        let ls = x_map.left_slope();
        return if ls > 0.0 {
            xs[0] + (x - ys[0]) / ls
        } else {
            f64::NEG_INFINITY
        };
    }
    let i = count - 1;
    if i == n - 1 {
        let rs = x_map.right_slope();
        return if rs > 0.0 {
            xs[i] + (x - ys[i]) / rs
        } else {
            f64::INFINITY
        };
    }
    let slope = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    (xs[i] + (x - ys[i]) / slope).min(xs[i + 1])
}

/// Compares the push-forward CDF of `g dξ` under `x_map` with
/// `∫_{x_map(ξ) ≤ x} g dξ`, computed directly from the sub-level set, at
/// `cells` uniformly spaced `x`.
pub fn oracle_pushforward(
    x_map: &PiecewiseLinear,
    g: &PiecewiseConstant,
    cells: usize,
    tolerances: &Tolerances,
    tolerance: f64,
) -> Result<CheckReport> {
    if cells < 1000 {
        return Err(Error::InvalidArgument(format!(
            "oracle needs at least 1000 cells, got {cells}"
        )));
    }
    let mu = pushforward_decompose(x_map, g, tolerances)?;
    let weight = g.antiderivative()?;
    let total = g.integrate(f64::NEG_INFINITY, f64::INFINITY)?;
    let cumulative = |xi: f64| {
        if xi == f64::NEG_INFINITY {
            0.0
        } else if xi == f64::INFINITY {
            total
        } else {
            weight.evaluate(xi)
        }
    };

    let ys = x_map.values();
    let lo = ys[0] - 1.0;
    let hi = ys[ys.len() - 1] + 1.0;
    let step = (hi - lo) / (cells - 1) as f64;
    let mut tracker = Tracker::new("oracle_pushforward", tolerance);
    for k in 0..cells {
        let x = if k == cells - 1 {
            hi
        } else {
            lo + step * k as f64
        };
        let brute = cumulative(sublevel_sup(x_map, x));
        tracker.record(Some(x), None, (brute - mu.cdf(x, Endpoint::Closed)).abs());
    }
    Ok(tracker.finish())
}

/// Atom provenance at a nonzero time `t`:
/// (a) the source carries `ū_x = -2/t` (residual `|1 + t ū_x / 2|`, checked
/// against `sqrt(tol_slope)`, the flatness it was classified with);
/// (b) mass `= (4/t²)(x₂ - x₁)`;
/// (c) location `= x + ū(x) t + (t²/4) μ̄((-∞, x))` at both ends of the source,
/// taking one-sided limits so that atoms of `μ̄` at the ends are handled;
/// (d) the source has no α-length inside the initial singular set.
pub fn suite_structure(
    param: &AlphaParametrization,
    t: f64,
    tolerance: f64,
) -> Result<CheckReport> {
    if t == 0.0 {
        return Err(Error::InvalidArgument(
            "structure suite needs t != 0".into(),
        ));
    }
    let flat = param.tolerances().tol_slope.sqrt();
    let datum = param.datum();
    let initial = datum.measure();
    let tol_x = param.tolerances().tol_x;
    let mu = evolve(param, t)?.mu;
    let y = param.characteristics(t);
    let mut tracker = Tracker::new("structure", tolerance);
    for atom in mu.atoms() {
        let source = atom
            .source
            .ok_or_else(|| Error::Internal(format!("atom at {} has no source", atom.location)))?;
        let at = Some(atom.location);
        let sx = param.source_interval(&source);

        let mut in_initial = 0.0;
        for w in pieces_within(param.grid(), source.start, source.end) {
            let mid = 0.5 * (w.0 + w.1);
            if param.in_initial_singular_set(mid) {
                in_initial += w.1 - w.0;
                continue;
            }
            // a regular piece whose image is within tol_x joins neighbouring atoms
            let residual = (1.0 + 0.5 * t * param.slope_at(mid)).abs();
            let merged = y.evaluate(w.1) - y.evaluate(w.0) <= tol_x;
            tracker.record(
                at,
                Some(t),
                if residual <= flat || merged {
                    0.0
                } else {
                    residual
                },
            );
        }
        tracker.record(at, Some(t), in_initial);

        let predicted = 4.0 / (t * t) * (sx.end - sx.start);
        tracker.record(at, Some(t), (atom.mass - predicted).abs());

        // μ̄((-∞, x)) for x inside the source: right limit at x₁, left limit at x₂
        for (x, side) in [(sx.start, Endpoint::Closed), (sx.end, Endpoint::Open)] {
            let location = x + datum.u_bar().evaluate(x) * t + 0.25 * t * t * initial.cdf(x, side);
            tracker.record(at, Some(t), (location - atom.location).abs());
        }
    }
    Ok(tracker.finish())
}

/// Grid pieces `(a, b)` of `grid` lying inside `[lo, hi]`.
fn pieces_within(grid: &[f64], lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
    let first = grid.partition_point(|&a| a < lo);
    let last = grid.partition_point(|&b| b <= hi);
    grid[first..last.max(first)]
        .windows(2)
        .map(|w| (w[0], w[1]))
}

/// Parametrization invariants: `x̄` is 1-Lipschitz and nondecreasing,
/// `x̄(α) ≤ α`, `0 ≤ f ≤ 1`, `∫ f = E`, `y(·,t)` nondecreasing, and
/// `u_x² y_α = f` on every regular piece at time `t`.
///
/// The last identity is checked multiplied through by `y_α`, as
/// `u_α² = f y_α` relative to `1 + y_α`: dividing by the tiny `Δy` of a nearly
/// collapsed piece would only measure cancellation. The rounding bound of the
/// difference quotients is subtracted, so pieces near double resolution
/// report only error beyond it.
pub fn suite_parametrization(
    param: &AlphaParametrization,
    times: &[f64],
    tolerance: f64,
) -> Result<CheckReport> {
    let mut tracker = Tracker::new("parametrization", tolerance);
    let x_bar = param.x_bar();
    let xs = x_bar.breakpoints();
    let vs = x_bar.values();
    for (i, s) in x_bar
        .slopes()
        .chain([x_bar.left_slope(), x_bar.right_slope()])
        .enumerate()
    {
        let at = xs.get(i).copied();
        tracker.record(at, None, (s - 1.0).max(0.0) + (-s).max(0.0));
    }
    for (&a, &x) in xs.iter().zip(vs) {
        tracker.record(Some(a), None, (x - a).max(0.0));
    }
    let f = param.f();
    for (lo, _, v) in f.pieces() {
        tracker.record(Some(lo), None, (-v).max(0.0) + (v - 1.0).max(0.0));
    }
    let integral = f.integrate(f64::NEG_INFINITY, f64::INFINITY)?;
    tracker.record(None, None, (integral - param.energy()).abs());

    let tol_slope = param.tolerances().tol_slope;
    let grid = param.grid();
    for &t in times {
        let y = param.characteristics(t);
        let vel = param.velocities(t);
        let ys = y.values();
        let us = vel.values();
        let scale_y = value_scale(ys);
        let scale_u = value_scale(us);
        for i in 0..grid.len() - 1 {
            let da = grid[i + 1] - grid[i];
            let dy = ys[i + 1] - ys[i];
            tracker.record(Some(grid[i]), Some(t), (-dy).max(0.0));
            let y_alpha = dy / da;
            if y_alpha <= tol_slope {
                continue;
            }
            let u_alpha = (us[i + 1] - us[i]) / da;
            let weight = f.evaluate(0.5 * (grid[i] + grid[i + 1]));
            let eu = 8.0 * f64::EPSILON * scale_u / da;
            let ey = 8.0 * f64::EPSILON * scale_y / da;
            let bound = 2.0 * u_alpha.abs() * eu + eu * eu + weight * ey;
            let excess = (u_alpha * u_alpha - weight * y_alpha).abs() - bound;
            let residual = excess.max(0.0) / (1.0 + y_alpha);
            tracker.record(Some(grid[i]), Some(t), residual);
        }
    }
    Ok(tracker.finish())
}

/// Far-field values of `u(·, t)`: `ū(-∞)` on the left and
/// `ū(+∞) + E t / 2` on the right.
pub fn suite_asymptotics(
    param: &AlphaParametrization,
    times: &[f64],
    tolerance: f64,
) -> Result<CheckReport> {
    let datum = param.datum();
    let mut tracker = Tracker::new("asymptotics", tolerance);
    for &t in times {
        let u = evolve(param, t)?.u;
        let (lo, hi) = sampling_window(param, t);
        let left = u.evaluate(lo);
        let right = u.evaluate(hi);
        tracker.record(Some(lo), Some(t), (left - datum.u_left()).abs());
        let expected = datum.u_right() + 0.5 * param.energy() * t;
        tracker.record(Some(hi), Some(t), (right - expected).abs());
    }
    Ok(tracker.finish())
}

/// `[min breakpoint - 1, max image under y(·,t) + 1]`: covers both
/// constant tails of `u(·, t)`.
pub fn sampling_window(param: &AlphaParametrization, t: f64) -> (f64, f64) {
    let y = param.characteristics(t);
    let (w_lo, w_hi) = param.datum().window();
    let ys = y.values();
    let lo = w_lo.min(ys[0]) - 1.0;
    let hi = w_hi.max(ys[ys.len() - 1]) + 1.0;
    (lo, hi)
}

/// `{-3, ..., 3}` plus every predicted singular time, sorted.
pub fn standard_times(param: &AlphaParametrization) -> Result<Vec<f64>> {
    let mut times: Vec<f64> = (-3..=3).map(f64::from).collect();
    times.extend(predict_singular_times(param)?.iter().map(|e| e.t_star));
    times.sort_by(f64::total_cmp);
    times.dedup();
    Ok(times)
}

/// Piece midpoints, breakpoints `± 1e-6`, and `uniform` random α spread over
/// the grid extended by one unit on each side.
pub fn alpha_sample_grid(
    param: &AlphaParametrization,
    rng: &mut impl Rng,
    uniform: usize,
) -> Vec<f64> {
    let grid = param.grid();
    let mut out = Vec::with_capacity(3 * grid.len() + uniform);
    out.extend(grid.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    for &a in grid {
        out.push(a - 1e-6);
        out.push(a + 1e-6);
    }
    let lo = grid[0] - 1.0;
    let hi = grid[grid.len() - 1] + 1.0;
    out.extend((0..uniform).map(|_| rng.gen_range(lo..hi)));
    out
}

/// Distinct sorted multiples of 1/4 in `[-10, 10]`.
fn quarter_grid_points(rng: &mut impl Rng, count: usize) -> Vec<f64> {
    let mut pts: Vec<f64> = sample(rng, 81, count)
        .into_iter()
        .map(|k| -10.0 + 0.25 * k as f64)
        .collect();
    pts.sort_by(f64::total_cmp);
    pts
}

fn eighths(rng: &mut impl Rng, lo: i32, hi: i32) -> f64 {
    f64::from(rng.gen_range(lo..=hi)) / 8.0
}

/// Random datum: 1–8 linear pieces with breakpoints on the quarter grid of
/// `[-10, 10]`, slopes in `[-4, 4]` and `ū(-∞)` in `[-4, 4]` as multiples of
/// 1/8, and 0–3 atoms on the quarter grid with masses in `(0, 2]`. Dyadic
/// values keep the datum exactly representable.
pub fn random_datum(rng: &mut impl Rng) -> InitialDatum {
    let pieces = rng.gen_range(1..=8);
    let xs = quarter_grid_points(rng, pieces + 1);
    let mut ys = vec![eighths(rng, -32, 32)];
    for w in xs.windows(2) {
        let slope = eighths(rng, -32, 32);
        ys.push(ys[ys.len() - 1] + slope * (w[1] - w[0]));
    }
    let u = PiecewiseLinear::new(xs, ys, 0.0, 0.0).expect("sorted breakpoints");
    let n_atoms = rng.gen_range(0..=3);
    let atoms = quarter_grid_points(rng, n_atoms)
        .into_iter()
        .map(|x| Atom::new(x, eighths(rng, 1, 16)))
        .collect();
    InitialDatum::new(u, atoms).expect("valid random datum")
}

/// Random nondecreasing map with flat pieces and a nonnegative compactly
/// supported weight, both on the quarter grid of `[-10, 10]`.
pub fn random_monotone_pair<R: Rng>(rng: &mut R) -> (PiecewiseLinear, PiecewiseConstant) {
    let n = rng.gen_range(2..=9);
    let xs = quarter_grid_points(rng, n);
    let mut ys = vec![eighths(rng, -32, 32)];
    for w in xs.windows(2) {
        let slope = if rng.gen_bool(0.3) {
            0.0
        } else {
            eighths(rng, 1, 32)
        };
        ys.push(ys[ys.len() - 1] + slope * (w[1] - w[0]));
    }
    let tail = |rng: &mut R| {
        if rng.gen_bool(0.3) {
            0.0
        } else {
            eighths(rng, 1, 16)
        }
    };
    let left = tail(rng);
    let right = tail(rng);
    let x_map = PiecewiseLinear::new(xs, ys, left, right).expect("sorted breakpoints");

    let m = rng.gen_range(2..=9);
    let gs = quarter_grid_points(rng, m);
    let mut values = vec![0.0];
    values.extend((0..m - 1).map(|_| eighths(rng, 0, 16)));
    values.push(0.0);
    let g = PiecewiseConstant::new(gs, values).expect("sorted breakpoints");
    (x_map, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datum::{demo_atom, demo_cantor, demo_intro};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn param(d: &InitialDatum) -> AlphaParametrization {
        AlphaParametrization::build(d, Tolerances::default()).unwrap()
    }

    fn zero() -> AlphaParametrization {
        param(&InitialDatum::from_velocity(PiecewiseLinear::constant(0.0)).unwrap())
    }

    #[test]
    fn report_tracks_worst() {
        let mut t = Tracker::new("x", 1.0);
        for (i, e) in [0.5, 2.0, 0.1, 3.0, 0.0, 0.7, 0.9, 1.5]
            .into_iter()
            .enumerate()
        {
            t.record(Some(i as f64), None, e);
        }
        let r = t.finish();
        assert_eq!(r.max_error, 3.0);
        assert!(!r.passed);
        let errs: Vec<f64> = r.details.iter().map(|o| o.error).collect();
        assert_eq!(errs, vec![3.0, 2.0, 1.5, 0.9, 0.7]);
    }

    #[test]
    fn zero_datum_is_exact() {
        let p = zero();
        let times = [-1.0, 0.0, 2.0];
        let grid = [-1.0, 0.0, 0.5];
        assert_eq!(suite_conservation(&p, &times, 0.0).unwrap().max_error, 0.0);
        assert_eq!(
            suite_weak_form(&p, &times, &grid, 0.0).unwrap().max_error,
            0.0
        );
        let ode = suite_characteristic_ode(&p, &grid, &times, 1e-3, 0.0).unwrap();
        assert_eq!(ode.max_error, 0.0);
    }

    #[test]
    fn intro_conservation() {
        let r =
            suite_conservation(&param(&demo_intro()), &[0.0, 1.0, 2.0, 3.0, -1.0], 1e-10).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn weak_form_examples() {
        let grid: Vec<f64> = (0..=40).map(|k| -1.0 + 0.1 * k as f64).collect();
        let r = suite_weak_form(&param(&demo_intro()), &[1.0], &grid, 1e-10).unwrap();
        assert!(r.passed, "{r:?}");
        let r = suite_weak_form(&param(&demo_atom(1.5).unwrap()), &[1.0], &grid, 1e-10).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn ode_through_blow_up() {
        let grid: Vec<f64> = (1..20).map(|k| 0.1 * k as f64).collect();
        let r = suite_characteristic_ode(&param(&demo_intro()), &grid, &[2.0], 1e-3, 1e-9).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(suite_characteristic_ode(&zero(), &grid, &[1.0], 0.0, 1e-9).is_err());
    }

    #[test]
    fn oracle_examples() {
        let tol = Tolerances::default();
        let g = PiecewiseConstant::new(vec![-1.0, 0.5, 2.0], vec![0.0, 0.75, 2.0, 0.0]).unwrap();
        let r = oracle_pushforward(&PiecewiseLinear::identity(), &g, 1000, &tol, 1e-12).unwrap();
        assert!(r.passed, "{r:?}");

        let p = param(&demo_intro());
        let r = oracle_pushforward(&p.characteristics(2.0), p.f(), 1_000_000, &tol, 1e-9).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(oracle_pushforward(&p.characteristics(2.0), p.f(), 10, &tol, 1e-9).is_err());
    }

    #[test]
    fn sublevel_sup_cases() {
        let x =
            PiecewiseLinear::from_points(&[(0.0, 0.0), (1.0, 1.0), (2.0, 1.0)], 0.0, 2.0).unwrap();
        assert_eq!(sublevel_sup(&x, -0.5), f64::NEG_INFINITY);
        assert_eq!(sublevel_sup(&x, 0.5), 0.5);
        assert_eq!(sublevel_sup(&x, 1.0), 2.0);
        assert_eq!(sublevel_sup(&x, 3.0), 3.0);
        let flat_right = PiecewiseLinear::from_points(&[(0.0, 0.0), (1.0, 1.0)], 1.0, 0.0).unwrap();
        assert_eq!(sublevel_sup(&flat_right, 2.0), f64::INFINITY);
        assert_eq!(sublevel_sup(&flat_right, -2.0), -2.0);
    }

    #[test]
    fn structure_examples() {
        let p = param(&demo_intro());
        let r = suite_structure(&p, 2.0, 1e-10).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(evolve(&p, 2.0).unwrap().mu.atoms()[0].mass, 1.0);
        assert!(evolve(&p, 1.0).unwrap().mu.atoms().is_empty());
        assert!(suite_structure(&p, 0.0, 1e-10).is_err());

        let c = param(&demo_cantor(4).unwrap());
        let r = suite_structure(&c, 2.0, 1e-10).unwrap();
        assert!(r.passed, "{r:?}");
        let mu = evolve(&c, 2.0).unwrap().mu;
        assert_eq!(mu.atoms().len(), 16);
        assert!((mu.pp_mass() - 0.53125).abs() < 1e-12);
    }

    #[test]
    fn positive_slope_structure_at_negative_time() {
        let u = PiecewiseLinear::from_points(&[(0.0, 0.0), (1.0, 1.0)], 0.0, 0.0).unwrap();
        let p = param(&InitialDatum::from_velocity(u).unwrap());
        let r = suite_structure(&p, -2.0, 1e-10).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(evolve(&p, -2.0).unwrap().mu.atoms().len(), 1);
        assert!(evolve(&p, 2.0).unwrap().mu.atoms().is_empty());
    }

    #[test]
    fn random_generators_are_seeded() {
        let a = random_datum(&mut ChaCha8Rng::seed_from_u64(7));
        let b = random_datum(&mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let d = random_datum(&mut rng);
            let (lo, hi) = d.window();
            assert!(lo >= -10.0 && hi <= 10.0);
            assert!(d.atoms().len() <= 3);
            assert!(d.atoms().iter().all(|a| a.mass > 0.0 && a.mass <= 2.0));
            assert!(d.u_bar().slopes().all(|s| s.abs() <= 4.0));
            let (x, g) = random_monotone_pair(&mut rng);
            assert!(x.is_nondecreasing());
            assert!(g.is_density());
        }
    }

    #[test]
    fn parametrization_and_asymptotics_on_demos() {
        for d in [
            demo_intro(),
            demo_atom(2.0).unwrap(),
            demo_cantor(3).unwrap(),
        ] {
            let p = param(&d);
            let times = standard_times(&p).unwrap();
            assert!(suite_parametrization(&p, &times, 1e-10).unwrap().passed);
            assert!(suite_asymptotics(&p, &times, 1e-12).unwrap().passed);
        }
    }

    #[test]
    fn deep_cantor_near_double_resolution() {
        // removed pieces of length 4^-16 map to images below tol_x at t = 2
        let p = param(&demo_cantor(16).unwrap());
        let structure = suite_structure(&p, 2.0, 1e-9).unwrap();
        assert!(structure.passed, "{:?}", structure.details);
        let times = standard_times(&p).unwrap();
        assert!(suite_parametrization(&p, &times, 1e-9).unwrap().passed);
    }
}
