//! Solution snapshots, singular-time prediction and the semi-group restart.

use crate::error::{Error, Result};
use crate::lagrangian::{AlphaParametrization, InitialDatum};
use crate::measure::{
    cdf_sup_distance, flat_allowance, pushforward_decompose, value_scale, RadonMeasure, Span,
};
use crate::pwfun::PiecewiseLinear;

/// The pair `(u(·, t), μ(t))`.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub t: f64,
    pub u: PiecewiseLinear,
    pub mu: RadonMeasure,
    pub is_singular: bool,
}

/// Evolves the parametrization to time `t`.
///
/// `μ(t) = y(·, t) # (f dα)`, and `u(·, t)` pairs `y(α, t)` with
/// `u_along(α, t)` over the regular pieces. Flat pieces of `y` collapse to a
/// single point where `u` must be constant; a violation beyond the bound
/// implied by the flatness tolerance is reported as an internal error.
pub fn evolve(param: &AlphaParametrization, t: f64) -> Result<Snapshot> {
    let tol = *param.tolerances();
    let y = param.characteristics(t);
    let vel = param.velocities(t);
    let mu = pushforward_decompose(&y, param.f(), &tol)?;

    let alphas = param.grid();
    let ys = y.values();
    let us = vel.values();
    let scale_y = value_scale(ys);
    let mut xs_out = vec![ys[0]];
    let mut us_out = vec![us[0]];
    for i in 0..alphas.len() - 1 {
        let da = alphas[i + 1] - alphas[i];
        let rise = ys[i + 1] - ys[i];
        let allowance = flat_allowance(da, scale_y, &tol);
        let last = xs_out[xs_out.len() - 1];
        if rise > allowance && ys[i + 1] > last {
            xs_out.push(ys[i + 1]);
            us_out.push(us[i + 1]);
            continue;
        }
        // |Δu|² = f Δy Δα ≤ Δy Δα on a flat piece
        let scale = 1.0 + us[i].abs() + t.abs() * (alphas[i].abs() + ys[i].abs());
        let allowed = (allowance.max(0.0) * da).sqrt() + 1e-12 * scale;
        let jump = (us[i + 1] - us[i]).abs();
        if jump > allowed {
            return Err(Error::Internal(format!(
                "velocity varies by {jump:e} across the flat span ({}, {}) at t = {t}",
                alphas[i],
                alphas[i + 1]
            )));
        }
    }
    let u = PiecewiseLinear::new(xs_out, us_out, 0.0, 0.0)?;
    Ok(Snapshot {
        t,
        u,
        is_singular: !mu.atoms().is_empty(),
        mu,
    })
}

/// `u(x, t)` by inverting `y(·, t)` at `x`.
pub fn evaluate_u(param: &AlphaParametrization, x: f64, t: f64) -> f64 {
    let y = param.characteristics(t);
    let alpha = y
        .preimage(x)
        .expect("characteristics have unit-slope tails and cover the line");
    param.u_along(alpha, t)
}

/// One atom of a concentration event.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EventAtom {
    pub location: f64,
    pub mass: f64,
    pub source_alpha: Span,
    /// Eulerian interval on which `ū_x = -2 / t_star`.
    pub source_x: Span,
}

/// A time at which part of the energy concentrates into atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularEvent {
    pub t_star: f64,
    /// Common value `c = ū_x` on the generating set, `c = -2 / t_star`.
    pub slope: f64,
    pub atoms: Vec<EventAtom>,
}

impl SingularEvent {
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }
}

/// Every nonzero slope `c` of `ū` on a piece of positive length produces a
/// concentration at `t = -2 / c`. Slopes within `tol_slope` of each other are
/// grouped into one event, timed by the slope of the group's longest piece.
/// Events are sorted by `|t_star|`.
pub fn predict_singular_times(param: &AlphaParametrization) -> Result<Vec<SingularEvent>> {
    let tol = param.tolerances();
    let u = param.datum().u_bar();
    let mut pieces: Vec<(f64, f64)> = u
        .breakpoints()
        .windows(2)
        .zip(u.slopes())
        .filter(|(_, s)| s.abs() > tol.tol_slope)
        .map(|(w, s)| (s, w[1] - w[0]))
        .collect();
    pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
    // (first slope of the group, slope of its longest piece, that length)
    let mut groups: Vec<(f64, f64, f64)> = Vec::new();
    for (s, len) in pieces {
        match groups.last_mut() {
            Some(g) if s - g.0 <= tol.tol_slope => {
                if len > g.2 {
                    g.1 = s;
                    g.2 = len;
                }
            }
            _ => groups.push((s, s, len)),
        }
    }
    let groups: Vec<f64> = groups.into_iter().map(|g| g.1).collect();
    let mut events = Vec::with_capacity(groups.len());
    for c in groups {
        let t_star = -2.0 / c;
        let snap = evolve(param, t_star)?;
        let atoms = snap
            .mu
            .atoms()
            .iter()
            .map(|a| {
                let source_alpha = a.source.ok_or_else(|| {
                    Error::Internal(format!("atom at {} has no source span", a.location))
                })?;
                Ok(EventAtom {
                    location: a.location,
                    mass: a.mass,
                    source_alpha,
                    source_x: param.source_interval(&source_alpha),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        events.push(SingularEvent {
            t_star,
            slope: c,
            atoms,
        });
    }
    events.sort_by(|a, b| {
        a.t_star
            .abs()
            .total_cmp(&b.t_star.abs())
            .then(a.t_star.total_cmp(&b.t_star))
    });
    Ok(events)
}

fn require_absolutely_continuous(datum: &InitialDatum) -> Result<()> {
    match datum.atoms().len() {
        0 => Ok(()),
        n => Err(Error::AtomsPresent(n)),
    }
}

/// Classical flow map `X(ξ, t) = ξ + ū(ξ) t + t²/4 F̄(ξ)` of an absolutely
/// continuous datum, as a piecewise-linear function of ξ.
pub fn flow_map(datum: &InitialDatum, t: f64) -> Result<PiecewiseLinear> {
    require_absolutely_continuous(datum)?;
    let cumulative = datum.ac_density().antiderivative()?;
    let u = datum.u_bar();
    let xs = cumulative.breakpoints().to_vec();
    let ys = xs
        .iter()
        .zip(cumulative.values())
        .map(|(&x, &c)| x + u.evaluate(x) * t + 0.25 * t * t * c)
        .collect();
    PiecewiseLinear::new(xs, ys, 1.0, 1.0)
}

/// Scalar form of [`flow_map`].
pub fn flow_map_x(datum: &InitialDatum, xi: f64, t: f64) -> Result<f64> {
    require_absolutely_continuous(datum)?;
    let cumulative = datum.ac_density().integrate(f64::NEG_INFINITY, xi)?;
    Ok(xi + datum.u_bar().evaluate(xi) * t + 0.25 * t * t * cumulative)
}

/// Velocity `∂_t X(ξ, t) = ū(ξ) + t/2 F̄(ξ)` along the classical flow.
pub fn flow_velocity(datum: &InitialDatum, xi: f64, t: f64) -> Result<f64> {
    require_absolutely_continuous(datum)?;
    let cumulative = datum.ac_density().integrate(f64::NEG_INFINITY, xi)?;
    Ok(datum.u_bar().evaluate(xi) + 0.5 * t * cumulative)
}

/// Uses `u(·, s)` as a new absolutely continuous datum. Fails when `μ(s)`
/// carries atoms.
pub fn restart(param: &AlphaParametrization, s: f64) -> Result<InitialDatum> {
    let snap = evolve(param, s)?;
    if snap.is_singular {
        return Err(Error::SingularTime(s));
    }
    InitialDatum::from_velocity(snap.u)
}

/// Deviations between the original evolution and the one restarted at `s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemigroupReport {
    pub s: f64,
    pub t: f64,
    /// `max |X(y(α, s), t - s) - y(α, t)|`
    pub characteristic_deviation: f64,
    /// `max |ũ(ξ) + (t-s)/2 F̃(ξ) - u(y(α, t), t)|` with `ξ = y(α, s)`
    pub velocity_deviation: f64,
    /// CDF sup-distance between `X(·, t-s) # (ũ_x² dξ)` and `μ(t)`
    pub measure_distance: f64,
}

impl SemigroupReport {
    pub fn max_deviation(&self) -> f64 {
        self.characteristic_deviation
            .max(self.velocity_deviation)
            .max(self.measure_distance)
    }
}

pub fn check_semigroup(
    param: &AlphaParametrization,
    s: f64,
    t: f64,
    grid: &[f64],
) -> Result<SemigroupReport> {
    let restarted = restart(param, s)?;
    let dt = t - s;
    let mut characteristic_deviation: f64 = 0.0;
    let mut velocity_deviation: f64 = 0.0;
    for &alpha in grid {
        let xi = param.y_at(alpha, s);
        let lhs = flow_map_x(&restarted, xi, dt)?;
        characteristic_deviation = characteristic_deviation.max((lhs - param.y_at(alpha, t)).abs());
        let u = flow_velocity(&restarted, xi, dt)?;
        velocity_deviation = velocity_deviation.max((u - param.u_along(alpha, t)).abs());
    }
    let pushed = pushforward_decompose(
        &flow_map(&restarted, dt)?,
        &restarted.ac_density(),
        param.tolerances(),
    )?;
    let direct = evolve(param, t)?;
    Ok(SemigroupReport {
        s,
        t,
        characteristic_deviation,
        velocity_deviation,
        measure_distance: cdf_sup_distance(&pushed, &direct.mu),
    })
}
