//! The α-parametrization of an initial datum and the global characteristics.
//!
//! With `G(x) = x + μ̄((-∞, x])`, the map `x̄` is the pseudo-inverse of `G`,
//! `f = 1 - x̄'` is the energy density in α, and
//!
//! ```text
//! y(α, t) = x̄(α) + ū(x̄(α)) t + t²/4 (α - x̄(α))
//! u(y(α, t), t) = ū(x̄(α)) + t/2 (α - x̄(α))
//! ```
//!
//! Atoms of `μ̄` become flat spans of `x̄` (the set `A₀`), everything else is
//! the regular set `B₀` where `x̄' > 0`.

use crate::error::{Error, Result};
use crate::measure::{Atom, RadonMeasure, Span};
use crate::pwfun::{merge_breakpoints, MonotoneGraph, PiecewiseConstant, PiecewiseLinear};
use crate::Tolerances;

/// A pair `(ū, μ̄)` with `ū` continuous piecewise linear, constant outside a
/// bounded window, and `μ̄ = ū_x² dx + Σ m_k δ_{a_k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialDatum {
    u_bar: PiecewiseLinear,
    atoms: Vec<Atom>,
}

impl InitialDatum {
    pub fn new(u_bar: PiecewiseLinear, atoms: Vec<Atom>) -> Result<Self> {
        if u_bar.left_slope() != 0.0 || u_bar.right_slope() != 0.0 {
            return Err(Error::InvalidDatum(
                "velocity must be constant outside a bounded window".into(),
            ));
        }
        if let Some(a) = atoms.iter().find(|a| !(a.mass > 0.0 && a.mass.is_finite())) {
            return Err(Error::InvalidDatum(format!(
                "atom mass must be positive, got {} at {}",
                a.mass, a.location
            )));
        }
        if atoms.iter().any(|a| !a.location.is_finite())
            || atoms.windows(2).any(|w| w[1].location <= w[0].location)
        {
            return Err(Error::InvalidDatum(
                "atom locations must be finite and strictly increasing".into(),
            ));
        }
        let atoms = atoms
            .into_iter()
            .map(|a| Atom::new(a.location, a.mass))
            .collect();
        Ok(Self { u_bar, atoms })
    }

    /// Absolutely continuous datum `(ū, ū_x² dx)`.
    pub fn from_velocity(u_bar: PiecewiseLinear) -> Result<Self> {
        Self::new(u_bar, Vec::new())
    }

    pub fn u_bar(&self) -> &PiecewiseLinear {
        &self.u_bar
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn u_bar_x(&self) -> PiecewiseConstant {
        self.u_bar.derivative()
    }

    /// Density of `μ̄_ac`, always `ū_x²`.
    pub fn ac_density(&self) -> PiecewiseConstant {
        self.u_bar_x().map(|s| s * s)
    }

    pub fn measure(&self) -> RadonMeasure {
        RadonMeasure::new(self.ac_density(), self.atoms.clone())
            .expect("validated datum yields a valid measure")
    }

    pub fn energy(&self) -> f64 {
        self.measure().total_mass()
    }

    pub fn u_left(&self) -> f64 {
        self.u_bar.values()[0]
    }

    pub fn u_right(&self) -> f64 {
        self.u_bar.values()[self.u_bar.len() - 1]
    }

    /// Smallest interval containing every breakpoint and atom.
    pub fn window(&self) -> (f64, f64) {
        let xs = self.u_bar.breakpoints();
        let mut lo = xs[0];
        let mut hi = xs[xs.len() - 1];
        for a in &self.atoms {
            lo = lo.min(a.location);
            hi = hi.max(a.location);
        }
        (lo, hi)
    }
}

/// Classification of an α-piece at a fixed time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaClass {
    /// `y_α > 0`: feeds the absolutely continuous part.
    Regular,
    /// Flat span of positive length: collapses onto an atom.
    PurePoint,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifiedSpan {
    pub span: Span,
    pub class: AlphaClass,
}

/// Partition of the α-line at time `t` into maximal same-class spans. The
/// outermost spans extend to ±∞.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaPartition {
    pub t: f64,
    pub spans: Vec<ClassifiedSpan>,
    /// Always empty: a piecewise-linear datum has no Cantor-type flat set.
    pub singular_continuous: Vec<Span>,
}

impl AlphaPartition {
    pub fn pure_point(&self) -> impl Iterator<Item = &Span> {
        self.spans
            .iter()
            .filter(|s| s.class == AlphaClass::PurePoint)
            .map(|s| &s.span)
    }

    pub fn class_at(&self, alpha: f64) -> AlphaClass {
        self.spans
            .iter()
            .find(|s| alpha >= s.span.start && alpha <= s.span.end)
            .map_or(AlphaClass::Regular, |s| s.class)
    }
}

/// Lagrangian state `(x̄, f, ū∘x̄, E)` from which every time is evaluated.
#[derive(Clone, Debug)]
pub struct AlphaParametrization {
    datum: InitialDatum,
    x_bar: PiecewiseLinear,
    x_bar_slope: PiecewiseConstant,
    f: PiecewiseConstant,
    v_bar: PiecewiseLinear,
    u_bar_x: PiecewiseConstant,
    energy: f64,
    grid: Vec<f64>,
    tol: Tolerances,
}

impl AlphaParametrization {
    pub fn build(datum: &InitialDatum, tol: Tolerances) -> Result<Self> {
        let cumulative = datum.ac_density().antiderivative()?;
        let base = PiecewiseLinear::new(
            cumulative.breakpoints().to_vec(),
            cumulative
                .breakpoints()
                .iter()
                .zip(cumulative.values())
                .map(|(x, c)| x + c)
                .collect(),
            1.0,
            1.0,
        )?;
        let jumps = datum.atoms.iter().map(|a| (a.location, a.mass)).collect();
        let graph = MonotoneGraph::new(base, jumps)?;
        let x_bar = graph.pseudo_inverse();
        let x_bar_slope = x_bar.derivative();
        let f = x_bar_slope.map(|s| (1.0 - s).clamp(0.0, 1.0));
        let v_bar = datum.u_bar.compose(&x_bar)?;
        let grid = merge_breakpoints(x_bar.breakpoints(), v_bar.breakpoints());
        Ok(Self {
            energy: datum.energy(),
            u_bar_x: datum.u_bar_x(),
            datum: datum.clone(),
            x_bar,
            x_bar_slope,
            f,
            v_bar,
            grid,
            tol,
        })
    }

    pub fn datum(&self) -> &InitialDatum {
        &self.datum
    }

    pub fn x_bar(&self) -> &PiecewiseLinear {
        &self.x_bar
    }

    pub fn f(&self) -> &PiecewiseConstant {
        &self.f
    }

    pub fn v_bar(&self) -> &PiecewiseLinear {
        &self.v_bar
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// Common α-breakpoints of `x̄` and `ū∘x̄`; every time-`t` object is affine
    /// between consecutive entries.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// `ū_x(x̄(α))`, right-limit at breakpoints.
    pub fn slope_at(&self, alpha: f64) -> f64 {
        self.u_bar_x.evaluate(self.x_bar.evaluate(alpha))
    }

    /// `x̄'(α)`, right-limit at breakpoints.
    pub fn x_bar_slope_at(&self, alpha: f64) -> f64 {
        self.x_bar_slope.evaluate(alpha)
    }

    /// Whether `α` lies in `A₀` (a flattened atom of `μ̄`).
    pub fn in_initial_singular_set(&self, alpha: f64) -> bool {
        self.x_bar_slope_at(alpha) <= self.tol.tol_slope
    }

    fn y_from(alpha: f64, xb: f64, vb: f64, t: f64) -> f64 {
        xb + vb * t + 0.25 * t * t * (alpha - xb)
    }

    fn u_from(alpha: f64, xb: f64, vb: f64, t: f64) -> f64 {
        vb + 0.5 * t * (alpha - xb)
    }

    pub fn y_at(&self, alpha: f64, t: f64) -> f64 {
        Self::y_from(
            alpha,
            self.x_bar.evaluate(alpha),
            self.v_bar.evaluate(alpha),
            t,
        )
    }

    /// `y_α(α, t)`, one-sided (right) at breakpoints.
    pub fn y_alpha(&self, alpha: f64, t: f64) -> f64 {
        let xs = self.x_bar_slope_at(alpha);
        if xs <= self.tol.tol_slope {
            0.25 * t * t
        } else {
            let bracket = 1.0 + 0.5 * t * self.slope_at(alpha);
            xs * bracket * bracket
        }
    }

    /// Velocity carried by the characteristic through `α`.
    pub fn u_along(&self, alpha: f64, t: f64) -> f64 {
        Self::u_from(
            alpha,
            self.x_bar.evaluate(alpha),
            self.v_bar.evaluate(alpha),
            t,
        )
    }

    /// `α - x̄(α)`, the energy to the left of the characteristic.
    pub fn cumulative_energy(&self, alpha: f64) -> f64 {
        alpha - self.x_bar.evaluate(alpha)
    }

    fn batch(
        &self,
        t: f64,
        value: fn(f64, f64, f64, f64) -> f64,
        tails: (f64, f64),
    ) -> PiecewiseLinear {
        let ys = self
            .grid
            .iter()
            .map(|&a| value(a, self.x_bar.evaluate(a), self.v_bar.evaluate(a), t))
            .collect();
        PiecewiseLinear::new(self.grid.clone(), ys, tails.0, tails.1)
            .expect("grid is strictly increasing")
    }

    /// `y(·, t)` as a piecewise-linear function of α.
    pub fn characteristics(&self, t: f64) -> PiecewiseLinear {
        let tail = |xs: f64, vs: f64| xs + vs * t + 0.25 * t * t * (1.0 - xs);
        let tails = (
            tail(self.x_bar.left_slope(), self.v_bar.left_slope()),
            tail(self.x_bar.right_slope(), self.v_bar.right_slope()),
        );
        self.batch(t, Self::y_from, tails)
    }

    /// `α ↦ u(y(α, t), t)` on the same grid as [`characteristics`](Self::characteristics).
    pub fn velocities(&self, t: f64) -> PiecewiseLinear {
        let tail = |xs: f64, vs: f64| vs + 0.5 * t * (1.0 - xs);
        let tails = (
            tail(self.x_bar.left_slope(), self.v_bar.left_slope()),
            tail(self.x_bar.right_slope(), self.v_bar.right_slope()),
        );
        self.batch(t, Self::u_from, tails)
    }

    /// Splits the α-line into the regular set `B_t` and the flat spans that
    /// collapse to atoms at time `t`. At `t = 0` this is the initial
    /// partition into `B₀` and `A₀`.
    pub fn classify_alpha(&self, t: f64) -> AlphaPartition {
        let mut spans: Vec<ClassifiedSpan> = Vec::new();
        let mut push = |span: Span, class: AlphaClass| match spans.last_mut() {
            Some(last) if last.class == class => last.span.end = span.end,
            _ => spans.push(ClassifiedSpan { span, class }),
        };
        let g = &self.grid;
        push(Span::new(f64::NEG_INFINITY, g[0]), AlphaClass::Regular);
        for w in g.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let flat = if t == 0.0 {
                self.in_initial_singular_set(mid)
            } else {
                self.y_alpha(mid, t) <= self.tol.tol_slope
            };
            let class = if flat {
                AlphaClass::PurePoint
            } else {
                AlphaClass::Regular
            };
            push(Span::new(w[0], w[1]), class);
        }
        push(
            Span::new(g[g.len() - 1], f64::INFINITY),
            AlphaClass::Regular,
        );
        AlphaPartition {
            t,
            spans,
            singular_continuous: Vec::new(),
        }
    }

    /// Eulerian interval `[x̄(a), x̄(b)]` generated by an α-span.
    pub fn source_interval(&self, span: &Span) -> Span {
        Span::new(
            self.x_bar.evaluate(span.start),
            self.x_bar.evaluate(span.end),
        )
    }
}
