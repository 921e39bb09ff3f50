//! Finite nonnegative Radon measures on the line: a piecewise-constant
//! density plus finitely many atoms.
//!
//! A singular-continuous part is never produced by the piecewise-linear
//! class, so there is no field for it. Cantor-type concentration shows up as
//! a growing family of atoms (see `datum::demo_cantor`).

use crate::error::{Error, Result};
use crate::pwfun::{merge_breakpoints, PiecewiseConstant, PiecewiseLinear};
use crate::Tolerances;

/// Closed interval `[start, end]` in a parameter space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Span {
    pub start: f64,
    pub end: f64,
}

impl Span {
    pub fn new(start: f64, end: f64) -> Self {
        Self { start, end }
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.start + self.end)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
    /// Parameter span that collapsed onto this atom, when known.
    pub source: Option<Span>,
}

impl Atom {
    pub fn new(location: f64, mass: f64) -> Self {
        Self {
            location,
            mass,
            source: None,
        }
    }
}

/// Whether a cumulative distribution includes the point itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    /// `μ((-∞, x))`
    Open,
    /// `μ((-∞, x])`
    Closed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadonMeasure {
    density: PiecewiseConstant,
    atoms: Vec<Atom>,
    // ∫_{-∞}^{xs[i]} density
    ac_cumulative: Vec<f64>,
    // Σ of the first k atom masses
    atom_cumulative: Vec<f64>,
}

impl RadonMeasure {
    pub fn new(density: PiecewiseConstant, atoms: Vec<Atom>) -> Result<Self> {
        if !density.is_density() {
            return Err(Error::InvalidMeasure(
                "density must be nonnegative with zero tails".into(),
            ));
        }
        if let Some(a) = atoms.iter().find(|a| !(a.mass > 0.0 && a.mass.is_finite())) {
            return Err(Error::InvalidMeasure(format!(
                "atom at {} has non-positive mass {}",
                a.location, a.mass
            )));
        }
        if atoms.iter().any(|a| !a.location.is_finite())
            || atoms.windows(2).any(|w| w[1].location <= w[0].location)
        {
            return Err(Error::InvalidMeasure(
                "atom locations must be finite and strictly increasing".into(),
            ));
        }
        let mut ac_cumulative = Vec::with_capacity(density.breakpoints().len());
        if !density.breakpoints().is_empty() {
            let mut acc = 0.0;
            ac_cumulative.push(acc);
            for (lo, hi, v) in density.pieces() {
                acc += v * (hi - lo);
                ac_cumulative.push(acc);
            }
        }
        let mut atom_cumulative = Vec::with_capacity(atoms.len() + 1);
        let mut acc = 0.0;
        atom_cumulative.push(acc);
        for a in &atoms {
            acc += a.mass;
            atom_cumulative.push(acc);
        }
        Ok(Self {
            density,
            atoms,
            ac_cumulative,
            atom_cumulative,
        })
    }

    pub fn zero() -> Self {
        Self::new(PiecewiseConstant::zero(), Vec::new()).expect("zero measure is valid")
    }

    pub fn absolutely_continuous(density: PiecewiseConstant) -> Result<Self> {
        Self::new(density, Vec::new())
    }

    pub fn density(&self) -> &PiecewiseConstant {
        &self.density
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_absolutely_continuous(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn ac_mass(&self) -> f64 {
        self.ac_cumulative.last().copied().unwrap_or(0.0)
    }

    pub fn pp_mass(&self) -> f64 {
        self.atom_cumulative[self.atom_cumulative.len() - 1]
    }

    pub fn total_mass(&self) -> f64 {
        self.ac_mass() + self.pp_mass()
    }

    fn ac_cdf(&self, x: f64) -> f64 {
        let xs = self.density.breakpoints();
        let i = xs.partition_point(|&b| b <= x);
        if i == 0 {
            return 0.0;
        }
        let v = self.density.values()[i];
        self.ac_cumulative[i - 1] + v * (x - xs[i - 1])
    }

    pub fn cdf(&self, x: f64, endpoint: Endpoint) -> f64 {
        let k = match endpoint {
            Endpoint::Open => self.atoms.partition_point(|a| a.location < x),
            Endpoint::Closed => self.atoms.partition_point(|a| a.location <= x),
        };
        self.ac_cdf(x) + self.atom_cumulative[k]
    }
}

/// Sup-distance between the cumulative distributions of two measures, over
/// both endpoint conventions. Both CDFs are piecewise linear between the
/// merged breakpoints and atoms, so checking those points (with their one-
/// sided limits) gives the exact supremum.
pub fn cdf_sup_distance(a: &RadonMeasure, b: &RadonMeasure) -> f64 {
    let mut points = merge_breakpoints(a.density.breakpoints(), b.density.breakpoints());
    for atoms in [&a.atoms, &b.atoms] {
        let locs: Vec<f64> = atoms.iter().map(|x| x.location).collect();
        points = merge_breakpoints(&points, &locs);
    }
    points
        .into_iter()
        .flat_map(|p| {
            [Endpoint::Open, Endpoint::Closed]
                .into_iter()
                .map(move |e| (a.cdf(p, e) - b.cdf(p, e)).abs())
        })
        .fold(0.0, f64::max)
}

/// Largest rise of a map over a piece of length `len` that still counts as
/// flat: `tol_slope · len` plus the rounding of values of size `scale`
/// (see [`value_scale`]).
pub fn flat_allowance(len: f64, scale: f64, tol: &Tolerances) -> f64 {
    tol.tol_slope * len + 8.0 * f64::EPSILON * scale
}

/// `1 + max |v|`: the magnitude a map's breakpoint values are computed at.
pub fn value_scale(values: &[f64]) -> f64 {
    1.0 + values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Lebesgue decomposition of the push-forward `map # (weight dξ)`.
///
/// Pieces rising by more than [`flat_allowance`] contribute the density
/// `weight / map'` on their image; each maximal flat span with positive
/// weight collapses to an atom at its image point, labelled with the span.
/// Atoms whose locations are within `tol.tol_x` merge.
pub fn pushforward_decompose(
    map: &PiecewiseLinear,
    weight: &PiecewiseConstant,
    tol: &Tolerances,
) -> Result<RadonMeasure> {
    if map.left_slope() < 0.0 || map.right_slope() < 0.0 {
        return Err(Error::NotMonotone(
            "push-forward map has a decreasing tail".into(),
        ));
    }
    let (bx, by) = (map.breakpoints(), map.values());
    let scale = value_scale(by);
    for i in 0..bx.len().saturating_sub(1) {
        let rise = by[i + 1] - by[i];
        if rise < -flat_allowance(bx[i + 1] - bx[i], scale, tol) {
            return Err(Error::NotMonotone(format!(
                "push-forward map decreases by {} on ({}, {})",
                -rise,
                bx[i],
                bx[i + 1]
            )));
        }
    }
    if weight.left_tail() != 0.0 || weight.right_tail() != 0.0 {
        return Err(Error::NonIntegrable(
            "weight must vanish on both tails".into(),
        ));
    }
    let xs = weight.breakpoints();
    for (k, &v) in weight.values().iter().enumerate() {
        if v < 0.0 {
            return Err(Error::NegativeWeight {
                value: v,
                start: if k == 0 { f64::NEG_INFINITY } else { xs[k - 1] },
                end: if k == xs.len() { f64::INFINITY } else { xs[k] },
            });
        }
    }

    let grid = merge_breakpoints(map.breakpoints(), weight.breakpoints());
    if grid.len() < 2 {
        return Ok(RadonMeasure::zero());
    }

    let mut image_points = vec![map.evaluate(grid[0])];
    let mut densities = vec![0.0];
    let mut atoms: Vec<Atom> = Vec::new();
    // open flat span: (start ξ, end ξ, accumulated mass)
    let mut flat: Option<(f64, f64, f64)> = None;

    let close_flat = |flat: &mut Option<(f64, f64, f64)>, at: f64, atoms: &mut Vec<Atom>| {
        if let Some((start, end, mass)) = flat.take() {
            if mass > 0.0 {
                atoms.push(Atom {
                    location: at,
                    mass,
                    source: Some(Span::new(start, end)),
                });
            }
        }
    };

    for w in grid.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let len = hi - lo;
        let cursor = image_points[image_points.len() - 1];
        let image_lo = map.evaluate(lo);
        let image_hi = map.evaluate(hi);
        let mass = weight.evaluate(0.5 * (lo + hi)) * len;
        let flat_piece = image_hi - image_lo <= flat_allowance(len, scale, tol);
        if flat_piece || image_hi <= cursor {
            flat = Some(match flat {
                Some((start, _, m)) => (start, hi, m + mass),
                None => (lo, hi, mass),
            });
            continue;
        }
        close_flat(&mut flat, cursor, &mut atoms);
        image_points.push(image_hi);
        densities.push(mass / (image_hi - cursor));
    }
    let cursor = image_points[image_points.len() - 1];
    close_flat(&mut flat, cursor, &mut atoms);

    densities.push(0.0);
    let density = PiecewiseConstant::new(image_points, densities)?;

    let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match merged.last_mut() {
            Some(last) if (a.location - last.location).abs() <= tol.tol_x => {
                last.mass += a.mass;
                last.source = match (last.source, a.source) {
                    (Some(l), Some(r)) => Some(Span::new(l.start.min(r.start), l.end.max(r.end))),
                    (s, None) | (None, s) => s,
                };
            }
            _ => merged.push(a),
        }
    }
    RadonMeasure::new(density, merged)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_atom(at: f64) -> RadonMeasure {
        RadonMeasure::new(PiecewiseConstant::zero(), vec![Atom::new(at, 1.0)]).unwrap()
    }

    fn intro_density() -> PiecewiseConstant {
        PiecewiseConstant::new(vec![0.0, 1.0], vec![0.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn cdf_examples() {
        let z = RadonMeasure::zero();
        assert_eq!(z.cdf(3.0, Endpoint::Closed), 0.0);
        let mu = RadonMeasure::absolutely_continuous(intro_density()).unwrap();
        assert_eq!(mu.cdf(1.0, Endpoint::Open), 1.0);
        assert_eq!(mu.cdf(0.25, Endpoint::Closed), 0.25);
        let d = unit_atom(0.0);
        assert_eq!(d.cdf(0.0, Endpoint::Open), 0.0);
        assert_eq!(d.cdf(0.0, Endpoint::Closed), 1.0);
    }

    #[test]
    fn total_mass_examples() {
        assert_eq!(RadonMeasure::zero().total_mass(), 0.0);
        let mu = RadonMeasure::absolutely_continuous(intro_density()).unwrap();
        assert_eq!(mu.total_mass(), 1.0);
        let m3 = RadonMeasure::new(PiecewiseConstant::zero(), vec![Atom::new(0.0, 3.0)]).unwrap();
        assert_eq!(m3.total_mass(), 3.0);
    }

    #[test]
    fn measure_validation() {
        assert!(RadonMeasure::new(PiecewiseConstant::zero(), vec![Atom::new(0.0, -1.0)]).is_err());
        assert!(RadonMeasure::new(
            PiecewiseConstant::zero(),
            vec![Atom::new(1.0, 1.0), Atom::new(0.0, 1.0)]
        )
        .is_err());
        let negative = PiecewiseConstant::new(vec![0.0, 1.0], vec![0.0, -1.0, 0.0]).unwrap();
        assert!(RadonMeasure::absolutely_continuous(negative).is_err());
        assert!(RadonMeasure::absolutely_continuous(PiecewiseConstant::constant(1.0)).is_err());
    }

    #[test]
    fn sup_distance_examples() {
        let mu = RadonMeasure::absolutely_continuous(intro_density()).unwrap();
        assert_eq!(cdf_sup_distance(&mu, &mu), 0.0);
        assert_eq!(cdf_sup_distance(&unit_atom(0.0), &unit_atom(0.5)), 1.0);
        assert_eq!(cdf_sup_distance(&mu, &unit_atom(0.0)), 1.0);
        assert_eq!(cdf_sup_distance(&mu, &RadonMeasure::zero()), 1.0);
    }

    #[test]
    fn pushforward_by_identity_keeps_density() {
        let g = intro_density();
        let mu = pushforward_decompose(&PiecewiseLinear::identity(), &g, &Tolerances::default())
            .unwrap();
        assert!(mu.atoms().is_empty());
        assert_eq!(mu.density().evaluate(0.5), 1.0);
        assert_eq!(mu.total_mass(), 1.0);
    }

    #[test]
    fn pushforward_flat_span_becomes_atom() {
        // intro characteristics at t = 2: y ≡ 0 on α ∈ (0, 2)
        let y = PiecewiseLinear::from_points(&[(0.0, 0.0), (2.0, 0.0)], 1.0, 1.0).unwrap();
        let f = PiecewiseConstant::new(vec![0.0, 2.0], vec![0.0, 0.5, 0.0]).unwrap();
        let mu = pushforward_decompose(&y, &f, &Tolerances::default()).unwrap();
        assert_eq!(mu.atoms().len(), 1);
        let a = mu.atoms()[0];
        assert_eq!((a.location, a.mass), (0.0, 1.0));
        assert_eq!(a.source, Some(Span::new(0.0, 2.0)));
        assert_eq!(mu.ac_mass(), 0.0);
        assert_eq!(cdf_sup_distance(&mu, &unit_atom(0.0)), 0.0);
    }

    #[test]
    fn pushforward_atom_datum_at_t1() {
        // y = α/4 on (0, m), m = 2, f = 1 there
        let m = 2.0;
        let y = PiecewiseLinear::from_points(&[(0.0, 0.0), (m, m / 4.0)], 1.0, 1.0).unwrap();
        let f = PiecewiseConstant::new(vec![0.0, m], vec![0.0, 1.0, 0.0]).unwrap();
        let mu = pushforward_decompose(&y, &f, &Tolerances::default()).unwrap();
        assert!(mu.atoms().is_empty());
        assert_eq!(mu.density().evaluate(0.1), 4.0);
        assert_eq!(mu.density().evaluate(m / 4.0), 0.0);
        assert_eq!(mu.total_mass(), m);
    }

    #[test]
    fn flat_span_without_weight_has_no_atom() {
        let y =
            PiecewiseLinear::from_points(&[(0.0, 0.0), (1.0, 0.0), (2.0, 1.0)], 1.0, 1.0).unwrap();
        let g = PiecewiseConstant::new(vec![1.0, 2.0], vec![0.0, 3.0, 0.0]).unwrap();
        let mu = pushforward_decompose(&y, &g, &Tolerances::default()).unwrap();
        assert!(mu.atoms().is_empty());
        assert_eq!(mu.total_mass(), 3.0);
    }

    #[test]
    fn pushforward_rejects_bad_input() {
        let tol = Tolerances::default();
        let dec = PiecewiseLinear::from_points(&[(0.0, 1.0), (1.0, 0.0)], 1.0, 1.0).unwrap();
        assert!(matches!(
            pushforward_decompose(&dec, &intro_density(), &tol),
            Err(Error::NotMonotone(_))
        ));
        let neg = PiecewiseConstant::new(vec![0.0, 1.0], vec![0.0, -2.0, 0.0]).unwrap();
        assert!(matches!(
            pushforward_decompose(&PiecewiseLinear::identity(), &neg, &tol),
            Err(Error::NegativeWeight { .. })
        ));
    }

    #[test]
    fn separate_flat_spans_onto_one_point_merge() {
        // two flat spans joined by a flat piece with zero weight
        let y = PiecewiseLinear::from_points(
            &[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)],
            1.0,
            1.0,
        )
        .unwrap();
        let g = PiecewiseConstant::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 1.0, 0.0, 2.0, 0.0])
            .unwrap();
        let mu = pushforward_decompose(&y, &g, &Tolerances::default()).unwrap();
        assert_eq!(mu.atoms().len(), 1);
        assert_eq!(mu.atoms()[0].mass, 3.0);
    }
}
