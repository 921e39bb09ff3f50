//! JSON datum files and the built-in demo data.
//!
//! A datum file lists `ū` by its value at `-∞` and the slopes on a
//! contiguous run of pieces; `ū` is constant outside the pieces.
//!
//! ```json
//! { "u_left": 0, "pieces": [[0, 1, -1]], "atoms": [[2.5, 0.5]] }
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::lagrangian::InitialDatum;
use crate::measure::Atom;
use crate::pwfun::PiecewiseLinear;

/// Largest accepted fat-Cantor depth; beyond it the removed intervals fall
/// below double resolution.
pub const MAX_CANTOR_DEPTH: u32 = 20;

#[derive(Debug, Error)]
pub enum DatumError {
    #[error("malformed datum file: {0}")]
    Malformed(#[from] serde_json::Error),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("piece {index} is empty or inverted: [{start}, {end}]")]
    EmptyPiece { index: usize, start: f64, end: f64 },

    #[error("pieces are not contiguous: piece {index} starts at {start}, previous ends at {previous_end}")]
    NonContiguous {
        index: usize,
        start: f64,
        previous_end: f64,
    },

    #[error("atom mass must be positive (atom {index} has mass {mass})")]
    NonPositiveMass { index: usize, mass: f64 },

    #[error("atom locations must be strictly increasing (atom {index} at {location})")]
    UnsortedAtoms { index: usize, location: f64 },

    #[error(transparent)]
    Invalid(#[from] Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatumFile {
    pub u_left: f64,
    #[serde(default)]
    pub pieces: Vec<[f64; 3]>,
    #[serde(default)]
    pub atoms: Vec<[f64; 2]>,
}

impl DatumFile {
    pub fn from_json(text: &str) -> Result<Self, DatumError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("datum files serialize")
    }

    pub fn from_datum(datum: &InitialDatum) -> Self {
        let u = datum.u_bar();
        let xs = u.breakpoints();
        let pieces = xs
            .windows(2)
            .zip(u.slopes())
            .map(|(w, s)| [w[0], w[1], s])
            .collect();
        let atoms = datum.atoms().iter().map(|a| [a.location, a.mass]).collect();
        DatumFile {
            u_left: datum.u_left(),
            pieces,
            atoms,
        }
    }

    pub fn to_datum(&self) -> Result<InitialDatum, DatumError> {
        if !self.u_left.is_finite() {
            return Err(DatumError::NonFinite("u_left".into()));
        }
        let mut xs = Vec::with_capacity(self.pieces.len() + 1);
        let mut ys = Vec::with_capacity(self.pieces.len() + 1);
        for (index, &[start, end, slope]) in self.pieces.iter().enumerate() {
            if !(start.is_finite() && end.is_finite() && slope.is_finite()) {
                return Err(DatumError::NonFinite(format!("piece {index}")));
            }
            if end <= start {
                return Err(DatumError::EmptyPiece { index, start, end });
            }
            match xs.last() {
                None => {
                    xs.push(start);
                    ys.push(self.u_left);
                }
                Some(&previous_end) if previous_end != start => {
                    return Err(DatumError::NonContiguous {
                        index,
                        start,
                        previous_end,
                    });
                }
                Some(_) => {}
            }
            let y = ys[ys.len() - 1] + slope * (end - start);
            xs.push(end);
            ys.push(y);
        }
        let u_bar = if xs.is_empty() {
            PiecewiseLinear::constant(self.u_left)
        } else {
            PiecewiseLinear::new(xs, ys, 0.0, 0.0)?
        };

        let mut atoms = Vec::with_capacity(self.atoms.len());
        for (index, &[location, mass]) in self.atoms.iter().enumerate() {
            if !(location.is_finite() && mass.is_finite()) {
                return Err(DatumError::NonFinite(format!("atom {index}")));
            }
            if mass <= 0.0 {
                return Err(DatumError::NonPositiveMass { index, mass });
            }
            if atoms.last().is_some_and(|a: &Atom| a.location >= location) {
                return Err(DatumError::UnsortedAtoms { index, location });
            }
            atoms.push(Atom::new(location, mass));
        }
        Ok(InitialDatum::new(u_bar, atoms)?)
    }
}

pub fn parse_datum(text: &str) -> Result<InitialDatum, DatumError> {
    DatumFile::from_json(text)?.to_datum()
}

pub fn emit_datum(datum: &InitialDatum) -> String {
    DatumFile::from_datum(datum).to_json()
}

/// `ū = 0` left of 0, `-x` on `[0, 1]`, `-1` right of 1.
pub fn demo_intro() -> InitialDatum {
    let u = PiecewiseLinear::from_points(&[(0.0, 0.0), (1.0, -1.0)], 0.0, 0.0)
        .expect("valid intro datum");
    InitialDatum::from_velocity(u).expect("valid intro datum")
}

/// `ū ≡ 0` with a single atom of mass `m` at the origin.
pub fn demo_atom(m: f64) -> Result<InitialDatum, Error> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "atom mass must be positive and finite, got {m}"
        )));
    }
    InitialDatum::new(PiecewiseLinear::constant(0.0), vec![Atom::new(0.0, m)])
}

/// Depth-`depth` fat Cantor construction on `[0, 1]`.
///
/// Step `n` removes the open middle interval of length `4^-n` from each of the
/// `2^(n-1)` remaining intervals; `ū_x = -1 + 1/n` there and `ū_x = -1` on the
/// `2^depth` kept intervals. `ū(0) = 0` and `ū` is constant outside `[0, 1]`.
pub fn demo_cantor(depth: u32) -> Result<InitialDatum, Error> {
    if !(1..=MAX_CANTOR_DEPTH).contains(&depth) {
        return Err(Error::InvalidArgument(format!(
            "cantor depth must lie in 1..={MAX_CANTOR_DEPTH}, got {depth}"
        )));
    }
    let mut pieces = cantor_pieces(depth);
    pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut points = Vec::with_capacity(pieces.len() + 1);
    points.push((0.0, 0.0));
    let mut u = 0.0;
    for (start, end, slope) in pieces {
        u += slope * (end - start);
        points.push((end, u));
    }
    InitialDatum::from_velocity(PiecewiseLinear::from_points(&points, 0.0, 0.0)?)
}

/// `(start, end, slope)` triples covering `[0, 1]`, unsorted.
fn cantor_pieces(depth: u32) -> Vec<(f64, f64, f64)> {
    let mut kept = vec![(0.0, 1.0)];
    let mut pieces = Vec::with_capacity(1 << (depth + 1));
    let mut removed_len = 1.0;
    for n in 1..=depth {
        removed_len /= 4.0;
        let slope = -1.0 + 1.0 / f64::from(n);
        let mut next = Vec::with_capacity(kept.len() * 2);
        for (a, b) in kept {
            let mid = 0.5 * (a + b);
            let lo = mid - 0.5 * removed_len;
            let hi = mid + 0.5 * removed_len;
            pieces.push((lo, hi, slope));
            next.push((a, lo));
            next.push((hi, b));
        }
        kept = next;
    }
    pieces.extend(kept.into_iter().map(|(a, b)| (a, b, -1.0)));
    pieces
}

/// Total length of the kept intervals at the given depth.
pub fn cantor_kept_length(depth: u32) -> f64 {
    0.5 + 0.5f64.powi(depth as i32 + 1)
}
