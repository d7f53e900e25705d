use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::grid::Lattice;
use crate::patterns::OrientedField;

/// Indicator `χ(x, ξ) = 1` iff `m(x)·ξ > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticField {
    pub xi: Vec2,
    lattice: Lattice,
    mask: Vec<bool>,
    chi: Vec<u8>,
}

impl KineticField {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn is_defined(&self, idx: usize) -> bool {
        self.mask[idx]
    }

    pub fn chi(&self, idx: usize) -> u8 {
        self.chi[idx]
    }

    /// `χ` at the cell containing `p`, if it is defined.
    pub fn at(&self, p: Vec2) -> Option<u8> {
        let c = self.lattice.cell_containing(p)?;
        self.mask[c].then(|| self.chi[c])
    }
}

pub fn kinetic_field(m: &OrientedField, xi: Vec2) -> Result<KineticField> {
    if !((xi.norm() - 1.0).abs() <= 1e-9) {
        return Err(Error::InvalidArgument(format!("ξ must be a unit vector, |ξ| = {}", xi.norm())));
    }
    let lat = *m.lattice();
    let chi = (0..lat.len())
        .map(|i| u8::from(m.is_defined(i) && m.m(i).dot(xi) > 0.0))
        .collect();
    Ok(KineticField {
        xi,
        lattice: lat,
        mask: m.mask().to_vec(),
        chi,
    })
}

/// One maximal segment of a line inside the field mask.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chord {
    pub start: Vec2,
    pub end: Vec2,
    pub sign_changes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionReport {
    pub xi: Vec2,
    pub chords: Vec<Chord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstancyReport {
    pub directions: Vec<DirectionReport>,
}

impl ConstancyReport {
    pub fn chord_count(&self) -> usize {
        self.directions.iter().map(|d| d.chords.len()).sum()
    }

    pub fn max_sign_changes(&self) -> usize {
        self.directions
            .iter()
            .flat_map(|d| d.chords.iter().map(|c| c.sign_changes))
            .max()
            .unwrap_or(0)
    }

    pub fn total_sign_changes(&self) -> usize {
        self.directions
            .iter()
            .flat_map(|d| d.chords.iter().map(|c| c.sign_changes))
            .sum()
    }

    pub fn passes(&self) -> bool {
        self.max_sign_changes() == 0
    }
}

/// Unit directions at angles `(k + ½)·2π/n`.
pub fn directions(n: usize) -> Vec<Vec2> {
    (0..n).map(|k| Vec2::from_angle((k as f64 + 0.5) * TAU / n as f64)).collect()
}

/// Sign changes of `χ` along the chords of `lines` lines parallel to `χ.xi`.
///
/// Line offsets sit at `(k + ½)/lines` of the projected extent of the mask;
/// lines are sampled every `h/2` at the nearest cell and split into maximal
/// runs inside the mask.
pub fn chord_sign_changes(chi: &KineticField, lines: usize) -> DirectionReport {
    let lat = chi.lattice;
    let xi = chi.xi;
    let nu = xi.perp();
    let (mut smin, mut smax, mut tmin, mut tmax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..lat.len() {
        if chi.mask[i] {
            let c = lat.center(i);
            smin = smin.min(c.dot(nu));
            smax = smax.max(c.dot(nu));
            tmin = tmin.min(c.dot(xi));
            tmax = tmax.max(c.dot(xi));
        }
    }
    if !smin.is_finite() {
        return DirectionReport { xi, chords: Vec::new() };
    }
    let step = 0.5 * lat.h;
    let (t0, t1) = (tmin - lat.h, tmax + lat.h);
    let samples = ((t1 - t0) / step).ceil() as usize + 1;
    let chords = (0..lines)
        .into_par_iter()
        .flat_map_iter(|k| {
            let s = smin + (k as f64 + 0.5) / lines as f64 * (smax - smin);
            let mut out = Vec::new();
            let mut run: Option<(Vec2, Vec2, u8, usize)> = None;
            for q in 0..samples {
                let p = nu * s + xi * (t0 + q as f64 * step);
                match (chi.at(p), run.as_mut()) {
                    (Some(v), Some(r)) => {
                        if v != r.2 {
                            r.3 += 1;
                            r.2 = v;
                        }
                        r.1 = p;
                    }
                    (Some(v), None) => run = Some((p, p, v, 0)),
                    (None, _) => {
                        if let Some((a, b, _, n)) = run.take() {
                            out.push(Chord { start: a, end: b, sign_changes: n });
                        }
                    }
                }
            }
            if let Some((a, b, _, n)) = run {
                out.push(Chord { start: a, end: b, sign_changes: n });
            }
            out.into_iter().filter(|c| c.start != c.end)
        })
        .collect();
    DirectionReport { xi, chords }
}

/// Builds `χ(·, ξ)` for `n_directions` directions and counts sign changes along
/// `lines` chords-bearing lines per direction.
pub fn characteristic_constancy(m: &OrientedField, n_directions: usize, lines: usize) -> Result<ConstancyReport> {
    if n_directions == 0 || lines == 0 {
        return Err(Error::InvalidArgument("need at least one direction and one line".into()));
    }
    let directions = directions(n_directions)
        .into_iter()
        .map(|xi| kinetic_field(m, xi).map(|chi| chord_sign_changes(&chi, lines)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstancyReport { directions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RasterGrid;
    use crate::patterns::vortex_field;

    fn lattice() -> Lattice {
        Lattice::new(Vec2::new(-1.0, -1.0), 1.0 / 32.0, 64, 64).unwrap()
    }

    #[test]
    fn indicator_values() {
        let lat = lattice();
        let m = OrientedField::from_fn(lat, vec![true; lat.len()], |_| Vec2::new(0.0, 1.0)).unwrap();
        let up = kinetic_field(&m, Vec2::new(0.0, 1.0)).unwrap();
        let right = kinetic_field(&m, Vec2::new(1.0, 0.0)).unwrap();
        assert!((0..lat.len()).all(|i| up.chi(i) == 1 && right.chi(i) == 0));
        assert!(kinetic_field(&m, Vec2::new(1.0, 1.0)).is_err());
        let r = characteristic_constancy(&m, 16, 64).unwrap();
        assert!(r.passes());
        assert!(r.chord_count() >= 16 * 64);
    }

    #[test]
    fn vortex_indicator_is_constant_on_lines() {
        let lat = Lattice::new(Vec2::new(-1.0, -1.0), 1.0 / 128.0, 256, 256).unwrap();
        let g = RasterGrid::from_mask(lat, &vec![true; lat.len()]).unwrap();
        let m = vortex_field(&g, Vec2::ZERO, 1.0).unwrap();
        let chi = kinetic_field(&m, Vec2::new(1.0, 0.0)).unwrap();
        for i in 0..lat.len() {
            if chi.is_defined(i) {
                assert_eq!(chi.chi(i), u8::from(lat.center(i).y < 0.0));
            }
        }
        assert!(characteristic_constancy(&m, 16, 64).unwrap().passes());
    }

    #[test]
    fn jump_in_orientation_is_counted() {
        let lat = lattice();
        let m = OrientedField::from_fn(lat, vec![true; lat.len()], |p| {
            if p.x < 0.0 {
                Vec2::new(1.0, 0.0)
            } else {
                Vec2::new(-1.0, 0.0)
            }
        })
        .unwrap();
        let chi = kinetic_field(&m, Vec2::new(1.0, 0.0)).unwrap();
        let d = chord_sign_changes(&chi, 8);
        assert_eq!(d.chords.len(), 8);
        assert!(d.chords.iter().all(|c| c.sign_changes == 1));
    }
}
