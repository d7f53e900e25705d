use std::collections::VecDeque;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::grid::VectorField2;
use crate::patterns::{angle_dist_mod_pi, LineField, OrientedField};

use super::winding::winding_number;

/// Jumps of the line direction between adjacent cells in
/// `(π/2 − ROUGHNESS_GUARD, π/2]` make the sign choice ill-defined.
pub const ROUGHNESS_GUARD: f64 = 0.2;

/// Starting cell of the region growing and the sign given to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftSeed {
    pub cell: usize,
    pub sign: f64,
}

/// Certificate of non-orientability: a closed loop of cells whose line
/// field winds by a half-integer.
#[derive(Debug, Clone, PartialEq)]
pub struct NonOrientableWitness {
    /// Counterclockwise tree loop closed by the conflicting edge.
    pub cells: Vec<usize>,
    pub edge: (usize, usize),
    pub winding: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LiftOutcome {
    Oriented(OrientedField),
    NonOrientable(NonOrientableWitness),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftResult {
    pub outcome: LiftOutcome,
    /// One seed per 4-connected component of the mask.
    pub seeds: Vec<LiftSeed>,
}

impl LiftResult {
    pub fn is_orientable(&self) -> bool {
        matches!(self.outcome, LiftOutcome::Oriented(_))
    }

    pub fn oriented(&self) -> Option<&OrientedField> {
        match &self.outcome {
            LiftOutcome::Oriented(m) => Some(m),
            LiftOutcome::NonOrientable(_) => None,
        }
    }

    pub fn witness(&self) -> Option<&NonOrientableWitness> {
        match &self.outcome {
            LiftOutcome::NonOrientable(w) => Some(w),
            LiftOutcome::Oriented(_) => None,
        }
    }
}

/// Lifts a line field to a unit vector field, seeding each component at its
/// first cell with the orientation `(cos θ, sin θ)`.
pub fn lift(field: &LineField) -> Result<LiftResult> {
    lift_from(field, &[])
}

/// Lifts with explicit seeds; components without a seed get the default one.
pub fn lift_from(field: &LineField, seeds: &[LiftSeed]) -> Result<LiftResult> {
    let lat = *field.lattice();
    let n = lat.len();
    let mut sign = vec![0.0f64; n];
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut used_seeds = Vec::new();
    let dir = |i: usize| Vec2::from_angle(field.theta(i));

    let mut order: Vec<LiftSeed> = seeds.to_vec();
    order.extend((0..n).filter(|&i| field.is_defined(i)).map(|cell| LiftSeed { cell, sign: 1.0 }));

    for seed in order {
        if !field.is_defined(seed.cell) || sign[seed.cell] != 0.0 {
            continue;
        }
        if seed.sign != 1.0 && seed.sign != -1.0 {
            return Err(Error::InvalidArgument(format!("seed sign must be ±1, got {}", seed.sign)));
        }
        used_seeds.push(seed);
        sign[seed.cell] = seed.sign;
        let mut queue = VecDeque::from([seed.cell]);
        while let Some(c) = queue.pop_front() {
            let mc = dir(c) * sign[c];
            for nb in lat.neighbors4(c) {
                if !field.is_defined(nb) {
                    continue;
                }
                let jump = angle_dist_mod_pi(field.theta(c), field.theta(nb));
                if jump > FRAC_PI_2 - ROUGHNESS_GUARD {
                    return Err(Error::TooRough { a: c, b: nb, jump });
                }
                let proposed = if mc.dot(dir(nb)) >= 0.0 { 1.0 } else { -1.0 };
                if sign[nb] == 0.0 {
                    sign[nb] = proposed;
                    parent[nb] = c;
                    depth[nb] = depth[c] + 1;
                    queue.push_back(nb);
                } else if sign[nb] != proposed {
                    let cells = tree_loop(&parent, &depth, c, nb);
                    let cells = counterclockwise(&lat, cells);
                    let winding = winding_number(field, &cells)?;
                    return Ok(LiftResult {
                        outcome: LiftOutcome::NonOrientable(NonOrientableWitness {
                            cells,
                            edge: (c, nb),
                            winding,
                        }),
                        seeds: used_seeds,
                    });
                }
            }
        }
    }
    let values = (0..n)
        .map(|i| if field.is_defined(i) { (dir(i) * sign[i]).to_array() } else { [0.0; 2] })
        .collect();
    let m = OrientedField::new(VectorField2::new(lat, field.mask().to_vec(), values)?)?;
    Ok(LiftResult {
        outcome: LiftOutcome::Oriented(m),
        seeds: used_seeds,
    })
}

/// Path `a → lca → b` through the BFS tree.
fn tree_loop(parent: &[usize], depth: &[usize], a: usize, b: usize) -> Vec<usize> {
    let (mut x, mut y) = (a, b);
    let mut left = vec![x];
    let mut right = vec![y];
    while depth[x] > depth[y] {
        x = parent[x];
        left.push(x);
    }
    while depth[y] > depth[x] {
        y = parent[y];
        right.push(y);
    }
    while x != y {
        x = parent[x];
        y = parent[y];
        left.push(x);
        right.push(y);
    }
    right.pop();
    right.reverse();
    left.extend(right);
    left
}

fn counterclockwise(lat: &crate::grid::Lattice, mut cells: Vec<usize>) -> Vec<usize> {
    let area: f64 = (0..cells.len())
        .map(|k| lat.center(cells[k]).cross(lat.center(cells[(k + 1) % cells.len()])))
        .sum();
    if area < 0.0 {
        cells.reverse();
    }
    cells
}
