use std::collections::VecDeque;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::grid::Lattice;
use crate::patterns::{angle_diff_mod_pi, LineField};

/// Total rotation of the line direction along a closed cell path, divided by 2π.
///
/// Consecutive cells must be 8-neighbors; the path is closed implicitly if the
/// last cell differs from the first.
pub fn winding_number(field: &LineField, cells: &[usize]) -> Result<f64> {
    if cells.len() < 3 {
        return Err(Error::InvalidLoop(format!("a loop needs at least 3 cells, got {}", cells.len())));
    }
    let lat = field.lattice();
    let mut total = 0.0;
    let n = cells.len();
    for k in 0..n {
        let (c, d) = (cells[k], cells[(k + 1) % n]);
        if c >= lat.len() || !field.is_defined(c) {
            return Err(Error::InvalidLoop(format!("cell {c} is not in the field mask")));
        }
        if c == d {
            continue;
        }
        let (ci, cj) = lat.coords(c);
        let (di, dj) = lat.coords(d);
        if ci.abs_diff(di) > 1 || cj.abs_diff(dj) > 1 {
            return Err(Error::InvalidLoop(format!("cells {c} and {d} are not adjacent")));
        }
        total += angle_diff_mod_pi(field.theta(c), field.theta(d));
    }
    Ok(total / TAU)
}

/// Nearest multiple of ½.
pub fn nearest_half(w: f64) -> f64 {
    (2.0 * w).round() / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DefectKind {
    /// Charge of a single 2×2 block of cells.
    Plaquette,
    /// Charge enclosed by a loop around a hole of the field mask.
    Hole,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Defect {
    pub kind: DefectKind,
    pub position: Vec2,
    pub charge: f64,
}

/// Windings of all 2×2 blocks of defined cells, counterclockwise; only
/// nonzero charges are returned.
pub fn plaquette_windings(field: &LineField) -> Vec<Defect> {
    let lat = *field.lattice();
    let mut out = Vec::new();
    for j in 0..lat.ny.saturating_sub(1) {
        for i in 0..lat.nx.saturating_sub(1) {
            let cells = [lat.index(i, j), lat.index(i + 1, j), lat.index(i + 1, j + 1), lat.index(i, j + 1)];
            if cells.iter().any(|&c| !field.is_defined(c)) {
                continue;
            }
            let w = winding_number(field, &cells).expect("plaquette cells are defined and adjacent");
            if w.abs() > 0.25 {
                out.push(Defect {
                    kind: DefectKind::Plaquette,
                    position: lat.center(cells[0]) + Vec2::new(0.5 * lat.h, 0.5 * lat.h),
                    charge: w,
                });
            }
        }
    }
    out
}

/// A bounded hole of the field mask with the loop of defined cells around it.
#[derive(Debug, Clone, PartialEq)]
pub struct HoleLoop {
    pub hole: Vec<usize>,
    /// Counterclockwise loop, or `None` when the surrounding ring touches
    /// other undefined cells.
    pub cells: Option<Vec<usize>>,
    pub centroid: Vec2,
}

/// Bounded 8-connected components of undefined cells, each with a
/// counterclockwise loop through the defined cells bordering it.
pub fn hole_loops(field: &LineField) -> Vec<HoleLoop> {
    let lat = *field.lattice();
    let mut label = vec![usize::MAX; lat.len()];
    let mut holes: Vec<Vec<usize>> = Vec::new();
    let mut bounded: Vec<bool> = Vec::new();
    for start in 0..lat.len() {
        if field.is_defined(start) || label[start] != usize::MAX {
            continue;
        }
        let id = holes.len();
        let mut cells = vec![start];
        let mut touches = false;
        label[start] = id;
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            touches |= lat.on_edge(c);
            for n in lat.neighbors8(c) {
                if !field.is_defined(n) && label[n] == usize::MAX {
                    label[n] = id;
                    cells.push(n);
                    queue.push_back(n);
                }
            }
        }
        holes.push(cells);
        bounded.push(!touches);
    }
    holes
        .into_iter()
        .zip(bounded)
        .filter(|(_, b)| *b)
        .map(|(hole, _)| {
            let centroid = hole.iter().fold(Vec2::ZERO, |acc, &c| acc + lat.center(c)) / hole.len() as f64;
            let cells = ring_loop(&lat, &hole).filter(|l| l.iter().all(|&c| field.is_defined(c)));
            HoleLoop { hole, cells, centroid }
        })
        .collect()
}

/// Outer contour (Moore neighbor tracing) of the 8-dilation of `hole`,
/// oriented counterclockwise.
fn ring_loop(lat: &Lattice, hole: &[usize]) -> Option<Vec<usize>> {
    let mut in_d = vec![false; lat.len()];
    for &c in hole {
        in_d[c] = true;
        for n in lat.neighbors8(c) {
            in_d[n] = true;
        }
    }
    // clockwise neighbor order, starting west
    const DIRS: [(isize, isize); 8] = [(-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1)];
    let (nx, ny) = (lat.nx as isize, lat.ny as isize);
    let member = |(x, y): (isize, isize)| {
        x >= 0 && y >= 0 && x < nx && y < ny && in_d[lat.index(x as usize, y as usize)]
    };
    let start = (0..lat.len()).find(|&i| in_d[i])?;
    let (si, sj) = lat.coords(start);
    let s = (si as isize, sj as isize);
    let mut cur = s;
    let mut back = (s.0 - 1, s.1);
    let mut first: Option<((isize, isize), (isize, isize))> = None;
    let mut contour = vec![s];
    for _ in 0..8 * lat.len() {
        let rel = (back.0 - cur.0, back.1 - cur.1);
        let k0 = DIRS.iter().position(|&d| d == rel).expect("backtrack is a neighbor");
        let mut step = None;
        for t in 1..=8 {
            let k = (k0 + t) % 8;
            let p = (cur.0 + DIRS[k].0, cur.1 + DIRS[k].1);
            if member(p) {
                let q = DIRS[(k + 7) % 8];
                step = Some((p, (cur.0 + q.0, cur.1 + q.1)));
                break;
            }
        }
        let Some((next, nb)) = step else { break };
        match first {
            Some(f) if f == (cur, next) => break,
            None => first = Some((cur, next)),
            _ => {}
        }
        contour.push(next);
        cur = next;
        back = nb;
    }
    if contour.len() > 1 && contour.last() == Some(&s) {
        contour.pop();
    }
    let mut cells: Vec<usize> = contour.iter().map(|&(x, y)| lat.index(x as usize, y as usize)).collect();
    let area: f64 = (0..cells.len())
        .map(|k| lat.center(cells[k]).cross(lat.center(cells[(k + 1) % cells.len()])))
        .sum();
    if area < 0.0 {
        cells.reverse();
    }
    Some(cells)
}

/// Charges of the bounded holes of the field mask (nonzero ones only).
pub fn hole_windings(field: &LineField) -> Vec<Defect> {
    hole_loops(field)
        .into_iter()
        .filter_map(|h| {
            let cells = h.cells?;
            let w = winding_number(field, &cells).ok()?;
            (w.abs() > 0.25).then_some(Defect {
                kind: DefectKind::Hole,
                position: h.centroid,
                charge: w,
            })
        })
        .collect()
}
