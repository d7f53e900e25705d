use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::patterns::LineField;

/// Color of a line direction: hue `2θ` (so `θ` and `θ + π` coincide) at full
/// saturation and value.
pub fn line_color(theta: f64) -> [u8; 3] {
    let hue = (2.0 * theta).rem_euclid(2.0 * PI) / (2.0 * PI) * 6.0;
    let sector = hue.floor() as usize % 6;
    let f = hue - hue.floor();
    let (up, down) = (f, 1.0 - f);
    let (r, g, b) = match sector {
        0 => (1.0, up, 0.0),
        1 => (down, 1.0, 0.0),
        2 => (0.0, 1.0, up),
        3 => (0.0, down, 1.0),
        4 => (up, 0.0, 1.0),
        _ => (1.0, 0.0, down),
    };
    let q = |v: f64| (v * 255.0).round() as u8;
    [q(r), q(g), q(b)]
}

fn write(path: &Path, header: String, body: Vec<u8>) -> Result<()> {
    let mut bytes = header.into_bytes();
    bytes.extend(body);
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Binary PPM of a line field; the top image row is the top of the domain,
/// cells outside the mask are black.
pub fn save_raster_line(path: impl AsRef<Path>, field: &LineField) -> Result<()> {
    let lat = field.lattice();
    let mut body = Vec::with_capacity(lat.len() * 3);
    for j in (0..lat.ny).rev() {
        for i in 0..lat.nx {
            let k = lat.index(i, j);
            body.extend(if field.is_defined(k) { line_color(field.theta(k)) } else { [0; 3] });
        }
    }
    write(path.as_ref(), format!("P6\n{} {}\n255\n", lat.nx, lat.ny), body)
}

/// Binary PGM of a scalar field, linearly mapped to gray levels 1..=255 over the
/// defined cells; cells outside the mask are black.
pub fn save_raster_scalar(path: impl AsRef<Path>, field: &ScalarField) -> Result<()> {
    let lat = field.lattice();
    let defined = (0..lat.len()).filter(|&i| field.is_defined(i)).map(|i| field.value(i));
    let (lo, hi) = defined.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut body = Vec::with_capacity(lat.len());
    for j in (0..lat.ny).rev() {
        for i in 0..lat.nx {
            let k = lat.index(i, j);
            body.push(if field.is_defined(k) {
                1 + ((field.value(k) - lo) / span * 254.0).round().clamp(0.0, 254.0) as u8
            } else {
                0
            });
        }
    }
    write(path.as_ref(), format!("P5\n{} {}\n255\n", lat.nx, lat.ny), body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;
    use crate::grid::{Lattice, RasterGrid};
    use crate::patterns::{constant_field, target_field};

    fn pixels(path: &Path) -> Vec<u8> {
        let bytes = std::fs::read(path).unwrap();
        // three header lines
        let mut newlines = 0;
        let start = bytes
            .iter()
            .position(|&b| {
                if b == b'\n' {
                    newlines += 1;
                }
                newlines == 3
            })
            .unwrap();
        bytes[start + 1..].to_vec()
    }

    #[test]
    fn colors_are_pi_periodic() {
        for k in 0..50 {
            let t = k as f64 * 0.0627;
            assert_eq!(line_color(t), line_color(t + PI));
        }
        assert_ne!(line_color(0.0), line_color(PI / 2.0));
    }

    #[test]
    fn constant_field_is_uniform_and_outside_black() {
        let lat = Lattice::new(Vec2::ZERO, 1.0, 4, 4).unwrap();
        let mut mask = vec![true; 16];
        mask[0] = false;
        let g = RasterGrid::from_mask(lat, &mask).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.ppm");
        save_raster_line(&p, &constant_field(&g, 0.4)).unwrap();
        let px = pixels(&p);
        assert_eq!(px.len(), 48);
        let color = line_color(0.4);
        // cell 0 is the bottom-left pixel, i.e. the first pixel of the last row
        assert_eq!(&px[36..39], &[0, 0, 0]);
        assert!(px.chunks(3).enumerate().filter(|(k, _)| *k != 12).all(|(_, c)| c == color));
    }

    #[test]
    fn vortex_wheel_has_twofold_symmetry() {
        let lat = Lattice::new(Vec2::new(-1.0, -1.0), 0.125, 16, 16).unwrap();
        let g = RasterGrid::from_mask(lat, &vec![true; 256]).unwrap();
        let f = target_field(&g, Vec2::ZERO);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.ppm");
        save_raster_line(&p, &f).unwrap();
        let px = pixels(&p);
        // point reflection through the center maps each pixel to the same color
        for k in 0..256 {
            assert_eq!(&px[3 * k..3 * k + 3], &px[3 * (255 - k)..3 * (255 - k) + 3]);
        }
    }

    #[test]
    fn scalar_image() {
        let lat = Lattice::new(Vec2::ZERO, 1.0, 3, 1).unwrap();
        let f = ScalarField::new(lat, vec![true, true, false], vec![0.0, 2.0, 0.0]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.pgm");
        save_raster_scalar(&p, &f).unwrap();
        assert_eq!(pixels(&p), vec![1, 255, 0]);
    }
}
