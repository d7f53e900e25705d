use serde::{Deserialize, Serialize};

use super::Lattice;
use crate::error::{Error, Result};
use crate::geometry::Vec2;

/// Per-cell value with the linear structure needed by the stencils.
pub trait FieldValue: Copy + Send + Sync + PartialEq + std::fmt::Debug + 'static {
    const ZERO: Self;
    fn add(self, o: Self) -> Self;
    fn scale(self, s: f64) -> Self;
    fn channels(&self) -> &[f64];
}

impl FieldValue for f64 {
    const ZERO: Self = 0.0;
    #[inline]
    fn add(self, o: Self) -> Self {
        self + o
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn channels(&self) -> &[f64] {
        std::slice::from_ref(self)
    }
}

impl<const N: usize> FieldValue for [f64; N] {
    const ZERO: Self = [0.0; N];
    #[inline]
    fn add(self, o: Self) -> Self {
        let mut r = self;
        for (a, b) in r.iter_mut().zip(o) {
            *a += b;
        }
        r
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self.map(|v| v * s)
    }
    fn channels(&self) -> &[f64] {
        self
    }
}

/// Values on the cells of a lattice, with a mask of defined cells.
///
/// Cells outside the mask hold zero (the extension-by-zero convention).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellField<T> {
    lattice: Lattice,
    mask: Vec<bool>,
    values: Vec<T>,
}

pub type ScalarField = CellField<f64>;
pub type VectorField2 = CellField<[f64; 2]>;
/// Row-major 2×2 tensors `[P11, P12, P21, P22]`.
pub type TensorField2 = CellField<[f64; 4]>;

impl<T: FieldValue> CellField<T> {
    pub fn new(lattice: Lattice, mask: Vec<bool>, mut values: Vec<T>) -> Result<Self> {
        if mask.len() != lattice.len() || values.len() != lattice.len() {
            return Err(Error::InvalidArgument(format!(
                "field size mismatch: lattice has {} cells, mask {}, values {}",
                lattice.len(),
                mask.len(),
                values.len()
            )));
        }
        for (v, &m) in values.iter_mut().zip(&mask) {
            if !m {
                *v = T::ZERO;
            }
        }
        Ok(Self {
            lattice,
            mask,
            values,
        })
    }

    /// Evaluates `f` at the center of every masked cell.
    pub fn from_fn(lattice: Lattice, mask: Vec<bool>, f: impl Fn(Vec2) -> T + Sync) -> Self {
        use rayon::prelude::*;
        let values = (0..lattice.len())
            .into_par_iter()
            .map(|i| {
                if mask[i] {
                    f(lattice.center(i))
                } else {
                    T::ZERO
                }
            })
            .collect();
        Self {
            lattice,
            mask,
            values,
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn get(&self, idx: usize) -> Option<T> {
        self.mask[idx].then(|| self.values[idx])
    }

    #[inline]
    pub fn value(&self, idx: usize) -> T {
        self.values[idx]
    }

    #[inline]
    pub fn is_defined(&self, idx: usize) -> bool {
        self.mask[idx]
    }

    pub fn defined_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn map<U: FieldValue>(&self, f: impl Fn(T) -> U) -> CellField<U> {
        CellField {
            lattice: self.lattice,
            mask: self.mask.clone(),
            values: self
                .values
                .iter()
                .zip(&self.mask)
                .map(|(&v, &m)| if m { f(v) } else { U::ZERO })
                .collect(),
        }
    }

    /// Same values restricted to `mask ∧ keep`.
    pub fn restricted(&self, keep: &[bool]) -> Self {
        let mask: Vec<bool> = self.mask.iter().zip(keep).map(|(&a, &b)| a && b).collect();
        let values = self
            .values
            .iter()
            .zip(&mask)
            .map(|(&v, &m)| if m { v } else { T::ZERO })
            .collect();
        Self {
            lattice: self.lattice,
            mask,
            values,
        }
    }

    /// Pointwise `a·self + b·other` on the common mask.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Self {
        let mask: Vec<bool> = self.mask.iter().zip(&other.mask).map(|(&x, &y)| x && y).collect();
        let values = (0..self.values.len())
            .map(|i| {
                if mask[i] {
                    self.values[i].scale(a).add(other.values[i].scale(b))
                } else {
                    T::ZERO
                }
            })
            .collect();
        Self {
            lattice: self.lattice,
            mask,
            values,
        }
    }
}

impl VectorField2 {
    pub fn magnitude(&self) -> ScalarField {
        self.map(|v| v[0].hypot(v[1]))
    }
}

impl TensorField2 {
    /// `P v` per cell.
    pub fn apply(&self, v: &VectorField2) -> VectorField2 {
        let mask: Vec<bool> = self.mask.iter().zip(v.mask()).map(|(&a, &b)| a && b).collect();
        let values = (0..self.values.len())
            .map(|i| {
                if mask[i] {
                    let p = self.values[i];
                    let w = v.value(i);
                    [p[0] * w[0] + p[1] * w[1], p[2] * w[0] + p[3] * w[1]]
                } else {
                    [0.0; 2]
                }
            })
            .collect();
        CellField {
            lattice: self.lattice,
            mask,
            values,
        }
    }
}
