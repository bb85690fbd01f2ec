use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use rayon::prelude::*;

use super::quaternion::Quaternion;
use crate::error::{Error, Result};
use crate::geometry::VoxelGrid;
use crate::Vec3;

/// Value types that can be sampled on a voxel grid.
pub trait FieldValue:
    Copy
    + Default
    + Debug
    + Send
    + Sync
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<f64, Output = Self>
    + 'static
{
    const COMPONENTS: usize;

    fn zero() -> Self {
        Self::default()
    }

    fn norm_sq(&self) -> f64;

    fn component(&self, i: usize) -> f64;

    fn from_components(c: &[f64]) -> Self;
}

impl FieldValue for f64 {
    const COMPONENTS: usize = 1;

    fn norm_sq(&self) -> f64 {
        self * self
    }

    fn component(&self, _: usize) -> f64 {
        *self
    }

    fn from_components(c: &[f64]) -> Self {
        c[0]
    }
}

impl FieldValue for Vec3 {
    const COMPONENTS: usize = 3;

    fn norm_sq(&self) -> f64 {
        self.norm_squared()
    }

    fn component(&self, i: usize) -> f64 {
        self[i]
    }

    fn from_components(c: &[f64]) -> Self {
        Vec3::new(c[0], c[1], c[2])
    }
}

impl FieldValue for Quaternion {
    const COMPONENTS: usize = 4;

    fn norm_sq(&self) -> f64 {
        self.norm_squared()
    }

    fn component(&self, i: usize) -> f64 {
        if i == 0 {
            self.s
        } else {
            self.v[i - 1]
        }
    }

    fn from_components(c: &[f64]) -> Self {
        Quaternion::new(c[0], Vec3::new(c[1], c[2], c[3]))
    }
}

/// Samples of a scalar, vector or quaternion function at the interior voxel
/// centers of a grid.
#[derive(Debug, Clone)]
pub struct GridField<T: FieldValue> {
    grid: Arc<VoxelGrid>,
    values: Vec<T>,
}

pub type ScalarField = GridField<f64>;
pub type VectorField = GridField<Vec3>;
pub type QuaternionField = GridField<Quaternion>;

impl<T: FieldValue> GridField<T> {
    pub fn new(grid: Arc<VoxelGrid>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::CountMismatch {
                what: "grid field values",
                got: values.len(),
                expected: grid.len(),
            });
        }
        Ok(Self { grid, values })
    }

    /// Sample `f` at every interior voxel center.
    pub fn from_fn(grid: &Arc<VoxelGrid>, f: impl Fn(Vec3) -> T + Sync) -> Self {
        let values = grid.centers().par_iter().map(|c| f(*c)).collect();
        Self {
            grid: Arc::clone(grid),
            values,
        }
    }

    /// Like [`GridField::from_fn`] with a fallible sampler.
    pub fn try_from_fn(
        grid: &Arc<VoxelGrid>,
        f: impl Fn(Vec3) -> Result<T> + Sync,
    ) -> Result<Self> {
        let values = grid
            .centers()
            .par_iter()
            .map(|c| f(*c))
            .collect::<Result<Vec<T>>>()?;
        Ok(Self {
            grid: Arc::clone(grid),
            values,
        })
    }

    pub fn constant(grid: &Arc<VoxelGrid>, value: T) -> Self {
        Self {
            grid: Arc::clone(grid),
            values: vec![value; grid.len()],
        }
    }

    pub fn zeros(grid: &Arc<VoxelGrid>) -> Self {
        Self::constant(grid, T::zero())
    }

    pub fn grid(&self) -> &Arc<VoxelGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, idx: usize) -> T {
        self.values[idx]
    }

    pub fn check_same_grid<U: FieldValue>(&self, other: &GridField<U>) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn map<U: FieldValue>(&self, f: impl Fn(T) -> U + Sync) -> GridField<U> {
        GridField {
            grid: Arc::clone(&self.grid),
            values: self.values.par_iter().map(|v| f(*v)).collect(),
        }
    }

    /// `f(center, value)` per voxel.
    pub fn map_with_position<U: FieldValue>(
        &self,
        f: impl Fn(Vec3, T) -> U + Sync,
    ) -> GridField<U> {
        GridField {
            grid: Arc::clone(&self.grid),
            values: self
                .grid
                .centers()
                .par_iter()
                .zip(self.values.par_iter())
                .map(|(c, v)| f(*c, *v))
                .collect(),
        }
    }

    pub fn zip_map<U: FieldValue, V: FieldValue>(
        &self,
        other: &GridField<U>,
        f: impl Fn(T, U) -> V + Sync,
    ) -> Result<GridField<V>> {
        self.check_same_grid(other)?;
        Ok(GridField {
            grid: Arc::clone(&self.grid),
            values: self
                .values
                .par_iter()
                .zip(other.values.par_iter())
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    /// Discrete L² norm `(Σ |v|² h³)^{1/2}` over all interior voxels.
    pub fn norm_l2(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sq()).sum();
        (s * self.grid.cell_volume()).sqrt()
    }

    /// Discrete L² norm restricted to the voxels in `region`.
    pub fn norm_l2_on(&self, region: &[usize]) -> f64 {
        let s: f64 = region.iter().map(|&i| self.values[i].norm_sq()).sum();
        (s * self.grid.cell_volume()).sqrt()
    }

    pub fn max_norm(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.norm_sq())
            .fold(0.0, f64::max)
            .sqrt()
    }

    /// Difference quotients of the samples around voxel `idx`: centered when
    /// both axis neighbors are interior, one-sided when only one is.
    pub fn local_gradient(&self, idx: usize) -> [T; 3] {
        let h = self.grid.spacing();
        let v = self.values[idx];
        let mut g = [T::zero(); 3];
        for (axis, ga) in g.iter_mut().enumerate() {
            let lo = self.grid.neighbor(idx, axis, -1);
            let hi = self.grid.neighbor(idx, axis, 1);
            *ga = match (lo, hi) {
                (Some(l), Some(r)) => (self.values[r] - self.values[l]) * (0.5 / h),
                (None, Some(r)) => (self.values[r] - v) * (1.0 / h),
                (Some(l), None) => (v - self.values[l]) * (1.0 / h),
                (None, None) => T::zero(),
            };
        }
        g
    }

    fn taylor(&self, idx: usize, x: Vec3) -> T {
        let d = x - self.grid.center(idx);
        let g = self.local_gradient(idx);
        self.values[idx] + g[0] * d.x + g[1] * d.y + g[2] * d.z
    }

    /// Value at an arbitrary point: trilinear interpolation between the
    /// eight surrounding voxel centers. Corners that are not interior are
    /// replaced by a first-order Taylor extrapolation from the nearest
    /// interior corner, or from the nearest interior voxel if none is.
    pub fn sample(&self, x: Vec3) -> T {
        let l = self.grid.lattice_coords(x);
        let base = [l.x.floor(), l.y.floor(), l.z.floor()];
        let f = Vec3::new(l.x - base[0], l.y - base[1], l.z - base[2]);
        let base = base.map(|b| b as isize);
        let mut ids = [None; 8];
        let mut any = false;
        for (c, id) in ids.iter_mut().enumerate() {
            let (di, dj, dk) = ((c & 1) as isize, ((c >> 1) & 1) as isize, (c >> 2) as isize);
            *id = self.grid.index_of(base[0] + di, base[1] + dj, base[2] + dk);
            any |= id.is_some();
        }
        if !any {
            return self.taylor(self.grid.nearest_voxel(x), x);
        }
        let mut acc = T::zero();
        for c in 0..8 {
            let (di, dj, dk) = (c & 1, (c >> 1) & 1, c >> 2);
            let w = (if di == 1 { f.x } else { 1.0 - f.x })
                * (if dj == 1 { f.y } else { 1.0 - f.y })
                * (if dk == 1 { f.z } else { 1.0 - f.z });
            if w == 0.0 {
                continue;
            }
            let value = match ids[c] {
                Some(id) => self.values[id],
                None => {
                    let q = self.grid.lattice_point(
                        base[0] + di as isize,
                        base[1] + dj as isize,
                        base[2] + dk as isize,
                    );
                    let donor = (0..8)
                        .filter_map(|o| ids[o].map(|id| (((o ^ c) as u32).count_ones(), id)))
                        .min()
                        .map(|(_, id)| id)
                        .expect("at least one interior corner");
                    self.taylor(donor, q)
                }
            };
            acc = acc + value * w;
        }
        acc
    }
}

impl ScalarField {
    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

impl VectorField {
    /// Dot product with another vector field.
    pub fn dot(&self, other: &VectorField) -> Result<ScalarField> {
        self.zip_map(other, |a, b| a.dot(&b))
    }
}

impl QuaternionField {
    pub fn from_parts(scalar: &ScalarField, vector: &VectorField) -> Result<Self> {
        scalar.zip_map(vector, Quaternion::new)
    }

    pub fn scalar_part(&self) -> ScalarField {
        self.map(|q| q.s)
    }

    pub fn vector_part(&self) -> VectorField {
        self.map(|q| q.v)
    }
}

/// Relative discrete L² error `‖a − b‖ / ‖b‖` over `region`.
pub fn relative_error_on<T: FieldValue>(a: &GridField<T>, b: &GridField<T>, region: &[usize]) -> f64 {
    let num: f64 = region
        .iter()
        .map(|&i| (a.values[i] - b.values[i]).norm_sq())
        .sum();
    let den: f64 = region.iter().map(|&i| b.values[i].norm_sq()).sum();
    (num / den.max(f64::MIN_POSITIVE)).sqrt()
}
