//! Finite differences on voxel grids.
//!
//! Second-order centered differences wherever both axis neighbors are
//! interior; first-order one-sided differences on the boundary-adjacent
//! layer. Use [`VoxelGrid::is_full_stencil`] or
//! [`VoxelGrid::accuracy_region`] to restrict to the centered region.
//!
//! [`VoxelGrid::is_full_stencil`]: crate::geometry::VoxelGrid::is_full_stencil
//! [`VoxelGrid::accuracy_region`]: crate::geometry::VoxelGrid::accuracy_region

use rayon::prelude::*;

use super::field::{FieldValue, GridField, QuaternionField, ScalarField, VectorField};
use super::quaternion::Quaternion;
use crate::Vec3;

fn per_voxel<T: FieldValue, U: FieldValue>(
    f: &GridField<T>,
    op: impl Fn(usize, [T; 3]) -> U + Sync,
) -> GridField<U> {
    let values = (0..f.len())
        .into_par_iter()
        .map(|i| op(i, f.local_gradient(i)))
        .collect();
    GridField::new(f.grid().clone(), values).expect("same grid size")
}

pub fn fd_grad(f: &ScalarField) -> VectorField {
    per_voxel(f, |_, d| Vec3::new(d[0], d[1], d[2]))
}

pub fn fd_div(f: &VectorField) -> ScalarField {
    per_voxel(f, |_, d| d[0].x + d[1].y + d[2].z)
}

pub fn fd_curl(f: &VectorField) -> VectorField {
    per_voxel(f, |_, d| {
        Vec3::new(d[1].z - d[2].y, d[2].x - d[0].z, d[0].y - d[1].x)
    })
}

/// 7-point Laplacian; at voxels missing a neighbor along some axis the
/// second difference is shifted one cell inward (first order).
pub fn fd_laplacian<T: FieldValue>(f: &GridField<T>) -> GridField<T> {
    let grid = f.grid();
    let h2 = grid.spacing() * grid.spacing();
    let values = (0..f.len())
        .into_par_iter()
        .map(|i| {
            let v = f.get(i);
            let mut acc = T::zero();
            for axis in 0..3 {
                let lo = grid.neighbor(i, axis, -1);
                let hi = grid.neighbor(i, axis, 1);
                let d2 = match (lo, hi) {
                    (Some(l), Some(r)) => f.get(l) + f.get(r) - v * 2.0,
                    (None, Some(r)) => match grid.neighbor(r, axis, 1) {
                        Some(rr) => v + f.get(rr) - f.get(r) * 2.0,
                        None => T::zero(),
                    },
                    (Some(l), None) => match grid.neighbor(l, axis, -1) {
                        Some(ll) => v + f.get(ll) - f.get(l) * 2.0,
                        None => T::zero(),
                    },
                    (None, None) => T::zero(),
                };
                acc = acc + d2;
            }
            acc * (1.0 / h2)
        })
        .collect();
    GridField::new(grid.clone(), values).expect("same grid size")
}

/// `D f = −div(Vec f) + grad(Sc f) + curl(Vec f)`.
pub fn moisil_teodorescu(f: &QuaternionField) -> QuaternionField {
    per_voxel(f, |_, d| {
        let div = d[0].v.x + d[1].v.y + d[2].v.z;
        let grad = Vec3::new(d[0].s, d[1].s, d[2].s);
        let curl = Vec3::new(
            d[1].v.z - d[2].v.y,
            d[2].v.x - d[0].v.z,
            d[0].v.y - d[1].v.x,
        );
        Quaternion::new(-div, grad + curl)
    })
}
