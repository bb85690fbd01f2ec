use std::sync::Arc;

use super::domain::StarDomain;
use crate::error::{Error, Result};
use crate::Vec3;

const NONE: usize = usize::MAX;

/// Regular lattice over the bounding box of a domain. Only cells whose
/// centers lie strictly inside the domain ("interior voxels") carry field
/// samples; they are numbered `0..len()` in x-fastest lattice order.
#[derive(Debug)]
pub struct VoxelGrid {
    domain: Arc<StarDomain>,
    origin: Vec3,
    h: f64,
    dims: [usize; 3],
    lattice: Vec<usize>,
    cells: Vec<[usize; 3]>,
    centers: Vec<Vec3>,
    depth: Vec<f64>,
    neighbors: Vec<[usize; 6]>,
}

/// Divide the bounding box of `domain` into cubes of side
/// `h = (longest extent) / n` and keep the cells whose centers are inside.
pub fn voxelize(domain: &StarDomain, n: usize) -> Result<Arc<VoxelGrid>> {
    voxelize_shared(Arc::new(domain.clone()), n)
}

pub fn voxelize_shared(domain: Arc<StarDomain>, n: usize) -> Result<Arc<VoxelGrid>> {
    if n < 8 {
        return Err(Error::invalid("n", format!("must be at least 8, got {n}")));
    }
    let (lo, hi) = domain.bounding_box();
    let extent = hi - lo;
    let h = extent.max() / n as f64;
    let mut dims = [0usize; 3];
    let mut origin = Vec3::zeros();
    for a in 0..3 {
        dims[a] = ((extent[a] / h) - 1e-9).ceil().max(1.0) as usize;
        origin[a] = 0.5 * (lo[a] + hi[a]) - 0.5 * dims[a] as f64 * h;
    }
    let total = dims[0] * dims[1] * dims[2];
    let mut lattice = vec![NONE; total];
    let mut cells = Vec::new();
    let mut centers = Vec::new();
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                let c = origin + Vec3::new(i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5) * h;
                if domain.inside(c) {
                    lattice[i + dims[0] * (j + dims[1] * k)] = cells.len();
                    cells.push([i, j, k]);
                    centers.push(c);
                }
            }
        }
    }
    if cells.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let depth = centers.iter().map(|c| domain.boundary_distance(*c)).collect();
    let mut grid = VoxelGrid {
        domain,
        origin,
        h,
        dims,
        lattice,
        cells,
        centers,
        depth,
        neighbors: Vec::new(),
    };
    grid.neighbors = (0..grid.cells.len())
        .map(|idx| {
            let [i, j, k] = grid.cells[idx];
            let (i, j, k) = (i as isize, j as isize, k as isize);
            [
                grid.index_of(i - 1, j, k),
                grid.index_of(i + 1, j, k),
                grid.index_of(i, j - 1, k),
                grid.index_of(i, j + 1, k),
                grid.index_of(i, j, k - 1),
                grid.index_of(i, j, k + 1),
            ]
            .map(|n| n.unwrap_or(NONE))
        })
        .collect();
    Ok(Arc::new(grid))
}

impl VoxelGrid {
    pub fn domain(&self) -> &StarDomain {
        &self.domain
    }

    pub fn shared_domain(&self) -> Arc<StarDomain> {
        Arc::clone(&self.domain)
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn cell_volume(&self) -> f64 {
        self.h * self.h * self.h
    }

    /// Number of interior voxels.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn interior_volume(&self) -> f64 {
        self.len() as f64 * self.cell_volume()
    }

    pub fn centers(&self) -> &[Vec3] {
        &self.centers
    }

    pub fn center(&self, idx: usize) -> Vec3 {
        self.centers[idx]
    }

    pub fn cell(&self, idx: usize) -> [usize; 3] {
        self.cells[idx]
    }

    /// Position of the lattice point `(i, j, k)` (a cell center, possibly of
    /// an exterior or out-of-box cell).
    pub fn lattice_point(&self, i: isize, j: isize, k: isize) -> Vec3 {
        self.origin + Vec3::new(i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5) * self.h
    }

    /// Interior index of lattice cell `(i, j, k)`, if that cell is interior.
    pub fn index_of(&self, i: isize, j: isize, k: isize) -> Option<usize> {
        let [nx, ny, nz] = self.dims;
        if i < 0 || j < 0 || k < 0 || i as usize >= nx || j as usize >= ny || k as usize >= nz {
            return None;
        }
        let id = self.lattice[i as usize + nx * (j as usize + ny * k as usize)];
        (id != NONE).then_some(id)
    }

    /// Continuous lattice coordinates of `x`: integer values at cell centers.
    pub fn lattice_coords(&self, x: Vec3) -> Vec3 {
        (x - self.origin) / self.h - Vec3::repeat(0.5)
    }

    /// Interior neighbor of `idx` along `axis` in direction `dir` (±1).
    pub fn neighbor(&self, idx: usize, axis: usize, dir: i8) -> Option<usize> {
        let slot = 2 * axis + usize::from(dir > 0);
        let n = self.neighbors[idx][slot];
        (n != NONE).then_some(n)
    }

    /// All six axis neighbors are interior.
    pub fn is_full_stencil(&self, idx: usize) -> bool {
        self.neighbors[idx].iter().all(|&n| n != NONE)
    }

    /// Distance from the voxel center to the domain boundary.
    pub fn depth(&self, idx: usize) -> f64 {
        self.depth[idx]
    }

    /// Voxels on which finite differences are centered and the volume
    /// quadrature is away from the boundary: full stencil and depth ≥ 2h.
    pub fn accuracy_region(&self) -> Vec<usize> {
        self.interior_at_depth(2.0 * self.h)
    }

    /// Full-stencil voxels at least `depth` from the boundary.
    pub fn interior_at_depth(&self, depth: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.is_full_stencil(i) && self.depth[i] >= depth)
            .collect()
    }

    /// Interior voxel whose center is nearest to `x`.
    pub fn nearest_voxel(&self, x: Vec3) -> usize {
        let l = self.lattice_coords(x);
        let base = [l.x.round() as isize, l.y.round() as isize, l.z.round() as isize];
        for radius in 0..4isize {
            let mut best: Option<(f64, usize)> = None;
            for dk in -radius..=radius {
                for dj in -radius..=radius {
                    for di in -radius..=radius {
                        if let Some(id) = self.index_of(base[0] + di, base[1] + dj, base[2] + dk) {
                            let d = (self.centers[id] - x).norm_squared();
                            if best.map_or(true, |(bd, _)| d < bd) {
                                best = Some((d, id));
                            }
                        }
                    }
                }
            }
            if let Some((_, id)) = best {
                return id;
            }
        }
        let mut best = (f64::INFINITY, 0);
        for (id, c) in self.centers.iter().enumerate() {
            let d = (c - x).norm_squared();
            if d < best.0 {
                best = (d, id);
            }
        }
        best.1
    }
}
