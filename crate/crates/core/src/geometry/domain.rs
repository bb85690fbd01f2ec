use std::f64::consts::PI;

use nalgebra::Matrix3;
use rand::Rng;

use super::mesh::{planar_triangle_area, spherical_triangle_area, unit_icosphere, BoundaryMesh};
use crate::error::{Error, Result};
use crate::Vec3;

/// Radius function `ρ(direction)` tabulated on icosphere vertices and
/// interpolated linearly over the (flat) icosphere triangles.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    directions: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    inverses: Vec<Matrix3<f64>>,
    rho: Vec<f64>,
}

impl RadialProfile {
    pub fn tabulate(refinement: usize, rho: impl Fn(Vec3) -> f64) -> Result<Self> {
        let (directions, triangles) = unit_icosphere(refinement);
        let rho: Vec<f64> = directions.iter().map(|d| rho(*d)).collect();
        if rho.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::invalid("rho", "radial function must be positive"));
        }
        let inverses = triangles
            .iter()
            .map(|&[a, b, c]| {
                Matrix3::from_columns(&[directions[a], directions[b], directions[c]])
                    .try_inverse()
                    .expect("icosphere triangle is non-degenerate")
            })
            .collect();
        Ok(Self {
            directions,
            triangles,
            inverses,
            rho,
        })
    }

    /// `ρ` in the direction of `d` (need not be normalized, must be nonzero).
    pub fn radius(&self, d: Vec3) -> f64 {
        let mut best = (f64::NEG_INFINITY, 0.0);
        for (t, inv) in self.inverses.iter().enumerate() {
            let mu = inv * d;
            let m = mu.min();
            if m >= -1e-12 {
                let [a, b, c] = self.triangles[t];
                let s = mu.sum();
                let r = (mu[0] * self.rho[a] + mu[1] * self.rho[b] + mu[2] * self.rho[c]) / s;
                return r;
            }
            if m > best.0 {
                let [a, b, c] = self.triangles[t];
                let s = mu.sum();
                best = (m, (mu[0] * self.rho[a] + mu[1] * self.rho[b] + mu[2] * self.rho[c]) / s);
            }
        }
        best.1
    }

    pub fn max_radius(&self) -> f64 {
        self.rho.iter().cloned().fold(0.0, f64::max)
    }

    pub fn min_radius(&self) -> f64 {
        self.rho.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    fn volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|&[a, b, c]| {
                let omega = spherical_triangle_area(
                    self.directions[a],
                    self.directions[b],
                    self.directions[c],
                );
                let mean_r3 =
                    (self.rho[a].powi(3) + self.rho[b].powi(3) + self.rho[c].powi(3)) / 3.0;
                omega * mean_r3 / 3.0
            })
            .sum()
    }
}

#[derive(Debug, Clone)]
pub enum DomainShape {
    Ball { radius: f64 },
    Box { half_extents: Vec3 },
    Radial(RadialProfile),
}

/// Bounded domain, star-shaped with respect to `center`.
#[derive(Debug, Clone)]
pub struct StarDomain {
    center: Vec3,
    shape: DomainShape,
    boundary: BoundaryMesh,
}

/// Ball whose boundary is an icosphere subdivided `refinement` times.
/// Quadrature nodes lie on the sphere, normals are radial and weights are
/// spherical-triangle areas.
pub fn build_ball(radius: f64, center: Vec3, refinement: usize) -> Result<StarDomain> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::invalid("radius", format!("must be positive, got {radius}")));
    }
    let (dirs, triangles) = unit_icosphere(refinement);
    let vertices: Vec<Vec3> = dirs.iter().map(|d| center + d * radius).collect();
    let mut nodes = Vec::with_capacity(triangles.len());
    let mut normals = Vec::with_capacity(triangles.len());
    let mut areas = Vec::with_capacity(triangles.len());
    for &[a, b, c] in &triangles {
        let n = (dirs[a] + dirs[b] + dirs[c]).normalize();
        nodes.push(center + n * radius);
        normals.push(n);
        areas.push(spherical_triangle_area(dirs[a], dirs[b], dirs[c]) * radius * radius);
    }
    Ok(StarDomain {
        center,
        shape: DomainShape::Ball { radius },
        boundary: BoundaryMesh {
            vertices,
            triangles,
            nodes,
            normals,
            areas,
        },
    })
}

/// Axis-aligned box; each face is split into `facets_per_edge²` squares of
/// two triangles each.
pub fn build_box(half_extents: Vec3, center: Vec3, facets_per_edge: usize) -> Result<StarDomain> {
    if half_extents.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(Error::invalid(
            "half_extents",
            format!("must be positive, got {half_extents:?}"),
        ));
    }
    if facets_per_edge == 0 {
        return Err(Error::invalid("facets_per_edge", "must be at least 1"));
    }
    let m = facets_per_edge;
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    let mut normals = Vec::new();
    for axis in 0..3 {
        let (u, w) = ((axis + 1) % 3, (axis + 2) % 3);
        for side in [-1.0, 1.0] {
            let mut normal = Vec3::zeros();
            normal[axis] = side;
            let base = vertices.len();
            for i in 0..=m {
                for j in 0..=m {
                    let mut p = Vec3::zeros();
                    p[axis] = side * half_extents[axis];
                    p[u] = half_extents[u] * (2.0 * i as f64 / m as f64 - 1.0);
                    p[w] = half_extents[w] * (2.0 * j as f64 / m as f64 - 1.0);
                    vertices.push(center + p);
                }
            }
            let id = |i: usize, j: usize| base + i * (m + 1) + j;
            for i in 0..m {
                for j in 0..m {
                    let quad = [id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)];
                    // e_u × e_w = e_axis, so (u, w) ordering is counter-clockwise for side = +1
                    if side > 0.0 {
                        triangles.push([quad[0], quad[1], quad[2]]);
                        triangles.push([quad[0], quad[2], quad[3]]);
                    } else {
                        triangles.push([quad[0], quad[2], quad[1]]);
                        triangles.push([quad[0], quad[3], quad[2]]);
                    }
                    normals.push(normal);
                    normals.push(normal);
                }
            }
        }
    }
    let mut nodes = Vec::with_capacity(triangles.len());
    let mut areas = Vec::with_capacity(triangles.len());
    for &[a, b, c] in &triangles {
        nodes.push((vertices[a] + vertices[b] + vertices[c]) / 3.0);
        areas.push(planar_triangle_area(vertices[a], vertices[b], vertices[c]));
    }
    Ok(StarDomain {
        center,
        shape: DomainShape::Box { half_extents },
        boundary: BoundaryMesh {
            vertices,
            triangles,
            nodes,
            normals,
            areas,
        },
    })
}

/// General star-shaped domain `{center + r d : r < ρ(d)}` with `ρ` tabulated
/// on an icosphere of `refinement` subdivisions.
pub fn build_radial(
    center: Vec3,
    refinement: usize,
    rho: impl Fn(Vec3) -> f64,
) -> Result<StarDomain> {
    let profile = RadialProfile::tabulate(refinement, rho)?;
    let (dirs, triangles) = unit_icosphere(refinement);
    let vertices: Vec<Vec3> = dirs
        .iter()
        .map(|d| center + d * profile.radius(*d))
        .collect();
    let mut nodes = Vec::with_capacity(triangles.len());
    let mut normals = Vec::with_capacity(triangles.len());
    let mut areas = Vec::with_capacity(triangles.len());
    for &[a, b, c] in &triangles {
        let d = (dirs[a] + dirs[b] + dirs[c]).normalize();
        nodes.push(center + d * profile.radius(d));
        let n = (vertices[b] - vertices[a]).cross(&(vertices[c] - vertices[a]));
        normals.push(n.normalize());
        areas.push(planar_triangle_area(vertices[a], vertices[b], vertices[c]));
    }
    Ok(StarDomain {
        center,
        shape: DomainShape::Radial(profile),
        boundary: BoundaryMesh {
            vertices,
            triangles,
            nodes,
            normals,
            areas,
        },
    })
}

impl StarDomain {
    pub fn center(&self) -> Vec3 {
        self.center
    }

    pub fn shape(&self) -> &DomainShape {
        &self.shape
    }

    pub fn boundary(&self) -> &BoundaryMesh {
        &self.boundary
    }

    pub fn inside(&self, x: Vec3) -> bool {
        let d = x - self.center;
        match &self.shape {
            DomainShape::Ball { radius } => d.norm_squared() < radius * radius,
            DomainShape::Box { half_extents } => {
                (0..3).all(|i| d[i].abs() < half_extents[i])
            }
            DomainShape::Radial(p) => {
                let r = d.norm();
                r == 0.0 || r < p.radius(d)
            }
        }
    }

    /// Distance from an interior point to the boundary; exact for the ball
    /// and the box, a radial estimate otherwise. Negative outside.
    pub fn boundary_distance(&self, x: Vec3) -> f64 {
        let d = x - self.center;
        match &self.shape {
            DomainShape::Ball { radius } => radius - d.norm(),
            DomainShape::Box { half_extents } => (0..3)
                .map(|i| half_extents[i] - d[i].abs())
                .fold(f64::INFINITY, f64::min),
            DomainShape::Radial(p) => {
                let r = d.norm();
                if r == 0.0 {
                    p.min_radius()
                } else {
                    p.radius(d) - r
                }
            }
        }
    }

    pub fn volume(&self) -> f64 {
        match &self.shape {
            DomainShape::Ball { radius } => 4.0 / 3.0 * PI * radius.powi(3),
            DomainShape::Box { half_extents } => 8.0 * half_extents.product(),
            DomainShape::Radial(p) => p.volume(),
        }
    }

    pub fn diameter(&self) -> f64 {
        match &self.shape {
            DomainShape::Ball { radius } => 2.0 * radius,
            DomainShape::Box { half_extents } => 2.0 * half_extents.norm(),
            DomainShape::Radial(_) => {
                let v = &self.boundary.vertices;
                let mut d2: f64 = 0.0;
                for i in 0..v.len() {
                    for j in i + 1..v.len() {
                        d2 = d2.max((v[i] - v[j]).norm_squared());
                    }
                }
                d2.sqrt()
            }
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        let c = self.center;
        match &self.shape {
            DomainShape::Ball { radius } => {
                let r = Vec3::repeat(*radius);
                (c - r, c + r)
            }
            DomainShape::Box { half_extents } => (c - half_extents, c + half_extents),
            DomainShape::Radial(p) => {
                let r = Vec3::repeat(p.max_radius());
                (c - r, c + r)
            }
        }
    }

    /// Sampled star-shapedness test: for random boundary vertices `y` and
    /// `t ∈ (0, 1)`, `center + t(y − center)` must be inside.
    pub fn check_star_shaped<R: Rng>(&self, samples: usize, rng: &mut R) -> bool {
        let v = &self.boundary.vertices;
        (0..samples).all(|_| {
            let y = v[rng.gen_range(0..v.len())];
            let t: f64 = rng.gen_range(1e-9..1.0 - 1e-6);
            self.inside(self.center + (y - self.center) * t)
        })
    }
}
