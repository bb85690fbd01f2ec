use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::Vec3;

/// Triangulated boundary with one-point (centroid) quadrature per triangle.
///
/// `nodes[i]` is the quadrature point of triangle `i`; for curved boundaries
/// it is the centroid pushed onto the exact surface. `normals` are unit
/// outward normals at the nodes and `areas` the quadrature weights.
#[derive(Debug, Clone)]
pub struct BoundaryMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
    pub nodes: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    pub areas: Vec<f64>,
}

impl BoundaryMesh {
    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    pub fn centroid(&self, t: usize) -> Vec3 {
        let [a, b, c] = self.triangles[t];
        (self.vertices[a] + self.vertices[b] + self.vertices[c]) / 3.0
    }

    pub fn facet_normal(&self, t: usize) -> Vec3 {
        let [a, b, c] = self.triangles[t];
        (self.vertices[b] - self.vertices[a])
            .cross(&(self.vertices[c] - self.vertices[a]))
            .normalize()
    }

    fn check_len(&self, what: &'static str, got: usize) -> Result<()> {
        if got != self.len() {
            return Err(Error::CountMismatch {
                what,
                got,
                expected: self.len(),
            });
        }
        Ok(())
    }

    /// `f·η` per triangle, with `f` sampled at the quadrature nodes.
    pub fn normal_trace(&self, f: &[Vec3]) -> Result<Vec<f64>> {
        self.check_len("normal trace samples", f.len())?;
        Ok(f.iter().zip(&self.normals).map(|(v, n)| v.dot(n)).collect())
    }

    /// `Σ f(node)·area`.
    pub fn surface_integral(&self, f: &[f64]) -> Result<f64> {
        self.check_len("surface integrand samples", f.len())?;
        Ok(f.iter().zip(&self.areas).map(|(v, a)| v * a).sum())
    }

    /// Surface L² norm `(Σ f²·area)^{1/2}`.
    pub fn l2_norm(&self, f: &[f64]) -> Result<f64> {
        self.check_len("surface samples", f.len())?;
        Ok(f.iter()
            .zip(&self.areas)
            .map(|(v, a)| v * v * a)
            .sum::<f64>()
            .sqrt())
    }

    pub fn l2_norm_vec(&self, f: &[Vec3]) -> Result<f64> {
        self.check_len("surface samples", f.len())?;
        Ok(f.iter()
            .zip(&self.areas)
            .map(|(v, a)| v.norm_squared() * a)
            .sum::<f64>()
            .sqrt())
    }

    /// Smallest distance from `x` to any quadrature node.
    pub fn distance_to_nodes(&self, x: Vec3) -> f64 {
        self.nodes
            .iter()
            .map(|y| (y - x).norm_squared())
            .fold(f64::INFINITY, f64::min)
            .sqrt()
    }
}

/// Unit icosphere: the icosahedron subdivided `refinement` times with every
/// new vertex projected to the unit sphere. Triangles are wound
/// counter-clockwise seen from outside.
pub fn unit_icosphere(refinement: usize) -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vec3> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
    .collect();
    let mut triangles: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..refinement {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Vec3>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                vertices.push(((vertices[a] + vertices[b]) * 0.5).normalize());
                vertices.len() - 1
            })
        };
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for &[a, b, c] in &triangles {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.push([a, ab, ca]);
            next.push([b, bc, ab]);
            next.push([c, ca, bc]);
            next.push([ab, bc, ca]);
        }
        triangles = next;
    }
    (vertices, triangles)
}

/// Area of the spherical triangle spanned by unit vectors `a`, `b`, `c`
/// (Van Oosterom–Strackee solid angle).
pub fn spherical_triangle_area(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let num = a.dot(&b.cross(&c)).abs();
    let den = 1.0 + a.dot(&b) + b.dot(&c) + c.dot(&a);
    2.0 * num.atan2(den)
}

pub fn planar_triangle_area(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}
