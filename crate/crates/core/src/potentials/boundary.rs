use std::f64::consts::PI;

use crate::algebra::kernels::cauchy_kernel_unchecked;
use crate::algebra::Quaternion;
use crate::error::{Error, Result};
use crate::geometry::BoundaryMesh;
use crate::Vec3;

fn check(mesh: &BoundaryMesh, got: usize, x: Vec3, guard: f64) -> Result<()> {
    if got != mesh.len() {
        return Err(Error::CountMismatch {
            what: "boundary samples",
            got,
            expected: mesh.len(),
        });
    }
    let distance = mesh.distance_to_nodes(x);
    if distance < guard {
        return Err(Error::NearSingular { point: x, distance });
    }
    Ok(())
}

/// Cauchy operator `F[φ](x) = ∫_∂Ω E(y−x) η(y) φ(y) dS(y)` with one-point
/// quadrature per triangle. Points closer than `guard` to a quadrature node
/// are rejected as near-singular.
pub fn cauchy_operator(
    phi: &[Quaternion],
    mesh: &BoundaryMesh,
    x: Vec3,
    guard: f64,
) -> Result<Quaternion> {
    check(mesh, phi.len(), x, guard)?;
    let mut acc = Quaternion::ZERO;
    for t in 0..mesh.len() {
        let d = mesh.nodes[t] - x;
        let e = cauchy_kernel_unchecked(d, d.norm_squared());
        let en = Quaternion::vector(e) * Quaternion::vector(mesh.normals[t]);
        acc += en * phi[t] * mesh.areas[t];
    }
    Ok(acc)
}

/// Single-layer potential `M[φ](x) = ∫_∂Ω φ(y) / (4π|y−x|) dS(y)`.
pub fn single_layer(phi: &[f64], mesh: &BoundaryMesh, x: Vec3, guard: f64) -> Result<f64> {
    check(mesh, phi.len(), x, guard)?;
    let sum: f64 = (0..mesh.len())
        .map(|t| phi[t] * mesh.areas[t] / (mesh.nodes[t] - x).norm())
        .sum();
    Ok(sum / (4.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_ball;

    #[test]
    fn single_layer_of_one_on_unit_sphere() {
        let ball = build_ball(1.0, Vec3::zeros(), 4).unwrap();
        let m = ball.boundary();
        let one = vec![1.0; m.len()];
        let at0 = single_layer(&one, m, Vec3::zeros(), 1e-3).unwrap();
        assert!((at0 - 1.0).abs() < 1e-10);
        let far = single_layer(&one, m, 2.0 * Vec3::x(), 1e-3).unwrap();
        assert!((far - 0.5).abs() < 1e-3, "{far}");
        let inner = single_layer(&one, m, Vec3::new(0.2, 0.3, -0.1), 1e-3).unwrap();
        assert!((inner - 1.0).abs() < 1e-3, "{inner}");
        let zero = vec![0.0; m.len()];
        assert_eq!(single_layer(&zero, m, Vec3::zeros(), 1e-3).unwrap(), 0.0);
    }

    #[test]
    fn cauchy_integral_of_one() {
        let ball = build_ball(1.0, Vec3::zeros(), 4).unwrap();
        let m = ball.boundary();
        let one = vec![Quaternion::ONE; m.len()];
        let inside = cauchy_operator(&one, m, Vec3::new(0.1, -0.3, 0.2), 1e-3).unwrap();
        assert!((inside - Quaternion::ONE).norm() < 1e-3, "{inside:?}");
        let outside = cauchy_operator(&one, m, Vec3::new(1.5, 0.2, 0.0), 1e-3).unwrap();
        assert!(outside.norm() < 1e-3, "{outside:?}");
    }

    #[test]
    fn cauchy_operator_is_linear() {
        let ball = build_ball(1.0, Vec3::zeros(), 2).unwrap();
        let m = ball.boundary();
        let a: Vec<Quaternion> = m.nodes.iter().map(|y| Quaternion::new(y.x, y.cross(&Vec3::z()))).collect();
        let b: Vec<Quaternion> = m.nodes.iter().map(|y| Quaternion::scalar(y.y * y.z)).collect();
        let ab: Vec<Quaternion> = a.iter().zip(&b).map(|(p, q)| *p * 2.0 - *q).collect();
        let x = Vec3::new(0.1, 0.2, 0.3);
        let lhs = cauchy_operator(&ab, m, x, 1e-3).unwrap();
        let rhs = cauchy_operator(&a, m, x, 1e-3).unwrap() * 2.0 - cauchy_operator(&b, m, x, 1e-3).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn near_boundary_points_are_flagged() {
        let ball = build_ball(1.0, Vec3::zeros(), 2).unwrap();
        let m = ball.boundary();
        let one = vec![1.0; m.len()];
        let x = m.nodes[0] * 0.999;
        assert!(matches!(single_layer(&one, m, x, 0.05), Err(Error::NearSingular { .. })));
        assert!(single_layer(&one[1..], m, Vec3::zeros(), 0.05).is_err());
    }
}
