//! Analytic fields used to exercise the operators: random solenoidal and
//! irrotational polynomial fields and compactly supported bumps.

use rand::Rng;

use crate::algebra::poly::{exponents_of_degree, Poly};
use crate::algebra::Quaternion;
use crate::Vec3;

/// Vector field with polynomial components in the variable
/// `ξ = (x − center) / scale`.
#[derive(Debug, Clone)]
pub struct PolyVectorField {
    comps: [Poly; 3],
    center: Vec3,
    scale: f64,
}

impl PolyVectorField {
    pub fn new(comps: [Poly; 3], center: Vec3, scale: f64) -> Self {
        Self {
            comps,
            center,
            scale,
        }
    }

    fn xi(&self, x: Vec3) -> Vec3 {
        (x - self.center) / self.scale
    }

    pub fn eval(&self, x: Vec3) -> Vec3 {
        let xi = self.xi(x);
        Vec3::new(
            self.comps[0].eval(xi),
            self.comps[1].eval(xi),
            self.comps[2].eval(xi),
        )
    }

    /// Exact curl, as another polynomial field.
    pub fn curl(&self) -> PolyVectorField {
        let d = |c: usize, a: usize| self.comps[c].derivative(a).scale(1.0 / self.scale);
        PolyVectorField {
            comps: [
                d(2, 1).add(&d(1, 2).scale(-1.0)),
                d(0, 2).add(&d(2, 0).scale(-1.0)),
                d(1, 0).add(&d(0, 1).scale(-1.0)),
            ],
            center: self.center,
            scale: self.scale,
        }
    }

    pub fn divergence(&self, x: Vec3) -> f64 {
        let xi = self.xi(x);
        (0..3)
            .map(|a| self.comps[a].gradient(xi)[a])
            .sum::<f64>()
            / self.scale
    }
}

/// Polynomial of degree `≤ max_degree` with coefficients uniform in `(−1, 1)`.
pub fn random_poly<R: Rng>(rng: &mut R, max_degree: u32) -> Poly {
    let mut p = Poly::zero();
    for d in 0..=max_degree {
        for e in exponents_of_degree(d) {
            p.add_term(rng.gen_range(-1.0..1.0), e);
        }
    }
    p
}

/// `curl A` for a random polynomial vector potential `A` of degree
/// `degree + 1` in `(x − center)/scale`; the result is exactly
/// divergence-free and of degree `degree`.
pub fn random_solenoidal<R: Rng>(rng: &mut R, center: Vec3, scale: f64, degree: u32) -> PolyVectorField {
    let a = PolyVectorField::new(
        [
            random_poly(rng, degree + 1),
            random_poly(rng, degree + 1),
            random_poly(rng, degree + 1),
        ],
        center,
        scale,
    );
    a.curl()
}

/// `∇p` for a random polynomial `p` of degree `degree + 1`.
pub fn random_irrotational<R: Rng>(rng: &mut R, center: Vec3, scale: f64, degree: u32) -> PolyVectorField {
    let p = random_poly(rng, degree + 1);
    PolyVectorField::new(
        [
            p.derivative(0).scale(1.0 / scale),
            p.derivative(1).scale(1.0 / scale),
            p.derivative(2).scale(1.0 / scale),
        ],
        center,
        scale,
    )
}

/// `ψ(x) = (1 − |x−c|²/R²)^k` inside the ball of radius `R`, zero outside.
/// `ψ` has `k − 1` continuous derivatives.
#[derive(Debug, Clone, Copy)]
pub struct Bump {
    pub center: Vec3,
    pub radius: f64,
    pub power: i32,
}

impl Bump {
    /// Bump with `k = 4`.
    pub fn new(center: Vec3, radius: f64) -> Self {
        Self {
            center,
            radius,
            power: 4,
        }
    }

    pub fn with_power(mut self, power: i32) -> Self {
        assert!(power >= 2, "bump power must be at least 2");
        self.power = power;
        self
    }

    pub fn value(&self, x: Vec3) -> f64 {
        let s = 1.0 - (x - self.center).norm_squared() / (self.radius * self.radius);
        if s > 0.0 {
            s.powi(self.power)
        } else {
            0.0
        }
    }

    pub fn gradient(&self, x: Vec3) -> Vec3 {
        let d = x - self.center;
        let r2 = self.radius * self.radius;
        let s = 1.0 - d.norm_squared() / r2;
        if s > 0.0 {
            d * (-2.0 * self.power as f64 * s.powi(self.power - 1) / r2)
        } else {
            Vec3::zeros()
        }
    }

    /// `curl(ψ a) = ∇ψ × a`: divergence-free with support inside the bump.
    pub fn curl_of(&self, a: Vec3, x: Vec3) -> Vec3 {
        self.gradient(x).cross(&a)
    }

    /// Smooth quaternion field `ψ(x)·(q + (x−c)·m)` supported in the bump.
    pub fn quaternion_field(&self, q: Quaternion, m: Vec3, x: Vec3) -> Quaternion {
        let psi = self.value(x);
        let lin = Quaternion::new(m.dot(&(x - self.center)), m.cross(&(x - self.center)));
        (q + lin) * psi
    }

    /// `D` of [`Bump::quaternion_field`]: `∇ψ (q + (x−c)·m) + 3ψ m`.
    pub fn quaternion_field_derivative(&self, q: Quaternion, m: Vec3, x: Vec3) -> Quaternion {
        let d = x - self.center;
        let f = q + Quaternion::new(m.dot(&d), m.cross(&d));
        Quaternion::vector(self.gradient(x)) * f + Quaternion::vector(m * 3.0) * self.value(x)
    }
}
