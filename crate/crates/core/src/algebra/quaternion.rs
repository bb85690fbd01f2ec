use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::Vec3;

/// Real quaternion `s + v`, stored scalar-first. The vector part is
/// identified with the imaginary units e₁, e₂, e₃.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion {
    pub s: f64,
    pub v: Vec3,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion {
        s: 0.0,
        v: Vec3::new(0.0, 0.0, 0.0),
    };

    pub const ONE: Quaternion = Quaternion {
        s: 1.0,
        v: Vec3::new(0.0, 0.0, 0.0),
    };

    pub fn new(s: f64, v: Vec3) -> Self {
        Self { s, v }
    }

    pub fn scalar(s: f64) -> Self {
        Self { s, v: Vec3::zeros() }
    }

    pub fn vector(v: Vec3) -> Self {
        Self { s: 0.0, v }
    }

    /// Scalar part `Sc`.
    pub fn sc(&self) -> f64 {
        self.s
    }

    /// Vector part `Vec`.
    pub fn vec(&self) -> Vec3 {
        self.v
    }

    pub fn conj(&self) -> Self {
        Self { s: self.s, v: -self.v }
    }

    pub fn norm_squared(&self) -> f64 {
        self.s * self.s + self.v.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }
}

/// Hamilton product: `Sc(ab) = a.s b.s − a.v·b.v`,
/// `Vec(ab) = a.s b.v + b.s a.v + a.v × b.v`.
pub fn quat_mul(a: Quaternion, b: Quaternion) -> Quaternion {
    Quaternion {
        s: a.s * b.s - a.v.dot(&b.v),
        v: b.v * a.s + a.v * b.s + a.v.cross(&b.v),
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, rhs: Quaternion) -> Quaternion {
        quat_mul(self, rhs)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;

    fn mul(self, rhs: f64) -> Quaternion {
        Quaternion {
            s: self.s * rhs,
            v: self.v * rhs,
        }
    }
}

impl Add for Quaternion {
    type Output = Quaternion;

    fn add(self, rhs: Quaternion) -> Quaternion {
        Quaternion {
            s: self.s + rhs.s,
            v: self.v + rhs.v,
        }
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;

    fn sub(self, rhs: Quaternion) -> Quaternion {
        Quaternion {
            s: self.s - rhs.s,
            v: self.v - rhs.v,
        }
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;

    fn neg(self) -> Quaternion {
        Quaternion {
            s: -self.s,
            v: -self.v,
        }
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, rhs: Quaternion) {
        self.s += rhs.s;
        self.v += rhs.v;
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, rhs: Quaternion) {
        self.s -= rhs.s;
        self.v -= rhs.v;
    }
}

impl From<f64> for Quaternion {
    fn from(s: f64) -> Self {
        Quaternion::scalar(s)
    }
}

impl From<Vec3> for Quaternion {
    fn from(v: Vec3) -> Self {
        Quaternion::vector(v)
    }
}
