//! Sparse real polynomials in three variables.

use crate::Vec3;

/// `Σ c · x^a y^b z^c` over the stored terms.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Poly {
    terms: Vec<(f64, [u32; 3])>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(coef: f64, exps: [u32; 3]) -> Self {
        let mut p = Self::zero();
        p.add_term(coef, exps);
        p
    }

    pub fn terms(&self) -> &[(f64, [u32; 3])] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(_, e)| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, coef: f64, exps: [u32; 3]) {
        if coef == 0.0 {
            return;
        }
        match self.terms.iter_mut().find(|(_, e)| *e == exps) {
            Some(t) => t.0 += coef,
            None => self.terms.push((coef, exps)),
        }
        self.terms.retain(|(c, _)| *c != 0.0);
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut p = self.clone();
        for &(c, e) in &other.terms {
            p.add_term(c, e);
        }
        p
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|&(c, e)| (c * s, e))
                .filter(|(c, _)| *c != 0.0)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut p = Poly::zero();
        for &(a, ea) in &self.terms {
            for &(b, eb) in &other.terms {
                p.add_term(a * b, [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]]);
            }
        }
        p
    }

    pub fn derivative(&self, axis: usize) -> Poly {
        let mut p = Poly::zero();
        for &(c, e) in &self.terms {
            if e[axis] > 0 {
                let mut d = e;
                d[axis] -= 1;
                p.add_term(c * e[axis] as f64, d);
            }
        }
        p
    }

    pub fn laplacian(&self) -> Poly {
        (0..3)
            .map(|a| self.derivative(a).derivative(a))
            .fold(Poly::zero(), |acc, p| acc.add(&p))
    }

    pub fn eval(&self, x: Vec3) -> f64 {
        let pw = |v: f64, k: u32| v.powi(k as i32);
        self.terms
            .iter()
            .map(|&(c, e)| c * pw(x.x, e[0]) * pw(x.y, e[1]) * pw(x.z, e[2]))
            .sum()
    }

    pub fn gradient(&self, x: Vec3) -> Vec3 {
        let pw = |v: f64, k: u32| if k == 0 { 1.0 } else { v.powi(k as i32) };
        let mut g = Vec3::zeros();
        for &(c, e) in &self.terms {
            let p = [pw(x.x, e[0]), pw(x.y, e[1]), pw(x.z, e[2])];
            for a in 0..3 {
                if e[a] > 0 {
                    let mut q = c * e[a] as f64 * pw(x[a], e[a] - 1);
                    for (b, pb) in p.iter().enumerate() {
                        if b != a {
                            q *= pb;
                        }
                    }
                    g[a] += q;
                }
            }
        }
        g
    }
}

/// All exponent triples of total degree exactly `d`.
pub fn exponents_of_degree(d: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for a in (0..=d).rev() {
        for b in (0..=d - a).rev() {
            out.push([a, b, d - a - b]);
        }
    }
    out
}
