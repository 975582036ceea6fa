//! Dense real polynomials in the monomial basis.
//!
//! Integrals against the binomial measure reduce to linear combinations of
//! moments, so the monomial basis is the natural representation here.

use std::ops::{Add, Mul, Neg, Sub};

use crate::measure::MomentCache;
use crate::Result;

/// Coefficients in ascending order: `coeffs[s]` multiplies `x^s`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::new(vec![0.0])
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `x^s`.
    pub fn monomial(s: usize) -> Self {
        let mut coeffs = vec![0.0; s + 1];
        coeffs[s] = 1.0;
        Self { coeffs }
    }

    /// The monic polynomial `prod (x - r)` over the given roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        roots.iter().fold(Self::constant(1.0), |acc, &r| {
            acc * Polynomial::new(vec![-r, 1.0])
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// `p(a*x + b)`, expanded back into the monomial basis.
    pub fn compose_affine(&self, a: f64, b: f64) -> Self {
        let inner = Polynomial::new(vec![b, a]);
        self.coeffs
            .iter()
            .rev()
            .fold(Polynomial::zero(), |acc, &c| {
                acc * inner.clone() + Polynomial::constant(c)
            })
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Polynomial::constant(1.0), |acc, _| acc * self.clone())
    }

    /// `∫₀¹ p dμ_α` from the exact moments.
    pub fn integrate(&self, cache: &MomentCache) -> Result<f64> {
        let moments = cache.moments_up_to(self.degree() as u32)?;
        Ok(self.coeffs.iter().zip(&moments).map(|(c, m)| c * m).sum())
    }
}

impl Add for Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.coeffs.get(i).unwrap_or(&0.0) + rhs.coeffs.get(i).unwrap_or(&0.0))
            .collect();
        Polynomial::new(coeffs)
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: Polynomial) -> Polynomial {
        self + (-rhs)
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: Polynomial) -> Polynomial {
        let mut coeffs = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial::new(coeffs)
    }
}
