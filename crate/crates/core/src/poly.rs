//! Coefficient containers: ordinary polynomials and Laurent polynomials.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polynomial with ascending real coefficients (`coeffs[i]` multiplies `x^i`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    pub coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Poly { coeffs }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![1.0] }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    /// Index of the last stored coefficient (`None` for the empty polynomial).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        let mut coeffs = vec![0.0; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Largest coefficient magnitude.
    pub fn coefficient_scale(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

fn zip_with(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| f(a.get(i).copied().unwrap_or(0.0), b.get(i).copied().unwrap_or(0.0)))
        .collect()
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        Poly::new(zip_with(&self.coeffs, &rhs.coeffs, |a, b| a + b))
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        Poly::new(zip_with(&self.coeffs, &rhs.coeffs, |a, b| a - b))
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

/// Laurent polynomial `Σ_e coeffs[e - low] x^e`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentCoeffs {
    pub low: i64,
    pub coeffs: Vec<f64>,
}

impl LaurentCoeffs {
    pub fn new(low: i64, coeffs: Vec<f64>) -> Self {
        LaurentCoeffs { low, coeffs }
    }

    pub fn monomial(e: i64, c: f64) -> Self {
        LaurentCoeffs { low: e, coeffs: vec![c] }
    }

    /// Builds from `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_pairs(pairs: &[(i64, f64)]) -> Self {
        if pairs.is_empty() {
            return LaurentCoeffs { low: 0, coeffs: vec![] };
        }
        let low = pairs.iter().map(|p| p.0).min().unwrap();
        let high = pairs.iter().map(|p| p.0).max().unwrap();
        let mut coeffs = vec![0.0; (high - low + 1) as usize];
        for &(e, c) in pairs {
            coeffs[(e - low) as usize] += c;
        }
        LaurentCoeffs { low, coeffs }
    }

    /// Parses `"e:c,e:c,..."`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (e, c) = item
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("expected exponent:coefficient, got {item:?}")))?;
            let e: i64 = e
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad exponent {e:?}")))?;
            let c: f64 = c
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad coefficient {c:?}")))?;
            pairs.push((e, c));
        }
        if pairs.is_empty() {
            return Err(Error::Config("empty Laurent polynomial".into()));
        }
        Ok(Self::from_pairs(&pairs))
    }

    pub fn high(&self) -> i64 {
        self.low + self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, e: i64) -> f64 {
        if e < self.low || e > self.high() {
            0.0
        } else {
            self.coeffs[(e - self.low) as usize]
        }
    }

    /// Nonzero `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(move |(i, &c)| (self.low + i as i64, c))
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc * x.powi(self.low as i32)
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        let acc = self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c);
        acc * x.powi(self.low as i32)
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: i64) -> LaurentCoeffs {
        LaurentCoeffs {
            low: self.low + k,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn scale(&self, s: f64) -> LaurentCoeffs {
        LaurentCoeffs {
            low: self.low,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }
}

impl Add for &LaurentCoeffs {
    type Output = LaurentCoeffs;
    fn add(self, rhs: &LaurentCoeffs) -> LaurentCoeffs {
        if self.coeffs.is_empty() {
            return rhs.clone();
        }
        if rhs.coeffs.is_empty() {
            return self.clone();
        }
        let low = self.low.min(rhs.low);
        let high = self.high().max(rhs.high());
        let coeffs = (low..=high).map(|e| self.coeff(e) + rhs.coeff(e)).collect();
        LaurentCoeffs { low, coeffs }
    }
}

impl Sub for &LaurentCoeffs {
    type Output = LaurentCoeffs;
    fn sub(self, rhs: &LaurentCoeffs) -> LaurentCoeffs {
        self + &rhs.scale(-1.0)
    }
}

impl Mul for &LaurentCoeffs {
    type Output = LaurentCoeffs;
    fn mul(self, rhs: &LaurentCoeffs) -> LaurentCoeffs {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return LaurentCoeffs { low: 0, coeffs: vec![] };
        }
        let mut coeffs = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        LaurentCoeffs {
            low: self.low + rhs.low,
            coeffs,
        }
    }
}
