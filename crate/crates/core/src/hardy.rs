//! Truncated Taylor-coefficient calculus on the Hardy space H²(D).
//!
//! Monomials are orthonormal in H², so an element is represented by its
//! coefficient vector and the inner product is the ℓ² pairing. Every series
//! carries an explicit truncation; operations on series of different length
//! zero-extend the shorter one.

use std::ops::{Add, Index, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mobius::{MobiusMap, DEFAULT_TOL};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HardyError {
    #[error("point {0} lies outside the open unit disk")]
    OutsideDisk(Complex64),
    #[error("map has a pole at {0} inside the closed unit disk; no Taylor expansion in H²")]
    PoleInClosedDisk(Complex64),
    #[error("series division by a function vanishing at the origin")]
    DivisionByZero,
    #[error("map is not an automorphism of the unit disk")]
    NotAutomorphism,
}

/// Truncated element of H²(D): `coeffs[j]` is the coefficient of `z^j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H2Series {
    coeffs: Vec<Complex64>,
}

/// A reproducing kernel `K_w^{[j]}`, evaluating the `j`-th derivative at `w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub w: Complex64,
    pub derivative: usize,
}

impl KernelSpec {
    pub fn new(w: Complex64, derivative: usize) -> Result<Self, HardyError> {
        if w.norm() >= 1.0 {
            return Err(HardyError::OutsideDisk(w));
        }
        Ok(KernelSpec { w, derivative })
    }

    pub fn point(w: Complex64) -> Result<Self, HardyError> {
        Self::new(w, 0)
    }
}

impl H2Series {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        H2Series { coeffs }
    }

    pub fn zeros(n: usize) -> Self {
        H2Series { coeffs: vec![ZERO; n] }
    }

    pub fn constant(value: Complex64, n: usize) -> Self {
        let mut s = Self::zeros(n);
        if n > 0 {
            s.coeffs[0] = value;
        }
        s
    }

    pub fn one(n: usize) -> Self {
        Self::constant(ONE, n)
    }

    /// `z^k` at truncation `n`; zero when `k ≥ n`.
    pub fn monomial(k: usize, n: usize) -> Self {
        let mut s = Self::zeros(n);
        if k < n {
            s.coeffs[k] = ONE;
        }
        s
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        H2Series { coeffs: coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect() }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Complex64 {
        self.coeffs.get(j).copied().unwrap_or(ZERO)
    }

    /// Zero-extend or cut to length `n`.
    pub fn truncated(&self, n: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n, ZERO);
        H2Series { coeffs }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self, other⟩ = Σ f_j · conj(g_j)`.
    pub fn inner(&self, other: &H2Series) -> Complex64 {
        inner_product(self, other)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        H2Series { coeffs: self.coeffs.iter().map(|&z| z * s).collect() }
    }

    pub fn multiply(&self, other: &H2Series) -> Self {
        multiply(self, other)
    }

    pub fn power(&self, k: usize) -> Self {
        power(self, k)
    }

    /// Multiplication by `z`, keeping the truncation.
    pub fn shift(&self) -> Self {
        let n = self.len();
        let mut coeffs = vec![ZERO; n];
        if n > 0 {
            coeffs[1..].copy_from_slice(&self.coeffs[..n - 1]);
        }
        H2Series { coeffs }
    }

    /// Power-series quotient `self / den`, truncated to the shorter length.
    pub fn divide(&self, den: &H2Series) -> Result<Self, HardyError> {
        let n = self.len().min(den.len());
        let d0 = den.coeff(0);
        if d0.norm() == 0.0 {
            return Err(HardyError::DivisionByZero);
        }
        let mut q = vec![ZERO; n];
        for k in 0..n {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc -= den.coeffs[j] * q[k - j];
            }
            q[k] = acc / d0;
        }
        Ok(H2Series { coeffs: q })
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64, HardyError> {
        evaluate(self, z)
    }

    pub fn max_abs_diff(&self, other: &H2Series) -> f64 {
        (self - other).coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Index<usize> for H2Series {
    type Output = Complex64;

    fn index(&self, j: usize) -> &Complex64 {
        &self.coeffs[j]
    }
}

fn zip_extend(f: &H2Series, g: &H2Series, op: impl Fn(Complex64, Complex64) -> Complex64) -> H2Series {
    let n = f.len().max(g.len());
    H2Series { coeffs: (0..n).map(|j| op(f.coeff(j), g.coeff(j))).collect() }
}

impl Add for &H2Series {
    type Output = H2Series;

    fn add(self, rhs: &H2Series) -> H2Series {
        zip_extend(self, rhs, |x, y| x + y)
    }
}

impl Sub for &H2Series {
    type Output = H2Series;

    fn sub(self, rhs: &H2Series) -> H2Series {
        zip_extend(self, rhs, |x, y| x - y)
    }
}

impl Neg for &H2Series {
    type Output = H2Series;

    fn neg(self) -> H2Series {
        self.scale(-ONE)
    }
}

impl Mul<Complex64> for &H2Series {
    type Output = H2Series;

    fn mul(self, rhs: Complex64) -> H2Series {
        self.scale(rhs)
    }
}

impl Mul for &H2Series {
    type Output = H2Series;

    fn mul(self, rhs: &H2Series) -> H2Series {
        multiply(self, rhs)
    }
}

pub fn inner_product(f: &H2Series, g: &H2Series) -> Complex64 {
    f.coeffs.iter().zip(&g.coeffs).map(|(x, y)| x * y.conj()).sum()
}

/// Falling factorial `n (n−1) ⋯ (n−j+1)` as a float.
fn falling(n: usize, j: usize) -> f64 {
    (0..j).map(|i| (n - i) as f64).product()
}

/// Coefficients of `K_w^{[j]}`: `n(n−1)⋯(n−j+1) · w̄^{n−j}` for `n ≥ j`.
pub fn kernel(spec: KernelSpec, n: usize) -> Result<H2Series, HardyError> {
    if spec.w.norm() >= 1.0 {
        return Err(HardyError::OutsideDisk(spec.w));
    }
    let j = spec.derivative;
    let wb = spec.w.conj();
    let mut coeffs = vec![ZERO; n];
    if j >= n {
        return Ok(H2Series { coeffs });
    }
    // walk n upward: ff(n+1, j) = ff(n, j)·(n+1)/(n+1−j)
    let mut ff = falling(j, j);
    let mut pw = ONE;
    for (m, slot) in coeffs.iter_mut().enumerate().skip(j) {
        if m > j {
            ff *= m as f64 / (m - j) as f64;
            pw *= wb;
        }
        *slot = pw * ff;
    }
    Ok(H2Series { coeffs })
}

/// Taylor coefficients about 0 of a linear fractional map with no pole in the
/// closed unit disk.
pub fn series_of_mobius(f: &MobiusMap, n: usize) -> Result<H2Series, HardyError> {
    let [a, b, c, d] = f.coefficients();
    let mut coeffs = vec![ZERO; n];
    if n == 0 {
        return Ok(H2Series { coeffs });
    }
    if c.norm() <= DEFAULT_TOL {
        coeffs[0] = b / d;
        if n > 1 {
            coeffs[1] = a / d;
        }
        return Ok(H2Series { coeffs });
    }
    let pole = -d / c;
    if pole.norm() <= 1.0 + DEFAULT_TOL {
        return Err(HardyError::PoleInClosedDisk(pole));
    }
    // 1/(cz + d) = (1/d) Σ (−c/d)^k z^k, then multiply by az + b
    let ratio = -c / d;
    let mut g_prev = ZERO;
    let mut g = ONE / d;
    for slot in coeffs.iter_mut() {
        *slot = b * g + a * g_prev;
        g_prev = g;
        g *= ratio;
    }
    Ok(H2Series { coeffs })
}

/// Truncated Cauchy product at the shorter of the two truncations.
pub fn multiply(f: &H2Series, g: &H2Series) -> H2Series {
    let n = f.len().min(g.len());
    let mut out = vec![ZERO; n];
    let last_f = f.coeffs[..n].iter().rposition(|z| *z != ZERO);
    let Some(last_f) = last_f else {
        return H2Series { coeffs: out };
    };
    for (i, &fi) in f.coeffs[..=last_f].iter().enumerate() {
        if fi == ZERO {
            continue;
        }
        for (o, &gj) in out[i..].iter_mut().zip(&g.coeffs[..n - i]) {
            *o += fi * gj;
        }
    }
    H2Series { coeffs: out }
}

pub fn power(f: &H2Series, k: usize) -> H2Series {
    let mut acc = H2Series::one(f.len());
    let mut base = f.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc = multiply(&acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = multiply(&base, &base);
        }
    }
    acc
}

/// Horner evaluation of the truncated polynomial at a point of the open disk.
pub fn evaluate(f: &H2Series, z: Complex64) -> Result<Complex64, HardyError> {
    if z.norm() >= 1.0 {
        return Err(HardyError::OutsideDisk(z));
    }
    Ok(f.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c))
}

/// `e_k = K_a · φ_a^k` at truncation `n`.
pub fn kernel_involution_family(a: Complex64, k: usize, n: usize) -> Result<H2Series, HardyError> {
    let phi = crate::mobius::involution(a).map_err(|_| HardyError::OutsideDisk(a))?;
    let ka = kernel(KernelSpec::point(a)?, n)?;
    let pa = series_of_mobius(&phi, n)?;
    Ok(multiply(&ka, &power(&pa, k)))
}

/// Residual of `1 − |φ(z)|² = (1−|w|²)(1−|z|²)/|1 − w̄z|²` with `w = φ⁻¹(0)`.
pub fn identity_id_check(phi: &MobiusMap, z: Complex64) -> Result<f64, HardyError> {
    if z.norm() >= 1.0 {
        return Err(HardyError::OutsideDisk(z));
    }
    if !phi.is_disk_automorphism() {
        return Err(HardyError::NotAutomorphism);
    }
    let w = phi.inverse().eval(ZERO);
    let lhs = 1.0 - phi.eval(z).norm_sqr();
    let rhs = (1.0 - w.norm_sqr()) * (1.0 - z.norm_sqr()) / (ONE - w.conj() * z).norm_sqr();
    Ok((lhs - rhs).abs())
}
