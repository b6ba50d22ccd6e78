//! Numerical verification of the function identities behind the order-3
//! obstruction and the non-automorphism classification.
//!
//! Every witness function is built from its closed form with the series
//! primitives of [`crate::hardy`]; each check returns plain residuals so the
//! caller decides how to aggregate them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compop::{self, CompOpError};
use crate::hardy::{self, H2Series, HardyError, KernelSpec};
use crate::mobius::{self, MobiusError, MobiusMap};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance for checks that go through an operator matrix.
pub const MATRIX_TOL: f64 = 1e-7;
/// Tolerance for pure series identities and inner products.
pub const SERIES_TOL: f64 = 1e-8;
/// Number of orthogonality indices tested by default.
pub const DEFAULT_K: usize = 6;
pub const DEFAULT_TRUNCATION: usize = 512;

const GRID_TOL: f64 = 1e-9;
const GAP_MIN_SAMPLES: usize = 256;
const GAP_MAX_SAMPLES: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CheckError {
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("parameter outside its domain: {0}")]
    Domain(String),
    #[error("symbol is not a self-map of the unit disk")]
    NotSelfMap,
    #[error(transparent)]
    CompOp(#[from] CompOpError),
    #[error(transparent)]
    Hardy(#[from] HardyError),
    #[error(transparent)]
    Mobius(#[from] MobiusError),
}

/// Closed-form witnesses attached to the order-3 elliptic automorphism with
/// fixed point `a ≠ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Order3Witness {
    pub a: Complex64,
    pub rho: Complex64,
    pub rho_tilde: Complex64,
    pub c0: Complex64,
    pub truncation: usize,
    /// `c0 (1 − ā³φ_a³) / (1 − ρφ_a³)`.
    pub h0: H2Series,
    /// `κ φ_a (1 − ā³φ_a³) / (1 − ρφ_a³)² + ā h0`.
    pub h1: H2Series,
    /// Inner function `(ρ̄ − φ_a³) / (1 − ρφ_a³)`.
    pub g: H2Series,
    /// `((1−|a|⁶)/(1−|a|⁴)) (1 − ā³φ_a³) / (1 − ρφ_a³)²`.
    pub f: H2Series,
    /// Series of `φ_a`.
    pub pa: H2Series,
}

impl Order3Witness {
    pub fn s(&self) -> f64 {
        self.a.norm_sqr()
    }

    /// `κ` in `h1 − ā h0 = κ φ_a (1 − ā³φ_a³)/(1 − ρφ_a³)²`.
    pub fn kappa(&self) -> Complex64 {
        let s = self.s();
        -self.c0 * self.a.conj() * (1.0 - s.powi(3)) / (self.a * (1.0 - s * s))
    }

    /// The order-3 elliptic automorphism `φ_a ∘ (ωz) ∘ φ_a` with `ω = e^{2πi/3}`.
    pub fn symbol(&self) -> Result<MobiusMap, CheckError> {
        Ok(mobius::elliptic(self.a, 1, 3)?)
    }

    /// `φ_a^k` for `k = 0..=max`.
    fn involution_powers(&self, max: usize) -> Vec<H2Series> {
        let mut out = Vec::with_capacity(max + 1);
        out.push(H2Series::one(self.truncation));
        for k in 1..=max {
            let next = out[k - 1].multiply(&self.pa);
            out.push(next);
        }
        out
    }
}

pub fn rho(a: Complex64) -> Complex64 {
    let s = a.norm_sqr();
    -(a.conj() * a.conj() / a) * (1.0 - s) / (1.0 - s * s)
}

pub fn rho_tilde(a: Complex64) -> Complex64 {
    let s = a.norm_sqr();
    -(a.conj() * a.conj() / a) * (1.0 - s.powi(3)) / (1.0 - s * s)
}

fn check_order3_domain(a: Complex64) -> Result<(), CheckError> {
    if a.norm() == 0.0 {
        return Err(CheckError::Degenerate("a = 0 gives a rotation; the order-3 witnesses need a ≠ 0"));
    }
    if a.norm() >= 1.0 {
        return Err(CheckError::Domain(format!("|a| = {} must be < 1", a.norm())));
    }
    Ok(())
}

/// Builds `h0, h1, g, f` at truncation `n` with `c0 = e^{iθ}/(1 − |a|⁴)`.
pub fn build_order3_witness(a: Complex64, phase_of_c0: f64, n: usize) -> Result<Order3Witness, CheckError> {
    check_order3_domain(a)?;
    let s = a.norm_sqr();
    let ab = a.conj();
    let rho = rho(a);
    let c0 = Complex64::from_polar(1.0 / (1.0 - s * s), phase_of_c0);
    let pa = hardy::series_of_mobius(&mobius::involution(a)?, n)?;
    let p3 = pa.power(3);
    let one = H2Series::one(n);
    let num = &one - &p3.scale(ab.powu(3));
    let den = &one - &p3.scale(rho);
    let den2 = den.multiply(&den);

    let h0 = num.divide(&den)?.scale(c0);
    let g = (&H2Series::constant(rho.conj(), n) - &p3).divide(&den)?;
    let f = num.divide(&den2)?.scale(Complex64::from((1.0 - s.powi(3)) / (1.0 - s * s)));
    let mut w = Order3Witness { a, rho, rho_tilde: rho_tilde(a), c0, truncation: n, h0, h1: H2Series::zeros(n), g, f, pa };
    let core = w.pa.multiply(&num).divide(&den2)?;
    w.h1 = &core.scale(w.kappa()) + &w.h0.scale(ab);
    Ok(w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim1Residuals {
    /// `|⟨h0, φ_a^{3k+2}⟩|` for `k = 0..=K`.
    pub orthogonality: Vec<f64>,
    /// `‖M(φ) h0 − h0‖`.
    pub eigen: f64,
}

pub fn check_claim1_structure(w: &Order3Witness, k: usize) -> Result<Claim1Residuals, CheckError> {
    let powers = w.involution_powers(3 * k + 2);
    let orthogonality = (0..=k).map(|j| w.h0.inner(&powers[3 * j + 2]).norm()).collect();
    let m = compop::matrix_of_composition(&w.symbol()?, w.truncation)?;
    let eigen = (&m.apply(&w.h0) - &w.h0).norm();
    Ok(Claim1Residuals { orthogonality, eigen })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim2Residuals {
    pub series_norm_sqr: f64,
    /// `|c0|² (1−|a|²)(1+|a|²)²`.
    pub closed_form: f64,
    /// `‖e0‖² = 1/(1−|a|²)`.
    pub e0_norm_sqr: f64,
    /// Inner-function defect `|‖g‖² − 1|`.
    pub g_inner: f64,
    /// `|g(0) + a²/ā|`.
    pub g_at_zero: f64,
}

impl Claim2Residuals {
    pub fn residual(&self) -> f64 {
        (self.series_norm_sqr - self.closed_form).abs()
    }

    pub fn isometry_residual(&self) -> f64 {
        (self.closed_form - self.e0_norm_sqr).abs()
    }
}

pub fn check_claim2_norm(w: &Order3Witness) -> Claim2Residuals {
    let s = w.s();
    Claim2Residuals {
        series_norm_sqr: w.h0.norm_sqr(),
        closed_form: w.c0.norm_sqr() * (1.0 - s) * (1.0 + s).powi(2),
        e0_norm_sqr: 1.0 / (1.0 - s),
        g_inner: (w.g.norm_sqr() - 1.0).abs(),
        g_at_zero: (w.g.coeff(0) + w.a * w.a / w.a.conj()).norm(),
    }
}

/// `|⟨h0, φ_a^{3k}⟩ − c0 (1−|a|⁴) ρ^k|` for `k = 0..=K`.
pub fn check_claim3_moments(w: &Order3Witness, k: usize) -> Vec<f64> {
    let s = w.s();
    let powers = w.involution_powers(3 * k);
    (0..=k)
        .map(|j| {
            let expect = w.c0 * (1.0 - s * s) * w.rho.powu(j as u32);
            (w.h0.inner(&powers[3 * j]) - expect).norm()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim4Residuals {
    /// `|⟨h1, φ_a^{3k}⟩|` for `k = 0..=K`.
    pub orthogonality: Vec<f64>,
    /// `‖M(φ)(h1 − āh0) − φ'(a)(h1 − āh0)‖`.
    pub eigen: f64,
    /// `|δ_k − (ρ^k + kρ̃ρ^{k−1})|` for `k = 0..=K`.
    pub delta_law: Vec<f64>,
    /// Largest coefficient of `C_{φ_a}(h1 − āh0)` off the indices `3j+1`.
    pub off_family: f64,
}

pub fn check_claim4(w: &Order3Witness, k: usize) -> Result<Claim4Residuals, CheckError> {
    let n = w.truncation;
    let s = w.s();
    let powers = w.involution_powers(3 * k);
    let orthogonality = (0..=k).map(|j| w.h1.inner(&powers[3 * j]).norm()).collect();

    let phi = w.symbol()?;
    let omega = phi.derivative_at(w.a)?;
    let v = &w.h1 - &w.h0.scale(w.a.conj());
    let m = compop::matrix_of_composition(&phi, n)?;
    let eigen = (&m.apply(&v) - &v.scale(omega)).norm();

    // φ_a is an involution, so C_{φ_a} sends Σ b_j φ_a^{3j+1} to Σ b_j z^{3j+1}
    let flat = compop::matrix_of_composition(&mobius::involution(w.a)?, n)?.apply(&v);
    let scale = -w.a * (1.0 - s * s) / (w.c0 * w.a.conj() * (1.0 - s.powi(3)));
    let delta_law = (0..=k)
        .map(|j| {
            let delta = flat.coeff(3 * j + 1) * scale;
            let expect = if j == 0 {
                ONE
            } else {
                w.rho.powu(j as u32) + w.rho_tilde * w.rho.powu(j as u32 - 1) * j as f64
            };
            (delta - expect).norm()
        })
        .collect();
    let off_family = (0..n).filter(|i| i % 3 != 1).map(|i| flat.coeff(i).norm()).fold(0.0, f64::max);
    Ok(Claim4Residuals { orthogonality, eigen, delta_law, off_family })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    /// `‖f‖²` from the coefficient series.
    pub lhs: f64,
    /// `(1−|a|⁴)(1+|a|²)²`.
    pub rhs: f64,
    pub gap: f64,
    /// `(2|a|²−|a|⁴−|a|⁶)(1+|a|²)²`.
    pub closed_form_gap: f64,
    /// `‖f‖²` from the expansion `f = β1 g² + β2 g + β3`.
    pub beta_norm_sqr: f64,
    /// `(1+2|a|²−2|a|⁴−|a|⁶)(1+|a|²)²`.
    pub closed_form_lhs: f64,
    /// Length of the coefficient series behind `lhs`.
    pub truncation: usize,
}

impl GapReport {
    pub fn gap_residual(&self) -> f64 {
        (self.gap - self.closed_form_gap).abs()
    }

    pub fn beta_residual(&self) -> f64 {
        (self.beta_norm_sqr - self.lhs).abs()
    }
}

/// `‖f‖²` by discrete Parseval: the mean of `|f|²` over `M` equispaced points
/// of the circle equals the squared norm of the `M`-term DFT coefficient
/// series of `f`, whose aliasing error decays geometrically in `M`. `M` is
/// doubled until the value is stable.
fn f_norm_sqr_boundary(a: Complex64) -> (f64, usize) {
    let s = a.norm_sqr();
    let ab = a.conj();
    let kappa = (1.0 - s.powi(3)) / (1.0 - s * s);
    let (rho, ab3) = (rho(a), ab.powu(3));
    let f = |z: Complex64| {
        let w3 = ((a - z) / (ONE - ab * z)).powu(3);
        let den = ONE - rho * w3;
        (ONE - ab3 * w3) * kappa / (den * den)
    };
    let mean = |m: usize| {
        (0..m).map(|j| f(Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / m as f64)).norm_sqr()).sum::<f64>()
            / m as f64
    };
    let mut m = GAP_MIN_SAMPLES;
    let mut prev = mean(m);
    loop {
        m *= 2;
        let cur = mean(m);
        if (cur - prev).abs() <= 1e-13 * cur || m >= GAP_MAX_SAMPLES {
            return (cur, m);
        }
        prev = cur;
    }
}

pub fn beta_coefficients(a: Complex64) -> [Complex64; 3] {
    let s = a.norm_sqr();
    let ab = a.conj();
    [
        ab.powu(4) / (a * a) * (1.0 + s),
        ab * ab / a * (1.0 + s) * (2.0 + s),
        Complex64::from((1.0 + s) * (1.0 + s)),
    ]
}

/// `‖β1 g² + β2 g + β3‖²` using only that `g` is inner with `g(0) = −a²/ā`.
pub fn beta_norm_sqr(a: Complex64) -> f64 {
    let [b1, b2, b3] = beta_coefficients(a);
    let g0 = -a * a / a.conj();
    let cross = b1 * b2.conj() * g0 + b2 * b3.conj() * g0 + b1 * b3.conj() * g0 * g0;
    b1.norm_sqr() + b2.norm_sqr() + b3.norm_sqr() + 2.0 * cross.re
}

/// The two values of `‖f‖²`: from the witness series and from the isometry.
pub fn check_theorem_main_gap(a: Complex64) -> Result<GapReport, CheckError> {
    check_order3_domain(a)?;
    let s = a.norm_sqr();
    let (lhs, truncation) = f_norm_sqr_boundary(a);
    let rhs = (1.0 - s * s) * (1.0 + s).powi(2);
    Ok(GapReport {
        lhs,
        rhs,
        gap: lhs - rhs,
        closed_form_gap: (2.0 * s - s * s - s.powi(3)) * (1.0 + s).powi(2),
        beta_norm_sqr: beta_norm_sqr(a),
        closed_form_lhs: (1.0 + 2.0 * s - 2.0 * s * s - s.powi(3)) * (1.0 + s).powi(2),
        truncation,
    })
}

/// `|‖e1 − ā e0‖² − (1+|a|²)/(1−|a|²)|` at truncation `n`.
pub fn check_e1_norm(a: Complex64, n: usize) -> Result<f64, CheckError> {
    if a.norm() >= 1.0 {
        return Err(CheckError::Domain(format!("|a| = {} must be < 1", a.norm())));
    }
    let e0 = hardy::kernel_involution_family(a, 0, n)?;
    let e1 = hardy::kernel_involution_family(a, 1, n)?;
    let s = a.norm_sqr();
    Ok(((&e1 - &e0.scale(a.conj())).norm_sqr() - (1.0 + s) / (1.0 - s)).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TzMode {
    Series,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TzReport {
    pub eta: Complex64,
    pub mode: TzMode,
    pub residual: f64,
    pub tol: f64,
}

fn fixing_zero_symbol(b: Complex64, c: Complex64) -> Result<MobiusMap, CheckError> {
    let phi = MobiusMap::fixing_zero(b, c)?;
    if !phi.is_disk_selfmap() {
        return Err(CheckError::NotSelfMap);
    }
    Ok(phi)
}

/// 64 points: 8 radii in `[0.1, 0.8]` times 8 angles.
fn disk_grid() -> Vec<Complex64> {
    (1..=8)
        .flat_map(|r| (0..8).map(move |t| Complex64::from_polar(0.1 * r as f64, std::f64::consts::TAU * t as f64 / 8.0)))
        .collect()
}

/// Schroeder's equation `σ ∘ φ̃ = b σ` for `φ̃(z) = bz/(1 − cz)` and
/// `σ(z) = z/(1 − ηz)`, `η = c/(1 − b)`.
pub fn check_lemma_tz(b: Complex64, c: Complex64, n: usize) -> Result<TzReport, CheckError> {
    let phi = fixing_zero_symbol(b, c)?;
    if (ONE - b).norm() == 0.0 {
        return Err(CheckError::Degenerate("b = 1 leaves η undefined"));
    }
    let eta = c / (ONE - b);
    if eta.norm() < 1.0 - 1e-12 {
        let sigma = hardy::series_of_mobius(&MobiusMap::new(ONE, ZERO, -eta, ONE)?, n)?;
        let m = compop::matrix_of_composition(&phi, n)?;
        let residual = (&m.apply(&sigma) - &sigma.scale(b)).norm();
        Ok(TzReport { eta, mode: TzMode::Series, residual, tol: SERIES_TOL })
    } else {
        let sigma = |z: Complex64| z / (ONE - eta * z);
        let residual = disk_grid()
            .into_iter()
            .map(|z| (sigma(phi.eval(z)) - b * sigma(z)).norm())
            .fold(0.0, f64::max);
        Ok(TzReport { eta, mode: TzMode::Grid, residual, tol: GRID_TOL })
    }
}

/// Witness data for a non-automorphism with interior fixed point `a ≠ 0`,
/// written as `φ = φ_a ∘ φ̃ ∘ φ_a` with `φ̃(z) = bz/(1 − cz)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremFinalWitness {
    pub b: Complex64,
    pub c: Complex64,
    pub a: Complex64,
    pub eta: Complex64,
    pub w0: Complex64,
    pub truncation: usize,
    pub sigma: H2Series,
    /// `h_j = ((a − z)/(1 − w0 z))^j` for `j = 0, 1, 2`.
    pub h: [H2Series; 3],
    /// `(1 − a w0)(z − a)/(1 − w0 z)²`.
    pub h_tilde: H2Series,
    pub gamma1: Complex64,
    pub gamma2: Complex64,
}

impl TheoremFinalWitness {
    pub fn symbol(&self) -> Result<MobiusMap, CheckError> {
        Ok(MobiusMap::fixing_zero(self.b, self.c)?.conjugate_by_involution(self.a)?)
    }
}

pub fn build_theorem_final_witness(b: Complex64, c: Complex64, a: Complex64, n: usize) -> Result<TheoremFinalWitness, CheckError> {
    let tilde = fixing_zero_symbol(b, c)?;
    if tilde.is_disk_automorphism() {
        return Err(CheckError::Domain("φ̃ is an automorphism".into()));
    }
    if a.norm() == 0.0 {
        return Err(CheckError::Degenerate("the fixed point a must be nonzero"));
    }
    if a.norm() >= 1.0 {
        return Err(CheckError::Domain(format!("|a| = {} must be < 1", a.norm())));
    }
    let eta = c / (ONE - b);
    if eta.norm() >= 1.0 {
        return Err(CheckError::Domain(format!("|η| = {} ≥ 1, σ leaves H²", eta.norm())));
    }
    let w0 = (a.conj() - eta) / (ONE - a * eta);
    let sigma = hardy::series_of_mobius(&MobiusMap::new(ONE, ZERO, -eta, ONE)?, n)?;
    let h1 = hardy::series_of_mobius(&MobiusMap::new(-ONE, a, -w0, ONE)?, n)?;
    let h2 = h1.multiply(&h1);
    let k = hardy::kernel(KernelSpec::point(w0.conj())?, n)?;
    let lin = H2Series::new(vec![-a, ONE]).truncated(n);
    let h_tilde = lin.multiply(&k).multiply(&k).scale(ONE - a * w0);
    let d = 1.0 - w0.norm_sqr();
    let gamma1 = -(ONE - a * w0) * (a - w0.conj()) / d;
    let gamma2 = -(ONE - a * w0) * (ONE - a * w0) / d;
    Ok(TheoremFinalWitness { b, c, a, eta, w0, truncation: n, sigma, h: [H2Series::one(n), h1, h2], h_tilde, gamma1, gamma2 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalResiduals {
    /// `‖h1 − (φ_{w̄0} + (a − w̄0) K_{w̄0})‖`.
    pub h1_decomposition: f64,
    /// `|‖h1‖² − (1 + |a − w̄0|²/(1 − |w0|²))|`.
    pub h1_norm: f64,
    /// `max(‖h2 − a h1 − z h̃‖, ‖h̃ − (γ1 K + γ2 K φ_{w̄0})‖)`.
    pub h2_decomposition: f64,
    /// `|‖h2 − a h1‖² − (|γ1|² + |γ2|²)/(1 − |w0|²)|`.
    pub h2_norm: f64,
    /// `|⟨K_{w̄0} φ_{w̄0}, K_{w̄0}⟩|`.
    pub orthogonality: f64,
    /// `max_j ‖M(φ) h_j − b^j h_j‖`.
    pub eigen: f64,
    /// `max(||γ1| − |η|(1−|a|²)/(1−|η|²)|, ||γ2| − (1−|a|²)/(1−|η|²)|)`.
    pub gamma_moduli: f64,
}

impl FinalResiduals {
    pub fn named(&self) -> [(&'static str, f64); 6] {
        [
            ("h1_decomposition", self.h1_decomposition),
            ("h1_norm", self.h1_norm),
            ("h2_decomposition", self.h2_decomposition),
            ("h2_norm", self.h2_norm),
            ("orthogonality", self.orthogonality),
            ("eigen", self.eigen),
        ]
    }

    pub fn max(&self) -> f64 {
        self.named().iter().map(|p| p.1).fold(0.0, f64::max)
    }
}

pub fn check_theorem_final(b: Complex64, c: Complex64, a: Complex64, n: usize) -> Result<FinalResiduals, CheckError> {
    let w = build_theorem_final_witness(b, c, a, n)?;
    let w0b = w.w0.conj();
    let k = hardy::kernel(KernelSpec::point(w0b)?, n)?;
    let pw = hardy::series_of_mobius(&mobius::involution(w0b)?, n)?;
    let d = 1.0 - w.w0.norm_sqr();
    let [h0, h1, h2] = &w.h;

    let h1_decomposition = (h1 - &(&pw + &k.scale(a - w0b))).norm();
    let h1_norm = (h1.norm_sqr() - (1.0 + (a - w0b).norm_sqr() / d)).abs();

    let diff = h2 - &h1.scale(a);
    let kp = k.multiply(&pw);
    let split = &k.scale(w.gamma1) + &kp.scale(w.gamma2);
    let h2_decomposition = (&diff - &w.h_tilde.shift()).norm().max((&w.h_tilde - &split).norm());
    let h2_norm = (diff.norm_sqr() - (w.gamma1.norm_sqr() + w.gamma2.norm_sqr()) / d).abs();
    let orthogonality = kp.inner(&k).norm();

    let m = compop::matrix_of_composition(&w.symbol()?, n)?;
    let eigen = [h0, h1, h2]
        .iter()
        .enumerate()
        .map(|(j, h)| (&m.apply(h) - &h.scale(b.powu(j as u32))).norm())
        .fold(0.0, f64::max);

    let (sa, se) = (a.norm_sqr(), w.eta.norm_sqr());
    let gamma_moduli = (w.gamma1.norm() - w.eta.norm() * (1.0 - sa) / (1.0 - se))
        .abs()
        .max((w.gamma2.norm() - (1.0 - sa) / (1.0 - se)).abs());
    Ok(FinalResiduals { h1_decomposition, h1_norm, h2_decomposition, h2_norm, orthogonality, eigen, gamma_moduli })
}

/// One named residual with its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl CheckLine {
    pub fn new(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        CheckLine { name: name.into(), residual, tol, pass: residual.is_finite() && residual <= tol }
    }

    /// A boolean condition reported as residual 0 (holds) or 1 (fails).
    pub fn flag(name: impl Into<String>, holds: bool) -> Self {
        CheckLine { name: name.into(), residual: if holds { 0.0 } else { 1.0 }, tol: 0.0, pass: holds }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    Identities,
    Order3,
    Schroeder,
    Final,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteParams {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub truncation: usize,
    pub k: usize,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            a: Complex64::new(0.5, 0.0),
            b: Complex64::new(0.5, 0.0),
            c: Complex64::new(0.25, 0.0),
            truncation: DEFAULT_TRUNCATION,
            k: DEFAULT_K,
        }
    }
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

/// Kernel identities for a rotation-conjugate and a dilate-translate symbol
/// fixing `a`, the adjoint of `C_{φ_a}` on monomials, and the norm of `e1 − ā e0`.
pub fn identity_suite(a: Complex64, n: usize, k: usize) -> Result<Vec<CheckLine>, CheckError> {
    let mut out = Vec::new();
    let half = Complex64::new(0.5, 0.0);
    let symbols = [
        ("elliptic3", mobius::elliptic(a, 1, 3)?),
        ("elliptic5", mobius::elliptic(a, 2, 5)?),
        ("dilate_translate", MobiusMap::affine(half, (ONE - half) * a)?),
    ];
    for (label, phi) in symbols {
        let r = compop::adjoint_kernel_checks(&phi, a, n)?;
        for (j, x) in r.iter().enumerate() {
            out.push(CheckLine::new(format!("{label}.adjoint_kernel_{j}"), *x, MATRIX_TOL));
        }
    }
    let star = compop::lemma_star_s_check(a, n, k)?;
    out.push(CheckLine::new("involution.adjoint_of_one", star[0], MATRIX_TOL));
    out.push(CheckLine::new("involution.adjoint_of_monomials", max_of(&star[1..]), MATRIX_TOL));
    let eig = compop::eigenspace_check_order3(a, n, k)?;
    out.push(CheckLine::new("elliptic3.eigen_forward", eig.iter().map(|p| p.0).fold(0.0, f64::max), MATRIX_TOL));
    out.push(CheckLine::new("elliptic3.eigen_adjoint", eig.iter().map(|p| p.1).fold(0.0, f64::max), MATRIX_TOL));
    out.push(CheckLine::new("e1_norm", check_e1_norm(a, n)?, MATRIX_TOL));
    let pts = [Complex64::new(0.3, -0.2), Complex64::new(-0.6, 0.5), Complex64::new(0.0, 0.9)];
    let inv = mobius::involution(a)?;
    let id = pts
        .iter()
        .map(|&z| hardy::identity_id_check(&inv, z))
        .collect::<Result<Vec<_>, _>>()?;
    out.push(CheckLine::new("automorphism_identity", max_of(&id), SERIES_TOL));
    Ok(out)
}

pub fn order3_suite(a: Complex64, n: usize, k: usize) -> Result<Vec<CheckLine>, CheckError> {
    let w = build_order3_witness(a, 0.0, n)?;
    let s = a.norm_sqr();
    let mut out = vec![
        CheckLine::new("rho_modulus", (w.rho.norm() - s.sqrt() / (1.0 + s)).abs(), SERIES_TOL),
        CheckLine::new("c0_modulus", (w.c0.norm() * (1.0 - s * s) - 1.0).abs(), SERIES_TOL),
    ];
    let c1 = check_claim1_structure(&w, k)?;
    out.push(CheckLine::new("claim1.orthogonality", max_of(&c1.orthogonality), SERIES_TOL));
    out.push(CheckLine::new("claim1.eigen", c1.eigen, MATRIX_TOL));
    let c2 = check_claim2_norm(&w);
    out.push(CheckLine::new("claim2.norm", c2.residual(), SERIES_TOL));
    out.push(CheckLine::new("claim2.isometry", c2.isometry_residual(), SERIES_TOL));
    out.push(CheckLine::new("claim2.g_inner", c2.g_inner, SERIES_TOL));
    out.push(CheckLine::new("claim2.g_at_zero", c2.g_at_zero, SERIES_TOL));
    out.push(CheckLine::new("claim3.moments", max_of(&check_claim3_moments(&w, k)), SERIES_TOL));
    let c4 = check_claim4(&w, k)?;
    out.push(CheckLine::new("claim4.orthogonality", max_of(&c4.orthogonality), SERIES_TOL));
    out.push(CheckLine::new("claim4.eigen", c4.eigen, MATRIX_TOL));
    out.push(CheckLine::new("claim4.delta_law", max_of(&c4.delta_law), MATRIX_TOL));
    out.push(CheckLine::new("claim4.off_family", c4.off_family, MATRIX_TOL));
    let gap = check_theorem_main_gap(a)?;
    out.push(CheckLine::new("main.gap_formula", gap.gap_residual(), SERIES_TOL));
    out.push(CheckLine::new("main.beta_expansion", gap.beta_residual(), SERIES_TOL));
    out.push(CheckLine::new("main.lhs_closed_form", (gap.lhs - gap.closed_form_lhs).abs(), SERIES_TOL));
    out.push(CheckLine::new("main.witness_series", (w.f.norm_sqr() - gap.lhs).abs(), SERIES_TOL));
    let scaled = (&w.h1 - &w.h0.scale(a.conj())).norm_sqr() * (1.0 - s * s).powi(2);
    out.push(CheckLine::new("main.f_from_h1", (scaled - gap.lhs).abs(), SERIES_TOL));
    out.push(CheckLine::flag("main.gap_positive", gap.gap > 0.0));
    out.push(CheckLine::new("e1_norm", check_e1_norm(a, n)?, MATRIX_TOL));
    Ok(out)
}

pub fn schroeder_suite(b: Complex64, c: Complex64, n: usize) -> Result<Vec<CheckLine>, CheckError> {
    let r = check_lemma_tz(b, c, n)?;
    Ok(vec![CheckLine::new(
        match r.mode {
            TzMode::Series => "lemma_tz.series",
            TzMode::Grid => "lemma_tz.grid",
        },
        r.residual,
        r.tol,
    )])
}

pub fn final_suite(b: Complex64, c: Complex64, a: Complex64, n: usize) -> Result<Vec<CheckLine>, CheckError> {
    let r = check_theorem_final(b, c, a, n)?;
    let mut out: Vec<CheckLine> =
        r.named().iter().map(|(name, x)| CheckLine::new(format!("final.{name}"), *x, MATRIX_TOL)).collect();
    out.push(CheckLine::new("final.gamma_moduli", r.gamma_moduli, SERIES_TOL));
    Ok(out)
}

pub fn run_suite(suite: Suite, p: &SuiteParams) -> Result<Vec<CheckLine>, CheckError> {
    let n = p.truncation;
    match suite {
        Suite::Identities => identity_suite(p.a, n, p.k),
        Suite::Order3 => order3_suite(p.a, n, p.k),
        Suite::Schroeder => schroeder_suite(p.b, p.c, n),
        Suite::Final => final_suite(p.b, p.c, p.a, n),
        Suite::All => {
            let mut out = Vec::new();
            for s in [Suite::Identities, Suite::Order3, Suite::Schroeder, Suite::Final] {
                out.extend(run_suite(s, p)?);
            }
            Ok(out)
        }
    }
}
