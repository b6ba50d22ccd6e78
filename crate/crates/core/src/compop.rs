//! Finite sections of composition operators `C_φ f = f ∘ φ` in the monomial
//! basis, their adjoints, and the kernel identities they satisfy.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use thiserror::Error;

use crate::hardy::{self, H2Series, HardyError, KernelSpec};
use crate::mobius::{self, MobiusError, MobiusMap, DEFAULT_TOL};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompOpError {
    #[error("symbol is not a self-map of the unit disk")]
    NotSelfMap,
    #[error("{0} is not a fixed point of the symbol inside the unit disk")]
    NoInteriorFixedPoint(Complex64),
    #[error("eigen-decomposition did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize, partial: Vec<Complex64> },
    #[error(transparent)]
    Hardy(#[from] HardyError),
    #[error(transparent)]
    Mobius(#[from] MobiusError),
}

/// Dense `N×N` matrix of an operator on the first `N` monomials.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub matrix: DMatrix<Complex64>,
    /// Symbol the matrix was built from, when there is one.
    pub symbol: Option<MobiusMap>,
    pub adjoint: bool,
}

impl OperatorMatrix {
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Self {
        OperatorMatrix { matrix, symbol: None, adjoint: false }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Matrix-vector product; the input is zero-extended or cut to `N`.
    pub fn apply(&self, f: &H2Series) -> H2Series {
        let v = DVector::from_iterator(self.dim(), f.truncated(self.dim()).into_coeffs());
        H2Series::new((&self.matrix * v).iter().copied().collect())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn column(&self, n: usize) -> H2Series {
        H2Series::new(self.matrix.column(n).iter().copied().collect())
    }
}

/// One eigenpair with its residual `‖Tv − λv‖` for unit `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: Complex64,
    pub vector: H2Series,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenReport {
    pub pairs: Vec<EigenPair>,
}

impl EigenReport {
    pub fn values(&self) -> Vec<Complex64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.pairs.iter().map(|p| p.residual).fold(0.0, f64::max)
    }
}

/// Matrix of `C_φ` on the first `n` monomials: column `k` holds `φ^k`.
pub fn matrix_of_composition(phi: &MobiusMap, n: usize) -> Result<OperatorMatrix, CompOpError> {
    if !phi.is_disk_selfmap() {
        return Err(CompOpError::NotSelfMap);
    }
    let s = hardy::series_of_mobius(phi, n)?;
    let mut matrix = DMatrix::<Complex64>::zeros(n, n);
    let mut col = H2Series::one(n);
    for k in 0..n {
        matrix.column_mut(k).copy_from_slice(col.coeffs());
        if k + 1 < n {
            col = col.multiply(&s);
        }
    }
    Ok(OperatorMatrix { matrix, symbol: Some(*phi), adjoint: false })
}

pub fn adjoint(t: &OperatorMatrix) -> OperatorMatrix {
    OperatorMatrix { matrix: t.matrix.adjoint(), symbol: t.symbol, adjoint: !t.adjoint }
}

fn check_interior_fixed_point(phi: &MobiusMap, a: Complex64) -> Result<(), CompOpError> {
    let image = phi.apply(a.into());
    let fixed = image.as_finite().is_some_and(|w| (w - a).norm() <= 1e-9);
    if a.norm() >= 1.0 || !fixed {
        return Err(CompOpError::NoInteriorFixedPoint(a));
    }
    Ok(())
}

/// Residual norms of the three kernel identities for `C_φ^*` at a fixed point `a`:
/// `C_φ^*K_a = K_a`, `C_φ^*K_a^{[1]} = conj(φ'(a)) K_a^{[1]}` and
/// `C_φ^*K_a^{[2]} = conj(φ'(a))² K_a^{[2]} + conj(φ''(a)) K_a^{[1]}`.
pub fn adjoint_kernel_checks(phi: &MobiusMap, a: Complex64, n: usize) -> Result<[f64; 3], CompOpError> {
    check_interior_fixed_point(phi, a)?;
    let star = adjoint(&matrix_of_composition(phi, n)?);
    let d1 = phi.derivative_at(a)?.conj();
    let d2 = phi.second_derivative_at(a)?.conj();
    let k0 = hardy::kernel(KernelSpec::new(a, 0)?, n)?;
    let k1 = hardy::kernel(KernelSpec::new(a, 1)?, n)?;
    let k2 = hardy::kernel(KernelSpec::new(a, 2)?, n)?;
    let r0 = (&star.apply(&k0) - &k0).norm();
    let r1 = (&star.apply(&k1) - &k1.scale(d1)).norm();
    let expect2 = &k2.scale(d1 * d1) + &k1.scale(d2);
    let r2 = (&star.apply(&k2) - &expect2).norm();
    Ok([r0, r1, r2])
}

/// Residuals of `C_{φ_a}^* 1 = K_a` (first entry) followed by
/// `C_{φ_a}^* z^{k+1} = e_{k+1} − a e_k` for `k = 0..=max_k`.
pub fn lemma_star_s_check(a: Complex64, n: usize, max_k: usize) -> Result<Vec<f64>, CompOpError> {
    let phi = mobius::involution(a)?;
    let star = adjoint(&matrix_of_composition(&phi, n)?);
    let ka = hardy::kernel(KernelSpec::point(a)?, n)?;
    let mut out = vec![(&star.apply(&H2Series::one(n)) - &ka).norm()];
    let mut e_prev = hardy::kernel_involution_family(a, 0, n)?;
    let pa = hardy::series_of_mobius(&phi, n)?;
    for k in 0..=max_k {
        let e_next = e_prev.multiply(&pa);
        let expect = &e_next - &e_prev.scale(a);
        out.push((&star.apply(&H2Series::monomial(k + 1, n)) - &expect).norm());
        e_prev = e_next;
    }
    Ok(out)
}

/// Residuals of the eigen-relations for the order-3 elliptic automorphism
/// `φ = φ_a ∘ (ωz) ∘ φ_a`, `ω = e^{2πi/3}`. Returns pairs
/// `(‖C_φ φ_a^k − ω^k φ_a^k‖, ‖C_φ^*(e_k − a e_{k−1}) − ω̄^k (e_k − a e_{k−1})‖)`.
pub fn eigenspace_check_order3(a: Complex64, n: usize, max_k: usize) -> Result<Vec<(f64, f64)>, CompOpError> {
    let phi = mobius::elliptic(a, 1, 3)?;
    let m = matrix_of_composition(&phi, n)?;
    let star = adjoint(&m);
    let omega = phi.derivative_at(a)?;
    let pa = hardy::series_of_mobius(&mobius::involution(a)?, n)?;
    let ka = hardy::kernel(KernelSpec::point(a)?, n)?;

    let mut out = Vec::with_capacity(max_k + 1);
    let mut pk = H2Series::one(n);
    let mut e_prev = H2Series::zeros(n);
    let mut e_k = ka;
    for k in 0..=max_k {
        let lam = omega.powu(k as u32);
        let forward = (&m.apply(&pk) - &pk.scale(lam)).norm();
        let v = &e_k - &e_prev.scale(a);
        let backward = (&star.apply(&v) - &v.scale(lam.conj())).norm();
        out.push((forward, backward));
        pk = pk.multiply(&pa);
        e_prev = e_k.clone();
        e_k = e_k.multiply(&pa);
    }
    Ok(out)
}

/// `{φ'(a)^k : 0 ≤ k < n}` for a fixed point `a` of `φ` inside the disk.
pub fn point_spectrum_formula(phi: &MobiusMap, a: Complex64, n: usize) -> Result<Vec<Complex64>, CompOpError> {
    check_interior_fixed_point(phi, a)?;
    let b = phi.derivative_at(a)?;
    Ok((0..n).map(|k| b.powu(k as u32)).collect())
}

/// Ordering by modulus descending, then by argument ascending.
pub fn eigen_order(x: &Complex64, y: &Complex64) -> std::cmp::Ordering {
    let (mx, my) = (x.norm(), y.norm());
    if (mx - my).abs() > DEFAULT_TOL * mx.max(my).max(1.0) {
        my.total_cmp(&mx)
    } else {
        x.arg().total_cmp(&y.arg())
    }
}

pub fn sort_eigenvalues(values: &mut [Complex64]) {
    values.sort_by(eigen_order);
}

/// All eigenvalues of a dense matrix with unit eigenvectors.
///
/// Eigenvalues come from a complex Schur form `T = Q S Q*`; eigenvectors are
/// recovered by back-substitution in the triangular factor.
pub fn eigen_decompose(t: &OperatorMatrix, tol: f64) -> Result<EigenReport, CompOpError> {
    eigen_decompose_with(t, tol, 10_000)
}

pub fn eigen_decompose_with(t: &OperatorMatrix, tol: f64, max_iters: usize) -> Result<EigenReport, CompOpError> {
    let n = t.dim();
    if n == 0 {
        return Ok(EigenReport { pairs: Vec::new() });
    }
    let Some(schur) = Schur::try_new(t.matrix.clone(), f64::EPSILON, max_iters) else {
        return Err(CompOpError::NoConvergence { iterations: max_iters, partial: Vec::new() });
    };
    let (q, s) = schur.unpack();
    let scale = t.frobenius_norm().max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * scale;

    let mut pairs = Vec::with_capacity(n);
    for k in 0..n {
        let lam = s[(k, k)];
        // solve (S − λ) y = 0 with y_k = 1 and y_j = 0 for j > k
        let mut y = DVector::<Complex64>::zeros(n);
        y[k] = ONE;
        for i in (0..k).rev() {
            let mut acc = ZERO;
            for j in i + 1..=k {
                acc += s[(i, j)] * y[j];
            }
            let mut denom = s[(i, i)] - lam;
            if denom.norm() < small {
                denom = Complex64::new(small, 0.0);
            }
            y[i] = -acc / denom;
            // rescale to stay finite for strongly non-normal triangles
            let big = y.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if big > 1e100 {
                y /= Complex64::new(big, 0.0);
            }
        }
        let mut v = &q * y;
        let nv = v.norm();
        v /= Complex64::new(nv, 0.0);
        let residual = (&t.matrix * &v - &v * lam).norm();
        pairs.push(EigenPair { value: lam, vector: H2Series::new(v.iter().copied().collect()), residual });
    }
    let bound = tol * scale;
    if pairs.iter().any(|p| !(p.residual <= bound)) {
        let partial = pairs.iter().map(|p| p.value).collect();
        return Err(CompOpError::NoConvergence { iterations: max_iters, partial });
    }
    pairs.sort_by(|x, y| eigen_order(&x.value, &y.value));
    Ok(EigenReport { pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::involution;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scaling_gives_diagonal_matrix() {
        let s = c(0.3, 0.4);
        let m = matrix_of_composition(&MobiusMap::scaling(s).unwrap(), 8).unwrap();
        for j in 0..8 {
            for k in 0..8 {
                let expect = if j == k { s.powu(k as u32) } else { ZERO };
                assert!((m.matrix[(j, k)] - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn column_one_of_bz_over_one_minus_cz() {
        let (b, cc) = (c(0.5, 0.1), c(0.25, -0.1));
        let m = matrix_of_composition(&MobiusMap::fixing_zero(b, cc).unwrap(), 16).unwrap();
        assert_eq!(m.matrix[(0, 0)], ONE);
        assert!(m.matrix[(0, 1)].norm() < 1e-15);
        for j in 1..16 {
            assert!((m.matrix[(j, 1)] - b * cc.powu(j as u32 - 1)).norm() < 1e-14);
        }
    }

    #[test]
    fn rejects_non_self_maps() {
        let f = MobiusMap::real(2.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(matrix_of_composition(&f, 4), Err(CompOpError::NotSelfMap));
    }

    #[test]
    fn composition_law_improves_with_truncation() {
        let phi = mobius::elliptic(c(0.6, 0.1), 1, 5).unwrap();
        let psi = involution(c(-0.5, 0.35)).unwrap();
        let both = phi.compose(&psi).unwrap();
        let gap = |n: usize| {
            let lhs = matrix_of_composition(&both, n).unwrap().matrix;
            let rhs = matrix_of_composition(&psi, n).unwrap().matrix * matrix_of_composition(&phi, n).unwrap().matrix;
            (lhs - rhs).view((0, 0), (48, 48)).norm()
        };
        let (coarse, fine) = (gap(64), gap(256));
        assert!(fine < coarse, "{fine:e} !< {coarse:e}");
        assert!(fine < 1e-4 * coarse, "{fine:e} vs {coarse:e}");
    }

    #[test]
    fn adjoint_examples() {
        let s = c(0.3, 0.4);
        let m = matrix_of_composition(&MobiusMap::scaling(s).unwrap(), 6).unwrap();
        let star = adjoint(&m);
        for k in 0..6 {
            assert!((star.matrix[(k, k)] - s.powu(k as u32).conj()).norm() < 1e-15);
        }
        assert_eq!(adjoint(&star).matrix, m.matrix);

        let a = c(0.5, 0.0);
        let n = 256;
        let t = matrix_of_composition(&involution(a).unwrap(), n).unwrap();
        let e0 = hardy::kernel_involution_family(a, 0, n).unwrap();
        let z = H2Series::monomial(1, n);
        let lhs = t.apply(&z).inner(&e0);
        let rhs = z.inner(&adjoint(&t).apply(&e0));
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn kernel_identities_for_rotation_are_exact() {
        let r = adjoint_kernel_checks(&MobiusMap::rotation(1, 7), ZERO, 64).unwrap();
        assert!(r.iter().all(|&x| x == 0.0), "{r:?}");
    }

    #[test]
    fn kernel_identities_at_interior_fixed_points() {
        let a = c(0.5, 0.0);
        let ell = mobius::elliptic(a, 1, 3).unwrap();
        for r in adjoint_kernel_checks(&ell, a, 512).unwrap() {
            assert!(r <= 1e-8, "{r}");
        }
        let dt = MobiusMap::affine(c(0.5, 0.0), c(0.25, 0.0)).unwrap();
        for r in adjoint_kernel_checks(&dt, a, 512).unwrap() {
            assert!(r <= 1e-8, "{r}");
        }
        assert!(matches!(adjoint_kernel_checks(&dt, c(0.1, 0.0), 16), Err(CompOpError::NoInteriorFixedPoint(_))));
    }

    #[test]
    fn lemma_star_s_examples() {
        for r in lemma_star_s_check(ZERO, 32, 6).unwrap() {
            assert!(r < 1e-15);
        }
        for r in lemma_star_s_check(c(0.5, 0.0), 512, 6).unwrap() {
            assert!(r <= 1e-8, "{r}");
        }
        // ⟨C^*_{φ_a} 1, z^n⟩ = ā^n
        let a = c(0.3, 0.0);
        let star = adjoint(&matrix_of_composition(&involution(a).unwrap(), 64).unwrap());
        let v = star.apply(&H2Series::one(64));
        for n in 0..20 {
            assert!((v[n] - a.conj().powu(n as u32)).norm() < 1e-14);
        }
    }

    #[test]
    fn order3_eigenspaces() {
        let a = c(0.5, 0.0);
        let phi = mobius::elliptic(a, 1, 3).unwrap();
        let omega = phi.derivative_at(a).unwrap();
        assert!((omega.powu(3) - ONE).norm() < 1e-12);
        assert!((omega - Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0)).norm() < 1e-12);
        let r = eigenspace_check_order3(a, 512, 6).unwrap();
        assert!(r[0].0 < 1e-14);
        for (f, b) in r {
            assert!(f <= 1e-7 && b <= 1e-7, "{f} {b}");
        }
    }

    #[test]
    fn point_spectrum_examples() {
        let w = Complex64::from_polar(1.0, 0.7);
        let got = point_spectrum_formula(&MobiusMap::scaling(w).unwrap(), ZERO, 5).unwrap();
        for (k, v) in got.iter().enumerate() {
            assert!((v - w.powu(k as u32)).norm() < 1e-15);
        }
        let dt = MobiusMap::affine(c(0.5, 0.0), c(0.25, 0.0)).unwrap();
        let got = point_spectrum_formula(&dt, c(0.5, 0.0), 6).unwrap();
        for (k, v) in got.iter().enumerate() {
            assert!((v - c(0.5f64.powi(k as i32), 0.0)).norm() < 1e-15);
        }
        let a = c(0.5, 0.0);
        let fixed = c(2.0 - 3.0_f64.sqrt(), 0.0);
        let got = point_spectrum_formula(&involution(a).unwrap(), fixed, 6).unwrap();
        for (k, v) in got.iter().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((v - c(sign, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn eigen_decompose_diagonal_and_triangular() {
        let s = c(0.0, 0.5);
        let m = matrix_of_composition(&MobiusMap::scaling(s).unwrap(), 12).unwrap();
        let rep = eigen_decompose(&m, 1e-12).unwrap();
        let mut expect: Vec<Complex64> = (0..12).map(|k| s.powu(k)).collect();
        sort_eigenvalues(&mut expect);
        for (got, want) in rep.values().iter().zip(&expect) {
            assert!((got - want).norm() < 1e-15);
        }

        let dt = MobiusMap::affine(c(0.5, 0.0), c(0.25, 0.0)).unwrap();
        let m = matrix_of_composition(&dt, 32).unwrap();
        // the truncated matrix is upper triangular: the diagonal is the spectrum
        for j in 0..32 {
            for k in 0..j {
                assert_eq!(m.matrix[(j, k)], ZERO);
            }
        }
        let rep = eigen_decompose(&m, 1e-10).unwrap();
        for (k, v) in rep.values().iter().enumerate() {
            assert!((v - m.matrix[(k, k)]).norm() < 1e-12);
            assert!((v - c(0.5f64.powi(k as i32), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn eigen_decompose_general_matrix() {
        let a = DMatrix::from_fn(20, 20, |i, j| c(((i * 7 + j * 3) % 11) as f64 - 5.0, ((i * 5 + j * 13) % 7) as f64 - 3.0));
        let t = OperatorMatrix::from_matrix(a);
        let rep = eigen_decompose(&t, 1e-10).unwrap();
        assert_eq!(rep.pairs.len(), 20);
        assert!(rep.max_residual() <= 1e-10 * t.frobenius_norm());
        let trace: Complex64 = (0..20).map(|i| t.matrix[(i, i)]).sum();
        let sum: Complex64 = rep.values().iter().sum();
        assert!((trace - sum).norm() < 1e-9);
    }
}
