//! Search for a conjugation under which a finite section is symmetric.
//!
//! A matrix `T` is symmetric with respect to the conjugation `x ↦ U x̄` iff
//! `T U = U Tᵗ` with `U` a symmetric unitary. Writing `U = V Vᵗ` with `V`
//! unitary makes the constraint automatic, and the defect
//! `f(V) = ‖T V Vᵗ − V Vᵗ Tᵗ‖²_F` is minimized over the unitary group with
//! Riemannian gradients, Polak-Ribière conjugate directions, a Cayley
//! retraction and Armijo backtracking.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compop::OperatorMatrix;
use crate::mobius::MobiusMap;

type CMat = DMatrix<Complex64>;

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 50;
const REORTHO_EVERY: usize = 25;
/// Allowed unitarity and symmetry defect of a conjugation matrix.
pub const UNITARY_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConjError {
    #[error("conjugation matrix is not unitary (defect {0:e})")]
    NotUnitary(f64),
    #[error("conjugation matrix is not symmetric (defect {0:e})")]
    NotSymmetric(f64),
    #[error("dimension mismatch: operator is {0}x{0}, conjugation is {1}x{2}")]
    Dimension(usize, usize, usize),
    #[error("operator has a non-finite or zero Frobenius norm")]
    DegenerateOperator,
    #[error(transparent)]
    CompOp(#[from] crate::compop::CompOpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOptions {
    pub restarts: usize,
    pub max_iters: usize,
    /// Initial step of each backtracking line search.
    pub step: f64,
    /// Stop when the relative residual or the gradient norm falls below this.
    pub tol: f64,
    pub seed: u64,
    /// Polak-Ribière directions instead of plain gradients.
    pub conjugate: bool,
    /// Start each line search at twice the last accepted step.
    pub adaptive_step: bool,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions { restarts: 8, max_iters: 1000, step: 1.0, tol: 1e-13, seed: 42, conjugate: true, adaptive_step: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub restart: usize,
    pub iteration: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub best_residual: f64,
    pub best_u: CMat,
    pub best_restart: usize,
    /// Total iterations over all restarts.
    pub iterations: usize,
    pub restarts: usize,
    pub trace: Vec<TracePoint>,
    pub seed: u64,
}

fn unitarity_defect(u: &CMat) -> f64 {
    (u.adjoint() * u - CMat::identity(u.nrows(), u.ncols())).norm()
}

fn symmetry_defect(u: &CMat) -> f64 {
    (u - u.transpose()).norm()
}

/// `‖T U − U Tᵗ‖_F / ‖T‖_F` for a symmetric unitary `U`.
pub fn residual(t: &OperatorMatrix, u: &CMat) -> Result<f64, ConjError> {
    let n = t.dim();
    if u.nrows() != n || u.ncols() != n {
        return Err(ConjError::Dimension(n, u.nrows(), u.ncols()));
    }
    let scale = (n.max(1) as f64).sqrt();
    let du = unitarity_defect(u);
    if du > UNITARY_TOL * scale {
        return Err(ConjError::NotUnitary(du));
    }
    let ds = symmetry_defect(u);
    if ds > UNITARY_TOL * scale {
        return Err(ConjError::NotSymmetric(ds));
    }
    let tn = t.frobenius_norm();
    if !(tn.is_finite() && tn > 0.0) {
        return Err(ConjError::DegenerateOperator);
    }
    Ok(defect(&t.matrix, &t.matrix.transpose(), u).norm() / tn)
}

fn defect(t: &CMat, tt: &CMat, u: &CMat) -> CMat {
    t * u - u * tt
}

/// Objective and Riemannian gradient (as a skew-Hermitian `Ω` with grad = VΩ).
struct Problem<'a> {
    t: &'a CMat,
    tt: &'a CMat,
    th: CMat,
    tbar: CMat,
}

impl<'a> Problem<'a> {
    fn new(t: &'a CMat, tt: &'a CMat) -> Self {
        Problem { t, tt, th: t.adjoint(), tbar: t.conjugate() }
    }

    fn objective(&self, v: &CMat) -> f64 {
        let u = v * v.transpose();
        defect(self.t, self.tt, &u).norm_squared()
    }

    /// Euclidean gradient `2 (G + Gᵗ) V̄` with `G = Tᴴ E − E T̄`, projected to
    /// the Lie algebra: `Ω = skew(Vᴴ ∇)`.
    fn gradient(&self, v: &CMat) -> CMat {
        let u = v * v.transpose();
        let e = defect(self.t, self.tt, &u);
        let g = &self.th * &e - &e * &self.tbar;
        let euclid = (&g + g.transpose()) * v.conjugate() * Complex64::new(2.0, 0.0);
        let a = v.adjoint() * euclid;
        (&a - a.adjoint()) * Complex64::new(0.5, 0.0)
    }
}

/// Cayley retraction `V (I + tΩ/2)⁻¹ (I − tΩ/2)` along `−Ω`.
fn cayley(v: &CMat, omega: &CMat, t: f64) -> Option<CMat> {
    let n = v.nrows();
    let half = omega * Complex64::new(0.5 * t, 0.0);
    let id = CMat::identity(n, n);
    let lhs = &id + &half;
    let rhs = &id - &half;
    let step = lhs.lu().solve(&rhs)?;
    Some(v * step)
}

/// QR-based re-orthonormalization with the phase of `R`'s diagonal removed.
fn orthonormalize(m: &CMat) -> CMat {
    let qr = m.clone().qr();
    let (mut q, r) = qr.unpack();
    for j in 0..q.ncols() {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Haar-distributed unitary from a seeded Gaussian matrix.
pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMat {
    let m = CMat::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    });
    orthonormalize(&m)
}

struct RestartOutcome {
    residual: f64,
    v: CMat,
    iterations: usize,
    trace: Vec<TracePoint>,
}

fn run_restart(problem: &Problem<'_>, scale: f64, v0: CMat, restart: usize, opts: &OptimizeOptions) -> RestartOutcome {
    let mut v = v0;
    let mut f = problem.objective(&v);
    let rel = |f: f64| f.max(0.0).sqrt() / scale;
    let mut trace = vec![TracePoint { restart, iteration: 0, residual: rel(f) }];
    let mut iterations = 0;
    let mut prev: Option<(CMat, CMat)> = None; // (gradient, direction)
    let mut t0 = opts.step;
    while iterations < opts.max_iters && rel(f) > opts.tol {
        if iterations > 0 && iterations % REORTHO_EVERY == 0 {
            let w = orthonormalize(&v);
            let fw = problem.objective(&w);
            if fw <= f {
                v = w;
                f = fw;
            }
        }
        let omega = problem.gradient(&v);
        let gnorm2 = omega.norm_squared();
        if gnorm2.sqrt() <= opts.tol * scale * scale {
            break;
        }
        // Polak-Ribière+ in the left-trivialized (Lie algebra) frame
        let mut dir = omega.clone();
        if opts.conjugate {
            if let Some((g_old, d_old)) = &prev {
                let beta = ((omega.adjoint() * (&omega - g_old)).trace().re / g_old.norm_squared()).max(0.0);
                let cand = &omega + d_old * Complex64::new(beta, 0.0);
                if (omega.adjoint() * &cand).trace().re > 0.0 {
                    dir = cand;
                }
            }
        }
        let slope = (omega.adjoint() * &dir).trace().re;
        let mut t = t0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            if let Some(cand) = cayley(&v, &dir, t) {
                let fc = problem.objective(&cand);
                if fc <= f - ARMIJO * t * slope {
                    accepted = Some((cand, fc));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((cand, fc)) = accepted else {
            break;
        };
        if opts.adaptive_step {
            t0 = 2.0 * t;
        }
        v = cand;
        f = fc;
        prev = Some((omega, dir));
        iterations += 1;
        trace.push(TracePoint { restart, iteration: iterations, residual: rel(f) });
    }
    RestartOutcome { residual: rel(f), v, iterations, trace }
}

/// Minimizes the symmetry defect of `t` over symmetric unitaries `U = V Vᵗ`.
///
/// Restart 0 starts from `V = I`; the others from seeded random unitaries.
/// Restarts run in parallel and are merged by index, so the report depends
/// only on `t` and `opts`.
pub fn optimize(t: &OperatorMatrix, opts: &OptimizeOptions) -> Result<ResidualReport, ConjError> {
    let n = t.dim();
    let scale = t.frobenius_norm();
    if !(scale.is_finite() && scale > 0.0) {
        return Err(ConjError::DegenerateOperator);
    }
    let tt = t.matrix.transpose();
    let problem = Problem::new(&t.matrix, &tt);
    let restarts = opts.restarts.max(1);

    let starts: Vec<CMat> = (0..restarts)
        .map(|r| {
            if r == 0 {
                CMat::identity(n, n)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                rng.set_stream(r as u64);
                random_unitary(n, &mut rng)
            }
        })
        .collect();
    let outcomes: Vec<RestartOutcome> = starts
        .into_par_iter()
        .enumerate()
        .map(|(r, v0)| run_restart(&problem, scale, v0, r, opts))
        .collect();

    let (best_restart, best) = outcomes
        .iter()
        .enumerate()
        .min_by(|(_, x), (_, y)| x.residual.total_cmp(&y.residual))
        .expect("at least one restart");
    let best_u = &best.v * best.v.transpose();
    Ok(ResidualReport {
        best_residual: best.residual,
        best_u,
        best_restart,
        iterations: outcomes.iter().map(|o| o.iterations).sum(),
        restarts,
        trace: outcomes.iter().flat_map(|o| o.trace.iter().copied()).collect(),
        seed: opts.seed,
    })
}

/// One row of a discrimination study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub symbol: String,
    pub truncation: usize,
    pub best_residual: f64,
    pub identity_residual: f64,
    pub iterations: usize,
}

/// Best residual for every `(symbol, N)` pair.
pub fn discrimination_study(
    symbols: &[(String, MobiusMap)],
    truncations: &[usize],
    opts: &OptimizeOptions,
) -> Result<Vec<StudyRow>, ConjError> {
    let mut rows = Vec::new();
    for (name, phi) in symbols {
        for &n in truncations {
            let t = crate::compop::matrix_of_composition(phi, n)?;
            let report = optimize(&t, opts)?;
            let id = residual(&t, &CMat::identity(n, n))?;
            rows.push(StudyRow {
                symbol: name.clone(),
                truncation: n,
                best_residual: report.best_residual,
                identity_residual: id,
                iterations: report.iterations,
            });
        }
    }
    Ok(rows)
}

pub fn study_to_csv(rows: &[StudyRow]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["symbol", "truncation", "best_residual", "identity_residual", "iterations"])?;
    for r in rows {
        w.write_record([
            r.symbol.clone(),
            r.truncation.to_string(),
            format!("{:.6e}", r.best_residual),
            format!("{:.6e}", r.identity_residual),
            r.iterations.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compop::matrix_of_composition;
    use crate::mobius::{elliptic, involution};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_operator_has_zero_residual_at_identity() {
        let t = OperatorMatrix::from_matrix(CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(0.5, 0.2), c(-0.1, 0.3)])));
        assert_eq!(residual(&t, &CMat::identity(3, 3)).unwrap(), 0.0);
        let rot = matrix_of_composition(&MobiusMap::rotation(1, 3), 16).unwrap();
        assert_eq!(residual(&rot, &CMat::identity(16, 16)).unwrap(), 0.0);
    }

    #[test]
    fn order3_section_is_not_symmetric_at_identity() {
        let t = matrix_of_composition(&elliptic(c(0.5, 0.0), 1, 3).unwrap(), 16).unwrap();
        let r = residual(&t, &CMat::identity(16, 16)).unwrap();
        let direct = (&t.matrix - t.matrix.transpose()).norm() / t.frobenius_norm();
        assert!(r > 0.1);
        assert!((r - direct).abs() < 1e-15);
    }

    #[test]
    fn residual_rejects_non_unitary() {
        let t = matrix_of_composition(&MobiusMap::rotation(1, 3), 4).unwrap();
        let u = CMat::identity(4, 4) * c(2.0, 0.0);
        assert!(matches!(residual(&t, &u), Err(ConjError::NotUnitary(_))));
        let mut skew = CMat::zeros(2, 2);
        skew[(0, 1)] = c(1.0, 0.0);
        skew[(1, 0)] = c(-1.0, 0.0);
        let t2 = matrix_of_composition(&MobiusMap::rotation(1, 3), 2).unwrap();
        assert!(matches!(residual(&t2, &skew), Err(ConjError::NotSymmetric(_))));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let t = matrix_of_composition(&elliptic(c(0.4, 0.2), 1, 3).unwrap(), 6).unwrap();
        let tt = t.matrix.transpose();
        let problem = Problem::new(&t.matrix, &tt);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v = random_unitary(6, &mut rng);
        let omega = problem.gradient(&v);
        // d/dt f(V exp(−tΩ))|₀ = −‖Ω‖²; Cayley has the same first-order term
        let h = 1e-6;
        let fp = problem.objective(&cayley(&v, &omega, h).unwrap());
        let fm = problem.objective(&cayley(&v, &omega, -h).unwrap());
        let slope = (fp - fm) / (2.0 * h);
        assert!((slope + omega.norm_squared()).abs() < 1e-6 * omega.norm_squared().max(1.0), "{slope} vs {}", -omega.norm_squared());

        // random skew-Hermitian direction
        let x = random_unitary(6, &mut rng);
        let dir = (&x - x.adjoint()) * c(0.5, 0.0);
        let fp = problem.objective(&cayley(&v, &dir, h).unwrap());
        let fm = problem.objective(&cayley(&v, &dir, -h).unwrap());
        let slope = (fp - fm) / (2.0 * h);
        let predicted = -(omega.adjoint() * &dir).trace().re;
        assert!((slope - predicted).abs() < 1e-6 * predicted.abs().max(1.0), "{slope} vs {predicted}");
    }

    #[test]
    fn scaling_symbol_needs_no_iterations() {
        let t = matrix_of_composition(&MobiusMap::scaling(c(0.0, 0.5)).unwrap(), 16).unwrap();
        let rep = optimize(&t, &OptimizeOptions::default()).unwrap();
        assert_eq!(rep.best_residual, 0.0);
        assert_eq!(rep.best_restart, 0);
        assert!(rep.trace.iter().filter(|p| p.restart == 0).count() == 1);
    }

    #[test]
    fn descent_is_monotone_and_best_u_is_symmetric_unitary() {
        let t = matrix_of_composition(&involution(c(0.5, 0.0)).unwrap(), 8).unwrap();
        let opts = OptimizeOptions { restarts: 3, max_iters: 60, ..Default::default() };
        let rep = optimize(&t, &opts).unwrap();
        for w in rep.trace.windows(2) {
            if w[0].restart == w[1].restart {
                assert!(w[1].residual <= w[0].residual);
            }
        }
        assert!(rep.best_residual <= residual(&t, &CMat::identity(8, 8)).unwrap());
        assert!(unitarity_defect(&rep.best_u) <= UNITARY_TOL);
        assert!(symmetry_defect(&rep.best_u) <= UNITARY_TOL);
        let again = residual(&t, &rep.best_u).unwrap();
        assert!((again - rep.best_residual).abs() < 1e-12);
    }

    #[test]
    fn identical_seed_reproduces_report() {
        let t = matrix_of_composition(&elliptic(c(0.5, 0.0), 1, 3).unwrap(), 8).unwrap();
        let opts = OptimizeOptions { restarts: 3, max_iters: 30, ..Default::default() };
        let a = optimize(&t, &opts).unwrap();
        let b = optimize(&t, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn study_csv_has_header_and_rows() {
        let symbols = vec![("rotation".to_string(), MobiusMap::rotation(1, 3))];
        let rows = discrimination_study(&symbols, &[4, 8], &OptimizeOptions { restarts: 1, ..Default::default() }).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.best_residual == 0.0));
        let csv = study_to_csv(&rows).unwrap();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("symbol,truncation,best_residual"));
    }
}
