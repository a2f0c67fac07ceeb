//! Hilbert-valued (block) basis pursuit and the rNSP error-bound
//! constants.
//!
//! The equality-constrained problem `min ‖z‖_{1;V} s.t. Az = f` is solved
//! by a first-order primal-dual iteration: the proximal step of the block
//! 1-norm is blockwise soft-thresholding of the Euclidean norm, the
//! equality constraint is handled by dual ascent, and the step sizes come
//! from the operator norm of `A` estimated by power iteration.

use thiserror::Error;

use crate::legendre::{CoefficientVector, LegendreError, TestFunction};
use crate::multiindex::IndexSet;
use crate::sampling::{Measurements, SketchOperator};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum RecoveryError {
    #[error("measurement count {found} does not match sketch rows {expected}")]
    MeasurementCountMismatch { expected: usize, found: usize },
    #[error("measurement blocks have inconsistent codomain dimensions")]
    RaggedMeasurements,
    #[error(transparent)]
    Legendre(#[from] LegendreError),
}

/// Outcome of a basis pursuit solve. `residual_norm` and `objective` are
/// recomputed from the returned blocks; non-convergence within the
/// iteration budget is reported through `converged`, never as an error.
#[derive(Debug, Clone, PartialEq)]
pub struct BPSolution {
    pub blocks: Vec<Vec<f64>>,
    pub residual_norm: f64,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl BPSolution {
    /// JSON sidecar with the solve diagnostics.
    pub fn diagnostics_json(&self) -> String {
        format!(
            "{{\"residual\":{},\"objective\":{},\"iterations\":{},\"converged\":{}}}",
            self.residual_norm, self.objective, self.iterations, self.converged
        )
    }

    /// The recovered blocks as a coefficient vector over `set`.
    pub fn to_coefficients(&self, set: &IndexSet) -> Result<CoefficientVector, RecoveryError> {
        let k = self.blocks.first().map_or(1, Vec::len);
        Ok(CoefficientVector::new(set.clone(), self.blocks.clone(), k)?)
    }
}

/// Default solver tolerance.
pub const DEFAULT_BP_TOL: f64 = 1e-9;

/// Default iteration budget `50 · N`.
pub fn default_bp_max_iter(n_cols: usize) -> usize {
    50 * n_cols
}

/// Solves `min ‖z‖_{1;V} subject to Az = f`.
///
/// Stops when the primal residual falls below `tol·max(1, ‖f‖)` and the
/// objective change between successive iterations falls below
/// `tol·max(1, objective)`, or after `max_iter` iterations with
/// `converged = false`.
pub fn basis_pursuit_block(
    a: &SketchOperator,
    f: &Measurements,
    tol: f64,
    max_iter: usize,
) -> Result<BPSolution, RecoveryError> {
    basis_pursuit_block_with_progress(a, f, tol, max_iter, None)
}

/// [`basis_pursuit_block`] with a progress callback receiving
/// `(iteration, residual, objective)` once per iteration.
pub fn basis_pursuit_block_with_progress(
    a: &SketchOperator,
    f: &Measurements,
    tol: f64,
    max_iter: usize,
    mut progress: Option<&mut dyn FnMut(usize, f64, f64)>,
) -> Result<BPSolution, RecoveryError> {
    assert!(tol > 0.0);
    let m = a.rows();
    let n = a.cols();
    if f.blocks.len() != m {
        return Err(RecoveryError::MeasurementCountMismatch {
            expected: m,
            found: f.blocks.len(),
        });
    }
    let k = f.blocks.first().map_or(1, Vec::len);
    if f.blocks.iter().any(|b| b.len() != k) {
        return Err(RecoveryError::RaggedMeasurements);
    }

    let fflat: Vec<f64> = f.blocks.iter().flatten().copied().collect();
    let fnorm = norm(&fflat).max(1.0);
    let opnorm = estimate_operator_norm(a) * 1.02;
    let step = if opnorm > 1e-150 { 0.95 / opnorm } else { 1.0 };
    let (tau, sigma) = (step, step);

    let mut z = vec![0.0; n * k];
    let mut zbar = vec![0.0; n * k];
    let mut y = vec![0.0; m * k];
    let mut az = vec![0.0; m * k];
    let mut aty = vec![0.0; n * k];

    let mut iterations = 0;
    let mut converged = false;
    let mut obj_prev = f64::NAN;
    for it in 1..=max_iter {
        iterations = it;
        // dual ascent on the equality constraint
        apply(a, &zbar, &mut az, k);
        for ((yv, &av), &fv) in y.iter_mut().zip(&az).zip(&fflat) {
            *yv += sigma * (av - fv);
        }
        // proximal step: blockwise soft-thresholding
        apply_transpose(a, &y, &mut aty, k);
        let mut objective = 0.0;
        for j in 0..n {
            let row = j * k;
            let mut sq = 0.0;
            for i in 0..k {
                let w = z[row + i] - tau * aty[row + i];
                aty[row + i] = w; // reuse as scratch for the new block
                sq += w * w;
            }
            let nrm = sq.sqrt();
            let scale = if nrm > tau { 1.0 - tau / nrm } else { 0.0 };
            for i in 0..k {
                let znew = scale * aty[row + i];
                zbar[row + i] = 2.0 * znew - z[row + i];
                z[row + i] = znew;
            }
            objective += scale * nrm;
        }

        apply(a, &z, &mut az, k);
        let residual = az
            .iter()
            .zip(&fflat)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if let Some(cb) = progress.as_deref_mut() {
            cb(it, residual, objective);
        }
        if residual <= tol * fnorm && (objective - obj_prev).abs() <= tol * objective.max(1.0) {
            converged = true;
            break;
        }
        obj_prev = objective;
    }

    apply(a, &z, &mut az, k);
    let residual_norm = az
        .iter()
        .zip(&fflat)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let objective = (0..n)
        .map(|j| norm(&z[j * k..(j + 1) * k]))
        .sum::<f64>();
    let blocks = (0..n).map(|j| z[j * k..(j + 1) * k].to_vec()).collect();
    Ok(BPSolution {
        blocks,
        residual_norm,
        objective,
        iterations,
        converged,
    })
}

/// Reconstruction map of the unknown-anisotropy pipeline: the truncated
/// Legendre expansion with the recovered blocks as coefficients.
pub fn unknown_reconstruct(
    sol: &BPSolution,
    set: &IndexSet,
) -> Result<TestFunction, RecoveryError> {
    Ok(TestFunction::from_expansion(sol.to_coefficients(set)?))
}

/// Error-bound constants under the robust null space property with
/// parameter `ρ`: returns `(C₁·σ, C₂·σ/√s)` with `C₁ = 2(1+ρ)/(1−ρ)` and
/// `C₂ = 2(1+ρ)²/(1−ρ)`, where `σ` is the best `s`-term block error of
/// the ground truth in the `ℓ¹` block norm.
pub fn rnsp_error_bounds(rho: f64, s: usize, sigma_s_1: f64) -> (f64, f64) {
    assert!(rho > 0.0 && rho < 1.0, "rNSP parameter must lie in (0,1)");
    assert!(s >= 1);
    let c1 = 2.0 * (1.0 + rho) / (1.0 - rho);
    let c2 = 2.0 * (1.0 + rho).powi(2) / (1.0 - rho);
    (c1 * sigma_s_1, c2 * sigma_s_1 / (s as f64).sqrt())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `out = A z` on flattened `N×K` blocks.
fn apply(a: &SketchOperator, z: &[f64], out: &mut [f64], k: usize) {
    let (m, n) = (a.rows(), a.cols());
    for i in 0..m {
        let row = a.row(i);
        let acc = &mut out[i * k..(i + 1) * k];
        acc.fill(0.0);
        for (j, &aij) in row.iter().enumerate().take(n) {
            let block = &z[j * k..(j + 1) * k];
            for (av, &bv) in acc.iter_mut().zip(block) {
                *av += aij * bv;
            }
        }
    }
}

/// `out = Aᵀ y` on flattened blocks.
fn apply_transpose(a: &SketchOperator, y: &[f64], out: &mut [f64], k: usize) {
    let m = a.rows();
    out.fill(0.0);
    for i in 0..m {
        let row = a.row(i);
        let yb = &y[i * k..(i + 1) * k];
        for (j, &aij) in row.iter().enumerate() {
            let ob = &mut out[j * k..(j + 1) * k];
            for (ov, &yv) in ob.iter_mut().zip(yb) {
                *ov += aij * yv;
            }
        }
    }
}

/// `‖A‖₂` by 20 power iterations on `AᵀA` from a deterministic start.
fn estimate_operator_norm(a: &SketchOperator) -> f64 {
    let n = a.cols();
    if n == 0 || a.rows() == 0 {
        return 0.0;
    }
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut av = vec![0.0; a.rows()];
    let mut atav = vec![0.0; n];
    let mut lambda: f64 = 0.0;
    for _ in 0..20 {
        apply(a, &v, &mut av, 1);
        apply_transpose(a, &av, &mut atav, 1);
        lambda = norm(&atav);
        if lambda <= 0.0 {
            return 0.0;
        }
        for (vi, &ai) in v.iter_mut().zip(&atav) {
            *vi = ai / lambda;
        }
    }
    lambda.sqrt()
}
