//! Data-driven LQR from input-state spectra.
//!
//! The stacked data matrix `Delta = [X0; X1; U]` (states, one-step-shifted
//! states and inputs, conjugate-augmented and taken to real coordinates)
//! turns the LQR problem into the trace-maximization SDP
//! `Delta' Psi(P) Delta >= 0`, `P >= 0` with
//! `Psi(P) = diag(Q - P, P, R)`. The optimal gain is recovered as
//! `K = U X0^+` through a right inverse of `X0` built from the kernel of
//! the constraint block at the optimum.

use crate::control::sdp::{sdp_solve, sym_param_pairs, SdpProblem};
use crate::data::{build_data_matrix, Role, SpectraCollection};
use crate::error::{Error, Result};
use crate::excitation::is_cpe;
use crate::linalg::{kernel_basis, pseudo_inverse, svd, RealMatrix};

/// LQR stage-cost weights: `Q` symmetric PSD on the state, `R` symmetric
/// PD on the input.
#[derive(Debug, Clone, PartialEq)]
pub struct LqrWeights {
    pub q: RealMatrix,
    pub r: RealMatrix,
}

impl LqrWeights {
    pub fn new(q: RealMatrix, r: RealMatrix) -> Result<Self> {
        let check_sym = |m: &RealMatrix, name: &str| -> Result<()> {
            if m.nrows() != m.ncols() {
                return Err(Error::InvalidInput(format!("{name} must be square")));
            }
            if (m.transpose() - m).amax() > 1e-12 * m.amax().max(1.0) {
                return Err(Error::InvalidInput(format!("{name} must be symmetric")));
            }
            Ok(())
        };
        check_sym(&q, "Q")?;
        check_sym(&r, "R")?;
        if q.nrows() > 0 && q.clone().symmetric_eigenvalues().min() < -1e-10 * q.amax().max(1.0) {
            return Err(Error::InvalidInput("Q must be positive semidefinite".into()));
        }
        if r.nrows() == 0 || r.clone().symmetric_eigenvalues().min() <= 0.0 {
            return Err(Error::InvalidInput("R must be positive definite".into()));
        }
        Ok(Self { q, r })
    }

    pub fn identity(n_x: usize, n_u: usize) -> Self {
        Self { q: RealMatrix::identity(n_x, n_x), r: RealMatrix::identity(n_u, n_u) }
    }
}

#[derive(Debug, Clone)]
pub struct LqrDiagnostics {
    pub sdp_iterations: usize,
    pub sdp_gap: f64,
    /// `||X0 X0^+ - I||` of the constructed right inverse.
    pub right_inverse_residual: f64,
    /// `||S(P) X0^+|| / scale` at the optimum.
    pub kernel_residual: f64,
    /// Input data missed the CPE order `n_x + 1`.
    pub weak_data: bool,
}

#[derive(Debug, Clone)]
pub struct DdLqr {
    /// State-feedback gain: `u = K x`.
    pub gain: RealMatrix,
    /// Optimal cost matrix `P`.
    pub cost_matrix: RealMatrix,
    pub diagnostics: LqrDiagnostics,
}

/// Solve the LQR problem from input-state spectra alone.
pub fn dd_lqr(spectra: &SpectraCollection, weights: &LqrWeights, tolerance: Option<f64>) -> Result<DdLqr> {
    if !spectra.has_states() {
        return Err(Error::InvalidInput("LQR needs state spectra in every experiment".into()));
    }
    let states = spectra.role_spectra(Role::State)?;
    let n_x = states[0].channel_count();
    let n_u = spectra.input_channels();
    if weights.q.nrows() != n_x || weights.r.nrows() != n_u {
        return Err(Error::InvalidInput("weight dimensions do not match the data".into()));
    }

    // Delta in real coordinates: depth-2 state block gives X0 (rows 0..nx)
    // and the shifted X1 (rows nx..2nx); depth-1 input block gives U
    let f2_states = build_data_matrix(2, spectra, &[Role::State])?;
    let f1_inputs = build_data_matrix(1, spectra, &[Role::Input])?;
    let x0 = f2_states.real_form().rows(0, n_x).into_owned();
    let x1 = f2_states.real_form().rows(n_x, n_x).into_owned();
    let u = f1_inputs.real_form().clone();

    let weak_data = {
        let inputs: Vec<_> = spectra.experiments().iter().map(|e| &e.input).collect();
        match is_cpe(&inputs, n_x + 1) {
            Ok(r) => !r.achieved,
            Err(_) => true,
        }
    };

    // ridge Q up to a strictly positive floor so the SDP has an interior;
    // the shift is far below the solve tolerance
    let q_scale = weights.q.amax().max(1.0);
    let q_min = weights.q.clone().symmetric_eigenvalues().min();
    let floor = 1e-10 * q_scale;
    let ridge = (floor - q_min).max(0.0);
    let mut q_eff = weights.q.clone();
    for i in 0..n_x {
        q_eff[(i, i)] += ridge;
    }

    // S(P) = X0' (Q - P) X0 + X1' P X1 + U' R U
    let s0 = x0.transpose() * &q_eff * &x0 + u.transpose() * &weights.r * &u;
    let pairs = sym_param_pairs(n_x);
    let basis: Vec<RealMatrix> = pairs
        .iter()
        .map(|&(i, j)| {
            let mut e = RealMatrix::zeros(n_x, n_x);
            e[(i, j)] = 1.0;
            e[(j, i)] = 1.0;
            let b = x1.transpose() * &e * &x1 - x0.transpose() * &e * &x0;
            (&b + b.transpose()) * 0.5
        })
        .collect();
    let problem = SdpProblem::new(n_x, s0, basis)?;
    let init = RealMatrix::identity(n_x, n_x) * (q_min.max(floor) / 2.0).min(1.0);
    let sol = sdp_solve(&problem, tolerance, Some(&init))?;
    let p = sol.p.clone();

    // right inverse of X0 supported on ker S(P):
    // X0^+ = K_b (X0 K_b)^+ with K_b a kernel basis of the block
    let s_opt = problem.constraint_at(&p);
    let sigma_max = svd(&s_opt)?.singular_values[0].max(1e-300);
    let kernel_tol = 1e-6 * sigma_max;
    let k_b = kernel_basis(&s_opt, Some(kernel_tol))?;
    if k_b.ncols() == 0 {
        return Err(Error::DegenerateData("constraint block has no kernel at the optimum".into()));
    }
    let x0_kb = &x0 * &k_b;
    if crate::linalg::rank(&x0_kb, None)? < n_x {
        return Err(Error::DegenerateData(
            "kernel of the optimal constraint block is too small to invert X0".into(),
        ));
    }
    let x0_dagger = &k_b * pseudo_inverse(&x0_kb)?;

    let right_inverse_residual = (&x0 * &x0_dagger - RealMatrix::identity(n_x, n_x)).amax();
    if right_inverse_residual > 1e-7 {
        return Err(Error::DegenerateData(format!(
            "right inverse of X0 failed: ||X0 X0^+ - I|| = {right_inverse_residual:.3e}"
        )));
    }
    let kernel_residual = (&s_opt * &x0_dagger).amax() / sigma_max.max(1.0);
    if kernel_residual > 1e-6 {
        return Err(Error::DegenerateData(format!(
            "right inverse leaves the kernel: relative residual {kernel_residual:.3e}"
        )));
    }
    let gain = &u * &x0_dagger;
    Ok(DdLqr {
        gain,
        cost_matrix: p,
        diagnostics: LqrDiagnostics {
            sdp_iterations: sol.iterations,
            sdp_gap: sol.gap,
            right_inverse_residual,
            kernel_residual,
            weak_data,
        },
    })
}

/// Largest-solution DARE fixed point used to sanity-check the returned
/// gain against a model when one is available (tests do this with an
/// independent implementation).
pub fn closed_loop_gain_residual(a: &RealMatrix, b: &RealMatrix, lqr: &DdLqr) -> f64 {
    let acl = a + b * &lqr.gain;
    let eig = acl.complex_eigenvalues();
    eig.iter().map(|l| l.norm()).fold(0.0, f64::max)
}
