//! Behavioral operations on frequency-domain data: trajectory
//! membership, data-driven simulation and frequency-response evaluation.
//!
//! Every operation expresses a time-domain question as a linear system in
//! the coefficient vector `G = (G0, G1, G1*)` against the conjugate-
//! augmented data matrix. Conjugate-structured solves run in the real
//! coordinates `g = (G0, 2 Re G1, -2 Im G1)`; the frequency-response solve
//! stays complex because its right-hand side is.
//!
//! The true state order is unknown in a data-driven setting, so the
//! excitation-order preconditions take a caller-supplied upper bound and
//! are reported rather than enforced: operations proceed and flag weak
//! data instead of refusing to answer.

use num_complex::Complex64;

use crate::data::{
    build_data_matrix, conjugate_augmented, t_re_transform, vandermonde_column, Role, SpectraCollection,
    Trajectory,
};
use crate::error::{Error, Result};
use crate::excitation::is_cpe;
use crate::linalg::{least_squares_vec, ComplexMatrix, ComplexVector, RealVector};

/// Default consistency gate: `1e-6 * max(1, ||rhs||_2)`. Noisy data needs
/// the loose default; noise-free tests pass a tighter value.
pub const DEFAULT_CONSISTENCY_TOLERANCE: f64 = 1e-6;

fn effective_tolerance(tolerance: Option<f64>, rhs_norm: f64) -> f64 {
    tolerance.unwrap_or(DEFAULT_CONSISTENCY_TOLERANCE) * rhs_norm.max(1.0)
}

/// Conjugate-structured coefficient vector `G = (G0, G1, G1*)` in both
/// complex and real coordinates.
#[derive(Debug, Clone)]
pub struct GVector {
    experiments: usize,
    grid_len: usize,
    /// Real block at the DC columns, length `E`.
    pub g0: RealVector,
    /// Complex block at the positive-frequency columns, length `E(M-1)`.
    pub g1: ComplexVector,
}

impl GVector {
    /// Interpret real solve coordinates `g = (G0, 2 Re G1, -2 Im G1)`.
    pub fn from_real(g: &RealVector, grid_len: usize, experiments: usize) -> Result<Self> {
        let t = t_re_transform(grid_len, experiments)?;
        let full = t.to_complex(g)?;
        let e = experiments;
        let tail = e * (grid_len - 1);
        Ok(Self {
            experiments,
            grid_len,
            g0: RealVector::from_fn(e, |i, _| full[i].re),
            g1: ComplexVector::from_fn(tail, |i, _| full[e + i]),
        })
    }

    /// The full complex vector `(G0, G1, G1*)`.
    pub fn full(&self) -> ComplexVector {
        let e = self.experiments;
        let tail = self.g1.len();
        let mut out = ComplexVector::zeros(e + 2 * tail);
        for i in 0..e {
            out[i] = Complex64::new(self.g0[i], 0.0);
        }
        for i in 0..tail {
            out[e + i] = self.g1[i];
            out[e + tail + i] = self.g1[i].conj();
        }
        out
    }

    /// Real coordinates `(G0, 2 Re G1, -2 Im G1)`.
    pub fn real_coordinates(&self) -> RealVector {
        let e = self.experiments;
        let tail = self.g1.len();
        let mut out = RealVector::zeros(e + 2 * tail);
        for i in 0..e {
            out[i] = self.g0[i];
        }
        for i in 0..tail {
            out[e + i] = 2.0 * self.g1[i].re;
            out[e + tail + i] = -2.0 * self.g1[i].im;
        }
        out
    }

    pub fn grid_len(&self) -> usize {
        self.grid_len
    }

    pub fn experiment_count(&self) -> usize {
        self.experiments
    }
}

/// Verdict of a trajectory-membership test.
#[derive(Debug, Clone)]
pub struct TrajectoryCheck {
    pub is_trajectory: bool,
    /// Distance of the candidate from the data span.
    pub residual: f64,
    pub tolerance: f64,
    pub coefficients: GVector,
    /// Input data failed (or could not support) the CPE order
    /// `L + state_order_bound`; the verdict may be unreliable.
    pub weak_data: bool,
}

fn cpe_weak(spectra: &SpectraCollection, order: usize) -> bool {
    let inputs: Vec<_> = spectra.experiments().iter().map(|e| &e.input).collect();
    match is_cpe(&inputs, order) {
        Ok(report) => !report.achieved,
        Err(_) => true,
    }
}

/// Is `(u, y)` of length `L` an input-output trajectory of the system
/// behind the data? Solves `[u; y] = D g` in real coordinates by
/// minimum-norm least squares and gates the residual.
pub fn is_trajectory(
    spectra: &SpectraCollection,
    u: &Trajectory,
    y: &Trajectory,
    state_order_bound: usize,
    tolerance: Option<f64>,
) -> Result<TrajectoryCheck> {
    if u.len() != y.len() {
        return Err(Error::InvalidInput("input and output windows must have equal length".into()));
    }
    if u.channel_count() != spectra.input_channels() || y.channel_count() != spectra.output_channels() {
        return Err(Error::InvalidInput("candidate channels do not match the data".into()));
    }
    let depth = u.len();
    let dm = build_data_matrix(depth, spectra, &[Role::Input, Role::Output])?;
    let mut rhs = RealVector::zeros(dm.real_form().nrows());
    rhs.rows_mut(0, u.len() * u.channel_count()).copy_from(&u.stacked());
    rhs.rows_mut(u.len() * u.channel_count(), y.len() * y.channel_count())
        .copy_from(&y.stacked());
    let (g, residual) = least_squares_vec(dm.real_form(), &rhs)?;
    let tol = effective_tolerance(tolerance, rhs.norm());
    Ok(TrajectoryCheck {
        is_trajectory: residual <= tol,
        residual,
        tolerance: tol,
        coefficients: GVector::from_real(&g, dm.grid_len(), dm.experiment_count())?,
        weak_data: cpe_weak(spectra, depth + state_order_bound),
    })
}

/// A data-driven simulation request: a past window that pins the internal
/// state and the future inputs to respond to.
#[derive(Debug, Clone)]
pub struct BehaviorQuery {
    pub past_inputs: Option<Trajectory>,
    pub past_outputs: Option<Trajectory>,
    pub future_inputs: Trajectory,
}

impl BehaviorQuery {
    pub fn new(past_inputs: Trajectory, past_outputs: Trajectory, future_inputs: Trajectory) -> Result<Self> {
        if past_inputs.len() != past_outputs.len() {
            return Err(Error::InvalidInput("past input and output windows must have equal length".into()));
        }
        if past_inputs.channel_count() != future_inputs.channel_count() {
            return Err(Error::InvalidInput("past and future inputs must share channels".into()));
        }
        Ok(Self { past_inputs: Some(past_inputs), past_outputs: Some(past_outputs), future_inputs })
    }

    /// No past window: simulate from an unconstrained initial condition.
    pub fn without_past(future_inputs: Trajectory) -> Self {
        Self { past_inputs: None, past_outputs: None, future_inputs }
    }

    pub fn past_len(&self) -> usize {
        self.past_inputs.as_ref().map(Trajectory::len).unwrap_or(0)
    }

    pub fn future_len(&self) -> usize {
        self.future_inputs.len()
    }
}

/// Result of a data-driven simulation.
#[derive(Debug, Clone)]
pub struct DdSimulation {
    /// Outputs over the combined window, indexed `-L0 .. L-1`.
    pub outputs_full: Trajectory,
    /// The prediction `y_{[0, L-1]}`.
    pub outputs: Trajectory,
    /// Residual of the coefficient solve; how consistent past data and
    /// future inputs are with the data span.
    pub residual: f64,
    pub coefficients: GVector,
    pub weak_data: bool,
}

/// Simulate `L` steps of the unknown plant from frequency-domain data: fit
/// `g` against the combined-window inputs and the past outputs, then read
/// the full output window from the data matrix.
///
/// With a past window of length at least the observability index the
/// prediction is unique; shorter windows still return a valid trajectory,
/// just not a unique one.
pub fn dd_simulate(
    spectra: &SpectraCollection,
    query: &BehaviorQuery,
    state_order_bound: usize,
    tolerance: Option<f64>,
) -> Result<DdSimulation> {
    let n_u = spectra.input_channels();
    let n_y = spectra.output_channels();
    if query.future_inputs.channel_count() != n_u {
        return Err(Error::InvalidInput("future input channels do not match the data".into()));
    }
    let l0 = query.past_len();
    let l = query.future_len();
    let depth = l0 + l;

    let du = build_data_matrix(depth, spectra, &[Role::Input])?;
    let dy_full = build_data_matrix(depth, spectra, &[Role::Output])?;
    let cols = du.real_form().ncols();

    let mut lhs = crate::linalg::RealMatrix::zeros(n_u * depth + n_y * l0, cols);
    let mut rhs = RealVector::zeros(n_u * depth + n_y * l0);
    lhs.view_mut((0, 0), (n_u * depth, cols)).copy_from(du.real_form());
    if let (Some(pu), Some(py)) = (&query.past_inputs, &query.past_outputs) {
        if pu.channel_count() != n_u || py.channel_count() != n_y {
            return Err(Error::InvalidInput("past window channels do not match the data".into()));
        }
        let dy_past = build_data_matrix(l0, spectra, &[Role::Output])?;
        lhs.view_mut((n_u * depth, 0), (n_y * l0, cols)).copy_from(dy_past.real_form());
        rhs.rows_mut(0, n_u * l0).copy_from(&pu.stacked());
        rhs.rows_mut(n_u * depth, n_y * l0).copy_from(&py.stacked());
    }
    rhs.rows_mut(n_u * l0, n_u * l).copy_from(&query.future_inputs.stacked());

    let (g, residual) = least_squares_vec(&lhs, &rhs)?;
    let tol = effective_tolerance(tolerance, rhs.norm());
    if residual > tol {
        return Err(Error::InconsistentPast { residual, tolerance: tol });
    }

    let y_full = dy_full.real_form() * &g;
    let outputs_full = Trajectory::from_stacked(n_y, -(l0 as i64), &y_full)?;
    let outputs = outputs_full.window(l0, l)?;
    Ok(DdSimulation {
        outputs_full,
        outputs,
        residual,
        coefficients: GVector::from_real(&g, du.grid_len(), du.experiment_count())?,
        weak_data: cpe_weak(spectra, depth + state_order_bound),
    })
}

/// Result of a frequency-response evaluation at one complex frequency.
#[derive(Debug, Clone)]
pub struct FreqResponse {
    pub y_z: ComplexVector,
    pub residual: f64,
    pub weak_data: bool,
}

/// Evaluate the response `Y_z = H(z) U_z` at an arbitrary complex
/// frequency `z` from data alone.
///
/// Solves the complex system pairing the powers column `W_{L0+1}(z)` with
/// the depth-`(L0+1)` data blocks; `G` here is a free complex vector (no
/// conjugate structure) because the right-hand side is complex. A
/// residual above tolerance means `z` sits (near) an eigenvalue of the
/// plant or the data cannot support the evaluation.
pub fn freq_response_eval(
    spectra: &SpectraCollection,
    z: Complex64,
    u_z: &ComplexVector,
    past_len: usize,
    state_order_bound: usize,
    tolerance: Option<f64>,
) -> Result<FreqResponse> {
    let n_u = spectra.input_channels();
    let n_y = spectra.output_channels();
    if u_z.len() != n_u {
        return Err(Error::InvalidInput("U_z channels do not match the data".into()));
    }
    if past_len == 0 {
        return Err(Error::InvalidInput("past length must be >= 1".into()));
    }
    let depth = past_len + 1;
    let inputs: Vec<_> = spectra.experiments().iter().map(|e| &e.input).collect();
    let outputs: Vec<_> = spectra.experiments().iter().map(|e| &e.output).collect();
    let psi_u = conjugate_augmented(depth, &inputs)?;
    let psi_y = conjugate_augmented(depth, &outputs)?;
    let g_dim = psi_u.ncols();
    let w = vandermonde_column(depth, z);

    let rows = depth * (n_u + n_y);
    let mut lhs = ComplexMatrix::zeros(rows, n_y + g_dim);
    let mut rhs = ComplexVector::zeros(rows);
    lhs.view_mut((0, n_y), (depth * n_u, g_dim)).copy_from(&psi_u);
    lhs.view_mut((depth * n_u, n_y), (depth * n_y, g_dim)).copy_from(&psi_y);
    for i in 0..depth {
        for c in 0..n_y {
            lhs[(depth * n_u + i * n_y + c, c)] = -w[i];
        }
        for c in 0..n_u {
            rhs[i * n_u + c] = w[i] * u_z[c];
        }
    }

    let (sol, residual) = least_squares_vec(&lhs, &rhs)?;
    let tol = effective_tolerance(tolerance, rhs.norm());
    if residual > tol {
        return Err(Error::EvaluationFailed { residual, tolerance: tol });
    }
    Ok(FreqResponse {
        y_z: ComplexVector::from_fn(n_y, |i, _| sol[i]),
        residual,
        weak_data: cpe_weak(spectra, depth + state_order_bound),
    })
}

/// The full transfer matrix `H(z)`, one [`freq_response_eval`] per unit
/// input direction.
pub fn transfer_matrix_at(
    spectra: &SpectraCollection,
    z: Complex64,
    past_len: usize,
    state_order_bound: usize,
    tolerance: Option<f64>,
) -> Result<ComplexMatrix> {
    let n_u = spectra.input_channels();
    let n_y = spectra.output_channels();
    let mut h = ComplexMatrix::zeros(n_y, n_u);
    for j in 0..n_u {
        let mut e = ComplexVector::zeros(n_u);
        e[j] = Complex64::ONE;
        let col = freq_response_eval(spectra, z, &e, past_len, state_order_bound, tolerance)?;
        h.set_column(j, &col.y_z);
    }
    Ok(h)
}
