//! Receding-horizon predictive control from data: FreePC (frequency-
//! domain data matrix), DeePC (time-domain Hankel matrix) and an exact-
//! model MPC benchmark sharing the same cost and constraints.
//!
//! All three build the same kind of QP per step: decision variables are
//! the future inputs and outputs plus, for the data-driven schemes, the
//! coefficient vector `g` tying them to the data, the past-output slack
//! `sigma` and 1-norm epigraph auxiliaries. The complex 1-norm `||G||_1`
//! is implemented as the 1-norm of the real coordinates
//! `(G0, 2 Re G1, -2 Im G1)`, which keeps the program a QP and is
//! equivalent up to a factor of sqrt(2); tune `lambda_g` with that
//! convention in mind.

use std::collections::VecDeque;

use crate::control::qp::{qp_solve, QpProblem, QpSolution};
use crate::data::{build_data_matrix, hankel, Role, SpectraCollection, Trajectory};
use crate::error::{Error, Result};
use crate::excitation::{is_cpe, is_pe_time};
use crate::linalg::{least_squares_vec, RealMatrix, RealVector};
use crate::plantlab::{NoiseConfig, StateSpaceModel};
use crate::rng::SeededRng;

/// Everything a receding-horizon problem needs besides data: horizon and
/// past-window lengths, stage-cost weights, box constraints and the
/// regularization weights.
///
/// `lambda_sigma = f64::INFINITY` pins the past-output slack to zero
/// (noise-free mode); `lambda_g = 0` drops the coefficient regularizer.
#[derive(Debug, Clone)]
pub struct PredictiveProblem {
    pub horizon: usize,
    pub past_len: usize,
    pub output_weight: RealMatrix,
    pub input_weight: RealMatrix,
    pub input_lower: RealVector,
    pub input_upper: RealVector,
    pub output_lower: RealVector,
    pub output_upper: RealVector,
    pub lambda_sigma: f64,
    pub lambda_g: f64,
    /// Upper bound on the unknown state order, used only in the reported
    /// excitation check.
    pub state_order_bound: usize,
}

impl PredictiveProblem {
    /// Unconstrained template with identity weights.
    pub fn unconstrained(horizon: usize, past_len: usize, n_u: usize, n_y: usize) -> Self {
        Self {
            horizon,
            past_len,
            output_weight: RealMatrix::identity(n_y, n_y),
            input_weight: RealMatrix::identity(n_u, n_u),
            input_lower: RealVector::from_element(n_u, f64::NEG_INFINITY),
            input_upper: RealVector::from_element(n_u, f64::INFINITY),
            output_lower: RealVector::from_element(n_y, f64::NEG_INFINITY),
            output_upper: RealVector::from_element(n_y, f64::INFINITY),
            lambda_sigma: f64::INFINITY,
            lambda_g: 0.0,
            state_order_bound: 0,
        }
    }

    pub fn validate(&self, n_u: usize, n_y: usize) -> Result<()> {
        if self.horizon == 0 || self.past_len == 0 {
            return Err(Error::InvalidInput("horizon and past length must be >= 1".into()));
        }
        if self.output_weight.nrows() != n_y || self.output_weight.ncols() != n_y {
            return Err(Error::InvalidInput("output weight must be n_y x n_y".into()));
        }
        if self.input_weight.nrows() != n_u || self.input_weight.ncols() != n_u {
            return Err(Error::InvalidInput("input weight must be n_u x n_u".into()));
        }
        let sym_psd = |m: &RealMatrix, name: &str, strict: bool| -> Result<()> {
            let scale = m.amax().max(1.0);
            if (m.transpose() - m).amax() > 1e-12 * scale {
                return Err(Error::InvalidInput(format!("{name} must be symmetric")));
            }
            let min = m.clone().symmetric_eigenvalues().min();
            if strict && min <= 0.0 {
                return Err(Error::InvalidInput(format!("{name} must be positive definite")));
            }
            if !strict && min < -1e-10 * scale {
                return Err(Error::InvalidInput(format!("{name} must be positive semidefinite")));
            }
            Ok(())
        };
        sym_psd(&self.output_weight, "output weight", false)?;
        sym_psd(&self.input_weight, "input weight", true)?;
        if self.input_lower.len() != n_u || self.input_upper.len() != n_u {
            return Err(Error::InvalidInput("input box must have n_u channels".into()));
        }
        if self.output_lower.len() != n_y || self.output_upper.len() != n_y {
            return Err(Error::InvalidInput("output box must have n_y channels".into()));
        }
        for i in 0..n_u {
            if self.input_lower[i] > self.input_upper[i] {
                return Err(Error::InvalidInput("empty input box".into()));
            }
        }
        for i in 0..n_y {
            if self.output_lower[i] > self.output_upper[i] {
                return Err(Error::InvalidInput("empty output box".into()));
            }
        }
        if self.lambda_g < 0.0 || self.lambda_sigma <= 0.0 {
            return Err(Error::InvalidInput("regularization weights must be positive".into()));
        }
        Ok(())
    }

    /// Stage cost `l(y, u) = y' Q y + u' R u`.
    pub fn stage_cost(&self, y: &RealVector, u: &RealVector) -> f64 {
        (y.transpose() * &self.output_weight * y)[(0, 0)] + (u.transpose() * &self.input_weight * u)[(0, 0)]
    }

    fn uses_slack(&self) -> bool {
        self.lambda_sigma.is_finite()
    }
}

/// Offsets of the decision-variable blocks in the assembled QP.
#[derive(Debug, Clone)]
pub struct VarLayout {
    pub n_u: usize,
    pub n_y: usize,
    pub horizon: usize,
    pub past_len: usize,
    pub g_dim: usize,
    pub u_future: usize,
    pub y_future: usize,
    pub g: usize,
    pub sigma: Option<usize>,
    pub g_abs: Option<usize>,
    pub sigma_abs: Option<usize>,
    pub total: usize,
}

impl VarLayout {
    fn new(problem: &PredictiveProblem, n_u: usize, n_y: usize, g_dim: usize) -> Self {
        let (t, tb) = (problem.horizon, problem.past_len);
        let mut offset = 0;
        let u_future = offset;
        offset += t * n_u;
        let y_future = offset;
        offset += t * n_y;
        let g = offset;
        offset += g_dim;
        let sigma = problem.uses_slack().then(|| {
            let o = offset;
            offset += tb * n_y;
            o
        });
        let g_abs = (problem.lambda_g > 0.0 && g_dim > 0).then(|| {
            let o = offset;
            offset += g_dim;
            o
        });
        let sigma_abs = problem.uses_slack().then(|| {
            let o = offset;
            offset += tb * n_y;
            o
        });
        VarLayout { n_u, n_y, horizon: t, past_len: tb, g_dim, u_future, y_future, g, sigma, g_abs, sigma_abs, total: offset }
    }

    pub fn first_input(&self, sol: &QpSolution) -> RealVector {
        sol.x.rows(self.u_future, self.n_u).into_owned()
    }

    pub fn future_inputs(&self, sol: &QpSolution) -> RealVector {
        sol.x.rows(self.u_future, self.horizon * self.n_u).into_owned()
    }

    pub fn future_outputs(&self, sol: &QpSolution) -> RealVector {
        sol.x.rows(self.y_future, self.horizon * self.n_y).into_owned()
    }
}

enum PredictionModel {
    /// Data-driven: stacked input/output data matrices of depth
    /// `past_len + horizon`, columns indexed by `g`.
    Data { d_u: RealMatrix, d_y: RealMatrix },
    /// Exact model: reconstruct the state from the past window, then
    /// predict through the observability/forced-response blocks.
    Model {
        obs_past: RealMatrix,
        toep_past: RealMatrix,
        obs_future: RealMatrix,
        toep_future: RealMatrix,
        a_pow_past: RealMatrix,
        reach_past: RealMatrix,
    },
}

/// A controller template: problem data plus everything constant across
/// receding-horizon steps. Each instance owns its past window.
pub struct Predictor {
    problem: PredictiveProblem,
    model: PredictionModel,
    layout: VarLayout,
    /// Result of the (reported, not enforced) excitation-order check of
    /// order `past_len + horizon + state_order_bound`.
    pub pe_achieved: bool,
}

impl Predictor {
    /// FreePC: prediction model from frequency-domain data.
    pub fn freepc(spectra: &SpectraCollection, problem: PredictiveProblem) -> Result<Self> {
        let n_u = spectra.input_channels();
        let n_y = spectra.output_channels();
        problem.validate(n_u, n_y)?;
        let depth = problem.past_len + problem.horizon;
        let d_u = build_data_matrix(depth, spectra, &[Role::Input])?.real_form().clone();
        let d_y = build_data_matrix(depth, spectra, &[Role::Output])?.real_form().clone();
        let inputs: Vec<_> = spectra.experiments().iter().map(|e| &e.input).collect();
        let pe_achieved = is_cpe(&inputs, depth + problem.state_order_bound)
            .map(|r| r.achieved)
            .unwrap_or(false);
        let layout = VarLayout::new(&problem, n_u, n_y, d_u.ncols());
        Ok(Self { problem, model: PredictionModel::Data { d_u, d_y }, layout, pe_achieved })
    }

    /// DeePC: prediction model from one time-domain trajectory.
    pub fn deepc(u_data: &Trajectory, y_data: &Trajectory, problem: PredictiveProblem) -> Result<Self> {
        if u_data.len() != y_data.len() {
            return Err(Error::InvalidInput("data input/output length mismatch".into()));
        }
        let n_u = u_data.channel_count();
        let n_y = y_data.channel_count();
        problem.validate(n_u, n_y)?;
        let depth = problem.past_len + problem.horizon;
        let d_u = hankel(depth, u_data)?;
        let d_y = hankel(depth, y_data)?;
        let pe_achieved = is_pe_time(u_data, depth + problem.state_order_bound)
            .map(|r| r.achieved)
            .unwrap_or(false);
        let layout = VarLayout::new(&problem, n_u, n_y, d_u.ncols());
        Ok(Self { problem, model: PredictionModel::Data { d_u, d_y }, layout, pe_achieved })
    }

    /// Exact-model MPC benchmark: same horizon, cost and constraints, the
    /// state reconstructed from the same past window the data-driven
    /// schemes see.
    pub fn model_mpc(model: &StateSpaceModel, problem: PredictiveProblem) -> Result<Self> {
        let n_u = model.input_dim();
        let n_y = model.output_dim();
        problem.validate(n_u, n_y)?;
        let tb = problem.past_len;
        let t = problem.horizon;
        let nx = model.state_dim();
        let mut a_pow = RealMatrix::identity(nx, nx);
        let mut reach = RealMatrix::zeros(nx, n_u * tb);
        // reach = [A^{tb-1} B, ..., A B, B]
        for j in (0..tb).rev() {
            reach.view_mut((0, j * n_u), (nx, n_u)).copy_from(&(&a_pow * &model.b));
            a_pow = &a_pow * &model.a;
        }
        let mut layout_problem = problem.clone();
        // the benchmark has no g vector and no data slack
        layout_problem.lambda_g = 0.0;
        layout_problem.lambda_sigma = f64::INFINITY;
        let layout = VarLayout::new(&layout_problem, n_u, n_y, 0);
        Ok(Self {
            problem: layout_problem,
            model: PredictionModel::Model {
                obs_past: model.observability(tb),
                toep_past: model.forced_response(tb),
                obs_future: model.observability(t),
                toep_future: model.forced_response(t),
                a_pow_past: a_pow,
                reach_past: reach,
            },
            layout,
            pe_achieved: true,
        })
    }

    pub fn layout(&self) -> &VarLayout {
        &self.layout
    }

    pub fn problem(&self) -> &PredictiveProblem {
        &self.problem
    }

    /// Assemble the QP for one receding-horizon step given the current
    /// past window (`past_len` samples each of inputs and outputs).
    pub fn qp_for_past(&self, past_u: &[RealVector], past_y: &[RealVector]) -> Result<QpProblem> {
        let l = &self.layout;
        let (t, tb, n_u, n_y) = (l.horizon, l.past_len, l.n_u, l.n_y);
        if past_u.len() != tb || past_y.len() != tb {
            return Err(Error::InvalidInput(format!("past window must hold {tb} samples")));
        }
        let n = l.total;

        // quadratic stage cost: sum y'Qy + u'Ru  =>  1/2 x' (2 blkdiag) x
        let mut quad = RealMatrix::zeros(n, n);
        for i in 0..t {
            quad.view_mut((l.u_future + i * n_u, l.u_future + i * n_u), (n_u, n_u))
                .copy_from(&(&self.problem.input_weight * 2.0));
            quad.view_mut((l.y_future + i * n_y, l.y_future + i * n_y), (n_y, n_y))
                .copy_from(&(&self.problem.output_weight * 2.0));
        }
        let mut lin = RealVector::zeros(n);
        if let Some(o) = l.g_abs {
            for i in 0..l.g_dim {
                lin[o + i] = self.problem.lambda_g;
            }
        }
        if let Some(o) = l.sigma_abs {
            for i in 0..tb * n_y {
                lin[o + i] = self.problem.lambda_sigma;
            }
        }

        // equality block
        let stack = |samples: &[RealVector], channels: usize| -> RealVector {
            let mut v = RealVector::zeros(channels * samples.len());
            for (i, s) in samples.iter().enumerate() {
                v.rows_mut(i * channels, channels).copy_from(s);
            }
            v
        };
        let u_past = stack(past_u, n_u);
        let y_past = stack(past_y, n_y);

        let (eq, eq_rhs) = match &self.model {
            PredictionModel::Data { d_u, d_y } => {
                let rows = (tb + t) * (n_u + n_y);
                let mut eq = RealMatrix::zeros(rows, n);
                let mut rhs = RealVector::zeros(rows);
                // past inputs: D_u[past] g = u_past
                eq.view_mut((0, l.g), (tb * n_u, l.g_dim)).copy_from(&d_u.rows(0, tb * n_u));
                rhs.rows_mut(0, tb * n_u).copy_from(&u_past);
                // future inputs: D_u[future] g - u = 0
                let r1 = tb * n_u;
                eq.view_mut((r1, l.g), (t * n_u, l.g_dim)).copy_from(&d_u.rows(tb * n_u, t * n_u));
                for i in 0..t * n_u {
                    eq[(r1 + i, l.u_future + i)] = -1.0;
                }
                // past outputs: D_y[past] g - sigma = y_past
                let r2 = r1 + t * n_u;
                eq.view_mut((r2, l.g), (tb * n_y, l.g_dim)).copy_from(&d_y.rows(0, tb * n_y));
                if let Some(o) = l.sigma {
                    for i in 0..tb * n_y {
                        eq[(r2 + i, o + i)] = -1.0;
                    }
                }
                rhs.rows_mut(r2, tb * n_y).copy_from(&y_past);
                // future outputs: D_y[future] g - y = 0
                let r3 = r2 + tb * n_y;
                eq.view_mut((r3, l.g), (t * n_y, l.g_dim)).copy_from(&d_y.rows(tb * n_y, t * n_y));
                for i in 0..t * n_y {
                    eq[(r3 + i, l.y_future + i)] = -1.0;
                }
                (eq, rhs)
            }
            PredictionModel::Model { obs_past, toep_past, obs_future, toep_future, a_pow_past, reach_past, .. } => {
                // state at the window start by least squares, rolled to now
                let rhs_state = &y_past - toep_past * &u_past;
                let (x_start, _) = least_squares_vec(obs_past, &rhs_state)?;
                let x_now = a_pow_past * x_start + reach_past * &u_past;
                // y_future - T u_future = O x_now
                let rows = t * n_y;
                let mut eq = RealMatrix::zeros(rows, n);
                for i in 0..rows {
                    eq[(i, l.y_future + i)] = 1.0;
                }
                eq.view_mut((0, l.u_future), (rows, t * n_u)).copy_from(&(-toep_future));
                (eq, obs_future * x_now)
            }
        };

        // inequality block: boxes plus epigraph rows
        let mut rows: Vec<(RealVector, f64, f64)> = Vec::new();
        for i in 0..t {
            for c in 0..n_u {
                let (lo, hi) = (self.problem.input_lower[c], self.problem.input_upper[c]);
                if lo.is_finite() || hi.is_finite() {
                    let mut row = RealVector::zeros(n);
                    row[l.u_future + i * n_u + c] = 1.0;
                    rows.push((row, lo, hi));
                }
            }
            for c in 0..n_y {
                let (lo, hi) = (self.problem.output_lower[c], self.problem.output_upper[c]);
                if lo.is_finite() || hi.is_finite() {
                    let mut row = RealVector::zeros(n);
                    row[l.y_future + i * n_y + c] = 1.0;
                    rows.push((row, lo, hi));
                }
            }
        }
        let epigraph = |value_off: usize, abs_off: usize, count: usize, rows: &mut Vec<(RealVector, f64, f64)>| {
            for i in 0..count {
                let mut up = RealVector::zeros(n);
                up[value_off + i] = 1.0;
                up[abs_off + i] = -1.0;
                rows.push((up, f64::NEG_INFINITY, 0.0));
                let mut lo = RealVector::zeros(n);
                lo[value_off + i] = -1.0;
                lo[abs_off + i] = -1.0;
                rows.push((lo, f64::NEG_INFINITY, 0.0));
            }
        };
        if let Some(o) = l.g_abs {
            epigraph(l.g, o, l.g_dim, &mut rows);
        }
        if let (Some(s), Some(sa)) = (l.sigma, l.sigma_abs) {
            epigraph(s, sa, tb * n_y, &mut rows);
        }
        let mi = rows.len();
        let mut ineq = RealMatrix::zeros(mi, n);
        let mut lo = RealVector::zeros(mi);
        let mut hi = RealVector::zeros(mi);
        for (i, (row, l_, h_)) in rows.into_iter().enumerate() {
            ineq.row_mut(i).copy_from(&row.transpose());
            lo[i] = l_;
            hi[i] = h_;
        }

        Ok(QpProblem::new_trusted(quad, lin, eq, eq_rhs, ineq, lo, hi))
    }
}

/// Public assembly entry point matching the per-operation contract: build
/// the QP (validated) for a given past window.
pub fn build_predictive_qp(
    predictor: &Predictor,
    past_u: &[RealVector],
    past_y: &[RealVector],
) -> Result<(QpProblem, VarLayout)> {
    let qp = predictor.qp_for_past(past_u, past_y)?;
    qp.validate()?;
    Ok((qp, predictor.layout().clone()))
}

/// How the past window is bootstrapped at the start of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PastInit {
    /// Zero-filled window; consistent with starting from the origin.
    Zeros,
    /// Free response ending at the initial state: the plant drifts into
    /// `x0` under zero input. Needs an invertible `A`.
    FreeResponse,
}

#[derive(Debug, Clone)]
pub struct RunSettings {
    pub steps: usize,
    pub initial_state: RealVector,
    pub past_init: PastInit,
    /// Measurement noise applied to the plant output during the run.
    pub noise: Option<NoiseConfig>,
    pub qp_tolerance: Option<f64>,
}

impl RunSettings {
    pub fn noise_free(steps: usize, initial_state: RealVector) -> Self {
        Self { steps, initial_state, past_init: PastInit::FreeResponse, noise: None, qp_tolerance: None }
    }
}

#[derive(Debug, Clone)]
pub struct ClosedLoopRun {
    pub inputs: Trajectory,
    pub outputs: Trajectory,
    /// Running sum of the stage cost after each step.
    pub cumulative_cost: Vec<f64>,
    /// Total cost over the run.
    pub cost: f64,
}

/// Drive the plant with the receding-horizon controller: solve the QP,
/// apply the first optimal input, shift the past window, repeat.
pub fn receding_horizon_run(
    predictor: &Predictor,
    plant: &StateSpaceModel,
    settings: &RunSettings,
) -> Result<ClosedLoopRun> {
    let l = predictor.layout();
    let (n_u, n_y, tb) = (l.n_u, l.n_y, l.past_len);
    if plant.input_dim() != n_u || plant.output_dim() != n_y {
        return Err(Error::InvalidInput("plant dimensions do not match the controller".into()));
    }
    if settings.initial_state.len() != plant.state_dim() {
        return Err(Error::InvalidInput("initial state dimension mismatch".into()));
    }

    let mut past_u: VecDeque<RealVector> = VecDeque::with_capacity(tb);
    let mut past_y: VecDeque<RealVector> = VecDeque::with_capacity(tb);
    let mut x = settings.initial_state.clone();
    match settings.past_init {
        PastInit::Zeros => {
            for _ in 0..tb {
                past_u.push_back(RealVector::zeros(n_u));
                past_y.push_back(RealVector::zeros(n_y));
            }
        }
        PastInit::FreeResponse => {
            let lu = plant.a.clone().lu();
            let mut x_pre = settings.initial_state.clone();
            for _ in 0..tb {
                x_pre = lu.solve(&x_pre).ok_or_else(|| {
                    Error::InvalidInput("free-response bootstrap needs an invertible A".into())
                })?;
            }
            // roll forward under zero input so the window and the state
            // are exactly consistent
            let mut xi = x_pre;
            for _ in 0..tb {
                past_u.push_back(RealVector::zeros(n_u));
                past_y.push_back(&plant.c * &xi);
                xi = &plant.a * &xi;
            }
            x = xi;
        }
    }

    let mut rng = settings.noise.as_ref().map(|nc| SeededRng::new(nc.seed));
    let mut inputs = Vec::with_capacity(settings.steps);
    let mut outputs = Vec::with_capacity(settings.steps);
    let mut cumulative = Vec::with_capacity(settings.steps);
    let mut cost = 0.0;
    for step in 0..settings.steps {
        let (pu, py): (Vec<RealVector>, Vec<RealVector>) =
            (past_u.iter().cloned().collect(), past_y.iter().cloned().collect());
        let qp = predictor
            .qp_for_past(&pu, &py)
            .map_err(|e| Error::ControlFailure { step, source: Box::new(e) })?;
        let sol = qp_solve(&qp, settings.qp_tolerance)
            .map_err(|e| Error::ControlFailure { step, source: Box::new(e) })?;
        let u0 = l.first_input(&sol);
        let mut y = &plant.c * &x + &plant.d * &u0;
        if let (Some(rng), Some(nc)) = (rng.as_mut(), settings.noise.as_ref()) {
            for c in 0..n_y {
                y[c] += rng.normal(0.0, nc.std_dev[c]);
            }
        }
        cost += predictor.problem().stage_cost(&y, &u0);
        cumulative.push(cost);
        x = &plant.a * &x + &plant.b * &u0;
        past_u.pop_front();
        past_y.pop_front();
        past_u.push_back(u0.clone());
        past_y.push_back(y.clone());
        inputs.push(u0);
        outputs.push(y);
    }
    Ok(ClosedLoopRun {
        inputs: Trajectory::new(n_u, inputs)?,
        outputs: Trajectory::new(n_y, outputs)?,
        cumulative_cost: cumulative,
        cost,
    })
}

/// Outcome of comparing FreePC and DeePC open-loop problems on one past
/// window with regularizers off and the slack pinned.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub freepc_objective: f64,
    pub deepc_objective: f64,
    /// `|J_free - J_deep| / max(1, |J_deep|)`.
    pub objective_gap: f64,
    /// Infinity norm of the difference of the first optimal inputs.
    pub first_input_gap: f64,
    pub equivalent: bool,
}

pub const EQUIVALENCE_TOLERANCE: f64 = 1e-6;

/// Solve the FreePC and DeePC open-loop problems on the same past window
/// (noise-free settings: `lambda_g = lambda_G = 0`, slack pinned to zero)
/// and compare optimal objectives and first inputs.
pub fn equivalence_check(
    spectra: &SpectraCollection,
    u_data: &Trajectory,
    y_data: &Trajectory,
    problem: &PredictiveProblem,
    past_u: &[RealVector],
    past_y: &[RealVector],
) -> Result<EquivalenceReport> {
    let mut nominal = problem.clone();
    nominal.lambda_g = 0.0;
    nominal.lambda_sigma = f64::INFINITY;
    let freepc = Predictor::freepc(spectra, nominal.clone())?;
    let deepc = Predictor::deepc(u_data, y_data, nominal)?;
    let sol_f = qp_solve(&freepc.qp_for_past(past_u, past_y)?, None)?;
    let sol_d = qp_solve(&deepc.qp_for_past(past_u, past_y)?, None)?;
    let objective_gap = (sol_f.objective - sol_d.objective).abs() / sol_d.objective.abs().max(1.0);
    let first_input_gap = (freepc.layout().first_input(&sol_f) - deepc.layout().first_input(&sol_d)).amax();
    Ok(EquivalenceReport {
        freepc_objective: sol_f.objective,
        deepc_objective: sol_d.objective,
        objective_gap,
        first_input_gap,
        equivalent: objective_gap <= EQUIVALENCE_TOLERANCE && first_input_gap <= EQUIVALENCE_TOLERANCE,
    })
}
