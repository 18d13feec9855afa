//! Ground-truth LTI plants and the synthetic measurement lab.
//!
//! Everything here assumes the plant is known; it exists to generate
//! datasets (and test oracles) for the data-driven operations that do not.
//! Covers state-space simulation, transfer-function evaluation,
//! steady-state spectra, multisine excitation, closed-loop data collection
//! with output noise, per-period DFTs and elementary FRF estimation.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::data::{Experiment, FrequencyGrid, SpectraCollection, Spectrum, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector, RealMatrix, RealVector};
use crate::rng::SeededRng;

/// Discrete-time state-space model `x+ = Ax + Bu`, `y = Cx + Du`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceModel {
    pub a: RealMatrix,
    pub b: RealMatrix,
    pub c: RealMatrix,
    pub d: RealMatrix,
}

impl StateSpaceModel {
    pub fn new(a: RealMatrix, b: RealMatrix, c: RealMatrix, d: RealMatrix) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::InvalidInput("A must be square".into()));
        }
        if b.nrows() != n || c.ncols() != n || d.nrows() != c.nrows() || d.ncols() != b.ncols() {
            return Err(Error::InvalidInput("inconsistent state-space dimensions".into()));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.c.nrows()
    }

    /// Observability matrix of depth `L`: rows `C, CA, ..., CA^{L-1}`.
    pub fn observability(&self, depth: usize) -> RealMatrix {
        let (ny, nx) = (self.output_dim(), self.state_dim());
        let mut out = RealMatrix::zeros(ny * depth, nx);
        let mut block = self.c.clone();
        for i in 0..depth {
            out.view_mut((i * ny, 0), (ny, nx)).copy_from(&block);
            block = &block * &self.a;
        }
        out
    }

    /// Block-Toeplitz forced-response matrix of depth `L` (Markov
    /// parameters `D, CB, CAB, ...` down the first block column).
    pub fn forced_response(&self, depth: usize) -> RealMatrix {
        let (ny, nu) = (self.output_dim(), self.input_dim());
        let mut markov = Vec::with_capacity(depth);
        markov.push(self.d.clone());
        let mut cab = self.c.clone();
        for _ in 1..depth {
            markov.push(&cab * &self.b);
            cab = &cab * &self.a;
        }
        let mut out = RealMatrix::zeros(ny * depth, nu * depth);
        for i in 0..depth {
            for j in 0..=i {
                out.view_mut((i * ny, j * nu), (ny, nu)).copy_from(&markov[i - j]);
            }
        }
        out
    }

    /// Smallest depth at which the observability matrix reaches its
    /// maximal rank.
    pub fn observability_index(&self) -> usize {
        let nx = self.state_dim();
        let full = crate::linalg::rank(&self.observability(nx), None).unwrap_or(0);
        for depth in 1..=nx {
            if crate::linalg::rank(&self.observability(depth), None).unwrap_or(0) == full {
                return depth;
            }
        }
        nx.max(1)
    }
}

/// Exact state-space recursion from `x0` over the given inputs; returns
/// the state and output trajectories (both the length of the input).
pub fn simulate(model: &StateSpaceModel, x0: &RealVector, inputs: &Trajectory) -> Result<(Trajectory, Trajectory)> {
    if x0.len() != model.state_dim() {
        return Err(Error::InvalidInput("x0 dimension mismatch".into()));
    }
    if inputs.channel_count() != model.input_dim() {
        return Err(Error::InvalidInput("input channel mismatch".into()));
    }
    let mut x = x0.clone();
    let mut states = Vec::with_capacity(inputs.len());
    let mut outputs = Vec::with_capacity(inputs.len());
    for u in inputs.samples() {
        let y = &model.c * &x + &model.d * u;
        states.push(x.clone());
        outputs.push(y);
        x = &model.a * &x + &model.b * u;
    }
    let start = inputs.start_index();
    Ok((
        Trajectory::with_start(model.state_dim(), start, states)?,
        Trajectory::with_start(model.output_dim(), start, outputs)?,
    ))
}

/// `H(z) = C (zI - A)^{-1} B + D` via a complex linear solve.
pub fn transfer_eval(model: &StateSpaceModel, z: Complex64) -> Result<ComplexMatrix> {
    let nx = model.state_dim();
    let to_c = |m: &RealMatrix| m.map(|v| Complex64::new(v, 0.0));
    if nx == 0 {
        return Ok(to_c(&model.d));
    }
    let zi_a = ComplexMatrix::from_fn(nx, nx, |i, j| {
        let diag = if i == j { z } else { Complex64::ZERO };
        diag - Complex64::new(model.a[(i, j)], 0.0)
    });
    let lu = zi_a.lu();
    let solved = lu.solve(&to_c(&model.b)).ok_or(Error::EigenvalueHit { z })?;
    Ok(to_c(&model.c) * solved + to_c(&model.d))
}

/// Steady-state input-state-output spectrum for the given per-frequency
/// input directions: `X_k = (e^{jw_k} I - A)^{-1} B U_k`,
/// `Y_k = C X_k + D U_k`.
pub fn steady_state_spectrum(
    model: &StateSpaceModel,
    grid: FrequencyGrid,
    input_directions: &[ComplexVector],
) -> Result<Experiment> {
    if input_directions.len() != grid.len() {
        return Err(Error::InvalidInput("need one input direction per grid frequency".into()));
    }
    let nx = model.state_dim();
    let to_c = |m: &RealMatrix| m.map(|v| Complex64::new(v, 0.0));
    let (bc, cc, dc) = (to_c(&model.b), to_c(&model.c), to_c(&model.d));
    let mut xs = Vec::with_capacity(grid.len());
    let mut ys = Vec::with_capacity(grid.len());
    for (k, u) in input_directions.iter().enumerate() {
        if u.len() != model.input_dim() {
            return Err(Error::InvalidInput("input direction channel mismatch".into()));
        }
        let z = grid.node(k);
        let x = if nx == 0 {
            ComplexVector::zeros(0)
        } else {
            let zi_a = ComplexMatrix::from_fn(nx, nx, |i, j| {
                let diag = if i == j { z } else { Complex64::ZERO };
                diag - Complex64::new(model.a[(i, j)], 0.0)
            });
            zi_a.lu().solve(&(&bc * u)).ok_or(Error::EigenvalueHit { z })?
        };
        let y = &cc * &x + &dc * u;
        xs.push(x);
        ys.push(y);
    }
    Ok(Experiment {
        input: Spectrum::new(grid, model.input_dim(), input_directions.to_vec())?,
        state: Some(Spectrum::new(grid, nx, xs)?),
        output: Spectrum::new(grid, model.output_dim(), ys)?,
    })
}

/// Scalar multisine `d_k = sum_m a_m cos(w_m k + phi_m)` over all grid
/// frequencies; fundamental period `2M` samples.
pub fn multisine(amplitudes: &[f64], grid: FrequencyGrid, phases: &[f64], length: usize) -> Result<Trajectory> {
    if amplitudes.len() != grid.len() || phases.len() != grid.len() {
        return Err(Error::InvalidInput("need one amplitude and phase per grid frequency".into()));
    }
    if length == 0 {
        return Err(Error::InvalidInput("multisine length must be >= 1".into()));
    }
    let values: Vec<f64> = (0..length)
        .map(|k| {
            (0..grid.len())
                .map(|m| amplitudes[m] * (grid.frequency(m) * k as f64 + phases[m]).cos())
                .sum()
        })
        .collect();
    Trajectory::scalar(&values)
}

/// Output-noise description: per-channel standard deviation plus the seed
/// of the ChaCha8/Box-Muller stream defined in [`crate::rng`].
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseConfig {
    pub std_dev: Vec<f64>,
    pub seed: u64,
}

impl NoiseConfig {
    pub fn new(std_dev: Vec<f64>, seed: u64) -> Result<Self> {
        if std_dev.iter().any(|&s| s.is_nan() || s < 0.0) {
            return Err(Error::InvalidInput("noise standard deviations must be >= 0".into()));
        }
        Ok(Self { std_dev, seed })
    }

    pub fn noiseless(channels: usize) -> Self {
        Self { std_dev: vec![0.0; channels], seed: 0 }
    }
}

/// Retained per-period records of the closed-loop signals.
#[derive(Debug, Clone)]
pub struct PeriodRecords {
    pub period_len: usize,
    /// One trajectory per retained period, oldest first.
    pub injection: Vec<Trajectory>,
    pub input: Vec<Trajectory>,
    pub output: Vec<Trajectory>,
}

/// Run the closed loop `u = d - C(z) y`, `y = plant(u) + n` from zero
/// initial state for `p0 + p` periods of the injected signal, discard the
/// first `p0` periods and return the remaining `p`.
///
/// `injection_period` is one period of `d`; its length must equal the
/// record period. Noise enters at the plant output only and reaches `u`
/// through the feedback path.
pub fn closed_loop_collect(
    plant: &StateSpaceModel,
    controller: &StateSpaceModel,
    injection_period: &Trajectory,
    noise: &NoiseConfig,
    warmup_periods: usize,
    periods: usize,
) -> Result<PeriodRecords> {
    let nu = plant.input_dim();
    let ny = plant.output_dim();
    if controller.input_dim() != ny || controller.output_dim() != nu {
        return Err(Error::InvalidInput("controller dimensions must mirror the plant".into()));
    }
    if injection_period.channel_count() != nu {
        return Err(Error::InvalidInput("injection channel mismatch".into()));
    }
    if noise.std_dev.len() != ny {
        return Err(Error::InvalidInput("noise channels must match plant outputs".into()));
    }
    if periods == 0 {
        return Err(Error::InvalidInput("need at least one retained period".into()));
    }
    let period_len = injection_period.len();

    // well-posedness: the instantaneous loop gain (I + Dc*D) must be
    // invertible, otherwise u is not determined by the loop equations
    let loop_gain = RealMatrix::identity(nu, nu) + &controller.d * &plant.d;
    let loop_lu = loop_gain.lu();
    if !loop_lu.is_invertible() {
        return Err(Error::IllPosedLoop);
    }

    let mut rng = SeededRng::new(noise.seed);
    let mut x = RealVector::zeros(plant.state_dim());
    let mut xi = RealVector::zeros(controller.state_dim());
    let total = (warmup_periods + periods) * period_len;

    let mut d_all = Vec::with_capacity(total);
    let mut u_all = Vec::with_capacity(total);
    let mut y_all = Vec::with_capacity(total);
    for step in 0..total {
        let d = injection_period.sample(step % period_len);
        let n = DVector::from_fn(ny, |i, _| rng.normal(0.0, noise.std_dev[i]));
        // (I + Dc D) u = d - Cc xi - Dc (C x + n)
        let rhs = d - &controller.c * &xi - &controller.d * (&plant.c * &x + &n);
        let u = loop_lu.solve(&rhs).ok_or(Error::IllPosedLoop)?;
        let y = &plant.c * &x + &plant.d * &u + n;
        let mag = y.amax();
        if !mag.is_finite() || mag > 1e9 {
            return Err(Error::DivergedLoop { step, magnitude: mag });
        }
        x = &plant.a * &x + &plant.b * &u;
        xi = &controller.a * &xi + &controller.b * &y;
        d_all.push(d.clone());
        u_all.push(u);
        y_all.push(y);
    }

    let slice_periods = |all: Vec<RealVector>, channels: usize| -> Result<Vec<Trajectory>> {
        all.chunks(period_len)
            .skip(warmup_periods)
            .map(|chunk| Trajectory::new(channels, chunk.to_vec()))
            .collect()
    };
    Ok(PeriodRecords {
        period_len,
        injection: slice_periods(d_all, nu)?,
        input: slice_periods(u_all, nu)?,
        output: slice_periods(y_all, ny)?,
    })
}

/// Unnormalized single-period DFT at the grid bins:
/// `V(w_k) = sum_{n=0}^{2M-1} v_n e^{-j w_k n}`.
pub fn per_period_dft(period: &Trajectory, grid: FrequencyGrid) -> Result<Spectrum> {
    if period.len() != grid.period() {
        return Err(Error::InvalidInput(format!(
            "period must have 2M = {} samples, got {}",
            grid.period(),
            period.len()
        )));
    }
    let nv = period.channel_count();
    let samples: Vec<ComplexVector> = (0..grid.len())
        .map(|k| {
            let w = grid.frequency(k);
            let mut acc = ComplexVector::zeros(nv);
            for (n, v) in period.samples().iter().enumerate() {
                let e = Complex64::from_polar(1.0, -w * n as f64);
                for c in 0..nv {
                    acc[c] += e * v[c];
                }
            }
            // the DC bin of a real signal is an exactly real sum
            if k == 0 {
                for c in 0..nv {
                    acc[c] = Complex64::new(acc[c].re, 0.0);
                }
            }
            acc
        })
        .collect();
    Spectrum::new(grid, nv, samples)
}

/// DFTs of every retained period of one signal.
pub fn per_period_spectra(periods: &[Trajectory], grid: FrequencyGrid) -> Result<Vec<Spectrum>> {
    periods.iter().map(|p| per_period_dft(p, grid)).collect()
}

/// Mean of per-period spectra; the natural estimator of the steady-state
/// spectrum from `p` retained periods.
pub fn average_spectrum(spectra: &[Spectrum]) -> Result<Spectrum> {
    let first = spectra
        .first()
        .ok_or_else(|| Error::InvalidInput("need at least one spectrum".into()))?;
    let grid = first.grid();
    let nv = first.channel_count();
    let p = spectra.len() as f64;
    let samples: Vec<ComplexVector> = (0..grid.len())
        .map(|k| {
            let mut acc = ComplexVector::zeros(nv);
            for s in spectra {
                acc += s.sample(k);
            }
            acc.map(|v| v / p)
        })
        .collect();
    Spectrum::new(grid, nv, samples)
}

/// FRF estimate: per-frequency sample mean over periods with the sample
/// variance `1/(p(p-1)) sum |H_rho - H|^2`, per output channel.
#[derive(Debug, Clone)]
pub struct FrfEstimate {
    pub grid: FrequencyGrid,
    /// `mean[k]` holds the estimated response column at bin `k`.
    pub mean: Vec<ComplexVector>,
    /// `variance[k][c]` is the sample variance of channel `c` at bin `k`.
    pub variance: Vec<RealVector>,
    pub periods: usize,
}

/// Per-period injection-correlated FRF estimates
/// `H_rho(w_k) = (Y_rho D_rho*) / (U_rho D_rho*)` for a scalar plant
/// input, averaged over periods.
pub fn estimate_frf(
    injection: &[Spectrum],
    input: &[Spectrum],
    output: &[Spectrum],
    grid: FrequencyGrid,
) -> Result<FrfEstimate> {
    let p = injection.len();
    if p < 2 {
        return Err(Error::InvalidInput("variance needs at least p = 2 periods".into()));
    }
    if input.len() != p || output.len() != p {
        return Err(Error::InvalidInput("per-period spectra must align".into()));
    }
    if injection[0].channel_count() != 1 || input[0].channel_count() != 1 {
        return Err(Error::InvalidInput(
            "injection-correlated FRF estimation needs a scalar injection and plant input".into(),
        ));
    }
    let ny = output[0].channel_count();
    let mut per_period: Vec<Vec<ComplexVector>> = Vec::with_capacity(p);
    for rho in 0..p {
        let mut cols = Vec::with_capacity(grid.len());
        for k in 0..grid.len() {
            let d_conj = injection[rho].sample(k)[0].conj();
            let denom = input[rho].sample(k)[0] * d_conj;
            if denom.norm() == 0.0 {
                return Err(Error::DegenerateBin { bin: k, period: rho });
            }
            cols.push(output[rho].sample(k).map(|y| y * d_conj / denom));
        }
        per_period.push(cols);
    }
    let mut mean = Vec::with_capacity(grid.len());
    let mut variance = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let mut acc = ComplexVector::zeros(ny);
        for columns in &per_period {
            acc += &columns[k];
        }
        let mu = acc.map(|v| v / p as f64);
        let mut var = RealVector::zeros(ny);
        for columns in &per_period {
            for c in 0..ny {
                var[c] += (columns[k][c] - mu[c]).norm_sqr();
            }
        }
        var /= (p * (p - 1)) as f64;
        mean.push(mu);
        variance.push(var);
    }
    Ok(FrfEstimate { grid, mean, variance, periods: p })
}

/// How a closed-loop measurement campaign is turned into a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFlavor {
    /// One experiment per injection channel; `U`/`Y` are the period-
    /// averaged spectra of the measured signals.
    AveragedSpectra,
    /// SISO only: injection-correlated FRF estimate re-emitted as the
    /// canonical pair `U = 1`, `Y = H(e^{jw_k})`.
    FrfUnitInput,
}

/// Parameters of a closed-loop measurement campaign.
#[derive(Debug, Clone)]
pub struct CollectionSetup {
    pub grid: FrequencyGrid,
    /// Common multisine amplitude across all excited bins.
    pub amplitude: f64,
    pub warmup_periods: usize,
    pub periods: usize,
    pub noise: NoiseConfig,
    /// Seed of the per-experiment random phases.
    pub phase_seed: u64,
    pub flavor: DatasetFlavor,
}

/// Collect a frequency-domain dataset in closed loop: one experiment per
/// plant input channel, each excited by a multisine on that channel only.
/// Noise and phase streams are split per experiment so the campaign is
/// reproducible from the two seeds alone.
pub fn collect_closed_loop_dataset(
    plant: &StateSpaceModel,
    controller: &StateSpaceModel,
    setup: &CollectionSetup,
) -> Result<SpectraCollection> {
    let n_u = plant.input_dim();
    if setup.flavor == DatasetFlavor::FrfUnitInput && (n_u != 1 || plant.output_dim() != 1) {
        return Err(Error::InvalidInput("FRF-style datasets need a SISO plant".into()));
    }
    let grid = setup.grid;
    let period = grid.period();
    let mut experiments = Vec::with_capacity(n_u);
    for e in 0..n_u {
        let mut phase_rng = SeededRng::stream(setup.phase_seed, e as u64);
        let phases: Vec<f64> = (0..grid.len()).map(|_| phase_rng.uniform_in(0.0, std::f64::consts::TAU)).collect();
        let line = multisine(&vec![setup.amplitude; grid.len()], grid, &phases, period)?;
        let injection = Trajectory::new(
            n_u,
            line.samples()
                .iter()
                .map(|s| DVector::from_fn(n_u, |c, _| if c == e { s[0] } else { 0.0 }))
                .collect(),
        )?;
        let noise = NoiseConfig { std_dev: setup.noise.std_dev.clone(), seed: setup.noise.seed.wrapping_add(e as u64) };
        let records = closed_loop_collect(plant, controller, &injection, &noise, setup.warmup_periods, setup.periods)?;
        let u_spectra = per_period_spectra(&records.input, grid)?;
        let y_spectra = per_period_spectra(&records.output, grid)?;
        match setup.flavor {
            DatasetFlavor::AveragedSpectra => {
                experiments.push(Experiment {
                    input: average_spectrum(&u_spectra)?,
                    output: average_spectrum(&y_spectra)?,
                    state: None,
                });
            }
            DatasetFlavor::FrfUnitInput => {
                let d_scalar: Vec<Spectrum> = records
                    .injection
                    .iter()
                    .map(|p| {
                        let scalar = Trajectory::new(1, p.samples().iter().map(|s| DVector::from_vec(vec![s[e]])).collect())?;
                        per_period_dft(&scalar, grid)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let frf = estimate_frf(&d_scalar, &u_spectra, &y_spectra, grid)?;
                let ones = vec![ComplexVector::from_vec(vec![Complex64::ONE]); grid.len()];
                experiments.push(Experiment {
                    input: Spectrum::new(grid, 1, ones)?,
                    output: Spectrum::new(grid, 1, frf.mean.clone())?,
                    state: None,
                });
            }
        }
    }
    SpectraCollection::new(experiments)
}

/// SISO rational transfer function, coefficients in descending powers of z.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalSiso {
    pub numerator: Vec<f64>,
    pub denominator: Vec<f64>,
}

impl RationalSiso {
    pub fn new(numerator: Vec<f64>, denominator: Vec<f64>) -> Result<Self> {
        if denominator.first().map(|&c| c == 0.0).unwrap_or(true) {
            return Err(Error::InvalidInput("denominator leading coefficient must be nonzero".into()));
        }
        if numerator.len() > denominator.len() {
            let extra = &numerator[..numerator.len() - denominator.len()];
            if extra.iter().any(|&c| c != 0.0) {
                return Err(Error::InvalidInput("improper transfer function (deg num > deg den)".into()));
            }
        }
        Ok(Self { numerator, denominator })
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let horner = |coeffs: &[f64]| {
            coeffs
                .iter()
                .fold(Complex64::ZERO, |acc, &c| acc * z + Complex64::new(c, 0.0))
        };
        horner(&self.numerator) / horner(&self.denominator)
    }
}

/// Matrix of SISO rational entries, one per output/input channel pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction {
    entries: Vec<Vec<RationalSiso>>,
}

impl TransferFunction {
    pub fn new(entries: Vec<Vec<RationalSiso>>) -> Result<Self> {
        let nu = entries
            .first()
            .map(Vec::len)
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::InvalidInput("transfer function needs at least one entry".into()))?;
        if entries.iter().any(|row| row.len() != nu) {
            return Err(Error::InvalidInput("ragged transfer-function entry grid".into()));
        }
        Ok(Self { entries })
    }

    pub fn siso(numerator: Vec<f64>, denominator: Vec<f64>) -> Result<Self> {
        Self::new(vec![vec![RationalSiso::new(numerator, denominator)?]])
    }

    pub fn output_dim(&self) -> usize {
        self.entries.len()
    }

    pub fn input_dim(&self) -> usize {
        self.entries[0].len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &RationalSiso {
        &self.entries[i][j]
    }

    pub fn eval(&self, z: Complex64) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.output_dim(), self.input_dim(), |i, j| self.entries[i][j].eval(z))
    }
}

/// Controllable-canonical realization of one proper SISO entry.
fn realize_siso(tf: &RationalSiso) -> Result<StateSpaceModel> {
    if tf.numerator.iter().all(|&c| c == 0.0) {
        // a zero entry needs no states; realizing its denominator would
        // plant unobservable modes (marginal ones for integrators)
        return StateSpaceModel::new(RealMatrix::zeros(0, 0), RealMatrix::zeros(0, 1), RealMatrix::zeros(1, 0), RealMatrix::zeros(1, 1));
    }
    let den = &tf.denominator;
    let lead = den[0];
    let n = den.len() - 1;
    // monic denominator and numerator padded to the same length
    let a_coef: Vec<f64> = den[1..].iter().map(|&c| c / lead).collect();
    let mut b_coef = vec![0.0; den.len()];
    let offset = den.len().saturating_sub(tf.numerator.len());
    for (i, &c) in tf.numerator.iter().enumerate() {
        if offset + i < b_coef.len() {
            b_coef[offset + i] = c / lead;
        }
    }
    let d0 = b_coef[0];
    let a = RealMatrix::from_fn(n, n, |i, j| {
        if i == 0 {
            -a_coef[j]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let b = RealMatrix::from_fn(n, 1, |i, _| if i == 0 { 1.0 } else { 0.0 });
    let c = RealMatrix::from_fn(1, n, |_, j| b_coef[j + 1] - a_coef[j] * d0);
    let d = RealMatrix::from_element(1, 1, d0);
    StateSpaceModel::new(a, b, c, d)
}

/// Realize a (possibly MIMO) transfer function by realizing each SISO
/// entry in controllable canonical form and concatenating the blocks.
/// The result is generally non-minimal, which is harmless here.
pub fn tf_to_state_space(tf: &TransferFunction) -> Result<StateSpaceModel> {
    let (ny, nu) = (tf.output_dim(), tf.input_dim());
    let realizations: Vec<Vec<StateSpaceModel>> = tf
        .entries
        .iter()
        .map(|row| row.iter().map(realize_siso).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let nx: usize = realizations.iter().flatten().map(StateSpaceModel::state_dim).sum();
    let mut a = RealMatrix::zeros(nx, nx);
    let mut b = RealMatrix::zeros(nx, nu);
    let mut c = RealMatrix::zeros(ny, nx);
    let mut d = RealMatrix::zeros(ny, nu);
    let mut offset = 0;
    for (i, row) in realizations.iter().enumerate() {
        for (j, sub) in row.iter().enumerate() {
            let n = sub.state_dim();
            a.view_mut((offset, offset), (n, n)).copy_from(&sub.a);
            b.view_mut((offset, j), (n, 1)).copy_from(&sub.b);
            c.view_mut((i, offset), (1, n)).copy_from(&sub.c);
            d[(i, j)] += sub.d[(0, 0)];
            offset += n;
        }
    }
    StateSpaceModel::new(a, b, c, d)
}
