//! Domain types for time-domain trajectories and sampled spectra, and the
//! block data-matrix constructors built from them.
//!
//! Spectra live on the equidistant grid `w_k = pi*k/M`, `k = 0..M-1`; only
//! nonnegative frequencies are stored and the negative half is recovered
//! through conjugate symmetry. [`build_data_matrix`] assembles the
//! conjugate-augmented block matrix `[F_L | F_L*]` per signal role along
//! with its real form under the `T_Re` change of variables, which is what
//! every behavioral operation consumes.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector, RealMatrix, RealVector};

/// Finite window of a real vector-valued signal, indexed `start..start+len`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    channels: usize,
    start: i64,
    samples: Vec<RealVector>,
}

impl Trajectory {
    pub fn new(channels: usize, samples: Vec<RealVector>) -> Result<Self> {
        Self::with_start(channels, 0, samples)
    }

    pub fn with_start(channels: usize, start: i64, samples: Vec<RealVector>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput("trajectory must have at least one sample".into()));
        }
        if samples.iter().any(|s| s.len() != channels) {
            return Err(Error::InvalidInput(format!(
                "trajectory samples must all have {channels} channels"
            )));
        }
        if samples.iter().any(|s| s.iter().any(|v| !v.is_finite())) {
            return Err(Error::InvalidInput("trajectory has non-finite samples".into()));
        }
        Ok(Self { channels, start, samples })
    }

    /// Scalar-channel trajectory from raw values.
    pub fn scalar(values: &[f64]) -> Result<Self> {
        Self::new(1, values.iter().map(|&v| DVector::from_vec(vec![v])).collect())
    }

    /// Unpack a vectorized window `v_{[r,s]}` back into samples.
    pub fn from_stacked(channels: usize, start: i64, stacked: &RealVector) -> Result<Self> {
        if channels == 0 || !stacked.len().is_multiple_of(channels) {
            return Err(Error::InvalidInput("stacked length must be a multiple of the channel count".into()));
        }
        let samples = stacked
            .as_slice()
            .chunks(channels)
            .map(DVector::from_column_slice)
            .collect();
        Self::with_start(channels, start, samples)
    }

    pub fn channel_count(&self) -> usize {
        self.channels
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn start_index(&self) -> i64 {
        self.start
    }

    pub fn samples(&self) -> &[RealVector] {
        &self.samples
    }

    /// Sample by position within the window (0-based, ignoring `start`).
    pub fn sample(&self, pos: usize) -> &RealVector {
        &self.samples[pos]
    }

    /// The vectorized restriction `(v_r; v_{r+1}; ...; v_s)`.
    pub fn stacked(&self) -> RealVector {
        let mut out = RealVector::zeros(self.channels * self.samples.len());
        for (i, s) in self.samples.iter().enumerate() {
            out.rows_mut(i * self.channels, self.channels).copy_from(s);
        }
        out
    }

    /// Contiguous sub-window by position, keeping absolute indexing.
    pub fn window(&self, pos: usize, len: usize) -> Result<Self> {
        if pos + len > self.samples.len() || len == 0 {
            return Err(Error::InvalidInput("window out of range".into()));
        }
        Self::with_start(self.channels, self.start + pos as i64, self.samples[pos..pos + len].to_vec())
    }

    /// Concatenate `other` directly after `self`.
    pub fn concat(&self, other: &Trajectory) -> Result<Self> {
        if other.channels != self.channels {
            return Err(Error::InvalidInput("channel mismatch in concat".into()));
        }
        let mut samples = self.samples.clone();
        samples.extend_from_slice(&other.samples);
        Self::with_start(self.channels, self.start, samples)
    }
}

/// The equidistant frequency grid `w_k = pi*k/M`, `k = 0..M-1`.
///
/// Only `M` is stored; frequencies and unit-circle nodes are evaluated on
/// demand so every module sees bit-identical values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrequencyGrid {
    m: usize,
}

impl FrequencyGrid {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("frequency grid needs M >= 1".into()));
        }
        Ok(Self { m })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `w_k = pi*k/M` in radians/sample.
    pub fn frequency(&self, k: usize) -> f64 {
        std::f64::consts::PI * k as f64 / self.m as f64
    }

    /// Unit-circle node `e^{j w_k}`.
    pub fn node(&self, k: usize) -> Complex64 {
        Complex64::from_polar(1.0, self.frequency(k))
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.m).map(|k| self.frequency(k)).collect()
    }

    /// Samples per fundamental period of a multisine on this grid.
    pub fn period(&self) -> usize {
        2 * self.m
    }
}

/// Samples of a complex spectrum on a [`FrequencyGrid`].
///
/// The DC sample must be (numerically) real: the spectrum of a real signal
/// is conjugate symmetric and `w_0 = 0` is its own mirror.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: FrequencyGrid,
    channels: usize,
    samples: Vec<ComplexVector>,
}

impl Spectrum {
    pub fn new(grid: FrequencyGrid, channels: usize, samples: Vec<ComplexVector>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "spectrum needs {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        if samples.iter().any(|s| s.len() != channels) {
            return Err(Error::InvalidInput(format!("spectrum samples must all have {channels} channels")));
        }
        if samples.iter().any(|s| s.iter().any(|v| !v.re.is_finite() || !v.im.is_finite())) {
            return Err(Error::InvalidInput("spectrum has non-finite samples".into()));
        }
        let dc = &samples[0];
        let mag = dc.norm();
        let im = dc.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        if im > 1e-12 * mag {
            return Err(Error::InvalidInput(format!(
                "DC sample must be real (|Im| = {im:.3e} vs magnitude {mag:.3e})"
            )));
        }
        Ok(Self { grid, channels, samples })
    }

    pub fn grid(&self) -> FrequencyGrid {
        self.grid
    }

    pub fn channel_count(&self) -> usize {
        self.channels
    }

    pub fn sample(&self, k: usize) -> &ComplexVector {
        &self.samples[k]
    }

    pub fn samples(&self) -> &[ComplexVector] {
        &self.samples
    }

    /// Embed into the finer grid with `M' = factor * M`; bins that the
    /// original grid does not excite carry exact zeros.
    pub fn zero_padded(&self, factor: usize) -> Result<Spectrum> {
        if factor == 0 {
            return Err(Error::InvalidInput("zero-pad factor must be >= 1".into()));
        }
        let grid = FrequencyGrid::new(self.grid.len() * factor)?;
        let mut samples = vec![ComplexVector::zeros(self.channels); grid.len()];
        for (k, s) in self.samples.iter().enumerate() {
            samples[k * factor] = s.clone();
        }
        Spectrum::new(grid, self.channels, samples)
    }
}

/// Signal roles a spectrum can play inside a data matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Input,
    State,
    Output,
}

/// One experiment's worth of spectra on a shared grid.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub input: Spectrum,
    pub output: Spectrum,
    pub state: Option<Spectrum>,
}

/// A collection of `E` experiments sharing one grid and per-role channel
/// counts; the unit all multi-experiment (CPE-based) operations consume.
#[derive(Debug, Clone)]
pub struct SpectraCollection {
    grid: FrequencyGrid,
    experiments: Vec<Experiment>,
}

impl SpectraCollection {
    pub fn new(experiments: Vec<Experiment>) -> Result<Self> {
        let first = experiments
            .first()
            .ok_or_else(|| Error::InvalidInput("collection needs at least one experiment".into()))?;
        let grid = first.input.grid();
        let n_u = first.input.channel_count();
        let n_y = first.output.channel_count();
        let has_state = first.state.is_some();
        let n_x = first.state.as_ref().map(Spectrum::channel_count);
        for (e, exp) in experiments.iter().enumerate() {
            let ok = exp.input.grid() == grid
                && exp.output.grid() == grid
                && exp.input.channel_count() == n_u
                && exp.output.channel_count() == n_y
                && exp.state.is_some() == has_state
                && exp.state.as_ref().map(Spectrum::channel_count) == n_x
                && exp.state.as_ref().map(|s| s.grid() == grid).unwrap_or(true);
            if !ok {
                return Err(Error::InvalidInput(format!(
                    "experiment {e} does not match the collection's grid/channel layout"
                )));
            }
        }
        Ok(Self { grid, experiments })
    }

    pub fn grid(&self) -> FrequencyGrid {
        self.grid
    }

    pub fn experiment_count(&self) -> usize {
        self.experiments.len()
    }

    pub fn experiments(&self) -> &[Experiment] {
        &self.experiments
    }

    pub fn input_channels(&self) -> usize {
        self.experiments[0].input.channel_count()
    }

    pub fn output_channels(&self) -> usize {
        self.experiments[0].output.channel_count()
    }

    pub fn has_states(&self) -> bool {
        self.experiments[0].state.is_some()
    }

    pub fn role_spectra(&self, role: Role) -> Result<Vec<&Spectrum>> {
        match role {
            Role::Input => Ok(self.experiments.iter().map(|e| &e.input).collect()),
            Role::Output => Ok(self.experiments.iter().map(|e| &e.output).collect()),
            Role::State => self
                .experiments
                .iter()
                .map(|e| e.state.as_ref().ok_or_else(|| Error::InvalidInput("collection has no state spectra".into())))
                .collect(),
        }
    }
}

/// Block Hankel matrix of depth `L`: block row `i`, column `j` holds
/// `v_{i+j}`; dimensions `n_v*L x (N-L+1)`.
pub fn hankel(depth: usize, traj: &Trajectory) -> Result<RealMatrix> {
    let n = traj.len();
    if depth == 0 || depth > n {
        return Err(Error::InvalidInput(format!(
            "hankel depth {depth} out of range for {n} samples"
        )));
    }
    let nv = traj.channel_count();
    let cols = n - depth + 1;
    let mut out = RealMatrix::zeros(nv * depth, cols);
    for j in 0..cols {
        for i in 0..depth {
            out.view_mut((i * nv, j), (nv, 1)).copy_from(traj.sample(i + j));
        }
    }
    Ok(out)
}

/// The powers column `W_L(z) = (1, z, z^2, ..., z^{L-1})`.
pub fn vandermonde_column(depth: usize, z: Complex64) -> ComplexVector {
    let mut out = ComplexVector::zeros(depth);
    let mut p = Complex64::ONE;
    for i in 0..depth {
        out[i] = p;
        p *= z;
    }
    out
}

/// `kron(W_L(z), v)` stacked as `(v; z v; ...; z^{L-1} v)`.
fn powers_kron(depth: usize, z: Complex64, v: &ComplexVector) -> ComplexVector {
    let nv = v.len();
    let mut out = ComplexVector::zeros(nv * depth);
    let mut p = Complex64::ONE;
    for i in 0..depth {
        for r in 0..nv {
            out[i * nv + r] = p * v[r];
        }
        p *= z;
    }
    out
}

/// `F_L` of a spectrum: one column `W_L(e^{j w_k}) (x) V_k` per frequency
/// `k = start_index .. M-1`.
pub fn f_matrix(depth: usize, spectrum: &Spectrum, start_index: usize) -> Result<ComplexMatrix> {
    cal_f_matrix(depth, &[spectrum], start_index)
}

/// The multi-experiment version of [`f_matrix`]: one block of `E` columns
/// per frequency, experiments in order within each block.
pub fn cal_f_matrix(depth: usize, spectra: &[&Spectrum], start_index: usize) -> Result<ComplexMatrix> {
    let first = spectra
        .first()
        .ok_or_else(|| Error::InvalidInput("need at least one spectrum".into()))?;
    let grid = first.grid();
    let nv = first.channel_count();
    if spectra.iter().any(|s| s.grid() != grid || s.channel_count() != nv) {
        return Err(Error::InvalidInput("spectra must share grid and channel count".into()));
    }
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be >= 1".into()));
    }
    if start_index > 1 {
        return Err(Error::InvalidInput("start index must be 0 or 1".into()));
    }
    let m = grid.len();
    if start_index >= m {
        return Err(Error::InvalidInput("empty frequency index range".into()));
    }
    let e = spectra.len();
    let mut out = ComplexMatrix::zeros(nv * depth, (m - start_index) * e);
    for (block, k) in (start_index..m).enumerate() {
        let z = grid.node(k);
        for (j, s) in spectra.iter().enumerate() {
            let col = powers_kron(depth, z, s.sample(k));
            out.set_column(block * e + j, &col);
        }
    }
    Ok(out)
}

/// Conjugate-augmented block `[F_L(V_{[0,M-1]})  F_L*(V_{[1,M-1]})]`.
///
/// The conjugate block represents the negative frequencies; the DC column
/// is self-conjugate and appears once.
pub fn conjugate_augmented(depth: usize, spectra: &[&Spectrum]) -> Result<ComplexMatrix> {
    let positive = cal_f_matrix(depth, spectra, 0)?;
    let m = spectra[0].grid().len();
    if m == 1 {
        return Ok(positive);
    }
    let tail = cal_f_matrix(depth, spectra, 1)?.map(|v| v.conj());
    let rows = positive.nrows();
    let mut out = ComplexMatrix::zeros(rows, positive.ncols() + tail.ncols());
    out.view_mut((0, 0), (rows, positive.ncols())).copy_from(&positive);
    out.view_mut((0, positive.ncols()), (rows, tail.ncols())).copy_from(&tail);
    Ok(out)
}

/// The `T_Re` change of variables between conjugate-structured complex
/// coefficients `G = (G0, G1, G1*)` and real coordinates
/// `g = (G0, 2 Re G1, -2 Im G1)`, blocked for `E` experiments.
#[derive(Debug, Clone, Copy)]
pub struct TReTransform {
    m: usize,
    e: usize,
}

pub fn t_re_transform(m: usize, e: usize) -> Result<TReTransform> {
    if m == 0 || e == 0 {
        return Err(Error::InvalidInput("T_Re needs M >= 1 and E >= 1".into()));
    }
    Ok(TReTransform { m, e })
}

impl TReTransform {
    /// Side length `E(2M-1)`.
    pub fn dim(&self) -> usize {
        self.e * (2 * self.m - 1)
    }

    /// Dense matrix of the transform, `G = T_Re * g`.
    pub fn matrix(&self) -> ComplexMatrix {
        let e = self.e;
        let tail = e * (self.m - 1);
        let n = self.dim();
        let mut t = ComplexMatrix::zeros(n, n);
        for i in 0..e {
            t[(i, i)] = Complex64::ONE;
        }
        for i in 0..tail {
            t[(e + i, e + i)] = Complex64::new(0.5, 0.0);
            t[(e + i, e + tail + i)] = Complex64::new(0.0, -0.5);
            t[(e + tail + i, e + i)] = Complex64::new(0.5, 0.0);
            t[(e + tail + i, e + tail + i)] = Complex64::new(0.0, 0.5);
        }
        t
    }

    /// Dense inverse, `g = T_Re^{-1} * G`.
    pub fn inverse_matrix(&self) -> ComplexMatrix {
        let e = self.e;
        let tail = e * (self.m - 1);
        let n = self.dim();
        let mut t = ComplexMatrix::zeros(n, n);
        for i in 0..e {
            t[(i, i)] = Complex64::ONE;
        }
        for i in 0..tail {
            t[(e + i, e + i)] = Complex64::ONE;
            t[(e + i, e + tail + i)] = Complex64::ONE;
            t[(e + tail + i, e + i)] = Complex64::new(0.0, 1.0);
            t[(e + tail + i, e + tail + i)] = Complex64::new(0.0, -1.0);
        }
        t
    }

    /// Map real coordinates to the conjugate-structured complex vector.
    pub fn to_complex(&self, g: &RealVector) -> Result<ComplexVector> {
        if g.len() != self.dim() {
            return Err(Error::InvalidInput(format!(
                "expected real coordinates of length {}, got {}",
                self.dim(),
                g.len()
            )));
        }
        let e = self.e;
        let tail = e * (self.m - 1);
        let mut out = ComplexVector::zeros(self.dim());
        for i in 0..e {
            out[i] = Complex64::new(g[i], 0.0);
        }
        for i in 0..tail {
            let half = Complex64::new(0.5 * g[e + i], -0.5 * g[e + tail + i]);
            out[e + i] = half;
            out[e + tail + i] = half.conj();
        }
        Ok(out)
    }

    /// Inverse action: recover `g = (G0, 2 Re G1, -2 Im G1)`.
    pub fn to_real(&self, g_complex: &ComplexVector) -> Result<RealVector> {
        if g_complex.len() != self.dim() {
            return Err(Error::InvalidInput(format!(
                "expected complex coefficients of length {}, got {}",
                self.dim(),
                g_complex.len()
            )));
        }
        let e = self.e;
        let tail = e * (self.m - 1);
        let mut out = RealVector::zeros(self.dim());
        for i in 0..e {
            out[i] = g_complex[i].re;
        }
        for i in 0..tail {
            out[e + i] = 2.0 * g_complex[e + i].re;
            out[e + tail + i] = -2.0 * g_complex[e + i].im;
        }
        Ok(out)
    }
}

/// Conjugate-augmented data matrix for a set of signal roles, in both
/// complex and real (`T_Re`-transformed) coordinates.
///
/// Columns are ordered positive frequencies ascending (blocks of `E`
/// experiment columns), then the conjugate frequencies ascending, matching
/// the `(G0, G1, G1*)` coefficient layout.
#[derive(Debug, Clone)]
pub struct DataMatrix {
    depth: usize,
    roles: Vec<Role>,
    row_offsets: Vec<usize>,
    complex: ComplexMatrix,
    real: RealMatrix,
    m: usize,
    e: usize,
}

/// Stack the conjugate-augmented blocks of the requested roles (top to
/// bottom in the order given), all at the same depth.
pub fn build_data_matrix(depth: usize, spectra: &SpectraCollection, roles: &[Role]) -> Result<DataMatrix> {
    if roles.is_empty() {
        return Err(Error::InvalidInput("need at least one role".into()));
    }
    let m = spectra.grid().len();
    let e = spectra.experiment_count();
    let cols = e * (2 * m - 1);
    let mut blocks = Vec::with_capacity(roles.len());
    let mut row_offsets = vec![0usize];
    for &role in roles {
        let block = conjugate_augmented(depth, &spectra.role_spectra(role)?)?;
        row_offsets.push(row_offsets.last().unwrap() + block.nrows());
        blocks.push(block);
    }
    let rows = *row_offsets.last().unwrap();
    let mut complex = ComplexMatrix::zeros(rows, cols);
    for (i, block) in blocks.iter().enumerate() {
        complex
            .view_mut((row_offsets[i], 0), (block.nrows(), cols))
            .copy_from(block);
    }
    let t = t_re_transform(m, e)?;
    let product = &complex * t.matrix();
    let scale = product.norm().max(1.0);
    let max_imag = product.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    if max_imag > 1e-10 * scale {
        return Err(Error::InvalidInput(format!(
            "data lacks conjugate symmetry: residual imaginary part {max_imag:.3e}"
        )));
    }
    let real = product.map(|v| v.re);
    Ok(DataMatrix { depth, roles: roles.to_vec(), row_offsets, complex, real, m, e })
}

impl DataMatrix {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn complex_form(&self) -> &ComplexMatrix {
        &self.complex
    }

    /// The real form `[complex] * T_Re`; same rank, real coordinates.
    pub fn real_form(&self) -> &RealMatrix {
        &self.real
    }

    /// Row range of one role's block.
    pub fn role_rows(&self, idx: usize) -> std::ops::Range<usize> {
        self.row_offsets[idx]..self.row_offsets[idx + 1]
    }

    pub fn grid_len(&self) -> usize {
        self.m
    }

    pub fn experiment_count(&self) -> usize {
        self.e
    }

    pub fn t_re(&self) -> TReTransform {
        TReTransform { m: self.m, e: self.e }
    }
}
