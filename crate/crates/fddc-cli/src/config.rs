//! JSON configuration schemas for the subcommands and their conversion
//! into domain types. Every stochastic quantity carries an explicit seed;
//! no command reads the wall clock.

use fddc::data::FrequencyGrid;
use fddc::error::{Error, Result};
use fddc::io::matrix_from_rows;
use fddc::linalg::RealVector;
use fddc::plantlab::{
    tf_to_state_space, CollectionSetup, DatasetFlavor, NoiseConfig, RationalSiso, StateSpaceModel, TransferFunction,
};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlantSpec {
    StateSpace {
        a: Vec<Vec<f64>>,
        b: Vec<Vec<f64>>,
        c: Vec<Vec<f64>>,
        d: Vec<Vec<f64>>,
    },
    TransferFunction(TfSpec),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum TfSpec {
    Siso { numerator: Vec<f64>, denominator: Vec<f64> },
    Mimo { entries: Vec<Vec<SisoEntry>> },
}

#[derive(Debug, Deserialize)]
pub struct SisoEntry {
    pub numerator: Vec<f64>,
    pub denominator: Vec<f64>,
}

impl TfSpec {
    pub fn build(&self) -> Result<TransferFunction> {
        match self {
            TfSpec::Siso { numerator, denominator } => TransferFunction::siso(numerator.clone(), denominator.clone()),
            TfSpec::Mimo { entries } => {
                let rows = entries
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|e| RationalSiso::new(e.numerator.clone(), e.denominator.clone()))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                TransferFunction::new(rows)
            }
        }
    }
}

impl PlantSpec {
    pub fn build(&self) -> Result<StateSpaceModel> {
        match self {
            PlantSpec::StateSpace { a, b, c, d } => StateSpaceModel::new(
                matrix_from_rows(a)?,
                matrix_from_rows(b)?,
                matrix_from_rows(c)?,
                matrix_from_rows(d)?,
            ),
            PlantSpec::TransferFunction(tf) => tf_to_state_space(&tf.build()?),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenDataMode {
    /// Noise-free steady-state spectra, one experiment per input channel
    /// with unit input directions.
    Direct { with_states: bool },
    /// Closed-loop measurement campaign.
    ClosedLoop(ClosedLoopConfig),
}

#[derive(Debug, Deserialize)]
pub struct ClosedLoopConfig {
    pub controller: TfSpec,
    pub amplitude: f64,
    pub warmup_periods: usize,
    pub periods: usize,
    pub noise_std: f64,
    pub noise_seed: u64,
    pub phase_seed: u64,
    /// `averaged_spectra` or `frf_unit_input`.
    pub flavor: FlavorSpec,
    /// Also write the retained raw periods of the last experiment as CSV.
    #[serde(default)]
    pub write_records: bool,
}

#[derive(Debug, Deserialize, Clone, Copy)]
#[serde(rename_all = "snake_case")]
pub enum FlavorSpec {
    AveragedSpectra,
    FrfUnitInput,
}

impl From<FlavorSpec> for DatasetFlavor {
    fn from(f: FlavorSpec) -> Self {
        match f {
            FlavorSpec::AveragedSpectra => DatasetFlavor::AveragedSpectra,
            FlavorSpec::FrfUnitInput => DatasetFlavor::FrfUnitInput,
        }
    }
}

#[derive(Debug, Deserialize)]
pub struct GenDataConfig {
    pub plant: PlantSpec,
    pub grid_m: usize,
    pub mode: GenDataMode,
    /// Output dataset filename (inside `--out`).
    #[serde(default = "default_dataset_name")]
    pub output: String,
}

fn default_dataset_name() -> String {
    "dataset.json".into()
}

impl ClosedLoopConfig {
    pub fn setup(&self, grid: FrequencyGrid, output_channels: usize) -> Result<CollectionSetup> {
        Ok(CollectionSetup {
            grid,
            amplitude: self.amplitude,
            warmup_periods: self.warmup_periods,
            periods: self.periods,
            noise: NoiseConfig::new(vec![self.noise_std; output_channels], self.noise_seed)?,
            phase_seed: self.phase_seed,
            flavor: self.flavor.into(),
        })
    }
}

#[derive(Debug, Deserialize)]
pub struct CheckPeConfig {
    /// Frequency-domain dataset to test...
    pub dataset: Option<String>,
    /// ...or a time-domain trajectory CSV.
    pub trajectory: Option<String>,
    pub order: usize,
    /// For datasets: which role to test (default input).
    #[serde(default)]
    pub role: PeRole,
}

#[derive(Debug, Deserialize, Default, Clone, Copy)]
#[serde(rename_all = "snake_case")]
pub enum PeRole {
    #[default]
    Input,
    Output,
}

#[derive(Debug, Deserialize)]
pub struct SimulateConfig {
    pub dataset: String,
    /// CSV with header `k,u1..,y1..` holding the past window.
    pub past: String,
    /// CSV with header `k,u1..` holding the future inputs.
    pub future: String,
    pub state_order_bound: usize,
    pub tolerance: Option<f64>,
    #[serde(default = "default_sim_name")]
    pub output: String,
}

fn default_sim_name() -> String {
    "simulation.csv".into()
}

#[derive(Debug, Deserialize)]
pub struct FreqRespConfig {
    pub dataset: String,
    /// Complex evaluation points as `[re, im]` pairs.
    pub points: Vec<[f64; 2]>,
    pub past_len: usize,
    pub state_order_bound: usize,
    pub tolerance: Option<f64>,
    /// Fixed input direction; full transfer matrix when absent.
    pub input: Option<Vec<[f64; 2]>>,
    #[serde(default = "default_freqresp_name")]
    pub output: String,
}

fn default_freqresp_name() -> String {
    "freqresp.json".into()
}

#[derive(Debug, Deserialize)]
pub struct LqrConfig {
    pub dataset: String,
    pub q: Vec<Vec<f64>>,
    pub r: Vec<Vec<f64>>,
    pub tolerance: Option<f64>,
    #[serde(default = "default_lqr_name")]
    pub output: String,
}

fn default_lqr_name() -> String {
    "lqr.json".into()
}

#[derive(Debug, Deserialize, Clone)]
pub struct ProblemConfig {
    pub horizon: usize,
    pub past_len: usize,
    pub output_weight: Vec<Vec<f64>>,
    pub input_weight: Vec<Vec<f64>>,
    pub input_lower: Vec<f64>,
    pub input_upper: Vec<f64>,
    pub output_lower: Vec<f64>,
    pub output_upper: Vec<f64>,
    /// `null` pins the past-output slack to zero.
    pub lambda_sigma: Option<f64>,
    pub lambda_g: f64,
    pub state_order_bound: usize,
}

impl ProblemConfig {
    pub fn build(&self) -> Result<fddc::control::PredictiveProblem> {
        let vec_to = |v: &[f64]| RealVector::from_column_slice(v);
        Ok(fddc::control::PredictiveProblem {
            horizon: self.horizon,
            past_len: self.past_len,
            output_weight: matrix_from_rows(&self.output_weight)?,
            input_weight: matrix_from_rows(&self.input_weight)?,
            input_lower: vec_to(&self.input_lower),
            input_upper: vec_to(&self.input_upper),
            output_lower: vec_to(&self.output_lower),
            output_upper: vec_to(&self.output_upper),
            lambda_sigma: self.lambda_sigma.unwrap_or(f64::INFINITY),
            lambda_g: self.lambda_g,
            state_order_bound: self.state_order_bound,
        })
    }
}

#[derive(Debug, Deserialize, Clone, Copy, Default)]
#[serde(rename_all = "snake_case")]
pub enum PastInitSpec {
    Zeros,
    #[default]
    FreeResponse,
}

impl From<PastInitSpec> for fddc::control::PastInit {
    fn from(p: PastInitSpec) -> Self {
        match p {
            PastInitSpec::Zeros => fddc::control::PastInit::Zeros,
            PastInitSpec::FreeResponse => fddc::control::PastInit::FreeResponse,
        }
    }
}

#[derive(Debug, Deserialize)]
pub struct PredictiveRunConfig {
    /// Frequency-domain dataset (FreePC) ...
    pub dataset: Option<String>,
    /// ... or time-domain data CSV `k,u..,y..` (DeePC).
    pub data_csv: Option<String>,
    /// True plant driven by the controller in the closed-loop evaluation.
    pub plant: PlantSpec,
    pub problem: ProblemConfig,
    pub steps: usize,
    pub initial_state: Vec<f64>,
    #[serde(default)]
    pub past_init: PastInitSpec,
    /// Measurement noise during the run (none when absent).
    pub run_noise_std: Option<f64>,
    #[serde(default)]
    pub run_noise_seed: u64,
    pub qp_tolerance: Option<f64>,
    #[serde(default = "default_run_name")]
    pub output: String,
}

fn default_run_name() -> String {
    "closed_loop.csv".into()
}

impl PredictiveRunConfig {
    pub fn initial_state(&self) -> RealVector {
        RealVector::from_column_slice(&self.initial_state)
    }
}

#[derive(Debug, Deserialize)]
pub struct MonteCarloConfig {
    pub plant: PlantSpec,
    pub data_collection: ClosedLoopConfig,
    pub grid_m: usize,
    pub problem: ProblemConfig,
    pub steps: usize,
    pub initial_state: Vec<f64>,
    #[serde(default)]
    pub past_init: PastInitSpec,
    pub runs: usize,
    /// Period counts to sweep, e.g. `[5, 10, 25, 50]`.
    pub period_sweep: Vec<usize>,
    /// Base seed; run `r` with period count index `i` derives its streams
    /// from it deterministically.
    pub seed: u64,
    /// Also run the exact-model benchmark.
    #[serde(default)]
    pub model_benchmark: bool,
    #[serde(default = "default_mc_name")]
    pub output: String,
}

fn default_mc_name() -> String {
    "monte_carlo.json".into()
}

#[derive(Debug, Deserialize)]
pub struct EstimateFrfConfig {
    pub plant: PlantSpec,
    pub controller: TfSpec,
    pub grid_m: usize,
    pub amplitude: f64,
    pub warmup_periods: usize,
    pub periods: usize,
    pub noise_std: f64,
    pub noise_seed: u64,
    pub phase_seed: u64,
    #[serde(default = "default_frf_name")]
    pub output: String,
}

fn default_frf_name() -> String {
    "frf.json".into()
}

pub fn load_config<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ConfigError(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::ConfigError(format!("{}: {e}", path.display())))
}
