//! Implementations behind the subcommands: load config, call library,
//! write result files, print a one-line summary.

use std::path::{Path, PathBuf};

use fddc::behavior::{dd_simulate, transfer_matrix_at, BehaviorQuery};
use fddc::control::{dd_lqr, receding_horizon_run, LqrWeights, Predictor, RunSettings};
use fddc::data::{FrequencyGrid, SpectraCollection, Trajectory};
use fddc::error::{Error, Result};
use fddc::excitation::{is_cpe, is_pe_time, PeReport};
use fddc::io;
use fddc::linalg::ComplexVector;
use fddc::plantlab::{
    closed_loop_collect, collect_closed_loop_dataset, estimate_frf, multisine, per_period_spectra,
    tf_to_state_space, NoiseConfig,
};
use num_complex::Complex64;
use serde_json::json;

use crate::config::*;

pub struct Context {
    pub out_dir: PathBuf,
    pub seed_override: Option<u64>,
    pub tolerance_override: Option<f64>,
}

impl Context {
    fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.out_dir)?;
        let path = self.out_dir.join(name);
        std::fs::write(&path, contents)?;
        Ok(path)
    }

    fn tolerance(&self, config_value: Option<f64>) -> Option<f64> {
        self.tolerance_override.or(config_value)
    }
}

fn load_dataset(path: &str) -> Result<SpectraCollection> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ConfigError(format!("cannot read dataset {path}: {e}")))?;
    io::dataset_from_json(&text)
}

fn load_csv_pair(path: &str) -> Result<(Trajectory, Option<Trajectory>)> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::ConfigError(format!("cannot read CSV {path}: {e}")))?;
    io::trajectory_pair_from_csv(&text)
}

pub fn cmd_gen_data(ctx: &Context, config_path: &Path) -> Result<()> {
    let mut cfg: GenDataConfig = load_config(config_path)?;
    let plant = cfg.plant.build()?;
    let grid = FrequencyGrid::new(cfg.grid_m)?;
    let dataset = match &mut cfg.mode {
        GenDataMode::Direct { with_states } => {
            let n_u = plant.input_dim();
            let experiments = (0..n_u)
                .map(|e| {
                    let dir = ComplexVector::from_fn(n_u, |i, _| {
                        if i == e { Complex64::ONE } else { Complex64::ZERO }
                    });
                    let mut exp = fddc::plantlab::steady_state_spectrum(&plant, grid, &vec![dir; grid.len()])?;
                    if !*with_states {
                        exp.state = None;
                    }
                    Ok(exp)
                })
                .collect::<Result<Vec<_>>>()?;
            SpectraCollection::new(experiments)?
        }
        GenDataMode::ClosedLoop(cl) => {
            if let Some(seed) = ctx.seed_override {
                cl.noise_seed = seed;
                cl.phase_seed = seed.wrapping_add(1);
            }
            let controller = tf_to_state_space(&cl.controller.build()?)?;
            let setup = cl.setup(grid, plant.output_dim())?;
            if cl.write_records {
                // retained raw periods of the first experiment
                let mut phase_rng = fddc::rng::SeededRng::stream(setup.phase_seed, 0);
                let phases: Vec<f64> =
                    (0..grid.len()).map(|_| phase_rng.uniform_in(0.0, std::f64::consts::TAU)).collect();
                let line = multisine(&vec![setup.amplitude; grid.len()], grid, &phases, grid.period())?;
                let injection = Trajectory::new(
                    plant.input_dim(),
                    line.samples()
                        .iter()
                        .map(|s| {
                            fddc::linalg::RealVector::from_fn(plant.input_dim(), |c, _| if c == 0 { s[0] } else { 0.0 })
                        })
                        .collect(),
                )?;
                let rec =
                    closed_loop_collect(&plant, &controller, &injection, &setup.noise, setup.warmup_periods, setup.periods)?;
                let mut u_all = rec.input[0].clone();
                let mut y_all = rec.output[0].clone();
                for p in 1..rec.input.len() {
                    u_all = u_all.concat(&rec.input[p])?;
                    y_all = y_all.concat(&rec.output[p])?;
                }
                let path = ctx.write("records_exp1.csv", &io::trajectory_pair_to_csv(&u_all, &y_all)?)?;
                println!("wrote raw records to {}", path.display());
            }
            collect_closed_loop_dataset(&plant, &controller, &setup)?
        }
    };
    let path = ctx.write(&cfg.output, &io::dataset_to_json(&dataset)?)?;
    println!(
        "wrote dataset: M = {}, E = {}, {}",
        grid.len(),
        dataset.experiment_count(),
        path.display()
    );
    Ok(())
}

fn report_json(report: &PeReport) -> serde_json::Value {
    json!({
        "requested_order": report.requested_order,
        "achieved": report.achieved,
        "rank_found": report.rank_found,
        "rank_required": report.rank_required,
        "singular_value_margin": report.singular_value_margin,
    })
}

pub fn cmd_check_pe(ctx: &Context, config_path: &Path) -> Result<()> {
    let cfg: CheckPeConfig = load_config(config_path)?;
    let report = match (&cfg.dataset, &cfg.trajectory) {
        (Some(ds), None) => {
            let data = load_dataset(ds)?;
            let spectra: Vec<_> = match cfg.role {
                PeRole::Input => data.experiments().iter().map(|e| &e.input).collect(),
                PeRole::Output => data.experiments().iter().map(|e| &e.output).collect(),
            };
            is_cpe(&spectra, cfg.order)?
        }
        (None, Some(tr)) => {
            let (u, _) = load_csv_pair(tr)?;
            is_pe_time(&u, cfg.order)?
        }
        _ => return Err(Error::ConfigError("provide exactly one of `dataset` or `trajectory`".into())),
    };
    let path = ctx.write("pe_report.json", &serde_json::to_string_pretty(&report_json(&report))?)?;
    println!(
        "PE order {}: achieved = {} (rank {}/{}, margin {:.3e}) -> {}",
        report.requested_order,
        report.achieved,
        report.rank_found,
        report.rank_required,
        report.singular_value_margin,
        path.display()
    );
    Ok(())
}

pub fn cmd_simulate(ctx: &Context, config_path: &Path) -> Result<()> {
    let cfg: SimulateConfig = load_config(config_path)?;
    let data = load_dataset(&cfg.dataset)?;
    let (past_u, past_y) = load_csv_pair(&cfg.past)?;
    let past_y = past_y.ok_or_else(|| Error::ConfigError("past CSV must carry y columns".into()))?;
    let (future_u, _) = load_csv_pair(&cfg.future)?;
    let query = BehaviorQuery::new(past_u, past_y, future_u)?;
    let sim = dd_simulate(&data, &query, cfg.state_order_bound, ctx.tolerance(cfg.tolerance))?;
    let path = ctx.write(&cfg.output, &io::trajectory_to_csv(&sim.outputs_full, "y"))?;
    let summary = json!({
        "residual": sim.residual,
        "weak_data": sim.weak_data,
        "output": path.display().to_string(),
    });
    ctx.write("simulation_summary.json", &serde_json::to_string_pretty(&summary)?)?;
    println!(
        "simulated {} future samples (residual {:.3e}{}) -> {}",
        query.future_len(),
        sim.residual,
        if sim.weak_data { ", weak data" } else { "" },
        path.display()
    );
    Ok(())
}

pub fn cmd_freqresp(ctx: &Context, config_path: &Path) -> Result<()> {
    let cfg: FreqRespConfig = load_config(config_path)?;
    let data = load_dataset(&cfg.dataset)?;
    let mut results = Vec::new();
    for pt in &cfg.points {
        let z = Complex64::new(pt[0], pt[1]);
        match &cfg.input {
            Some(dir) => {
                let u_z = ComplexVector::from_iterator(dir.len(), dir.iter().map(|p| Complex64::new(p[0], p[1])));
                let resp = fddc::behavior::freq_response_eval(
                    &data,
                    z,
                    &u_z,
                    cfg.past_len,
                    cfg.state_order_bound,
                    ctx.tolerance(cfg.tolerance),
                )?;
                results.push(json!({
                    "z": [z.re, z.im],
                    "Y": resp.y_z.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
                    "residual": resp.residual,
                }));
            }
            None => {
                let h = transfer_matrix_at(&data, z, cfg.past_len, cfg.state_order_bound, ctx.tolerance(cfg.tolerance))?;
                let rows: Vec<Vec<[f64; 2]>> = (0..h.nrows())
                    .map(|i| (0..h.ncols()).map(|j| [h[(i, j)].re, h[(i, j)].im]).collect())
                    .collect();
                results.push(json!({ "z": [z.re, z.im], "H": rows }));
            }
        }
    }
    let path = ctx.write(&cfg.output, &serde_json::to_string_pretty(&results)?)?;
    println!("evaluated {} frequency points -> {}", cfg.points.len(), path.display());
    Ok(())
}

pub fn cmd_lqr(ctx: &Context, config_path: &Path) -> Result<()> {
    let cfg: LqrConfig = load_config(config_path)?;
    let data = load_dataset(&cfg.dataset)?;
    let weights = LqrWeights::new(io::matrix_from_rows(&cfg.q)?, io::matrix_from_rows(&cfg.r)?)?;
    let lqr = dd_lqr(&data, &weights, ctx.tolerance(cfg.tolerance))?;
    let result = json!({
        "P": io::matrix_to_rows(&lqr.cost_matrix),
        "K": io::matrix_to_rows(&lqr.gain),
        "diagnostics": {
            "sdp_iterations": lqr.diagnostics.sdp_iterations,
            "sdp_gap": lqr.diagnostics.sdp_gap,
            "right_inverse_residual": lqr.diagnostics.right_inverse_residual,
            "kernel_residual": lqr.diagnostics.kernel_residual,
            "weak_data": lqr.diagnostics.weak_data,
        }
    });
    let path = ctx.write(&cfg.output, &serde_json::to_string_pretty(&result)?)?;
    println!("solved data-driven LQR (trace P = {:.6}) -> {}", lqr.cost_matrix.trace(), path.display());
    Ok(())
}

enum Scheme {
    FreePc,
    DeePc,
}

fn run_predictive(ctx: &Context, config_path: &Path, scheme: Scheme) -> Result<()> {
    let cfg: PredictiveRunConfig = load_config(config_path)?;
    let plant = cfg.plant.build()?;
    let problem = cfg.problem.build()?;
    let predictor = match scheme {
        Scheme::FreePc => {
            let ds = cfg.dataset.as_ref().ok_or_else(|| Error::ConfigError("freepc needs `dataset`".into()))?;
            Predictor::freepc(&load_dataset(ds)?, problem)?
        }
        Scheme::DeePc => {
            let csv = cfg.data_csv.as_ref().ok_or_else(|| Error::ConfigError("deepc needs `data_csv`".into()))?;
            let (u, y) = load_csv_pair(csv)?;
            let y = y.ok_or_else(|| Error::ConfigError("data CSV must carry y columns".into()))?;
            Predictor::deepc(&u, &y, problem)?
        }
    };
    if !predictor.pe_achieved {
        println!("warning: data is not PE of order past_len + horizon + state_order_bound");
    }
    let settings = RunSettings {
        steps: cfg.steps,
        initial_state: cfg.initial_state(),
        past_init: cfg.past_init.into(),
        noise: cfg.run_noise_std.map(|s| NoiseConfig {
            std_dev: vec![s; plant.output_dim()],
            seed: ctx.seed_override.unwrap_or(cfg.run_noise_seed),
        }),
        qp_tolerance: ctx.tolerance(cfg.qp_tolerance),
    };
    let run = receding_horizon_run(&predictor, &plant, &settings)?;
    let path = ctx.write(&cfg.output, &io::closed_loop_to_csv(&run.inputs, &run.outputs, &run.cumulative_cost)?)?;
    let summary = json!({ "cost": run.cost, "steps": cfg.steps, "output": path.display().to_string() });
    ctx.write("run_summary.json", &serde_json::to_string_pretty(&summary)?)?;
    println!("closed-loop run finished: J = {:.6} -> {}", run.cost, path.display());
    Ok(())
}

pub fn cmd_freepc(ctx: &Context, config_path: &Path) -> Result<()> {
    run_predictive(ctx, config_path, Scheme::FreePc)
}

pub fn cmd_deepc(ctx: &Context, config_path: &Path) -> Result<()> {
    run_predictive(ctx, config_path, Scheme::DeePc)
}

pub fn cmd_monte_carlo(ctx: &Context, config_path: &Path) -> Result<()> {
    let cfg: MonteCarloConfig = load_config(config_path)?;
    let plant = cfg.plant.build()?;
    let controller = tf_to_state_space(&cfg.data_collection.controller.build()?)?;
    let grid = FrequencyGrid::new(cfg.grid_m)?;
    let base_seed = ctx.seed_override.unwrap_or(cfg.seed);
    let initial = fddc::linalg::RealVector::from_column_slice(&cfg.initial_state);
    let settings = RunSettings {
        steps: cfg.steps,
        initial_state: initial,
        past_init: cfg.past_init.into(),
        noise: None,
        qp_tolerance: None,
    };

    // fan the runs out over worker threads; every run owns its seed pair
    // and results are merged by run index, so the output is identical to
    // a sequential sweep
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(cfg.runs.max(1));
    let one_run = |periods: usize, stream: u64| -> Result<f64> {
        let setup = fddc::plantlab::CollectionSetup {
            grid,
            amplitude: cfg.data_collection.amplitude,
            warmup_periods: cfg.data_collection.warmup_periods,
            periods,
            noise: NoiseConfig::new(
                vec![cfg.data_collection.noise_std; plant.output_dim()],
                base_seed.wrapping_add(2 * stream),
            )?,
            phase_seed: base_seed.wrapping_add(2 * stream + 1),
            flavor: cfg.data_collection.flavor.into(),
        };
        let data = collect_closed_loop_dataset(&plant, &controller, &setup)?;
        let predictor = Predictor::freepc(&data, cfg.problem.build()?)?;
        Ok(receding_horizon_run(&predictor, &plant, &settings)?.cost)
    };

    let mut sweep = Vec::new();
    let mut per_run_csv = String::from("periods,run,J\n");
    for (pi, &periods) in cfg.period_sweep.iter().enumerate() {
        let mut costs: Vec<Result<f64>> = Vec::new();
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let one_run = &one_run;
                    scope.spawn(move || {
                        (w..cfg.runs)
                            .step_by(workers)
                            .map(|run_idx| (run_idx, one_run(periods, (pi * cfg.runs + run_idx) as u64)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            let mut merged: Vec<(usize, Result<f64>)> =
                handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect();
            merged.sort_by_key(|(idx, _)| *idx);
            costs = merged.into_iter().map(|(_, c)| c).collect();
        });
        let costs = costs.into_iter().collect::<Result<Vec<f64>>>()?;
        for (run_idx, cost) in costs.iter().enumerate() {
            per_run_csv.push_str(&format!("{periods},{run_idx},{}\n", io::full_precision(*cost)));
        }
        let mean = costs.iter().sum::<f64>() / costs.len() as f64;
        let variance = costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (costs.len().max(2) - 1) as f64;
        println!("p = {periods}: mean J = {mean:.4}, variance = {variance:.3e} over {} runs", costs.len());
        sweep.push(json!({ "periods": periods, "mean_cost": mean, "variance": variance, "runs": costs.len() }));
    }
    let benchmark = if cfg.model_benchmark {
        let mpc = Predictor::model_mpc(&plant, cfg.problem.build()?)?;
        let run = receding_horizon_run(&mpc, &plant, &settings)?;
        println!("model benchmark: J = {:.4}", run.cost);
        Some(run.cost)
    } else {
        None
    };
    let summary = json!({ "sweep": sweep, "model_benchmark_cost": benchmark, "seed": base_seed });
    let path = ctx.write(&cfg.output, &serde_json::to_string_pretty(&summary)?)?;
    ctx.write("monte_carlo_runs.csv", &per_run_csv)?;
    println!("monte carlo summary -> {}", path.display());
    Ok(())
}

pub fn cmd_estimate_frf(ctx: &Context, config_path: &Path) -> Result<()> {
    let cfg: EstimateFrfConfig = load_config(config_path)?;
    let plant = cfg.plant.build()?;
    if plant.input_dim() != 1 || plant.output_dim() != 1 {
        return Err(Error::InvalidInput("estimate-frf drives a SISO plant".into()));
    }
    let controller = tf_to_state_space(&cfg.controller.build()?)?;
    let grid = FrequencyGrid::new(cfg.grid_m)?;
    let noise_seed = ctx.seed_override.unwrap_or(cfg.noise_seed);
    let mut phase_rng = fddc::rng::SeededRng::stream(cfg.phase_seed, 0);
    let phases: Vec<f64> = (0..grid.len()).map(|_| phase_rng.uniform_in(0.0, std::f64::consts::TAU)).collect();
    let injection = multisine(&vec![cfg.amplitude; grid.len()], grid, &phases, grid.period())?;
    let records = closed_loop_collect(
        &plant,
        &controller,
        &injection,
        &NoiseConfig::new(vec![cfg.noise_std], noise_seed)?,
        cfg.warmup_periods,
        cfg.periods,
    )?;
    let d = per_period_spectra(&records.injection, grid)?;
    let u = per_period_spectra(&records.input, grid)?;
    let y = per_period_spectra(&records.output, grid)?;
    let frf = estimate_frf(&d, &u, &y, grid)?;
    let path = ctx.write(&cfg.output, &io::frf_to_json(&frf)?)?;
    println!("estimated FRF over {} periods at {} bins -> {}", frf.periods, grid.len(), path.display());
    Ok(())
}
