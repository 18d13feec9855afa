//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line (run with `--nocapture` to see them).
//!
//! Criteria 6 and 7 are statistical; criterion 7 retries once with three
//! times the seeds before declaring failure, as specified for stochastic
//! gates.

mod common;

use std::time::Instant;

use common::*;
use fddc::behavior::{dd_simulate, freq_response_eval, is_trajectory, BehaviorQuery};
use fddc::control::{
    dd_lqr, equivalence_check, qp_solve, receding_horizon_run, LqrWeights, Predictor, PredictiveProblem,
    QpProblem, RunSettings,
};
use fddc::data::{build_data_matrix, t_re_transform, FrequencyGrid, Role, Trajectory};
use fddc::excitation::{is_cpe, is_pe_freq};
use fddc::linalg::{ComplexVector, RealMatrix, RealVector};
use fddc::plantlab::{
    collect_closed_loop_dataset, per_period_dft, simulate, steady_state_spectrum, tf_to_state_space,
    transfer_eval, CollectionSetup, DatasetFlavor, NoiseConfig,
};
use fddc::rng::SeededRng;
use num_complex::Complex64;

fn random_traj(rng: &mut SeededRng, channels: usize, len: usize) -> Trajectory {
    Trajectory::new(channels, (0..len).map(|_| random_vector(rng, channels)).collect()).unwrap()
}

fn case_study_problem() -> PredictiveProblem {
    PredictiveProblem {
        horizon: 10,
        past_len: 6,
        output_weight: RealMatrix::from_element(1, 1, 1.0),
        input_weight: RealMatrix::from_element(1, 1, 0.01),
        input_lower: RealVector::from_element(1, -3.0),
        input_upper: RealVector::from_element(1, 0.5),
        output_lower: RealVector::from_element(1, -0.5),
        output_upper: RealVector::from_element(1, 1.2),
        lambda_sigma: 1e5,
        lambda_g: 0.1,
        state_order_bound: 2,
    }
}

fn case_study_initial_state() -> RealVector {
    RealVector::from_vec(vec![5.61790107002788, 3.7634844992836105])
}

#[test]
fn criterion_1_noise_free_simulation() {
    let start = Instant::now();
    let plant = batch_reactor();
    let data = unit_direction_dataset(&plant, 10, false);
    let mut rng = SeededRng::new(1001);
    let (l0, l) = (2, 4);
    let all_u = random_traj(&mut rng, 2, l0 + l);
    let (_, all_y) = simulate(&plant, &RealVector::zeros(4), &all_u).unwrap();
    let query = BehaviorQuery::new(
        all_u.window(0, l0).unwrap(),
        all_y.window(0, l0).unwrap(),
        all_u.window(l0, l).unwrap(),
    )
    .unwrap();
    let sim = dd_simulate(&data, &query, 4, Some(1e-7)).unwrap();
    let truth = all_y.window(l0, l).unwrap().stacked();
    let rel = (sim.outputs.stacked() - &truth).norm() / truth.norm();
    let elapsed = start.elapsed();
    assert!(rel <= 1e-8, "relative prediction error {rel:.3e} > 1e-8");
    assert!(elapsed.as_secs_f64() < 1.0, "runtime {elapsed:?} >= 1 s");
    println!("criterion 1 (noise-free simulation): PASS — relative error {rel:.3e} in {elapsed:?}");
}

#[test]
fn criterion_2_data_driven_lqr() {
    let start = Instant::now();
    let model = batch_reactor_full_state();
    let data = unit_direction_dataset(&model, 10, true);
    let weights = LqrWeights::identity(4, 2);
    let lqr = dd_lqr(&data, &weights, Some(1e-10)).unwrap();

    // (a) printed matrices, matched to their four-decimal quantization
    let p_print = (&lqr.cost_matrix - printed_lqr_p()).amax();
    let k_print = (&lqr.gain - printed_lqr_k()).amax();
    assert!(p_print < 1e-4, "printed-P gap {p_print:.3e}");
    assert!(k_print < 1e-4, "printed-K gap {k_print:.3e}");

    // (b) independent DARE fixed point run to 1e-12
    let (p_bar, k_bar) = dare_oracle(&model.a, &model.b, &weights.q, &weights.r);
    let p_rel = (&lqr.cost_matrix - &p_bar).norm() / p_bar.norm();
    let k_rel = (&lqr.gain - &k_bar).norm() / k_bar.norm();
    let elapsed = start.elapsed();
    assert!(p_rel <= 1e-6, "P vs DARE {p_rel:.3e}");
    assert!(k_rel <= 1e-6, "K vs DARE {k_rel:.3e}");
    assert!(elapsed.as_secs_f64() < 30.0, "runtime {elapsed:?} >= 30 s");
    println!(
        "criterion 2 (data-driven LQR): PASS — |P-Pdare|/|Pdare| = {p_rel:.3e}, |K-Kdare|/|Kdare| = {k_rel:.3e} in {elapsed:?}"
    );
}

#[test]
fn criterion_3_frequency_response_evaluation() {
    let plant = batch_reactor();
    let data = unit_direction_dataset(&plant, 10, false);
    let eigs = plant.a.complex_eigenvalues();
    let mut rng = SeededRng::new(1003);
    let mut done = 0;
    let mut worst: f64 = 0.0;
    while done < 20 {
        let z = Complex64::from_polar(rng.uniform_in(0.3, 1.6), rng.uniform_in(0.0, std::f64::consts::TAU));
        if eigs.iter().any(|l| (l - z).norm() < 0.1) {
            continue;
        }
        let u_z = ComplexVector::from_fn(2, |_, _| Complex64::new(rng.standard_normal(), rng.standard_normal()));
        let resp = freq_response_eval(&data, z, &u_z, 4, 4, Some(1e-6)).unwrap();
        let expect = transfer_eval(&plant, z).unwrap() * &u_z;
        let err = (&resp.y_z - &expect).norm();
        let bound = 1e-7 * (1.0 + expect.norm());
        assert!(err <= bound, "z = {z}: |Y - HU| = {err:.3e} > {bound:.3e}");
        worst = worst.max(err / (1.0 + expect.norm()));
        done += 1;
    }
    println!("criterion 3 (frequency-response evaluation): PASS — worst normalized error {worst:.3e} over 20 points");
}

#[test]
fn criterion_4_freepc_deepc_equivalence() {
    let plant = tf_to_state_space(&case_study_plant_tf()).unwrap();
    let spectra = unit_direction_dataset(&plant, 10, false);
    let mut rng = SeededRng::new(1004);
    let u_data = random_traj(&mut rng, 1, 30);
    let (_, y_data) = simulate(&plant, &RealVector::zeros(2), &u_data).unwrap();

    let mut problem = PredictiveProblem::unconstrained(5, 4, 1, 1);
    problem.input_weight = RealMatrix::from_element(1, 1, 0.1);
    problem.input_lower = RealVector::from_element(1, -50.0);
    problem.input_upper = RealVector::from_element(1, 50.0);
    problem.state_order_bound = 2;

    let mut worst_obj: f64 = 0.0;
    let mut worst_input: f64 = 0.0;
    for trial in 0..10 {
        let x0 = random_vector(&mut rng, 2);
        let past_u = random_traj(&mut rng, 1, 4);
        let (_, past_y) = simulate(&plant, &x0, &past_u).unwrap();
        let report =
            equivalence_check(&spectra, &u_data, &y_data, &problem, past_u.samples(), past_y.samples()).unwrap();
        assert!(report.objective_gap <= 1e-6, "trial {trial}: objective gap {:.3e}", report.objective_gap);
        assert!(report.first_input_gap <= 1e-6, "trial {trial}: input gap {:.3e}", report.first_input_gap);
        worst_obj = worst_obj.max(report.objective_gap);
        worst_input = worst_input.max(report.first_input_gap);
    }
    println!(
        "criterion 4 (FreePC = DeePC): PASS — worst objective gap {worst_obj:.3e}, worst first-input gap {worst_input:.3e}"
    );
}

#[test]
fn criterion_5_span_property() {
    let plant = batch_reactor();
    let data = unit_direction_dataset(&plant, 10, false);
    let mut rng = SeededRng::new(1005);
    let l = 4;
    let mut worst_accept: f64 = 0.0;
    let mut worst_reject = f64::INFINITY;
    for trial in 0..50 {
        let x0 = random_vector(&mut rng, 4);
        let u = random_traj(&mut rng, 2, l);
        let (_, y) = simulate(&plant, &x0, &u).unwrap();
        let check = is_trajectory(&data, &u, &y, 4, Some(1e-9)).unwrap();
        assert!(
            check.is_trajectory && check.residual <= 1e-9,
            "trial {trial}: genuine trajectory rejected (residual {:.3e})",
            check.residual
        );
        worst_accept = worst_accept.max(check.residual);

        let mut bad = y.samples().to_vec();
        bad[trial % l][trial % 2] += 1.0;
        let bad = Trajectory::new(2, bad).unwrap();
        let check = is_trajectory(&data, &u, &bad, 4, Some(1e-9)).unwrap();
        assert!(!check.is_trajectory, "trial {trial}: perturbed trajectory accepted");
        worst_reject = worst_reject.min(check.residual);
    }
    println!(
        "criterion 5 (span property): PASS — 50/50 accepted (worst residual {worst_accept:.3e}), 50/50 rejected (smallest residual {worst_reject:.3e})"
    );
}

#[test]
fn criterion_6_noisy_data_trend() {
    let start = Instant::now();
    let plant = batch_reactor();
    let controller = tf_to_state_space(&batch_reactor_controller_tf()).unwrap();
    let grid = FrequencyGrid::new(10).unwrap();
    let seeds = 20;
    let sweep = [5usize, 10, 50, 100];
    let mut medians = Vec::new();
    for &p in &sweep {
        let mut errors = Vec::new();
        for seed in 0..seeds {
            let setup = CollectionSetup {
                grid,
                amplitude: 10.0,
                warmup_periods: 20,
                periods: p,
                noise: NoiseConfig { std_dev: vec![0.1, 0.1], seed: 60_000 + seed },
                phase_seed: 61_000 + seed,
                flavor: DatasetFlavor::AveragedSpectra,
            };
            let data = collect_closed_loop_dataset(&plant, &controller, &setup).unwrap();
            let mut rng = SeededRng::new(62_000 + seed);
            let all_u = random_traj(&mut rng, 2, 6);
            let (_, all_y) = simulate(&plant, &RealVector::zeros(4), &all_u).unwrap();
            let query = BehaviorQuery::new(
                all_u.window(0, 2).unwrap(),
                all_y.window(0, 2).unwrap(),
                all_u.window(2, 4).unwrap(),
            )
            .unwrap();
            let sim = dd_simulate(&data, &query, 4, None).unwrap();
            let truth = all_y.window(2, 4).unwrap().stacked();
            errors.push((sim.outputs.stacked() - &truth).norm() / truth.norm());
        }
        errors.sort_by(f64::total_cmp);
        medians.push(errors[seeds as usize / 2]);
    }
    let elapsed = start.elapsed();
    for w in medians.windows(2) {
        assert!(w[1] < w[0], "medians not strictly decreasing: {medians:?}");
    }
    let p50 = medians[2];
    assert!(
        (7.6e-2 / 3.0..=7.6e-2 * 3.0).contains(&p50),
        "median at p = 50 is {p50:.3e}, outside a factor 3 of 7.6e-2"
    );
    assert!(elapsed.as_secs_f64() < 300.0, "runtime {elapsed:?} >= 5 min");
    println!(
        "criterion 6 (noisy-data trend): PASS — medians {:?} in {elapsed:?}",
        medians.iter().map(|m| format!("{m:.3e}")).collect::<Vec<_>>()
    );
}

/// One FreePC Monte Carlo batch: mean closed-loop cost over `runs` seeds.
fn freepc_mean_cost(periods: usize, runs: usize, seed_base: u64) -> f64 {
    let plant = tf_to_state_space(&case_study_plant_tf()).unwrap();
    let controller = tf_to_state_space(&case_study_controller_tf()).unwrap();
    let grid = FrequencyGrid::new(20).unwrap();
    let settings = RunSettings::noise_free(50, case_study_initial_state());
    let mut total = 0.0;
    for run_idx in 0..runs {
        let setup = CollectionSetup {
            grid,
            amplitude: 10.0,
            warmup_periods: 20,
            periods,
            noise: NoiseConfig { std_dev: vec![0.1], seed: seed_base + 2 * run_idx as u64 },
            phase_seed: seed_base + 2 * run_idx as u64 + 1,
            flavor: DatasetFlavor::FrfUnitInput,
        };
        let data = collect_closed_loop_dataset(&plant, &controller, &setup).unwrap();
        let freepc = Predictor::freepc(&data, case_study_problem()).unwrap();
        let run = receding_horizon_run(&freepc, &plant, &settings).unwrap();
        total += run.cost;
    }
    total / runs as f64
}

#[test]
fn criterion_7_closed_loop_monte_carlo() {
    let start = Instant::now();
    let plant = tf_to_state_space(&case_study_plant_tf()).unwrap();
    let mut nominal = case_study_problem();
    nominal.lambda_g = 0.0;
    nominal.lambda_sigma = f64::INFINITY;
    let mpc = Predictor::model_mpc(&plant, nominal).unwrap();
    let mpc_cost = receding_horizon_run(&mpc, &plant, &RunSettings::noise_free(50, case_study_initial_state()))
        .unwrap()
        .cost;
    assert!(
        (3.0..=3.4).contains(&mpc_cost),
        "model benchmark cost {mpc_cost:.4} outside [3.0, 3.4]"
    );

    // stochastic gate: retry once with 3x the seeds before failing
    let mut runs = 100;
    let mut verdict = None;
    for attempt in 0..2 {
        let mean50 = freepc_mean_cost(50, runs, 70_000);
        let mean5 = freepc_mean_cost(5, runs, 80_000);
        let ok = (3.0..=3.5).contains(&mean50) && mean50 < mean5;
        verdict = Some((mean50, mean5, ok));
        if ok {
            break;
        }
        if attempt == 0 {
            runs *= 3;
        }
    }
    let (mean50, mean5, ok) = verdict.unwrap();
    let elapsed = start.elapsed();
    assert!(
        ok,
        "mean J(p=50) = {mean50:.4}, mean J(p=5) = {mean5:.4} failed the [3.0, 3.5] / ordering gate even at 3x seeds"
    );
    assert!(elapsed.as_secs_f64() < 900.0, "runtime {elapsed:?} >= 15 min");
    println!(
        "criterion 7 (closed-loop Monte Carlo): PASS — mean J(p=50) = {mean50:.4}, mean J(p=5) = {mean5:.4}, benchmark {mpc_cost:.4} in {elapsed:?}"
    );
}

#[test]
fn criterion_8_solver_suites() {
    // (a) 100 random feasible equality-constrained strictly convex QPs
    // against the closed-form KKT oracle
    let mut rng = SeededRng::new(1008);
    let mut worst_kkt: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    for trial in 0..100 {
        let n = 3 + trial % 5;
        let me = 1 + trial % 3;
        let half = RealMatrix::from_fn(n, n, |_, _| rng.standard_normal());
        let quad = &half * half.transpose() + RealMatrix::identity(n, n) * 0.5;
        let q = RealVector::from_fn(n, |_, _| rng.standard_normal());
        let a = RealMatrix::from_fn(me, n, |_, _| rng.standard_normal());
        let b = RealVector::from_fn(me, |_, _| rng.standard_normal());
        let p = QpProblem::new(
            quad.clone(),
            q.clone(),
            a.clone(),
            b.clone(),
            RealMatrix::zeros(0, n),
            RealVector::zeros(0),
            RealVector::zeros(0),
        )
        .unwrap();
        let sol = qp_solve(&p, Some(1e-9)).unwrap();
        assert!(sol.residuals.max() <= 1e-8, "trial {trial}: KKT residual {:.3e}", sol.residuals.max());
        worst_kkt = worst_kkt.max(sol.residuals.max());

        let mut kkt = RealMatrix::zeros(n + me, n + me);
        kkt.view_mut((0, 0), (n, n)).copy_from(&quad);
        kkt.view_mut((0, n), (n, me)).copy_from(&a.transpose());
        kkt.view_mut((n, 0), (me, n)).copy_from(&a);
        let mut rhs = RealVector::zeros(n + me);
        rhs.rows_mut(0, n).copy_from(&(-&q));
        rhs.rows_mut(n, me).copy_from(&b);
        let oracle = kkt.lu().solve(&rhs).unwrap().rows(0, n).into_owned();
        let gap = (&sol.x - &oracle).amax();
        assert!(gap <= 1e-7, "trial {trial}: |x - x_kkt| = {gap:.3e}");
        worst_gap = worst_gap.max(gap);
    }

    // (b) the SDP route against the DARE oracle on 20 random stabilizable
    // systems, n_x <= 5
    let mut done = 0;
    let mut attempts = 0;
    let mut worst_sdp: f64 = 0.0;
    while done < 20 && attempts < 200 {
        attempts += 1;
        let nx = 2 + (attempts % 4);
        let nu = 1 + (attempts % 2);
        let a = RealMatrix::from_fn(nx, nx, |_, _| rng.standard_normal() * 0.6);
        let b = RealMatrix::from_fn(nx, nu, |_, _| rng.standard_normal());
        let q = RealMatrix::identity(nx, nx);
        let r = RealMatrix::identity(nu, nu);
        let (p_bar, k_bar) = dare_oracle(&a, &b, &q, &r);
        if spectral_radius(&(&a + &b * &k_bar)) >= 0.999 {
            continue;
        }
        let model =
            fddc::plantlab::StateSpaceModel::new(a, b, RealMatrix::identity(nx, nx), RealMatrix::zeros(nx, nu))
                .unwrap();
        let data = unit_direction_dataset(&model, nx + 2, true);
        let lqr = dd_lqr(&data, &LqrWeights::new(q, r).unwrap(), Some(1e-10)).unwrap();
        let p_err = (&lqr.cost_matrix - &p_bar).norm() / p_bar.norm().max(1.0);
        assert!(p_err <= 1e-6, "attempt {attempts}: SDP vs DARE {p_err:.3e}");
        worst_sdp = worst_sdp.max(p_err);
        done += 1;
    }
    assert_eq!(done, 20);
    println!(
        "criterion 8 (solver suites): PASS — worst QP KKT residual {worst_kkt:.3e}, worst oracle gap {worst_gap:.3e}, worst SDP-DARE gap {worst_sdp:.3e}"
    );
}

#[test]
fn criterion_9_property_suites() {
    let mut rng = SeededRng::new(1009);

    // PE monotonicity: if order L holds, every lower order holds
    let grid = FrequencyGrid::new(6).unwrap();
    for _ in 0..10 {
        let samples: Vec<ComplexVector> = (0..6)
            .map(|k| {
                ComplexVector::from_fn(1, |_, _| {
                    if k == 0 {
                        Complex64::new(rng.standard_normal(), 0.0)
                    } else {
                        Complex64::new(rng.standard_normal(), rng.standard_normal())
                    }
                })
            })
            .collect();
        let s = fddc::data::Spectrum::new(grid, 1, samples).unwrap();
        let mut held = true;
        for order in 1..=11 {
            let now = is_pe_freq(&s, order).unwrap().achieved;
            assert!(held || !now, "PE order {order} holds after a lower order failed");
            held = now;
        }
    }

    // conjugate symmetry: a real signal's DFT feeds a data matrix whose
    // real form is exactly real (checked to 1e-10 inside the builder)
    let plant = batch_reactor();
    let controller = tf_to_state_space(&batch_reactor_controller_tf()).unwrap();
    let grid10 = FrequencyGrid::new(10).unwrap();
    let setup = CollectionSetup {
        grid: grid10,
        amplitude: 10.0,
        warmup_periods: 20,
        periods: 4,
        noise: NoiseConfig { std_dev: vec![0.1, 0.1], seed: 3 },
        phase_seed: 4,
        flavor: DatasetFlavor::AveragedSpectra,
    };
    let noisy = collect_closed_loop_dataset(&plant, &controller, &setup).unwrap();
    build_data_matrix(5, &noisy, &[Role::Input, Role::Output]).unwrap();

    // T_Re round trip to 1e-12
    for &(m, e) in &[(1usize, 1usize), (5, 2), (8, 3)] {
        let t = t_re_transform(m, e).unwrap();
        let g = RealVector::from_fn(t.dim(), |_, _| rng.standard_normal());
        let back = t.to_real(&t.to_complex(&g).unwrap()).unwrap();
        assert!((&g - back).amax() <= 1e-12, "T_Re round trip failed at M = {m}, E = {e}");
        let prod = t.matrix() * t.inverse_matrix();
        assert!((prod - fddc::linalg::ComplexMatrix::identity(t.dim(), t.dim())).norm() <= 1e-12);
    }

    // steady-state relations hold at every bin to 1e-10
    let exp = steady_state_spectrum(
        &plant,
        grid10,
        &vec![ComplexVector::from_vec(vec![Complex64::ONE, Complex64::new(-0.5, 0.0)]); 10],
    )
    .unwrap();
    let xs = exp.state.as_ref().unwrap();
    let to_c = |m: &RealMatrix| m.map(|v| Complex64::new(v, 0.0));
    for k in 0..10 {
        let z = grid10.node(k);
        let x = xs.sample(k);
        let res = (x.map(|v| v * z) - to_c(&plant.a) * x - to_c(&plant.b) * exp.input.sample(k)).norm();
        assert!(res <= 1e-10 * (1.0 + x.norm()));
        let res = (exp.output.sample(k) - to_c(&plant.c) * x - to_c(&plant.d) * exp.input.sample(k)).norm();
        assert!(res <= 1e-10 * (1.0 + exp.output.sample(k).norm()));
    }

    // DFT against the direct double-loop sum to 1e-10
    let period = Trajectory::new(2, (0..grid10.period()).map(|_| random_vector(&mut rng, 2)).collect()).unwrap();
    let spec = per_period_dft(&period, grid10).unwrap();
    for k in 0..10 {
        let mut acc = ComplexVector::zeros(2);
        for (n, v) in period.samples().iter().enumerate() {
            let e = Complex64::from_polar(1.0, -grid10.frequency(k) * n as f64);
            for c in 0..2 {
                acc[c] += e * v[c];
            }
        }
        assert!((spec.sample(k) - &acc).norm() <= 1e-10 * acc.norm().max(1.0));
    }

    // CPE reduction consistency: the multi-experiment test at E = 1
    // agrees with the single-spectrum test on real data
    let inputs: Vec<_> = noisy.experiments().iter().map(|e| &e.input).collect();
    for order in [1usize, 4, 8] {
        let single = is_pe_freq(inputs[0], order).unwrap().achieved;
        let multi = is_cpe(&inputs[..1], order).unwrap().achieved;
        assert_eq!(single, multi);
    }

    println!("criterion 9 (property suites): PASS — zero tolerance violations");
}
