//! Data-driven LQR against the printed reference matrices and an
//! independent DARE fixed-point oracle.

mod common;

use common::*;
use fddc::control::{dd_lqr, sdp_solve, LqrWeights};
use fddc::linalg::RealMatrix;
use fddc::rng::SeededRng;

#[test]
fn batch_reactor_lqr_matches_printed_and_dare() {
    let model = batch_reactor_full_state();
    let data = unit_direction_dataset(&model, 10, true);
    let weights = LqrWeights::identity(4, 2);
    let lqr = dd_lqr(&data, &weights, Some(1e-10)).unwrap();

    // reference matrices are printed with four decimals; match them to
    // their quantization
    assert!((&lqr.cost_matrix - printed_lqr_p()).amax() < 1e-4, "P = {}", lqr.cost_matrix);
    assert!((&lqr.gain - printed_lqr_k()).amax() < 1e-4, "K = {}", lqr.gain);

    let (p_bar, k_bar) = dare_oracle(&model.a, &model.b, &weights.q, &weights.r);
    let p_err = (&lqr.cost_matrix - &p_bar).norm() / p_bar.norm();
    let k_err = (&lqr.gain - &k_bar).norm() / k_bar.norm();
    println!("lqr relative errors: |P - Pbar| = {p_err:.3e}, |K - Kbar| = {k_err:.3e}");
    assert!(p_err <= 1e-6, "P error {p_err:.3e}");
    assert!(k_err <= 1e-6, "K error {k_err:.3e}");

    // closed loop is Schur
    let rho = spectral_radius(&(&model.a + &model.b * &lqr.gain));
    assert!(rho < 1.0, "spectral radius {rho}");
}

#[test]
fn random_stabilizable_systems_match_dare() {
    let mut rng = SeededRng::new(2024);
    let mut done = 0;
    let mut attempts = 0;
    while done < 20 && attempts < 200 {
        attempts += 1;
        let nx = 2 + (attempts % 4); // 2..=5
        let nu = 1 + (attempts % 2);
        let a = RealMatrix::from_fn(nx, nx, |_, _| rng.standard_normal() * 0.6);
        let b = RealMatrix::from_fn(nx, nu, |_, _| rng.standard_normal());
        // keep only plants the oracle itself can stabilize
        let q = RealMatrix::identity(nx, nx);
        let r = RealMatrix::identity(nu, nu);
        let (p_bar, k_bar) = dare_oracle(&a, &b, &q, &r);
        if spectral_radius(&(&a + &b * &k_bar)) >= 0.999 {
            continue;
        }
        let model = fddc::plantlab::StateSpaceModel::new(
            a.clone(),
            b.clone(),
            RealMatrix::identity(nx, nx),
            RealMatrix::zeros(nx, nu),
        )
        .unwrap();
        // enough frequencies for CPE of order nx + 1
        let m = nx + 2;
        let data = unit_direction_dataset(&model, m, true);
        let lqr = dd_lqr(&data, &LqrWeights::new(q, r).unwrap(), Some(1e-10)).unwrap();
        let p_err = (&lqr.cost_matrix - &p_bar).norm() / p_bar.norm().max(1.0);
        let k_err = (&lqr.gain - &k_bar).norm() / k_bar.norm().max(1.0);
        assert!(p_err <= 1e-6, "attempt {attempts}: P error {p_err:.3e}");
        assert!(k_err <= 1e-6, "attempt {attempts}: K error {k_err:.3e}");
        done += 1;
    }
    assert_eq!(done, 20, "not enough stabilizable samples");
}

#[test]
fn sdp_optimum_is_unique_across_starts() {
    let model = batch_reactor_full_state();
    let data = unit_direction_dataset(&model, 10, true);
    let weights = LqrWeights::identity(4, 2);
    // two solves with different strictly feasible initializations must
    // agree: the trace-max SDP has a unique optimizer
    let lqr_a = dd_lqr(&data, &weights, Some(1e-10)).unwrap();
    // second route: raw SDP from the cold start (phase-1)
    let f2 = fddc::data::build_data_matrix(2, &data, &[fddc::data::Role::State]).unwrap();
    let f1 = fddc::data::build_data_matrix(1, &data, &[fddc::data::Role::Input]).unwrap();
    let x0 = f2.real_form().rows(0, 4).into_owned();
    let x1 = f2.real_form().rows(4, 4).into_owned();
    let u = f1.real_form().clone();
    let s0 = x0.transpose() * &weights.q * &x0 + u.transpose() * &weights.r * &u;
    let pairs = fddc::control::sdp::sym_param_pairs(4);
    let basis: Vec<RealMatrix> = pairs
        .iter()
        .map(|&(i, j)| {
            let mut e = RealMatrix::zeros(4, 4);
            e[(i, j)] = 1.0;
            e[(j, i)] = 1.0;
            let b = x1.transpose() * &e * &x1 - x0.transpose() * &e * &x0;
            (&b + b.transpose()) * 0.5
        })
        .collect();
    let problem = fddc::control::SdpProblem::new(4, s0, basis).unwrap();
    let cold = sdp_solve(&problem, Some(1e-10), None).unwrap();
    assert!((&cold.p - &lqr_a.cost_matrix).amax() <= 1e-6, "gap {}", (&cold.p - &lqr_a.cost_matrix).amax());
}
