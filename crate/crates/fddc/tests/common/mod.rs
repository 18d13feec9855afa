//! Shared fixtures and independent oracles for the integration suites.
//!
//! Everything here is deliberately written against the model description
//! only (no calls into the solver paths it checks).

#![allow(dead_code)]

use fddc::data::{Experiment, FrequencyGrid, SpectraCollection};
use fddc::linalg::{ComplexVector, RealMatrix, RealVector};
use fddc::plantlab::{steady_state_spectrum, StateSpaceModel, TransferFunction};
use num_complex::Complex64;

/// Unstable batch reactor (two inputs, two outputs, four states):
/// zero-order-hold discretization at 0.5 s of the classic continuous-time
/// benchmark, at full precision (rounded displays of these matrices are
/// what reference texts print).
pub fn batch_reactor() -> StateSpaceModel {
    StateSpaceModel::new(
        RealMatrix::from_row_slice(
            4,
            4,
            &[
                2.6221449362450215, 0.3196944775151266, 1.8334994798998983, -1.0663965621468263, //
                -0.23810062283010552, 0.18719409598801542, -0.1360883413342236, 0.20172089121583417, //
                0.16117234108552636, 0.7887551993896147, 0.28586342217693517, 0.606420927128842, //
                -0.10351669680967701, 0.7641063025677479, 0.08855542389127609, 0.7360080910498651,
            ],
        ),
        RealMatrix::from_row_slice(
            4,
            2,
            &[
                0.46535807532361734, -1.5494888959495399, //
                1.313787015248397, 0.08506104316320595, //
                2.0548979862811896, -0.6729610077362757, //
                2.0227249306521835, -0.15974377347769125,
            ],
        ),
        RealMatrix::from_row_slice(2, 4, &[1.0, 0.0, 1.0, -1.0, 0.0, 1.0, 0.0, 0.0]),
        RealMatrix::zeros(2, 2),
    )
    .unwrap()
}

/// Batch reactor with full state measurements (`C = I`, `D = 0`).
pub fn batch_reactor_full_state() -> StateSpaceModel {
    let base = batch_reactor();
    StateSpaceModel::new(base.a.clone(), base.b.clone(), RealMatrix::identity(4, 4), RealMatrix::zeros(4, 2)).unwrap()
}

/// Unstable SISO plant of the closed-loop case study:
/// `H(z) = (0.1164 z + 0.1071) / (z^2 - 1.891 z + 0.7788)`.
pub fn case_study_plant_tf() -> TransferFunction {
    TransferFunction::siso(vec![0.1164, 0.1071], vec![1.0, -1.891, 0.7788]).unwrap()
}

/// Its stabilizing controller `C(z) = (6 z - 5.135) / (z - 0.1353)`.
pub fn case_study_controller_tf() -> TransferFunction {
    TransferFunction::siso(vec![6.0, -5.135], vec![1.0, -0.1353]).unwrap()
}

/// Stabilizing MIMO controller used to collect noisy batch-reactor data:
/// cross-coupled integral action, first input fed by the second output
/// through `(2z-1)/(1.84(z-1))` and the second input by the first output
/// through `(-5z+1)/(1.84(z-1))`. This pairing (and only this one) makes
/// the `u = d - C(z) y` loop Schur (spectral radius 0.927).
pub fn batch_reactor_controller_tf() -> TransferFunction {
    use fddc::plantlab::RationalSiso;
    let den = vec![1.84, -1.84];
    TransferFunction::new(vec![
        vec![RationalSiso::new(vec![0.0], den.clone()).unwrap(), RationalSiso::new(vec![2.0, -1.0], den.clone()).unwrap()],
        vec![RationalSiso::new(vec![-5.0, 1.0], den.clone()).unwrap(), RationalSiso::new(vec![0.0], den).unwrap()],
    ])
    .unwrap()
}

/// Noise-free unit-direction dataset: experiment `e` excites input
/// channel `e` across all `M` bins.
pub fn unit_direction_dataset(model: &StateSpaceModel, m: usize, keep_states: bool) -> SpectraCollection {
    let grid = FrequencyGrid::new(m).unwrap();
    let n_u = model.input_dim();
    let experiments = (0..n_u)
        .map(|e| {
            let dir = ComplexVector::from_fn(n_u, |i, _| if i == e { Complex64::ONE } else { Complex64::ZERO });
            let mut exp = steady_state_spectrum(model, grid, &vec![dir; m]).unwrap();
            if !keep_states {
                exp.state = None;
            }
            exp
        })
        .collect::<Vec<Experiment>>();
    SpectraCollection::new(experiments).unwrap()
}

/// Observability matrix oracle: rows `C, CA, ..., CA^{L-1}` built by
/// explicit row accumulation.
pub fn observability_oracle(model: &StateSpaceModel, depth: usize) -> RealMatrix {
    let ny = model.output_dim();
    let nx = model.state_dim();
    let mut rows = RealMatrix::zeros(ny * depth, nx);
    let mut power = RealMatrix::identity(nx, nx);
    for i in 0..depth {
        rows.view_mut((i * ny, 0), (ny, nx)).copy_from(&(&model.c * &power));
        power = &model.a * power;
    }
    rows
}

/// Forced-response (block-Toeplitz) oracle with Markov parameters
/// `D, CB, CAB, ...`.
pub fn toeplitz_oracle(model: &StateSpaceModel, depth: usize) -> RealMatrix {
    let ny = model.output_dim();
    let nu = model.input_dim();
    let mut out = RealMatrix::zeros(ny * depth, nu * depth);
    for i in 0..depth {
        for j in 0..=i {
            let block = if i == j {
                model.d.clone()
            } else {
                let mut power = RealMatrix::identity(model.state_dim(), model.state_dim());
                for _ in 0..(i - j - 1) {
                    power = &model.a * power;
                }
                &model.c * power * &model.b
            };
            out.view_mut((i * ny, j * nu), (ny, nu)).copy_from(&block);
        }
    }
    out
}

/// DARE fixed-point oracle: iterate
/// `P <- A'PA - A'PB (R + B'PB)^{-1} B'PA + Q` from `P = Q` until the
/// update falls below `1e-12` (relative Frobenius).
pub fn dare_oracle(a: &RealMatrix, b: &RealMatrix, q: &RealMatrix, r: &RealMatrix) -> (RealMatrix, RealMatrix) {
    let mut p = q.clone();
    for _ in 0..200_000 {
        let rb = r + b.transpose() * &p * b;
        let gain = rb.clone().lu().solve(&(b.transpose() * &p * a)).expect("R + B'PB invertible");
        let next = a.transpose() * &p * a - a.transpose() * &p * b * &gain + q;
        let delta = (&next - &p).norm();
        let done = delta <= 1e-12 * p.norm().max(1.0);
        p = next;
        if done {
            break;
        }
    }
    let rb = r + b.transpose() * &p * b;
    let gain = -(rb.lu().solve(&(b.transpose() * &p * a)).expect("R + B'PB invertible"));
    (p, gain)
}

/// `P` printed for the batch-reactor LQR example.
pub fn printed_lqr_p() -> RealMatrix {
    RealMatrix::from_row_slice(
        4,
        4,
        &[
            3.6042, 0.0490, 1.7622, -1.3063, //
            0.0490, 1.1700, 0.0724, 0.1416, //
            1.7622, 0.0724, 2.2018, -0.8446, //
            -1.3063, 0.1416, -0.8446, 1.8234,
        ],
    )
}

/// `K` printed for the batch-reactor LQR example.
pub fn printed_lqr_k() -> RealMatrix {
    RealMatrix::from_row_slice(
        2,
        4,
        &[
            0.1626, -0.2920, 0.0495, -0.3284, //
            1.4183, 0.1155, 0.9841, -0.6247,
        ],
    )
}

/// Spectral radius via complex eigenvalues.
pub fn spectral_radius(m: &RealMatrix) -> f64 {
    m.complex_eigenvalues().iter().map(|l| l.norm()).fold(0.0, f64::max)
}

/// Random state helper.
pub fn random_vector(rng: &mut fddc::rng::SeededRng, n: usize) -> RealVector {
    RealVector::from_fn(n, |_, _| rng.standard_normal())
}
