//! Persistence-of-excitation tests in time and frequency domain.
//!
//! A sequence is persistently exciting of order `L` when the associated
//! data matrix (Hankel in time domain, conjugate-augmented `F_L` in
//! frequency domain) has full row rank. The collective variant pools
//! several experiments' columns, none of which need be individually PE.

use crate::data::{cal_f_matrix, hankel, Spectrum, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::{svd, RealMatrix};

/// Outcome of a PE test, including how close the verdict was.
#[derive(Debug, Clone, PartialEq)]
pub struct PeReport {
    pub requested_order: usize,
    pub achieved: bool,
    pub rank_found: usize,
    pub rank_required: usize,
    /// The `rank_required`-th singular value: the margin by which the row
    /// space clears (or misses) full rank. Noisy FRF data makes the binary
    /// verdict brittle, so borderline cases are visible here.
    pub singular_value_margin: f64,
}

fn full_row_rank_report(matrix: &RealMatrix, requested_order: usize, tolerance: Option<f64>) -> Result<PeReport> {
    let rank_required = matrix.nrows();
    let f = svd(matrix)?;
    let rank_found = f.rank(tolerance, matrix.nrows(), matrix.ncols());
    let singular_value_margin = if rank_required == 0 || rank_required > f.singular_values.len() {
        0.0
    } else {
        f.singular_values[rank_required - 1]
    };
    Ok(PeReport {
        requested_order,
        achieved: rank_found == rank_required,
        rank_found,
        rank_required,
        singular_value_margin,
    })
}

/// Time-domain PE of order `L`: `H_L(v)` has full row rank `n_v * L`.
pub fn is_pe_time(traj: &Trajectory, order: usize) -> Result<PeReport> {
    is_pe_time_with_tolerance(traj, order, None)
}

/// [`is_pe_time`] with an explicit numerical-rank tolerance instead of
/// the default `max(rows, cols) * sigma_max * eps`.
pub fn is_pe_time_with_tolerance(traj: &Trajectory, order: usize, tolerance: Option<f64>) -> Result<PeReport> {
    let h = hankel(order, traj)?;
    full_row_rank_report(&h, order, tolerance)
}

/// Frequency-domain PE of order `L`: `[F_L(V_{[0,M-1]}) F_L*(V_{[1,M-1]})]`
/// has full row rank `n_v * L`, tested on the equivalent real form.
pub fn is_pe_freq(spectrum: &Spectrum, order: usize) -> Result<PeReport> {
    is_cpe_with_tolerance(&[spectrum], order, None)
}

/// Collective PE over `E` experiments of order `L <= E(2M-1)`.
pub fn is_cpe(spectra: &[&Spectrum], order: usize) -> Result<PeReport> {
    is_cpe_with_tolerance(spectra, order, None)
}

/// [`is_cpe`] with an explicit numerical-rank tolerance; noisy FRF data
/// sometimes needs a looser cut than the machine-epsilon default.
pub fn is_cpe_with_tolerance(spectra: &[&Spectrum], order: usize, tolerance: Option<f64>) -> Result<PeReport> {
    let first = spectra
        .first()
        .ok_or_else(|| Error::InvalidInput("need at least one spectrum".into()))?;
    let m = first.grid().len();
    let e = spectra.len();
    let max_order = e * (2 * m - 1);
    if order == 0 || order > max_order {
        // structurally impossible: the matrix has n_v*L rows but only
        // E(2M-1) columns, so this is almost always a caller bug
        return Err(Error::InvalidInput(format!(
            "PE order {order} cannot hold with E(2M-1) = {max_order} data columns"
        )));
    }
    let real = real_augmented(order, spectra)?;
    full_row_rank_report(&real, order, tolerance)
}

/// Real form `[Re F_L(V_{[0,M-1]}) | Im F_L(V_{[1,M-1]})]` of the
/// conjugate-augmented matrix (its `T_Re` image), rank-equivalent to the
/// complex test.
fn real_augmented(depth: usize, spectra: &[&Spectrum]) -> Result<RealMatrix> {
    let pos = cal_f_matrix(depth, spectra, 0)?;
    let m = spectra[0].grid().len();
    let rows = pos.nrows();
    if m == 1 {
        return Ok(pos.map(|v| v.re));
    }
    let tail = cal_f_matrix(depth, spectra, 1)?;
    let mut out = RealMatrix::zeros(rows, pos.ncols() + tail.ncols());
    for j in 0..pos.ncols() {
        for i in 0..rows {
            out[(i, j)] = pos[(i, j)].re;
        }
    }
    for j in 0..tail.ncols() {
        for i in 0..rows {
            out[(i, pos.ncols() + j)] = tail[(i, j)].im;
        }
    }
    Ok(out)
}
