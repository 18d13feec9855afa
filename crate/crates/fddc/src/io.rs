//! File formats: the spectra dataset JSON schema, trajectory CSV files
//! and result serialization helpers.
//!
//! Dataset JSON:
//!
//! ```json
//! {
//!   "M": 10,
//!   "frequencies": [0.0, 0.3141, ...],
//!   "experiments": [
//!     { "U": [[[re, im], ...], ...], "Y": [...], "X": [...] }
//!   ]
//! }
//! ```
//!
//! `U`/`Y`/`X` are `M`-length arrays of channel-length arrays of
//! `[re, im]` pairs; `X` is optional. Trajectory CSV files carry a header
//! `k,u1..u_nu,y1..y_ny` (the `y` block may be absent) and one row per
//! sample. Numeric CSV output uses 17 significant digits so values
//! re-ingest bit-faithfully.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::data::{Experiment, FrequencyGrid, SpectraCollection, Spectrum, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::{ComplexVector, RealMatrix};
use crate::plantlab::FrfEstimate;

#[derive(Debug, Serialize, Deserialize)]
pub struct DatasetFile {
    #[serde(rename = "M")]
    pub m: usize,
    pub frequencies: Vec<f64>,
    pub experiments: Vec<ExperimentFile>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ExperimentFile {
    #[serde(rename = "U")]
    pub u: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "Y")]
    pub y: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "X", skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<Vec<[f64; 2]>>>,
}

fn spectrum_to_file(s: &Spectrum) -> Vec<Vec<[f64; 2]>> {
    s.samples()
        .iter()
        .map(|v| v.iter().map(|c| [c.re, c.im]).collect())
        .collect()
}

fn spectrum_from_file(grid: FrequencyGrid, raw: &[Vec<[f64; 2]>]) -> Result<Spectrum> {
    let channels = raw
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::ConfigError("spectrum entry has no samples".into()))?;
    let samples: Vec<ComplexVector> = raw
        .iter()
        .map(|v| ComplexVector::from_iterator(v.len(), v.iter().map(|p| Complex64::new(p[0], p[1]))))
        .collect();
    Spectrum::new(grid, channels, samples)
}

pub fn dataset_to_json(spectra: &SpectraCollection) -> Result<String> {
    let grid = spectra.grid();
    let file = DatasetFile {
        m: grid.len(),
        frequencies: grid.frequencies(),
        experiments: spectra
            .experiments()
            .iter()
            .map(|e| ExperimentFile {
                u: spectrum_to_file(&e.input),
                y: spectrum_to_file(&e.output),
                x: e.state.as_ref().map(spectrum_to_file),
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn dataset_from_json(text: &str) -> Result<SpectraCollection> {
    let file: DatasetFile = serde_json::from_str(text)?;
    let grid = FrequencyGrid::new(file.m)?;
    if file.frequencies.len() != file.m {
        return Err(Error::ConfigError("frequencies array must have M entries".into()));
    }
    for (k, &f) in file.frequencies.iter().enumerate() {
        if (f - grid.frequency(k)).abs() > 1e-9 {
            return Err(Error::ConfigError(format!(
                "frequency {k} is {f}, expected pi*{k}/{} = {}",
                file.m,
                grid.frequency(k)
            )));
        }
    }
    let experiments = file
        .experiments
        .iter()
        .map(|e| {
            Ok(Experiment {
                input: spectrum_from_file(grid, &e.u)?,
                output: spectrum_from_file(grid, &e.y)?,
                state: e.x.as_ref().map(|x| spectrum_from_file(grid, x)).transpose()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SpectraCollection::new(experiments)
}

/// 17-significant-digit decimal form; round-trips through `f64` exactly.
pub fn full_precision(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write an input/output trajectory pair as `k,u1..u_nu,y1..y_ny`.
pub fn trajectory_pair_to_csv(u: &Trajectory, y: &Trajectory) -> Result<String> {
    if u.len() != y.len() || u.start_index() != y.start_index() {
        return Err(Error::InvalidInput("trajectories must be aligned to share a CSV file".into()));
    }
    let mut out = String::from("k");
    for c in 0..u.channel_count() {
        out.push_str(&format!(",u{}", c + 1));
    }
    for c in 0..y.channel_count() {
        out.push_str(&format!(",y{}", c + 1));
    }
    out.push('\n');
    for (i, (us, ys)) in u.samples().iter().zip(y.samples()).enumerate() {
        out.push_str(&(u.start_index() + i as i64).to_string());
        for v in us.iter().chain(ys.iter()) {
            out.push(',');
            out.push_str(&full_precision(*v));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Write a single trajectory with a caller-chosen channel prefix
/// (`u` or `y`).
pub fn trajectory_to_csv(t: &Trajectory, prefix: &str) -> String {
    let mut out = String::from("k");
    for c in 0..t.channel_count() {
        out.push_str(&format!(",{}{}", prefix, c + 1));
    }
    out.push('\n');
    for (i, s) in t.samples().iter().enumerate() {
        out.push_str(&(t.start_index() + i as i64).to_string());
        for v in s.iter() {
            out.push(',');
            out.push_str(&full_precision(*v));
        }
        out.push('\n');
    }
    out
}

/// Parse a trajectory CSV with header `k,u1..u_nu[,y1..y_ny]`; returns
/// the input block and, when the header carries `y` columns, the output
/// block.
pub fn trajectory_pair_from_csv(text: &str) -> Result<(Trajectory, Option<Trajectory>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::ConfigError("empty CSV".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.first() != Some(&"k") {
        return Err(Error::ConfigError("CSV header must start with k".into()));
    }
    let n_u = cols.iter().filter(|c| c.starts_with('u')).count();
    let n_y = cols.iter().filter(|c| c.starts_with('y')).count();
    if n_u == 0 || cols.len() != 1 + n_u + n_y {
        return Err(Error::ConfigError("CSV header must be k,u1..u_nu[,y1..y_ny]".into()));
    }
    let mut start: Option<i64> = None;
    let mut us = Vec::new();
    let mut ys = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(Error::ConfigError(format!("CSV row has {} fields, expected {}", fields.len(), cols.len())));
        }
        let k: i64 = fields[0]
            .parse()
            .map_err(|_| Error::ConfigError(format!("bad sample index {}", fields[0])))?;
        if start.is_none() {
            start = Some(k);
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| Error::ConfigError(format!("bad numeric field {s}")))
        };
        us.push(DVector::from_iterator(
            n_u,
            fields[1..1 + n_u].iter().map(|s| parse(s)).collect::<Result<Vec<_>>>()?,
        ));
        if n_y > 0 {
            ys.push(DVector::from_iterator(
                n_y,
                fields[1 + n_u..].iter().map(|s| parse(s)).collect::<Result<Vec<_>>>()?,
            ));
        }
    }
    let start = start.ok_or_else(|| Error::ConfigError("CSV has no data rows".into()))?;
    let u = Trajectory::with_start(n_u, start, us)?;
    let y = if n_y > 0 { Some(Trajectory::with_start(n_y, start, ys)?) } else { None };
    Ok((u, y))
}

/// Parse a CSV holding one signal (`k,<prefix>1..<prefix>n` with any
/// single channel prefix).
pub fn single_trajectory_from_csv(text: &str) -> Result<Trajectory> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::ConfigError("empty CSV".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.first() != Some(&"k") || cols.len() < 2 {
        return Err(Error::ConfigError("CSV header must be k,<name>1..<name>n".into()));
    }
    let channels = cols.len() - 1;
    let mut samples = Vec::new();
    let mut start = None;
    for line in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(Error::ConfigError("CSV row width mismatch".into()));
        }
        let k: i64 = fields[0]
            .parse()
            .map_err(|_| Error::ConfigError(format!("bad sample index {}", fields[0])))?;
        if start.is_none() {
            start = Some(k);
        }
        let row = fields[1..]
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| Error::ConfigError(format!("bad numeric field {s}"))))
            .collect::<Result<Vec<f64>>>()?;
        samples.push(DVector::from_vec(row));
    }
    Trajectory::with_start(channels, start.ok_or_else(|| Error::ConfigError("CSV has no data rows".into()))?, samples)
}

/// Closed-loop run CSV: `k,u...,y...,J_cumulative`.
pub fn closed_loop_to_csv(u: &Trajectory, y: &Trajectory, cumulative_cost: &[f64]) -> Result<String> {
    if u.len() != y.len() || u.len() != cumulative_cost.len() {
        return Err(Error::InvalidInput("closed-loop records must be aligned".into()));
    }
    let mut out = String::from("k");
    for c in 0..u.channel_count() {
        out.push_str(&format!(",u{}", c + 1));
    }
    for c in 0..y.channel_count() {
        out.push_str(&format!(",y{}", c + 1));
    }
    out.push_str(",J_cumulative\n");
    for (i, cost) in cumulative_cost.iter().enumerate() {
        out.push_str(&(u.start_index() + i as i64).to_string());
        for v in u.sample(i).iter().chain(y.sample(i).iter()) {
            out.push(',');
            out.push_str(&full_precision(*v));
        }
        out.push(',');
        out.push_str(&full_precision(*cost));
        out.push('\n');
    }
    Ok(out)
}

/// FRF estimate JSON: flat arrays for single-output estimates, per-channel
/// arrays otherwise.
pub fn frf_to_json(frf: &FrfEstimate) -> Result<String> {
    #[derive(Serialize)]
    struct Flat {
        frequency: Vec<f64>,
        #[serde(rename = "H_re")]
        h_re: Vec<f64>,
        #[serde(rename = "H_im")]
        h_im: Vec<f64>,
        variance: Vec<f64>,
        periods: usize,
    }
    #[derive(Serialize)]
    struct Nested {
        frequency: Vec<f64>,
        #[serde(rename = "H_re")]
        h_re: Vec<Vec<f64>>,
        #[serde(rename = "H_im")]
        h_im: Vec<Vec<f64>>,
        variance: Vec<Vec<f64>>,
        periods: usize,
    }
    let freqs = frf.grid.frequencies();
    let ny = frf.mean.first().map(|m| m.len()).unwrap_or(0);
    let text = if ny == 1 {
        serde_json::to_string_pretty(&Flat {
            frequency: freqs,
            h_re: frf.mean.iter().map(|m| m[0].re).collect(),
            h_im: frf.mean.iter().map(|m| m[0].im).collect(),
            variance: frf.variance.iter().map(|v| v[0]).collect(),
            periods: frf.periods,
        })?
    } else {
        serde_json::to_string_pretty(&Nested {
            frequency: freqs,
            h_re: frf.mean.iter().map(|m| m.iter().map(|c| c.re).collect()).collect(),
            h_im: frf.mean.iter().map(|m| m.iter().map(|c| c.im).collect()).collect(),
            variance: frf.variance.iter().map(|v| v.iter().copied().collect()).collect(),
            periods: frf.periods,
        })?
    };
    Ok(text)
}

pub fn matrix_to_rows(m: &RealMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<RealMatrix> {
    let r = rows.len();
    let c = rows.first().map(Vec::len).unwrap_or(0);
    if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(Error::ConfigError("matrix rows must be nonempty and rectangular".into()));
    }
    Ok(RealMatrix::from_fn(r, c, |i, j| rows[i][j]))
}
