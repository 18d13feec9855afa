//! Small dense SDP solver for trace-maximization problems:
//!
//! ```text
//!     maximize    trace P
//!     subject to  S(P) = S0 + sum_k p_k S_k  >= 0   (PSD)
//!                 P = P' >= 0
//! ```
//!
//! where `p` collects the upper-triangular entries of the symmetric
//! decision matrix `P`. Solved by log-barrier path following with damped
//! Newton steps.
//!
//! The data-driven constraint block is structurally rank-deficient (its
//! range is confined to the row space of the data), so `S(P) >= 0` is
//! first compressed onto the joint range of `S0, S_1, ...`: with `V` an
//! orthonormal basis of that range, `S(P) >= 0` iff `V' S(P) V >= 0`, and
//! the reduced block admits interior points the full one never has.

use crate::error::{Error, Result};
use crate::linalg::{svd, RealMatrix, RealVector};

/// Indexing of the free entries of a symmetric `n x n` matrix: pairs
/// `(i, j)` with `i <= j`, row-major over the upper triangle.
pub fn sym_param_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            pairs.push((i, j));
        }
    }
    pairs
}

/// Assemble the symmetric matrix from its upper-triangular parameters.
pub fn sym_from_params(n: usize, params: &RealVector) -> RealMatrix {
    let mut out = RealMatrix::zeros(n, n);
    for (k, (i, j)) in sym_param_pairs(n).into_iter().enumerate() {
        out[(i, j)] = params[k];
        out[(j, i)] = params[k];
    }
    out
}

fn params_from_sym(p: &RealMatrix) -> RealVector {
    let n = p.nrows();
    let pairs = sym_param_pairs(n);
    RealVector::from_fn(pairs.len(), |k, _| p[(pairs[k].0, pairs[k].1)])
}

#[derive(Debug, Clone)]
pub struct SdpProblem {
    /// Side length of the decision matrix `P`.
    pub p_dim: usize,
    /// Constant term of the affine constraint block.
    pub s0: RealMatrix,
    /// One symmetric basis matrix per upper-triangular parameter of `P`,
    /// ordered like [`sym_param_pairs`].
    pub s_basis: Vec<RealMatrix>,
}

impl SdpProblem {
    pub fn new(p_dim: usize, s0: RealMatrix, s_basis: Vec<RealMatrix>) -> Result<Self> {
        let expect = p_dim * (p_dim + 1) / 2;
        if s_basis.len() != expect {
            return Err(Error::InvalidInput(format!(
                "need {expect} basis matrices for a {p_dim}-dim decision matrix, got {}",
                s_basis.len()
            )));
        }
        let dim = s0.nrows();
        if s0.ncols() != dim || s_basis.iter().any(|b| b.nrows() != dim || b.ncols() != dim) {
            return Err(Error::InvalidInput("constraint blocks must be square and same size".into()));
        }
        let scale = s0.amax().max(1.0);
        if (s0.transpose() - &s0).amax() > 1e-10 * scale {
            return Err(Error::InvalidInput("S0 must be symmetric".into()));
        }
        Ok(Self { p_dim, s0, s_basis })
    }

    /// `S(P)` in the original (uncompressed) coordinates.
    pub fn constraint_at(&self, p: &RealMatrix) -> RealMatrix {
        let params = params_from_sym(p);
        let mut s = self.s0.clone();
        for (k, b) in self.s_basis.iter().enumerate() {
            s += b * params[k];
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub p: RealMatrix,
    pub objective: f64,
    /// Total Newton steps across the path.
    pub iterations: usize,
    /// Final barrier duality-gap bound.
    pub gap: f64,
}

pub const DEFAULT_SDP_TOLERANCE: f64 = 1e-9;

struct Blocks {
    /// Reduced data block: `V' S(P) V` pieces.
    s0: RealMatrix,
    basis: Vec<RealMatrix>,
    p_dim: usize,
    pairs: Vec<(usize, usize)>,
    /// Diagonal shift applied to both blocks (phase-1 homotopy).
    shift: f64,
}

impl Blocks {
    fn eval(&self, params: &RealVector) -> (RealMatrix, RealMatrix) {
        let mut s = self.s0.clone();
        for (k, b) in self.basis.iter().enumerate() {
            s += b * params[k];
        }
        let mut p = sym_from_params(self.p_dim, params);
        if self.shift != 0.0 {
            for i in 0..s.nrows() {
                s[(i, i)] += self.shift;
            }
            for i in 0..self.p_dim {
                p[(i, i)] += self.shift;
            }
        }
        (s, p)
    }

    /// `P`-block derivative for parameter `k`.
    fn p_basis(&self, k: usize) -> RealMatrix {
        let (i, j) = self.pairs[k];
        let mut e = RealMatrix::zeros(self.p_dim, self.p_dim);
        e[(i, j)] = 1.0;
        e[(j, i)] = 1.0;
        e
    }
}

fn cholesky(m: &RealMatrix) -> Option<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    m.clone().cholesky()
}

/// Maximize `trace P`; `init` may carry a known strictly feasible start.
pub fn sdp_solve(problem: &SdpProblem, tolerance: Option<f64>, init: Option<&RealMatrix>) -> Result<SdpSolution> {
    let tol = tolerance.unwrap_or(DEFAULT_SDP_TOLERANCE);
    let np = problem.s_basis.len();
    let pairs = sym_param_pairs(problem.p_dim);

    // compress the data block onto the joint range of its pieces
    let stacked = {
        let dim = problem.s0.nrows();
        let mut st = RealMatrix::zeros(dim, dim * (np + 1));
        st.view_mut((0, 0), (dim, dim)).copy_from(&problem.s0);
        for (k, b) in problem.s_basis.iter().enumerate() {
            st.view_mut((0, dim * (k + 1)), (dim, dim)).copy_from(b);
        }
        st
    };
    let f = svd(&stacked)?;
    let r = f.rank(None, stacked.nrows(), stacked.ncols());
    if r == 0 {
        return Err(Error::Infeasible("constraint block vanishes; trace P is unbounded".into()));
    }
    let v = f.u.columns(0, r).into_owned();
    let reduce = |m: &RealMatrix| -> RealMatrix {
        let vm = v.transpose() * m * &v;
        (&vm + vm.transpose()) * 0.5
    };
    let blocks = Blocks {
        s0: reduce(&problem.s0),
        basis: problem.s_basis.iter().map(reduce).collect(),
        p_dim: problem.p_dim,
        pairs: pairs.clone(),
        shift: 0.0,
    };
    let nu = (r + problem.p_dim) as f64;

    // objective: maximize the trace, i.e. the diagonal parameters
    let c = RealVector::from_fn(np, |k, _| if pairs[k].0 == pairs[k].1 { 1.0 } else { 0.0 });

    let mut params = match init {
        Some(p0) if strictly_feasible(&blocks, &params_from_sym(p0)) => params_from_sym(p0),
        _ => phase_one(&blocks)?,
    };

    // path following on f_t = -t c'p - logdet S - logdet P
    let mut t = 1.0;
    let mut newton_steps = 0usize;
    let mut prev: Option<(f64, RealVector)> = None;
    let scale_guard = 1e12 * (problem.s0.amax() + 1.0);
    loop {
        newton_steps += center(&blocks, &c, t, &mut params, 60)?;
        if params.amax() > scale_guard {
            return Err(Error::NumericalFailure("iterates diverged; objective may be unbounded".into()));
        }
        let gap = nu / t;
        let obj_scale = c.dot(&params).abs().max(1.0);
        if gap <= tol * obj_scale {
            // one extrapolation against the previous center removes the
            // leading O(1/t) bias of the barrier path
            let refined = match &prev {
                Some((t_prev, p_prev)) if *t_prev < t => {
                    let ratio = t / t_prev;
                    let corr = (&params - p_prev) / (ratio - 1.0);
                    let candidate = &params + corr;
                    if feasible_enough(problem, &blocks, &candidate, tol) {
                        candidate
                    } else {
                        params.clone()
                    }
                }
                _ => params.clone(),
            };
            let p = sym_from_params(problem.p_dim, &refined);
            return Ok(SdpSolution { objective: p.trace(), p, iterations: newton_steps, gap });
        }
        prev = Some((t, params.clone()));
        t *= 10.0;
        if t > 1e18 {
            return Err(Error::MaxIterations(newton_steps));
        }
    }
}

fn strictly_feasible(blocks: &Blocks, params: &RealVector) -> bool {
    let (s, p) = blocks.eval(params);
    cholesky(&s).is_some() && (blocks.p_dim == 0 || cholesky(&p).is_some())
}

fn feasible_enough(problem: &SdpProblem, blocks: &Blocks, params: &RealVector, tol: f64) -> bool {
    let (s, p) = blocks.eval(params);
    let margin = |m: &RealMatrix| -> f64 {
        if m.nrows() == 0 {
            return 0.0;
        }
        m.clone().symmetric_eigenvalues().min()
    };
    let scale = problem.s0.amax().max(1.0);
    margin(&s) >= -tol * scale && margin(&p) >= -tol * scale
}

/// Damped-Newton centering of the barrier `-t c'p - logdet S - logdet P`.
/// Returns the number of Newton steps taken.
fn center(blocks: &Blocks, c: &RealVector, t: f64, params: &mut RealVector, max_steps: usize) -> Result<usize> {
    let np = params.len();
    for step in 0..max_steps {
        let (s, p) = blocks.eval(params);
        let chol_s = cholesky(&s).ok_or_else(|| Error::NumericalFailure("lost feasibility in centering".into()))?;
        let chol_p = cholesky(&p).ok_or_else(|| Error::NumericalFailure("lost feasibility in centering".into()))?;

        // grad_k = -t c_k - tr(S^-1 S_k) - tr(P^-1 P_k)
        let ys: Vec<RealMatrix> = blocks.basis.iter().map(|b| chol_s.solve(b)).collect();
        let yp: Vec<RealMatrix> = (0..np).map(|k| chol_p.solve(&blocks.p_basis(k))).collect();
        let grad = RealVector::from_fn(np, |k, _| -t * c[k] - ys[k].trace() - yp[k].trace());
        let mut hess = RealMatrix::zeros(np, np);
        for k in 0..np {
            for j in k..np {
                let mut acc = 0.0;
                for a in 0..ys[k].nrows() {
                    for b in 0..ys[k].ncols() {
                        acc += ys[k][(a, b)] * ys[j][(b, a)];
                    }
                }
                for a in 0..yp[k].nrows() {
                    for b in 0..yp[k].ncols() {
                        acc += yp[k][(a, b)] * yp[j][(b, a)];
                    }
                }
                hess[(k, j)] = acc;
                hess[(j, k)] = acc;
            }
        }
        for k in 0..np {
            hess[(k, k)] += 1e-14 * (1.0 + hess[(k, k)].abs());
        }
        let dir = hess
            .clone()
            .cholesky()
            .map(|ch| ch.solve(&(-&grad)))
            .or_else(|| hess.clone().lu().solve(&(-&grad)))
            .ok_or_else(|| Error::NumericalFailure("singular Newton system".into()))?;
        let decrement2 = -grad.dot(&dir);
        if decrement2 <= 2e-14 * (1.0 + t) {
            return Ok(step);
        }

        // backtracking: stay strictly feasible and decrease the barrier
        let f0 = barrier_value(blocks, c, t, params)
            .ok_or_else(|| Error::NumericalFailure("barrier undefined at current point".into()))?;
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial = &*params + &dir * alpha;
            if let Some(f) = barrier_value(blocks, c, t, &trial) {
                if f <= f0 - 0.25 * alpha * decrement2 {
                    *params = trial;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Ok(step);
        }
    }
    Ok(max_steps)
}

fn barrier_value(blocks: &Blocks, c: &RealVector, t: f64, params: &RealVector) -> Option<f64> {
    let (s, p) = blocks.eval(params);
    let ld_s = logdet(&s)?;
    let ld_p = logdet(&p)?;
    Some(-t * c.dot(params) - ld_s - ld_p)
}

fn logdet(m: &RealMatrix) -> Option<f64> {
    if m.nrows() == 0 {
        return Some(0.0);
    }
    let chol = cholesky(m)?;
    Some(2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>())
}

/// Find a strictly feasible point by shrinking a diagonal shift applied
/// to both blocks while recentering: a homotopy on
/// `S(p) + tI > 0`, `P(p) + tI > 0` with `t -> 0`.
fn phase_one(blocks: &Blocks) -> Result<RealVector> {
    let np = blocks.basis.len();
    let shifted = |extra: f64| -> Blocks {
        Blocks {
            s0: blocks.s0.clone(),
            basis: blocks.basis.clone(),
            p_dim: blocks.p_dim,
            pairs: blocks.pairs.clone(),
            shift: extra,
        }
    };
    let zero = RealVector::zeros(np);
    if strictly_feasible(blocks, &zero) {
        return Ok(zero);
    }
    let (s, p) = blocks.eval(&zero);
    let lam = s
        .clone()
        .symmetric_eigenvalues()
        .min()
        .min(if blocks.p_dim > 0 { p.clone().symmetric_eigenvalues().min() } else { 0.0 });
    let mut shift = 1.1 * (-lam).max(0.0) + 1.0;
    let mut params = zero;
    let c = RealVector::zeros(np);
    for _ in 0..200 {
        center(&shifted(shift), &c, 1.0, &mut params, 40)?;
        if strictly_feasible(blocks, &params) {
            return Ok(params);
        }
        // shrink the homotopy shift as fast as feasibility allows
        let mut next = shift * 0.25;
        if !strictly_feasible(&shifted(next), &params) {
            next = shift * 0.9;
            if !strictly_feasible(&shifted(next), &params) {
                return Err(Error::Infeasible(
                    "no strictly feasible point found (constraint set has empty interior)".into(),
                ));
            }
        }
        shift = next;
        if shift < 1e-14 {
            break;
        }
    }
    if strictly_feasible(blocks, &params) {
        Ok(params)
    } else {
        Err(Error::Infeasible("no strictly feasible point found (constraint set has empty interior)".into()))
    }
}
