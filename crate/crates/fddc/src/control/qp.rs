//! Dense convex QP solver: infeasible-start Mehrotra predictor-corrector.
//!
//! Canonical form:
//!
//! ```text
//!     minimize    1/2 x' P x + q' x
//!     subject to  A x = b
//!                 lo <= C x <= hi     (either side may be infinite)
//! ```
//!
//! `P` must be symmetric positive semidefinite; the receding-horizon
//! problems built on top are exactly of this shape (quadratic stage cost
//! plus 1-norm epigraph variables with no curvature).

use crate::error::{Error, Result};
use crate::linalg::{RealMatrix, RealVector};

#[derive(Debug, Clone)]
pub struct QpProblem {
    pub quadratic: RealMatrix,
    pub linear: RealVector,
    pub eq_matrix: RealMatrix,
    pub eq_rhs: RealVector,
    pub ineq_matrix: RealMatrix,
    pub ineq_lower: RealVector,
    pub ineq_upper: RealVector,
}

impl QpProblem {
    /// Validating constructor: dimension consistency, symmetry, PSD check
    /// (smallest eigenvalue >= -1e-10 relative) and nonempty boxes.
    pub fn new(
        quadratic: RealMatrix,
        linear: RealVector,
        eq_matrix: RealMatrix,
        eq_rhs: RealVector,
        ineq_matrix: RealMatrix,
        ineq_lower: RealVector,
        ineq_upper: RealVector,
    ) -> Result<Self> {
        let p = Self::new_trusted(quadratic, linear, eq_matrix, eq_rhs, ineq_matrix, ineq_lower, ineq_upper);
        p.validate()?;
        Ok(p)
    }

    /// Skip the eigenvalue check; for hot paths that rebuild a problem
    /// whose validated structure does not change.
    pub(crate) fn new_trusted(
        quadratic: RealMatrix,
        linear: RealVector,
        eq_matrix: RealMatrix,
        eq_rhs: RealVector,
        ineq_matrix: RealMatrix,
        ineq_lower: RealVector,
        ineq_upper: RealVector,
    ) -> Self {
        Self { quadratic, linear, eq_matrix, eq_rhs, ineq_matrix, ineq_lower, ineq_upper }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.linear.len();
        if self.quadratic.nrows() != n || self.quadratic.ncols() != n {
            return Err(Error::InvalidInput("quadratic term must be n x n".into()));
        }
        if self.eq_matrix.ncols() != n && self.eq_matrix.nrows() > 0 {
            return Err(Error::InvalidInput("equality matrix column mismatch".into()));
        }
        if self.eq_matrix.nrows() != self.eq_rhs.len() {
            return Err(Error::InvalidInput("equality rhs length mismatch".into()));
        }
        if self.ineq_matrix.ncols() != n && self.ineq_matrix.nrows() > 0 {
            return Err(Error::InvalidInput("inequality matrix column mismatch".into()));
        }
        if self.ineq_matrix.nrows() != self.ineq_lower.len() || self.ineq_matrix.nrows() != self.ineq_upper.len() {
            return Err(Error::InvalidInput("inequality bound length mismatch".into()));
        }
        for i in 0..self.ineq_lower.len() {
            if self.ineq_lower[i] > self.ineq_upper[i] {
                return Err(Error::InvalidInput(format!("empty box on inequality row {i}")));
            }
        }
        let scale = self.quadratic.amax().max(1.0);
        if (self.quadratic.transpose() - &self.quadratic).amax() > 1e-12 * scale {
            return Err(Error::InvalidInput("quadratic term must be symmetric".into()));
        }
        if n > 0 {
            let eig = self.quadratic.clone().symmetric_eigenvalues();
            let min = eig.min();
            if min < -1e-10 * scale {
                return Err(Error::InvalidInput(format!(
                    "quadratic term is not positive semidefinite (min eigenvalue {min:.3e})"
                )));
            }
        }
        Ok(())
    }

    pub fn var_count(&self) -> usize {
        self.linear.len()
    }

    pub fn objective(&self, x: &RealVector) -> f64 {
        0.5 * (x.transpose() * &self.quadratic * x)[(0, 0)] + self.linear.dot(x)
    }
}

/// KKT residuals at the returned point (infinity norms; complementarity
/// is `max_i s_i z_i`).
#[derive(Debug, Clone, Copy, Default)]
pub struct KktResiduals {
    pub stationarity: f64,
    pub equality: f64,
    pub inequality: f64,
    pub complementarity: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.stationarity
            .max(self.equality)
            .max(self.inequality)
            .max(self.complementarity)
    }
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub x: RealVector,
    pub objective: f64,
    pub iterations: usize,
    pub residuals: KktResiduals,
    /// Multipliers of the equality constraints.
    pub eq_duals: RealVector,
}

pub const DEFAULT_QP_TOLERANCE: f64 = 1e-8;

struct OneSided {
    g: RealMatrix,
    h: RealVector,
}

/// Expand two-sided rows into `G x <= h`, dropping infinite bounds.
fn one_sided(p: &QpProblem) -> OneSided {
    let n = p.var_count();
    let mut rows: Vec<RealVector> = Vec::new();
    let mut h = Vec::new();
    for i in 0..p.ineq_matrix.nrows() {
        let row = p.ineq_matrix.row(i).transpose();
        if p.ineq_upper[i].is_finite() {
            rows.push(row.clone());
            h.push(p.ineq_upper[i]);
        }
        if p.ineq_lower[i].is_finite() {
            rows.push(-&row);
            h.push(-p.ineq_lower[i]);
        }
    }
    let g = if rows.is_empty() {
        RealMatrix::zeros(0, n)
    } else {
        RealMatrix::from_rows(&rows.iter().map(|r| r.transpose()).collect::<Vec<_>>())
    };
    OneSided { g, h: RealVector::from_vec(h) }
}

/// Solve a purely equality-constrained QP through its KKT system.
fn solve_equality_qp(p: &QpProblem, tolerance: f64) -> Result<QpSolution> {
    let n = p.var_count();
    let me = p.eq_matrix.nrows();
    let reg = 1e-12 * (p.quadratic.amax() + 1.0);
    let mut kkt = RealMatrix::zeros(n + me, n + me);
    kkt.view_mut((0, 0), (n, n)).copy_from(&p.quadratic);
    for i in 0..n {
        kkt[(i, i)] += reg;
    }
    if me > 0 {
        kkt.view_mut((0, n), (n, me)).copy_from(&p.eq_matrix.transpose());
        kkt.view_mut((n, 0), (me, n)).copy_from(&p.eq_matrix);
        for i in 0..me {
            kkt[(n + i, n + i)] = -reg;
        }
    }
    let mut rhs = RealVector::zeros(n + me);
    rhs.rows_mut(0, n).copy_from(&(-&p.linear));
    if me > 0 {
        rhs.rows_mut(n, me).copy_from(&p.eq_rhs);
    }
    let lu = kkt.clone().lu();
    let mut sol = lu.solve(&rhs).ok_or_else(|| Error::NumericalFailure("singular KKT system".into()))?;
    // one refinement pass against the unregularized system
    let resid = &rhs - &kkt * &sol;
    if let Some(corr) = lu.solve(&resid) {
        sol += corr;
    }
    let x = sol.rows(0, n).into_owned();
    let y = sol.rows(n, me).into_owned();
    let stationarity = (&p.quadratic * &x + &p.linear + p.eq_matrix.transpose() * &y).amax();
    let equality = if me > 0 { (&p.eq_matrix * &x - &p.eq_rhs).amax() } else { 0.0 };
    let scale = p.eq_rhs.amax().max(p.linear.amax()).max(1.0);
    if equality > tolerance.max(1e-8) * scale {
        return Err(Error::Infeasible("equality constraints are inconsistent".into()));
    }
    Ok(QpSolution {
        objective: p.objective(&x),
        x,
        iterations: 1,
        residuals: KktResiduals { stationarity, equality, inequality: 0.0, complementarity: 0.0 },
        eq_duals: y,
    })
}

/// Ruiz equilibration of the one-sided QP data plus cost normalization.
/// Returns diagonal scalings (variables, equality rows, inequality rows)
/// and the cost factor.
struct Scaling {
    d: RealVector,
    e: RealVector,
    f: RealVector,
    cost: f64,
}

fn equilibrate(
    pq: &mut RealMatrix,
    q: &mut RealVector,
    a: &mut RealMatrix,
    b: &mut RealVector,
    g: &mut RealMatrix,
    h: &mut RealVector,
) -> Scaling {
    let n = q.len();
    let me = b.len();
    let mi = h.len();
    let mut d = RealVector::from_element(n, 1.0);
    let mut e = RealVector::from_element(me, 1.0);
    let mut f = RealVector::from_element(mi, 1.0);
    for _ in 0..10 {
        for j in 0..n {
            let mut m = 0.0f64;
            for i in 0..n {
                m = m.max(pq[(i, j)].abs());
            }
            for i in 0..me {
                m = m.max(a[(i, j)].abs());
            }
            for i in 0..mi {
                m = m.max(g[(i, j)].abs());
            }
            if m > 0.0 {
                let s = 1.0 / m.sqrt();
                let s = s.clamp(1e-6, 1e6);
                d[j] *= s;
                for i in 0..n {
                    pq[(i, j)] *= s;
                    pq[(j, i)] *= s;
                }
                q[j] *= s;
                for i in 0..me {
                    a[(i, j)] *= s;
                }
                for i in 0..mi {
                    g[(i, j)] *= s;
                }
            }
        }
        for i in 0..me {
            let m = a.row(i).amax();
            if m > 0.0 {
                let s = (1.0 / m.sqrt()).clamp(1e-6, 1e6);
                e[i] *= s;
                for j in 0..n {
                    a[(i, j)] *= s;
                }
                b[i] *= s;
            }
        }
        for i in 0..mi {
            let m = g.row(i).amax();
            if m > 0.0 {
                let s = (1.0 / m.sqrt()).clamp(1e-6, 1e6);
                f[i] *= s;
                for j in 0..n {
                    g[(i, j)] *= s;
                }
                h[i] *= s;
            }
        }
    }
    let cost = 1.0 / q.amax().max(pq.amax()).max(1.0);
    *pq *= cost;
    *q *= cost;
    Scaling { d, e, f, cost }
}

/// Mehrotra predictor-corrector interior-point method.
pub fn qp_solve(p: &QpProblem, tolerance: Option<f64>) -> Result<QpSolution> {
    let tol = tolerance.unwrap_or(DEFAULT_QP_TOLERANCE);
    let n = p.var_count();
    if n == 0 {
        return Err(Error::InvalidInput("empty problem".into()));
    }
    let OneSided { g: g_raw, h: h_raw } = one_sided(p);
    let mi = g_raw.nrows();
    if mi == 0 {
        return solve_equality_qp(p, tol);
    }

    // ill-scaled data (unstable-plant Hankel blocks, 1e5 slack weights)
    // breaks the straight IPM; equilibrate, solve, then map back and
    // report residuals in original units
    let mut pq_s = p.quadratic.clone();
    let mut q_s = p.linear.clone();
    let mut a_s = p.eq_matrix.clone();
    let mut b_s = p.eq_rhs.clone();
    let mut g_s = g_raw.clone();
    let mut h_s = h_raw.clone();
    let scaling = equilibrate(&mut pq_s, &mut q_s, &mut a_s, &mut b_s, &mut g_s, &mut h_s);

    let inner = ipm(&pq_s, &q_s, &a_s, &b_s, &g_s, &h_s, tol)?;
    let x = RealVector::from_fn(n, |j, _| scaling.d[j] * inner.x[j]);
    let me = p.eq_matrix.nrows();
    let eq_duals = RealVector::from_fn(me, |i, _| scaling.e[i] * inner.y[i] / scaling.cost);
    let z = RealVector::from_fn(mi, |i, _| scaling.f[i] * inner.z[i] / scaling.cost);

    // residuals at the returned point, original units
    let r_d = &p.quadratic * &x + &p.linear + p.eq_matrix.transpose() * &eq_duals + g_raw.transpose() * &z;
    let r_p = if me > 0 { (&p.eq_matrix * &x - &p.eq_rhs).amax() } else { 0.0 };
    let slack = &h_raw - &g_raw * &x;
    let violation = (0..mi).map(|i| (-slack[i]).max(0.0)).fold(0.0, f64::max);
    let comp = (0..mi).map(|i| (slack[i].max(0.0) * z[i]).abs()).fold(0.0, f64::max);
    Ok(QpSolution {
        objective: p.objective(&x),
        x,
        iterations: inner.iterations,
        residuals: KktResiduals { stationarity: r_d.amax(), equality: r_p, inequality: violation, complementarity: comp },
        eq_duals,
    })
}

struct IpmOutput {
    x: RealVector,
    y: RealVector,
    z: RealVector,
    iterations: usize,
}

#[allow(clippy::too_many_arguments)]
fn ipm(
    pq: &RealMatrix,
    q: &RealVector,
    a: &RealMatrix,
    b: &RealVector,
    g: &RealMatrix,
    h: &RealVector,
    tol: f64,
) -> Result<IpmOutput> {
    let n = q.len();
    let me = b.len();
    let mi = h.len();

    let scale = q.amax().max(b.amax()).max(h.amax()).max(1.0);
    let reg = 1e-11 * (pq.amax() + 1.0);

    // starting point: regularized equality-constrained minimizer, slacks
    // shifted positive
    let mut x = {
        let mut kkt = RealMatrix::zeros(n + me, n + me);
        kkt.view_mut((0, 0), (n, n)).copy_from(pq);
        for i in 0..n {
            kkt[(i, i)] += 1.0;
        }
        if me > 0 {
            kkt.view_mut((0, n), (n, me)).copy_from(&a.transpose());
            kkt.view_mut((n, 0), (me, n)).copy_from(a);
        }
        let mut rhs = RealVector::zeros(n + me);
        rhs.rows_mut(0, n).copy_from(&(-q));
        if me > 0 {
            rhs.rows_mut(n, me).copy_from(b);
        }
        kkt.lu()
            .solve(&rhs)
            .map(|sol| sol.rows(0, n).into_owned())
            .unwrap_or_else(|| RealVector::zeros(n))
    };
    let mut y = RealVector::zeros(me);
    let (mut s, mut z) = {
        let s_raw = h - g * &x;
        let shift = (-s_raw.min()).max(0.0) + 1.0;
        (s_raw.add_scalar(shift), RealVector::from_element(mi, 1.0))
    };

    let max_iter = 200;
    let mut best: Option<(f64, IpmOutput)> = None;
    for iter in 0..max_iter {
        let r_d = pq * &x + q + a.transpose() * &y + g.transpose() * &z;
        let r_p = if me > 0 { a * &x - b } else { RealVector::zeros(0) };
        let r_g = g * &x + &s - h;
        let mu = s.dot(&z) / mi as f64;

        let violation = (0..mi).map(|i| (-s[i]).max(0.0).max(r_g[i].abs())).fold(0.0, f64::max);
        let res = KktResiduals {
            stationarity: r_d.amax(),
            equality: if me > 0 { r_p.amax() } else { 0.0 },
            inequality: violation,
            complementarity: (0..mi).map(|i| (s[i] * z[i]).abs()).fold(0.0, f64::max),
        };
        if best.as_ref().map(|(m, _)| res.max() < *m).unwrap_or(true) {
            best = Some((res.max(), IpmOutput { x: x.clone(), y: y.clone(), z: z.clone(), iterations: iter }));
        }
        if res.stationarity <= tol * scale
            && res.equality <= tol * scale
            && res.inequality <= tol * scale
            && res.complementarity <= tol * scale
        {
            return Ok(best.unwrap().1);
        }
        // divergence of the duals with stubborn primal residual signals
        // infeasibility
        let dual_mag = y.amax().max(z.amax());
        if dual_mag > 1e13 * scale && res.equality.max(res.inequality) > tol * scale {
            return Err(Error::Infeasible(format!(
                "dual iterates diverged (|dual| = {dual_mag:.3e}) with primal residual {:.3e}",
                res.equality.max(res.inequality)
            )));
        }

        // reduced KKT matrix, one factorization per iteration
        let w: RealVector = RealVector::from_fn(mi, |i, _| z[i] / s[i]);
        let mut kkt = RealMatrix::zeros(n + me, n + me);
        {
            let mut hblk = pq.clone();
            // H = P + G' diag(z/s) G + reg I; box and epigraph rows carry
            // at most a couple of nonzeros, so accumulate sparsely
            for r in 0..mi {
                let gr = g.row(r);
                let wr = w[r];
                let nz: Vec<usize> = (0..n).filter(|&i| gr[i] != 0.0).collect();
                for &i in &nz {
                    let gri = wr * gr[i];
                    for &jj in &nz {
                        hblk[(i, jj)] += gri * gr[jj];
                    }
                }
            }
            for i in 0..n {
                hblk[(i, i)] += reg;
            }
            kkt.view_mut((0, 0), (n, n)).copy_from(&hblk);
        }
        if me > 0 {
            kkt.view_mut((0, n), (n, me)).copy_from(&a.transpose());
            kkt.view_mut((n, 0), (me, n)).copy_from(a);
            for i in 0..me {
                kkt[(n + i, n + i)] = -reg;
            }
        }
        let lu = kkt.lu();

        let solve_direction = |r_c: &RealVector| -> Option<(RealVector, RealVector, RealVector, RealVector)> {
            // eliminate (ds, dz): dz = (z o (G dx) + z o r_g - r_c)/s
            let rhs_top = {
                let mut t = -&r_d;
                let correction = RealVector::from_fn(mi, |i, _| (z[i] * r_g[i] - r_c[i]) / s[i]);
                t -= g.transpose() * correction;
                t
            };
            let mut rhs = RealVector::zeros(n + me);
            rhs.rows_mut(0, n).copy_from(&rhs_top);
            if me > 0 {
                rhs.rows_mut(n, me).copy_from(&(-&r_p));
            }
            let sol = lu.solve(&rhs)?;
            let dx = sol.rows(0, n).into_owned();
            let dy = sol.rows(n, me).into_owned();
            let gdx = g * &dx;
            let dz = RealVector::from_fn(mi, |i, _| (z[i] * gdx[i] + z[i] * r_g[i] - r_c[i]) / s[i]);
            let ds = RealVector::from_fn(mi, |i, _| (-r_c[i] - s[i] * dz[i]) / z[i]);
            Some((dx, dy, ds, dz))
        };

        let step_len = |v: &RealVector, dv: &RealVector| -> f64 {
            let mut alpha = 1.0f64;
            for i in 0..v.len() {
                if dv[i] < 0.0 {
                    alpha = alpha.min(-v[i] / dv[i]);
                }
            }
            alpha
        };

        // predictor
        let r_c_aff = RealVector::from_fn(mi, |i, _| s[i] * z[i]);
        let (_dx_a, _dy_a, ds_a, dz_a) = match solve_direction(&r_c_aff) {
            Some(d) => d,
            None => return Err(Error::NumericalFailure("singular reduced KKT system".into())),
        };
        let alpha_p_aff = step_len(&s, &ds_a).min(1.0);
        let alpha_d_aff = step_len(&z, &dz_a).min(1.0);
        let mu_aff = {
            let mut acc = 0.0;
            for i in 0..mi {
                acc += (s[i] + alpha_p_aff * ds_a[i]) * (z[i] + alpha_d_aff * dz_a[i]);
            }
            acc / mi as f64
        };
        let sigma = if mu > 0.0 { (mu_aff / mu).powi(3).clamp(0.0, 1.0) } else { 0.0 };

        // corrector
        let r_c = RealVector::from_fn(mi, |i, _| s[i] * z[i] + ds_a[i] * dz_a[i] - sigma * mu);
        let (dx, dy, ds, dz) = match solve_direction(&r_c) {
            Some(d) => d,
            None => return Err(Error::NumericalFailure("singular reduced KKT system".into())),
        };
        let tau = if mu < 1e-6 * scale { 0.9995 } else { 0.99 };
        let alpha_p = (tau * step_len(&s, &ds)).min(1.0);
        let alpha_d = (tau * step_len(&z, &dz)).min(1.0);

        x += alpha_p * &dx;
        s += alpha_p * &ds;
        y += alpha_d * &dy;
        z += alpha_d * &dz;
    }
    Err(Error::MaxIterations(max_iter))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    fn empty_ineq(n: usize) -> (RealMatrix, RealVector, RealVector) {
        (RealMatrix::zeros(0, n), RealVector::zeros(0), RealVector::zeros(0))
    }

    #[test]
    fn squared_distance_to_equality() {
        // min x^2 s.t. x = 3
        let (gi, lo, hi) = empty_ineq(1);
        let p = QpProblem::new(
            RealMatrix::from_element(1, 1, 2.0),
            RealVector::zeros(1),
            RealMatrix::from_element(1, 1, 1.0),
            RealVector::from_element(1, 3.0),
            gi,
            lo,
            hi,
        )
        .unwrap();
        let sol = qp_solve(&p, None).unwrap();
        assert!((sol.x[0] - 3.0).abs() < 1e-9);
        assert!((sol.objective - 9.0).abs() < 1e-8);
    }

    #[test]
    fn hand_kkt_with_active_bound() {
        // min x^2 + y^2 s.t. x + y = 2, x <= 0.5  ->  (0.5, 1.5)
        let p = QpProblem::new(
            RealMatrix::from_diagonal(&RealVector::from_vec(vec![2.0, 2.0])),
            RealVector::zeros(2),
            RealMatrix::from_row_slice(1, 2, &[1.0, 1.0]),
            RealVector::from_element(1, 2.0),
            RealMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
            RealVector::from_element(1, f64::NEG_INFINITY),
            RealVector::from_element(1, 0.5),
        )
        .unwrap();
        let sol = qp_solve(&p, None).unwrap();
        assert!((sol.x[0] - 0.5).abs() < 1e-7, "{}", sol.x[0]);
        assert!((sol.x[1] - 1.5).abs() < 1e-7);
        assert!(sol.residuals.max() <= 1e-8 * 2.0);
    }

    #[test]
    fn matches_closed_form_kkt_on_random_equality_qps() {
        let mut rng = SeededRng::new(77);
        for trial in 0..20 {
            let n = 4 + (trial % 3);
            let me = 2;
            let half = RealMatrix::from_fn(n, n, |_, _| rng.standard_normal());
            let quad = &half * half.transpose() + RealMatrix::identity(n, n) * 0.5;
            let q = RealVector::from_fn(n, |_, _| rng.standard_normal());
            let a = RealMatrix::from_fn(me, n, |_, _| rng.standard_normal());
            let b = RealVector::from_fn(me, |_, _| rng.standard_normal());
            let (gi, lo, hi) = empty_ineq(n);
            let p = QpProblem::new(quad.clone(), q.clone(), a.clone(), b.clone(), gi, lo, hi).unwrap();
            let sol = qp_solve(&p, None).unwrap();

            // closed-form KKT oracle
            let mut kkt = RealMatrix::zeros(n + me, n + me);
            kkt.view_mut((0, 0), (n, n)).copy_from(&quad);
            kkt.view_mut((0, n), (n, me)).copy_from(&a.transpose());
            kkt.view_mut((n, 0), (me, n)).copy_from(&a);
            let mut rhs = RealVector::zeros(n + me);
            rhs.rows_mut(0, n).copy_from(&(-&q));
            rhs.rows_mut(n, me).copy_from(&b);
            let expect = kkt.lu().solve(&rhs).unwrap().rows(0, n).into_owned();
            assert!((&sol.x - &expect).amax() < 1e-7, "trial {trial}");
        }
    }

    #[test]
    fn box_constrained_least_squares() {
        // min (x-2)^2 with -1 <= x <= 1 -> x = 1
        let p = QpProblem::new(
            RealMatrix::from_element(1, 1, 2.0),
            RealVector::from_element(1, -4.0),
            RealMatrix::zeros(0, 1),
            RealVector::zeros(0),
            RealMatrix::from_element(1, 1, 1.0),
            RealVector::from_element(1, -1.0),
            RealVector::from_element(1, 1.0),
        )
        .unwrap();
        let sol = qp_solve(&p, None).unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn detects_inconsistent_equalities() {
        // x = 0 and x = 1 cannot both hold
        let (gi, lo, hi) = empty_ineq(1);
        let p = QpProblem::new(
            RealMatrix::from_element(1, 1, 2.0),
            RealVector::zeros(1),
            RealMatrix::from_row_slice(2, 1, &[1.0, 1.0]),
            RealVector::from_vec(vec![0.0, 1.0]),
            gi,
            lo,
            hi,
        )
        .unwrap();
        assert!(matches!(qp_solve(&p, None), Err(Error::Infeasible(_)) | Err(Error::MaxIterations(_))));
    }

    #[test]
    fn rejects_indefinite_quadratic() {
        let (gi, lo, hi) = empty_ineq(2);
        let res = QpProblem::new(
            RealMatrix::from_diagonal(&RealVector::from_vec(vec![1.0, -1.0])),
            RealVector::zeros(2),
            RealMatrix::zeros(0, 2),
            RealVector::zeros(0),
            gi,
            lo,
            hi,
        );
        assert!(res.is_err());
    }

    #[test]
    fn epigraph_absolute_value() {
        // min |x| + (x-1)^2 via epigraph: min t + (x-1)^2, -t <= x <= t
        // optimum of x^2 - 2x + 1 + |x|: derivative 2x - 2 + sign(x) = 0 -> x = 0.5
        let quad = RealMatrix::from_fn(2, 2, |i, j| if i == 0 && j == 0 { 2.0 } else { 0.0 });
        let p = QpProblem::new(
            quad,
            RealVector::from_vec(vec![-2.0, 1.0]),
            RealMatrix::zeros(0, 2),
            RealVector::zeros(0),
            // x - t <= 0 and -x - t <= 0 as a two-sided row pair
            RealMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, -1.0]),
            RealVector::from_vec(vec![f64::NEG_INFINITY, f64::NEG_INFINITY]),
            RealVector::from_vec(vec![0.0, 0.0]),
            )
        .unwrap();
        let sol = qp_solve(&p, None).unwrap();
        assert!((sol.x[0] - 0.5).abs() < 1e-6, "x = {}", sol.x[0]);
        assert!((sol.x[1] - 0.5).abs() < 1e-6, "t = {}", sol.x[1]);
    }
}
