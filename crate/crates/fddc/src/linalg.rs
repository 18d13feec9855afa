//! Dense real and complex linear algebra used by every other module.
//!
//! Thin contracts over [`nalgebra`] decompositions: SVD-based rank,
//! minimum-norm least squares, kernel bases and pseudo-inverses, written
//! once over [`ComplexField`] so the complex case is first-class and the
//! real case is the specialization. All routines are deterministic for
//! identical inputs.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type RealMatrix = DMatrix<f64>;
pub type RealVector = DVector<f64>;
pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Scalar types the dense routines accept: `f64` and `Complex64`.
pub trait Scalar: ComplexField<RealField = f64> + Copy {}
impl<T: ComplexField<RealField = f64> + Copy> Scalar for T {}

/// Singular value decomposition `m = U * diag(s) * V^H` with
/// `s` nonincreasing and nonnegative.
#[derive(Debug, Clone)]
pub struct Svd<T: Scalar> {
    pub u: DMatrix<T>,
    pub singular_values: DVector<f64>,
    pub v: DMatrix<T>,
}

impl<T: Scalar> Svd<T> {
    /// Numerical rank at the given tolerance, or at [`default_rank_tolerance`].
    pub fn rank(&self, tolerance: Option<f64>, rows: usize, cols: usize) -> usize {
        let tol = tolerance.unwrap_or_else(|| {
            default_rank_tolerance(rows, cols, self.singular_values.get(0).copied().unwrap_or(0.0))
        });
        self.singular_values.iter().filter(|&&s| s > tol).count()
    }
}

/// Default numerical-rank tolerance: `max(rows, cols) * sigma_max * eps`.
pub fn default_rank_tolerance(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * sigma_max * f64::EPSILON
}

fn ensure_nonempty_finite<T: Scalar>(m: &DMatrix<T>) -> Result<()> {
    if m.is_empty() {
        return Err(Error::InvalidInput("matrix must be nonempty".into()));
    }
    if m.iter().any(|e| !e.is_finite()) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    Ok(())
}

/// Full (thin) SVD with singular values sorted nonincreasing.
pub fn svd<T: Scalar>(m: &DMatrix<T>) -> Result<Svd<T>> {
    ensure_nonempty_finite(m)?;
    let f = m.clone().svd(true, true);
    let u = f.u.expect("svd requested u");
    let v_t = f.v_t.expect("svd requested v_t");
    let mut order: Vec<usize> = (0..f.singular_values.len()).collect();
    order.sort_by(|&a, &b| f.singular_values[b].total_cmp(&f.singular_values[a]));
    let singular_values = DVector::from_iterator(order.len(), order.iter().map(|&i| f.singular_values[i]));
    let u = DMatrix::from_columns(&order.iter().map(|&i| u.column(i).into_owned()).collect::<Vec<_>>());
    let v = v_t.adjoint();
    let v = DMatrix::from_columns(&order.iter().map(|&i| v.column(i).into_owned()).collect::<Vec<_>>());
    Ok(Svd { u, singular_values, v })
}

/// Numerical rank of `m`.
pub fn rank<T: Scalar>(m: &DMatrix<T>, tolerance: Option<f64>) -> Result<usize> {
    let f = svd(m)?;
    Ok(f.rank(tolerance, m.nrows(), m.ncols()))
}

/// Minimum-norm least-squares solution of `A x = b` over all columns of
/// `b`, together with the residual norm `||A x - b||_F`.
pub fn least_squares<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> Result<(DMatrix<T>, f64)> {
    if a.nrows() != b.nrows() {
        return Err(Error::InvalidInput(format!(
            "least_squares: A has {} rows but b has {}",
            a.nrows(),
            b.nrows()
        )));
    }
    ensure_nonempty_finite(b)?;
    let f = svd(a)?;
    let r = f.rank(None, a.nrows(), a.ncols());
    // x = V * diag(1/s) * U^H * b restricted to the numerical range
    let utb = f.u.columns(0, r).adjoint() * b;
    let mut scaled = utb;
    for i in 0..r {
        let s = f.singular_values[i];
        for j in 0..scaled.ncols() {
            scaled[(i, j)] /= T::from_real(s);
        }
    }
    let x = f.v.columns(0, r) * scaled;
    let residual = (a * &x - b).norm();
    Ok((x, residual))
}

/// Same as [`least_squares`] for a single right-hand-side vector.
pub fn least_squares_vec<T: Scalar>(a: &DMatrix<T>, b: &DVector<T>) -> Result<(DVector<T>, f64)> {
    let (x, res) = least_squares(a, &DMatrix::from_column_slice(b.len(), 1, b.as_slice()))?;
    Ok((DVector::from_column_slice(x.as_slice()), res))
}

/// Orthonormal basis for `ker(m)` as matrix columns. A full-column-rank
/// input yields a matrix with zero columns.
///
/// The thin SVD only carries `min(rows, cols)` right singular vectors, so
/// for wide matrices the remaining kernel directions are found by
/// completing the thin `V` to a full orthonormal basis.
pub fn kernel_basis<T: Scalar>(m: &DMatrix<T>, tolerance: Option<f64>) -> Result<DMatrix<T>> {
    let f = svd(m)?;
    let n = m.ncols();
    let r = f.rank(tolerance, m.nrows(), m.ncols());
    if r == n {
        return Ok(DMatrix::zeros(n, 0));
    }
    let thin = f.v.ncols();
    let mut kernel: Vec<DVector<T>> = (r..thin).map(|i| f.v.column(i).into_owned()).collect();
    if thin < n {
        let extra = orthonormal_completion(&f.v, n - thin);
        kernel.extend(extra);
    }
    Ok(DMatrix::from_columns(&kernel))
}

/// Extend the orthonormal columns of `basis` by `count` further
/// orthonormal vectors, chosen greedily from the standard basis by the
/// largest orthogonalized residual.
fn orthonormal_completion<T: Scalar>(basis: &DMatrix<T>, count: usize) -> Vec<DVector<T>> {
    let dim = basis.nrows();
    let mut have: Vec<DVector<T>> = basis.column_iter().map(|c| c.into_owned()).collect();
    let mut extras = Vec::with_capacity(count);
    for _ in 0..count {
        let mut best: Option<(f64, DVector<T>)> = None;
        for i in 0..dim {
            let mut v: DVector<T> = DVector::zeros(dim);
            v[i] = T::one();
            // two Gram-Schmidt passes keep the family orthonormal
            for _ in 0..2 {
                for c in &have {
                    let proj = c.dotc(&v);
                    v -= c * proj;
                }
            }
            let norm = v.norm();
            if best.as_ref().map(|(n, _)| norm > *n).unwrap_or(true) {
                best = Some((norm, v));
            }
        }
        let (norm, v) = best.expect("dim > 0");
        let v = v.unscale(norm);
        have.push(v.clone());
        extras.push(v);
    }
    extras
}

/// Moore-Penrose pseudo-inverse via the SVD.
pub fn pseudo_inverse<T: Scalar>(m: &DMatrix<T>) -> Result<DMatrix<T>> {
    let f = svd(m)?;
    let r = f.rank(None, m.nrows(), m.ncols());
    let mut acc = DMatrix::zeros(m.ncols(), m.nrows());
    for i in 0..r {
        let vi = f.v.column(i);
        let ui = f.u.column(i);
        let s = T::from_real(1.0 / f.singular_values[i]);
        acc += (vi * ui.adjoint()).scale(1.0) * s;
    }
    Ok(acc)
}

/// `||m||_F`, zero for empty matrices.
pub fn fro_norm<T: Scalar>(m: &DMatrix<T>) -> f64 {
    m.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn random_real(rng: &mut SeededRng, r: usize, c: usize) -> RealMatrix {
        RealMatrix::from_fn(r, c, |_, _| rng.standard_normal())
    }

    fn random_complex(rng: &mut SeededRng, r: usize, c: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(r, c, |_, _| Complex64::new(rng.standard_normal(), rng.standard_normal()))
    }

    #[test]
    fn svd_identity_and_diagonal() {
        let id = RealMatrix::identity(3, 3);
        let f = svd(&id).unwrap();
        for s in f.singular_values.iter() {
            assert!((s - 1.0).abs() < 1e-14);
        }
        let d = RealMatrix::from_diagonal(&RealVector::from_vec(vec![3.0, 2.0, 1.0]));
        let f = svd(&d).unwrap();
        assert!((f.singular_values[0] - 3.0).abs() < 1e-14);
        assert!((f.singular_values[1] - 2.0).abs() < 1e-14);
        assert!((f.singular_values[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn svd_reconstructs_random_complex() {
        let mut rng = SeededRng::new(7);
        let m = random_complex(&mut rng, 5, 8);
        let f = svd(&m).unwrap();
        let sigma = ComplexMatrix::from_fn(5, 8, |i, j| {
            if i == j { Complex64::new(f.singular_values[i], 0.0) } else { Complex64::ZERO }
        });
        // thin svd: u is 5x5, v is 8x5, so rebuild from the thin factors
        let rebuilt = &f.u * ComplexMatrix::from_fn(f.u.ncols(), f.v.ncols(), |i, j| {
            if i == j { Complex64::new(f.singular_values[i], 0.0) } else { Complex64::ZERO }
        }) * f.v.adjoint();
        let _ = sigma;
        let err = (&rebuilt - &m).norm();
        assert!(err <= 1e-10 * m.norm().max(1.0), "residual {err}");
    }

    #[test]
    fn svd_rejects_non_finite() {
        let m = RealMatrix::from_row_slice(1, 2, &[1.0, f64::NAN]);
        assert!(matches!(svd(&m), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&RealMatrix::zeros(4, 4), None).unwrap(), 0);
        let outer = RealMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(rank(&outer, None).unwrap(), 1);
    }

    #[test]
    fn least_squares_examples() {
        let a = RealMatrix::identity(2, 2);
        let b = RealVector::from_vec(vec![3.0, 4.0]);
        let (x, res) = least_squares_vec(&a, &b).unwrap();
        assert!((x[0] - 3.0).abs() < 1e-14 && (x[1] - 4.0).abs() < 1e-14);
        assert!(res < 1e-14);

        // overdetermined but consistent
        let mut rng = SeededRng::new(11);
        let a = random_real(&mut rng, 8, 3);
        let x0 = RealVector::from_fn(3, |_, _| rng.standard_normal());
        let b = &a * &x0;
        let (x, res) = least_squares_vec(&a, &b).unwrap();
        assert!(res <= 1e-10 * b.norm().max(1.0));
        assert!((x - x0).norm() < 1e-9);

        // underdetermined consistent
        let a = RealMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let b = RealVector::from_vec(vec![2.0]);
        let (x, res) = least_squares_vec(&a, &b).unwrap();
        assert!((a * x)[0] - 2.0 < 1e-12);
        assert!(res < 1e-12);
    }

    #[test]
    fn kernel_basis_examples() {
        let m = RealMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let k = kernel_basis(&m, None).unwrap();
        assert_eq!(k.ncols(), 1);
        let expect = 1.0 / 2.0_f64.sqrt();
        assert!((k[(0, 0)].abs() - expect).abs() < 1e-12);
        assert!((k[(0, 0)] + k[(1, 0)]).abs() < 1e-12);

        let mut rng = SeededRng::new(3);
        let full = random_real(&mut rng, 5, 3);
        assert_eq!(kernel_basis(&full, None).unwrap().ncols(), 0);

        // rank-2 4x5 built from factors
        let left = random_real(&mut rng, 4, 2);
        let right = random_real(&mut rng, 2, 5);
        let m = left * right;
        let k = kernel_basis(&m, None).unwrap();
        assert_eq!(k.ncols(), 3);
        assert!((&m * &k).norm() <= 1e-9 * m.norm());
        assert!((k.adjoint() * &k - RealMatrix::identity(3, 3)).norm() <= 1e-10);
    }

    #[test]
    fn pseudo_inverse_examples() {
        let id = RealMatrix::identity(3, 3);
        assert!((pseudo_inverse(&id).unwrap() - id).norm() < 1e-12);

        let d = RealMatrix::from_diagonal(&RealVector::from_vec(vec![2.0, 0.0]));
        let p = pseudo_inverse(&d).unwrap();
        assert!((p[(0, 0)] - 0.5).abs() < 1e-14 && p[(1, 1)].abs() < 1e-14);

        let mut rng = SeededRng::new(5);
        let m = random_real(&mut rng, 3, 6);
        let p = pseudo_inverse(&m).unwrap();
        assert!((&m * &p - RealMatrix::identity(3, 3)).norm() <= 1e-9);
        // Moore-Penrose conditions
        let scale = m.norm();
        assert!((&m * &p * &m - &m).norm() <= 1e-9 * scale);
        assert!((&p * &m * &p - &p).norm() <= 1e-9 * scale);
        assert!(((&m * &p).transpose() - &m * &p).norm() <= 1e-9 * scale);
        assert!(((&p * &m).transpose() - &p * &m).norm() <= 1e-9 * scale);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn rank_invariant_under_permutation_and_mixing(seed in 0u64..1000) {
            let mut rng = SeededRng::new(seed);
            let left = random_real(&mut rng, 5, 2);
            let right = random_real(&mut rng, 2, 6);
            let m = left * right;
            let r0 = rank(&m, None).unwrap();
            prop_assert_eq!(r0, 2);

            // row permutation
            let mut perm: Vec<usize> = (0..5).collect();
            perm.swap(0, 4);
            perm.swap(1, 3);
            let permuted = RealMatrix::from_fn(5, 6, |i, j| m[(perm[i], j)]);
            prop_assert_eq!(rank(&permuted, None).unwrap(), r0);

            // well-conditioned square multiplier: I + small random
            let mix = RealMatrix::identity(5, 5) + random_real(&mut rng, 5, 5) * 0.1;
            prop_assert_eq!(rank(&(mix * &m), None).unwrap(), r0);
        }

        #[test]
        fn consistent_least_squares_has_small_residual(seed in 0u64..1000) {
            let mut rng = SeededRng::new(seed);
            let a = random_real(&mut rng, 6, 4);
            let x0 = RealVector::from_fn(4, |_, _| rng.standard_normal());
            let b = &a * x0;
            let (_, res) = least_squares_vec(&a, &b).unwrap();
            prop_assert!(res <= 1e-9 * b.norm().max(1.0));
        }
    }
}
