//! Non-negative least squares: `min ||A x - b||_2` subject to `x >= 0`.
//!
//! Lawson–Hanson active-set method. The unconstrained subproblem on the
//! passive set is solved through an SVD pseudo-inverse, so rank-deficient
//! column subsets still get a well-defined answer. When the full matrix is
//! rank deficient the optimal set is not a point; a small ridge term then
//! identifies the support of its minimum-norm element, which the
//! pseudo-inverse on that support recovers exactly.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct NnlsSolution<T: Scalar> {
    pub x: DVector<T>,
    /// `||A x - b||_2` against the original (unaugmented) system.
    pub residual_norm: T,
    /// Largest violation of the optimality conditions, scaled by
    /// `||A||_F ||b||_2`.
    pub kkt_residual: T,
    pub iterations: usize,
}

/// Singular values of `a`, largest first.
pub(crate) fn singular_values<T: Scalar>(a: &DMatrix<T>) -> Vec<T> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<T> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// Numerical rank with cutoff `sigma_max * rel_tol`.
pub(crate) fn numerical_rank<T: Scalar>(a: &DMatrix<T>, rel_tol: T) -> usize {
    let s = singular_values(a);
    match s.first() {
        Some(&max) if max > T::zero() => s.iter().filter(|&&v| v > max * rel_tol).count(),
        _ => 0,
    }
}

fn pseudo_solve<T: Scalar>(a: &DMatrix<T>, b: &DVector<T>) -> DVector<T> {
    let svd = a.clone().svd(true, true);
    let max = svd.singular_values.iter().fold(T::zero(), |m, &v| m.max(v));
    let cutoff = max * T::default_epsilon() * T::from_usize(a.nrows().max(a.ncols())).unwrap();
    // solve only fails when U or V^T were not computed
    svd.solve(b, cutoff).expect("svd computed with both factors")
}

/// Scaled complementarity violation at `x`.
pub fn kkt_residual<T: Scalar>(a: &DMatrix<T>, b: &DVector<T>, x: &DVector<T>) -> T {
    let scale = a.norm() * b.norm();
    if scale == T::zero() {
        return T::zero();
    }
    let gradient = a.transpose() * (a * x - b);
    let mut worst = T::zero();
    for (xi, gi) in x.iter().zip(gradient.iter()) {
        let v = if *xi > T::zero() {
            gi.abs()
        } else {
            (-*gi).max(T::zero())
        };
        worst = worst.max(v);
        if *xi < T::zero() {
            worst = worst.max(-*xi * a.norm() * a.norm());
        }
    }
    worst / scale
}

fn lawson_hanson<T: Scalar>(a: &DMatrix<T>, b: &DVector<T>) -> Result<(DVector<T>, usize)> {
    let n = a.ncols();
    let mut x = DVector::<T>::zeros(n);
    if b.norm() == T::zero() {
        return Ok((x, 0));
    }
    let dims = T::from_usize(a.nrows().max(n)).unwrap();
    let tol = T::lit(10.0) * T::default_epsilon() * dims * a.norm() * b.norm();

    let mut passive = vec![false; n];
    let mut blocked = vec![false; n];
    let max_iterations = 30 * n + 100;
    let mut iterations = 0;

    loop {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n).filter(|&j| !passive[j] && !blocked[j] && w[j] > tol).fold(
            None,
            |best: Option<usize>, j| match best {
                Some(k) if w[k] >= w[j] => Some(k),
                _ => Some(j),
            },
        );
        let Some(entering) = candidate else { break };
        passive[entering] = true;

        let mut first = true;
        loop {
            iterations += 1;
            if iterations > max_iterations {
                return Err(Error::NoConvergence(format!(
                    "non-negative least squares did not converge in {max_iterations} iterations"
                )));
            }
            let cols: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let sub = a.select_columns(&cols);
            let z_sub = pseudo_solve(&sub, b);
            let mut z = DVector::<T>::zeros(n);
            for (k, &j) in cols.iter().enumerate() {
                z[j] = z_sub[k];
            }

            if first && z[entering] <= T::zero() {
                // the entering column cannot improve the fit
                passive[entering] = false;
                blocked[entering] = true;
                break;
            }
            first = false;

            if cols.iter().all(|&j| z[j] > T::zero()) {
                x = z;
                blocked.iter_mut().for_each(|v| *v = false);
                break;
            }

            let mut alpha = T::one();
            for &j in &cols {
                if z[j] <= T::zero() {
                    let step = x[j] / (x[j] - z[j]);
                    if step < alpha {
                        alpha = step;
                    }
                }
            }
            for &j in &cols {
                let xj = x[j];
                x[j] = xj + alpha * (z[j] - xj);
            }
            let floor = T::default_epsilon() * x.amax();
            for &j in &cols {
                if x[j] <= floor {
                    x[j] = T::zero();
                    passive[j] = false;
                }
            }
            blocked.iter_mut().for_each(|v| *v = false);
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    Ok((x, iterations))
}

/// Solves `min ||A x - b||` over `x >= 0`.
///
/// Among several optimal solutions (rank-deficient `A`) the minimum-norm one
/// is returned. An all-zero `A` carries no information and is rejected.
pub fn nnls<T: Scalar>(a: &DMatrix<T>, b: &DVector<T>) -> Result<NnlsSolution<T>> {
    if a.nrows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} rows but right-hand side has {} entries",
            a.nrows(),
            b.len()
        )));
    }
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite entry in least-squares data".into()));
    }
    if a.iter().all(|v| *v == T::zero()) {
        return Err(Error::NoInformation);
    }

    let n = a.ncols();
    let sigma = singular_values(a);
    let rank_tol = T::default_epsilon() * T::from_usize(a.nrows().max(n)).unwrap();
    let rank = sigma.iter().filter(|&&s| s > sigma[0] * rank_tol).count();

    let (mut x, mut iterations) = lawson_hanson(a, b)?;
    if rank < n {
        // A ridge large enough to register in the gradient test picks the
        // support of the minimum-norm optimum; on that support the
        // pseudo-inverse gives the optimum itself.
        let lambda = sigma[0] * T::default_epsilon().sqrt().sqrt();
        let mut augmented = DMatrix::<T>::zeros(a.nrows() + n, n);
        augmented.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
        for j in 0..n {
            augmented[(a.nrows() + j, j)] = lambda;
        }
        let mut rhs = DVector::<T>::zeros(a.nrows() + n);
        rhs.rows_mut(0, a.nrows()).copy_from(b);
        let (ridge, ridge_iterations) = lawson_hanson(&augmented, &rhs)?;
        iterations += ridge_iterations;

        let support: Vec<usize> = (0..n).filter(|&j| ridge[j] > T::zero()).collect();
        if !support.is_empty() {
            let z = pseudo_solve(&a.select_columns(&support), b);
            if z.iter().all(|v| *v > T::zero()) {
                let mut candidate = DVector::<T>::zeros(n);
                for (k, &j) in support.iter().enumerate() {
                    candidate[j] = z[k];
                }
                let slack = T::lit(100.0) * T::default_epsilon() * (a.norm() * x.norm() + b.norm());
                if (a * &candidate - b).norm() <= (a * &x - b).norm() + slack {
                    x = candidate;
                }
            }
        }
    }

    let residual_norm = (a * &x - b).norm();
    let kkt_residual = kkt_residual(a, b, &x);
    Ok(NnlsSolution {
        x,
        residual_norm,
        kkt_residual,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unconstrained_optimum_is_returned_when_feasible() {
        let a = DMatrix::from_row_slice(2, 2, &[0.5, 0.2, 0.1, 0.4]);
        let b = DVector::from_vec(vec![9.0, 9.0]);
        let s = nnls(&a, &b).unwrap();
        assert_relative_eq!(s.x[0], 10.0, max_relative = 1e-12);
        assert_relative_eq!(s.x[1], 20.0, max_relative = 1e-12);
        assert!(s.residual_norm < 1e-12);
    }

    #[test]
    fn active_constraint() {
        // unconstrained solution would be (2, -1); optimum clamps x1 = 0
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let b = DVector::from_vec(vec![2.0, -1.0]);
        let s = nnls(&a, &b).unwrap();
        assert_eq!(s.x[1], 0.0);
        assert_relative_eq!(s.x[0], 2.0, max_relative = 1e-14);
        assert_relative_eq!(s.residual_norm, 1.0, max_relative = 1e-14);
        assert!(s.kkt_residual <= 1e-10);
    }

    #[test]
    fn coupled_active_set() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let b = DVector::from_vec(vec![3.0, 2.0, 1.0]);
        // unconstrained slope is negative, so the optimum is x = (2, 0)
        let s = nnls(&a, &b).unwrap();
        assert_relative_eq!(s.x[0], 2.0, max_relative = 1e-12);
        assert_eq!(s.x[1], 0.0);
        assert!(s.kkt_residual <= 1e-10);
    }

    #[test]
    fn zero_matrix_is_rejected() {
        let a = DMatrix::<f64>::zeros(2, 2);
        let b = DVector::from_vec(vec![1.0, 1.0]);
        assert!(matches!(nnls(&a, &b), Err(Error::NoInformation)));
    }

    #[test]
    fn rank_deficient_picks_minimum_norm() {
        // both columns identical: any split of 4 is optimal, min-norm is (2, 2)
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![4.0, 4.0]);
        let s = nnls(&a, &b).unwrap();
        assert_relative_eq!(s.x[0], 2.0, max_relative = 1e-9);
        assert_relative_eq!(s.x[1], 2.0, max_relative = 1e-9);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 2.0]);
        let s = nnls(&a, &DVector::zeros(1)).unwrap();
        assert_eq!(s.x, DVector::zeros(2));
    }

    #[test]
    fn rank_helper() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        assert_eq!(numerical_rank(&a, 1e-10), 1);
        assert_eq!(numerical_rank(&DMatrix::<f64>::identity(3, 3), 1e-10), 3);
    }
}
