//! Central finite differences over parameter vectors.

use nalgebra::{DMatrix, DVector};

use crate::scalar::Scalar;

/// Central-difference Jacobian of `f: R^p -> R^q` at `at`, one column per
/// parameter: `J[:, k] = (f(at + h e_k) - f(at - h e_k)) / (2h)`.
pub fn central_jacobian<T, F>(f: F, at: &[T], out_dim: usize, step: T) -> DMatrix<T>
where
    T: Scalar,
    F: Fn(&[T]) -> DVector<T>,
{
    let p = at.len();
    let two_step = step + step;
    let mut jac = DMatrix::zeros(out_dim, p);
    let mut shifted = at.to_vec();
    for k in 0..p {
        shifted[k] = at[k] + step;
        let plus = f(&shifted);
        shifted[k] = at[k] - step;
        let minus = f(&shifted);
        shifted[k] = at[k];
        for i in 0..out_dim {
            jac[(i, k)] = (plus[i] - minus[i]) / two_step;
        }
    }
    jac
}

/// Central-difference gradient of a scalar map.
pub fn central_gradient<T, F>(f: F, at: &[T], step: T) -> DVector<T>
where
    T: Scalar,
    F: Fn(&[T]) -> T,
{
    let p = at.len();
    let two_step = step + step;
    let mut grad = DVector::zeros(p);
    let mut shifted = at.to_vec();
    for k in 0..p {
        shifted[k] = at[k] + step;
        let plus = f(&shifted);
        shifted[k] = at[k] - step;
        let minus = f(&shifted);
        shifted[k] = at[k];
        grad[k] = (plus - minus) / two_step;
    }
    grad
}
