//! Chart projections, their analytic Jacobians with respect to the
//! independent chart entries, the Gram matrix of the Jacobian, and the
//! closed-form determinant at the chart origin together with its lower
//! bounds.
//!
//! The chart projection is `pi_A(x) = ((e_1^A | x), ..., (e_m^A | x))`, with
//! j-th component `x_j + sum_k a_kj x_{k+m}`. On the constrained chart the
//! dependent entries of column j expand into products of independent entries
//! from later columns, which yields a seven-case table of partial
//! derivatives. At `A = 0` the Gram matrix `B_{0,x}` of the Jacobian has
//! every diagonal entry equal to `Delta_x = sum_{k=m+1}^{2n} x_k^2` and
//! off-diagonal entries `x_{n+i} x_{n+j}`, and its determinant admits an
//! explicit expansion over strictly increasing index tuples.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::grassmannian::{independent_entries, ChartMatrix, IsotropicFrame};
use crate::scalar::{real, validation_tol, Scalar};
use crate::symplectic::AmbientVector;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjectionError {
    #[error("ambient dimensions differ: vector has {vector}, chart expects {expected}")]
    DimensionMismatch { vector: usize, expected: usize },
    #[error("projection arguments coincide")]
    CoincidentPoints,
    #[error("tuple length must satisfy 2 <= i <= m, got i={i}, m={m}")]
    TupleLengthOutOfRange { i: usize, m: usize },
    #[error("invalid plane parameters n={n}, m={m}")]
    InvalidShape { n: usize, m: usize },
    #[error("direction is not a unit vector (norm {norm:.12})")]
    NotUnit { norm: f64 },
}

/// `pi_A(x)`: inner products of `x` with the span vectors of the chart.
pub fn chart_projection<T: Scalar>(
    a: &ChartMatrix<T>,
    x: &AmbientVector<T>,
) -> Result<DVector<T>, ProjectionError> {
    if x.dim() != 2 * a.n() {
        return Err(ProjectionError::DimensionMismatch {
            vector: x.dim(),
            expected: 2 * a.n(),
        });
    }
    Ok(chart_projection_raw(a, x.coords()))
}

pub(crate) fn chart_projection_raw<T: Scalar>(a: &ChartMatrix<T>, x: &DVector<T>) -> DVector<T> {
    let (n, m) = (a.n(), a.m());
    DVector::from_fn(m, |j0, _| {
        let j = j0 + 1;
        let mut acc = x[j - 1];
        for k in 1..=(2 * n - m) {
            acc += a.at(k, j) * x[k + m - 1];
        }
        acc
    })
}

/// Orthogonal projection `P_V x = sum_i (v_i | x) v_i` onto the plane of an
/// orthonormal isotropic frame, returned as an ambient vector.
pub fn orthogonal_projection<T: Scalar>(
    v: &IsotropicFrame<T>,
    x: &AmbientVector<T>,
) -> Result<AmbientVector<T>, ProjectionError> {
    let coords = frame_coordinates(v, x)?;
    let ambient = v.columns() * coords;
    Ok(AmbientVector::new(ambient).expect("projection lives in the same ambient space"))
}

/// Coordinates `((v_1 | x), ..., (v_m | x))` of the orthogonal projection in
/// the frame basis.
pub fn frame_coordinates<T: Scalar>(
    v: &IsotropicFrame<T>,
    x: &AmbientVector<T>,
) -> Result<DVector<T>, ProjectionError> {
    if x.dim() != v.ambient_dim() {
        return Err(ProjectionError::DimensionMismatch {
            vector: x.dim(),
            expected: v.ambient_dim(),
        });
    }
    Ok(v.columns().transpose() * x.coords())
}

/// The sliced map `Phi_{x,y}(A) = (pi_A(x) - pi_A(y)) / |x - y| = pi_A(b)`
/// with `b` the unit direction of `x - y`.
pub fn phi<T: Scalar>(
    a: &ChartMatrix<T>,
    x: &AmbientVector<T>,
    y: &AmbientVector<T>,
) -> Result<DVector<T>, ProjectionError> {
    if x.dim() != y.dim() {
        return Err(ProjectionError::DimensionMismatch {
            vector: y.dim(),
            expected: x.dim(),
        });
    }
    let diff = x.coords() - y.coords();
    let norm = diff.norm();
    if norm == T::zero() {
        return Err(ProjectionError::CoincidentPoints);
    }
    let b = AmbientVector::new(diff / norm).expect("difference keeps the ambient dimension");
    chart_projection(a, &b)
}

/// Analytic Jacobian of `pi_A(x)` with respect to the independent chart
/// entries, columns in the global column-major order.
pub fn jacobian_chart_projection<T: Scalar>(
    a: &ChartMatrix<T>,
    x: &AmbientVector<T>,
) -> Result<DMatrix<T>, ProjectionError> {
    if x.dim() != 2 * a.n() {
        return Err(ProjectionError::DimensionMismatch {
            vector: x.dim(),
            expected: 2 * a.n(),
        });
    }
    let (n, m) = (a.n(), a.m());
    let x = x.coords();
    let entries = independent_entries(n, m);
    let mut jac = DMatrix::zeros(m, entries.len());
    for (col, &(row0, col0)) in entries.iter().enumerate() {
        let (alpha, beta) = (row0 + 1, col0 + 1);
        for j in 1..=m {
            jac[(j - 1, col)] = partial_derivative(a, x, n, m, j, alpha, beta);
        }
    }
    Ok(jac)
}

/// The seven-case table for the partial derivative of the j-th component of
/// `pi_A` with respect to the independent entry `a_{alpha beta}`.
fn partial_derivative<T: Scalar>(
    a: &ChartMatrix<T>,
    x: &DVector<T>,
    n: usize,
    m: usize,
    j: usize,
    alpha: usize,
    beta: usize,
) -> T {
    if beta == j {
        if alpha >= 1 && alpha <= n - m {
            let mut acc = x[m + alpha - 1];
            for k in (j + 1)..=m {
                acc += a.at(alpha + n, k) * x[n + k - 1];
            }
            acc
        } else if alpha <= n - m + j {
            x[m + alpha - 1]
        } else {
            // n+1 <= alpha <= 2n-m for independent entries
            let mut acc = x[m + alpha - 1];
            for k in (j + 1)..=m {
                acc -= a.at(alpha - n, k) * x[n + k - 1];
            }
            acc
        }
    } else if beta > j {
        if alpha >= 1 && alpha <= n - m {
            -a.at(alpha + n, j) * x[n + beta - 1]
        } else if alpha == n - m + j {
            x[n + beta - 1]
        } else if alpha > n {
            a.at(alpha - n, j) * x[n + beta - 1]
        } else {
            T::zero()
        }
    } else {
        T::zero()
    }
}

/// `B_{A,x} = D_A pi_A(x) (D_A pi_A(x))^T`, an `m x m` positive
/// semidefinite matrix.
pub fn gram_matrix<T: Scalar>(
    a: &ChartMatrix<T>,
    x: &AmbientVector<T>,
) -> Result<DMatrix<T>, ProjectionError> {
    let jac = jacobian_chart_projection(a, x)?;
    Ok(&jac * jac.transpose())
}

/// All strictly increasing `i`-tuples over `{1, ..., m}`, in lexicographic
/// order. A tuple entry `k` stands for the ambient coordinate `n + k`, so
/// the family enumerates the index sets of the determinant expansion.
pub fn lambda_sequences(m: usize, i: usize) -> Result<Vec<Vec<usize>>, ProjectionError> {
    if i < 2 || i > m {
        return Err(ProjectionError::TupleLengthOutOfRange { i, m });
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(i);
    fn recurse(
        m: usize,
        i: usize,
        start: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == i {
            out.push(current.clone());
            return;
        }
        let remaining = i - current.len();
        for k in start..=(m + 1 - remaining) {
            current.push(k);
            recurse(m, i, k + 1, current, out);
            current.pop();
        }
    }
    recurse(m, i, 1, &mut current, &mut out);
    Ok(out)
}

/// `Delta_x = sum_{k=m+1}^{2n} x_k^2`, the common diagonal entry of
/// `B_{0,x}`.
pub fn delta<T: Scalar>(x: &AmbientVector<T>, m: usize) -> T {
    let mut acc = T::zero();
    for k in m..x.dim() {
        acc += x[k] * x[k];
    }
    acc
}

/// Closed form of `det B_{0,x}`:
///
/// ```text
/// Delta^m + sum_{i=2}^m (-1)^{i-1} (i-1) Delta^{m-i}
///     sum_{tuples} x_{n+t_1}^2 ... x_{n+t_i}^2
/// ```
pub fn det_closed_form<T: Scalar>(
    x: &AmbientVector<T>,
    n: usize,
    m: usize,
) -> Result<T, ProjectionError> {
    if m == 0 || m > n {
        return Err(ProjectionError::InvalidShape { n, m });
    }
    if x.dim() != 2 * n {
        return Err(ProjectionError::DimensionMismatch {
            vector: x.dim(),
            expected: 2 * n,
        });
    }
    let d = delta(x, m);
    let mut det = d.powi(m as i32);
    for i in 2..=m {
        let mut tuple_sum = T::zero();
        for tuple in lambda_sequences(m, i).expect("2 <= i <= m") {
            let mut prod = T::one();
            for &k in &tuple {
                let coord = x[n + k - 1];
                prod *= coord * coord;
            }
            tuple_sum += prod;
        }
        let weight = real::<T>((i - 1) as f64);
        let sign = if i % 2 == 0 { -T::one() } else { T::one() };
        det += sign * weight * d.powi((m - i) as i32) * tuple_sum;
    }
    Ok(det)
}

/// Outcome of the determinant lower-bound check at the chart origin for a
/// unit direction `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundCheck<T: Scalar> {
    /// `det B_{0,b}` by the closed form.
    pub det: T,
    /// `Delta_b = 1 - |Phi_b(0)|^2`.
    pub delta: T,
    /// The final bound `Delta_b^m / 2`.
    pub bound: T,
    /// The intermediate bound
    /// `Delta^m - Delta^{m-2} sum_{pairs} b_{n+i}^2 b_{n+j}^2` (equals
    /// `Delta^m` when `m = 1`).
    pub intermediate: T,
    /// `|Delta_b - (1 - |Phi_b(0)|^2)|`, the two-route consistency gap.
    pub delta_gap: T,
    /// `det >= bound - 1e-12`.
    pub ok: bool,
}

/// Checks `det B_{0,b} >= intermediate >= Delta_b^m / 2` for a unit
/// direction, and verifies that `Delta_b` matches `1 - |Phi_b(0)|^2`.
pub fn transversality_lower_bound<T: Scalar>(
    b: &AmbientVector<T>,
    n: usize,
    m: usize,
) -> Result<LowerBoundCheck<T>, ProjectionError> {
    if m == 0 || m > n {
        return Err(ProjectionError::InvalidShape { n, m });
    }
    if b.dim() != 2 * n {
        return Err(ProjectionError::DimensionMismatch {
            vector: b.dim(),
            expected: 2 * n,
        });
    }
    let norm = b.norm();
    if (norm - T::one()).abs() > validation_tol(1e-12) {
        return Err(ProjectionError::NotUnit {
            norm: norm.to_f64().unwrap_or(f64::NAN),
        });
    }
    let det = det_closed_form(b, n, m)?;
    let d = delta(b, m);
    // Phi_b(0) = (b_1, ..., b_m)
    let mut proj_sq = T::zero();
    for k in 0..m {
        proj_sq += b[k] * b[k];
    }
    let delta_gap = (d - (T::one() - proj_sq)).abs();
    let half = real::<T>(0.5);
    let bound = half * d.powi(m as i32);
    let intermediate = if m >= 2 {
        let mut pair_sum = T::zero();
        for tuple in lambda_sequences(m, 2).expect("m >= 2") {
            let (u, v) = (b[n + tuple[0] - 1], b[n + tuple[1] - 1]);
            pair_sum += u * u * v * v;
        }
        d.powi(m as i32) - d.powi(m as i32 - 2) * pair_sum
    } else {
        d
    };
    let slack = real::<T>(1e-12);
    let ok = det >= bound - slack;
    Ok(LowerBoundCheck {
        det,
        delta: d,
        bound,
        intermediate,
        delta_gap,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmannian::{chart_embed, chart_free_count, plane_from_chart, span_vectors};
    use crate::numdiff::central_jacobian;
    use crate::stream::{normal_vector, substream_rng, unit_vector};
    use crate::symplectic::standard_form;
    use rand::Rng;

    fn random_chart(n: usize, m: usize, seed: u64) -> ChartMatrix<f64> {
        let mut rng = substream_rng(seed, 23);
        let free = normal_vector::<f64, _>(&mut rng, chart_free_count(n, m).unwrap());
        chart_embed(n, m, free.as_slice()).unwrap()
    }

    fn random_vector(two_n: usize, seed: u64) -> AmbientVector<f64> {
        let mut rng = substream_rng(seed, 29);
        AmbientVector::new(normal_vector::<f64, _>(&mut rng, two_n)).unwrap()
    }

    #[test]
    fn projection_at_origin_is_coordinate_projection() {
        let a = ChartMatrix::<f64>::zero(3, 2).unwrap();
        let x = random_vector(6, 1);
        let p = chart_projection(&a, &x).unwrap();
        assert_eq!(p.as_slice(), &[x[0], x[1]]);
    }

    #[test]
    fn projection_n1_m1_formula() {
        let a = chart_embed::<f64>(1, 1, &[0.4]).unwrap();
        let x = AmbientVector::from_slice(&[2.0, 3.0]).unwrap();
        let p = chart_projection(&a, &x).unwrap();
        assert_eq!(p[0], 2.0 + 0.4 * 3.0);
    }

    #[test]
    fn projection_matches_span_vector_inner_products() {
        for rep in 0..20 {
            let a = random_chart(3, 2, 600 + rep);
            let x = random_vector(6, 700 + rep);
            let p = chart_projection(&a, &x).unwrap();
            let vs = span_vectors(&a);
            for (j, v) in vs.iter().enumerate() {
                assert!((p[j] - v.dot(&x)).abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn orthogonal_projection_onto_standard_plane() {
        let v = IsotropicFrame::<f64>::standard(3, 2).unwrap();
        let x = random_vector(6, 2);
        let p = orthogonal_projection(&v, &x).unwrap();
        assert_eq!(p.coords().as_slice(), &[x[0], x[1], 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn orthogonal_projection_pythagoras_and_idempotence() {
        for rep in 0..20 {
            let a = random_chart(3, 2, 800 + rep);
            let v = plane_from_chart(&a).unwrap();
            let x = random_vector(6, 900 + rep);
            let p = orthogonal_projection(&v, &x).unwrap();
            let residual_sq = (x.coords() - p.coords()).norm_squared();
            let lhs = x.norm() * x.norm();
            let rhs = p.norm() * p.norm() + residual_sq;
            assert!((lhs - rhs).abs() <= 1e-12);
            let pp = orthogonal_projection(&v, &p).unwrap();
            assert!((pp.coords() - p.coords()).abs().max() <= 1e-13);
        }
    }

    #[test]
    fn phi_at_origin_is_unit_direction_head() {
        let a = ChartMatrix::<f64>::zero(2, 1).unwrap();
        let x = random_vector(4, 3);
        let y = random_vector(4, 4);
        let p = phi(&a, &x, &y).unwrap();
        let diff = x.coords() - y.coords();
        assert!((p[0] - diff[0] / diff.norm()).abs() <= 1e-15);
    }

    #[test]
    fn projection_rejects_dimension_mismatch() {
        let a = ChartMatrix::<f64>::zero(3, 2).unwrap();
        let x = random_vector(4, 77);
        assert!(matches!(
            chart_projection(&a, &x),
            Err(ProjectionError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            jacobian_chart_projection(&a, &x),
            Err(ProjectionError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn phi_rejects_coincident_points() {
        let a = ChartMatrix::<f64>::zero(2, 1).unwrap();
        let x = random_vector(4, 5);
        assert!(matches!(
            phi(&a, &x, &x),
            Err(ProjectionError::CoincidentPoints)
        ));
    }

    #[test]
    fn phi_translation_invariance_is_literal_on_exact_inputs() {
        // dyadic coordinates with few mantissa bits add exactly
        let a = random_chart(2, 2, 6);
        let mut rng = substream_rng(7, 31);
        for _ in 0..20 {
            let dyadic = |rng: &mut rand_chacha::ChaCha8Rng| {
                DVector::<f64>::from_fn(4, |_, _| {
                    let k: i32 = rng.random_range(-64..=64);
                    k as f64 / 64.0
                })
            };
            let x = AmbientVector::new(dyadic(&mut rng)).unwrap();
            let mut y = AmbientVector::new(dyadic(&mut rng)).unwrap();
            if y.coords() == x.coords() {
                y = AmbientVector::new(y.coords() + DVector::from_element(4, 0.5)).unwrap();
            }
            let shift = DVector::<f64>::from_fn(4, |i, _| [0.5, -1.0, 2.0, -0.5][i]);
            let xs = AmbientVector::new(x.coords() + &shift).unwrap();
            let ys = AmbientVector::new(y.coords() + &shift).unwrap();
            assert_eq!(phi(&a, &x, &y).unwrap(), phi(&a, &xs, &ys).unwrap());
        }
    }

    #[test]
    fn phi_scale_invariance() {
        let a = random_chart(2, 2, 8);
        for rep in 0..20 {
            let x = random_vector(4, 1000 + rep);
            let y = random_vector(4, 1100 + rep);
            let x2 = AmbientVector::new(x.coords() * 2.0).unwrap();
            let y2 = AmbientVector::new(y.coords() * 2.0).unwrap();
            let p = phi(&a, &x, &y).unwrap();
            let p2 = phi(&a, &x2, &y2).unwrap();
            assert!((p - p2).abs().max() <= 1e-14);
        }
    }

    #[test]
    fn jacobian_vanishes_when_tail_coordinates_vanish() {
        let a = ChartMatrix::<f64>::zero(3, 2).unwrap();
        let mut coords = DVector::<f64>::zeros(6);
        coords[0] = 1.5;
        coords[1] = -2.0;
        let x = AmbientVector::new(coords).unwrap();
        let jac = jacobian_chart_projection(&a, &x).unwrap();
        assert_eq!(jac.abs().max(), 0.0);
    }

    #[test]
    fn jacobian_n1_m1_is_second_coordinate() {
        let a = chart_embed::<f64>(1, 1, &[0.3]).unwrap();
        let x = AmbientVector::from_slice(&[5.0, 7.0]).unwrap();
        let jac = jacobian_chart_projection(&a, &x).unwrap();
        assert_eq!(jac.shape(), (1, 1));
        assert_eq!(jac[(0, 0)], 7.0);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        for (n, m) in [(2, 1), (2, 2), (3, 2), (3, 3), (4, 3)] {
            for rep in 0..20 {
                let a = random_chart(n, m, 1200 + rep);
                let x = random_vector(2 * n, 1300 + rep);
                let analytic = jacobian_chart_projection(&a, &x).unwrap();
                let free = a.free_parameters();
                let fd = central_jacobian(
                    |f| {
                        let chart = chart_embed(n, m, f).unwrap();
                        chart_projection(&chart, &x).unwrap()
                    },
                    &free,
                    m,
                    1e-5,
                );
                let gap = (&analytic - &fd).abs().max();
                assert!(gap <= 1e-7, "(n,m)=({n},{m}) rep {rep}: gap {gap:.3e}");
            }
        }
    }

    #[test]
    fn gram_matrix_m1_is_delta() {
        let a = ChartMatrix::<f64>::zero(2, 1).unwrap();
        let x = random_vector(4, 9);
        let g = gram_matrix(&a, &x).unwrap();
        assert_eq!(g.shape(), (1, 1));
        assert!((g[(0, 0)] - delta(&x, 1)).abs() <= 1e-14);
    }

    #[test]
    fn gram_matrix_closed_form_at_origin() {
        let a = ChartMatrix::<f64>::zero(2, 2).unwrap();
        let x = AmbientVector::from_slice(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        let g = gram_matrix(&a, &x).unwrap();
        assert_eq!(g, DMatrix::identity(2, 2));
    }

    #[test]
    fn gram_matrix_origin_structure_random() {
        for (n, m) in [(2, 2), (3, 2), (4, 3)] {
            let a = ChartMatrix::<f64>::zero(n, m).unwrap();
            for rep in 0..10 {
                let x = random_vector(2 * n, 1400 + rep);
                let g = gram_matrix(&a, &x).unwrap();
                let d = delta(&x, m);
                for i in 0..m {
                    assert!((g[(i, i)] - d).abs() <= 1e-12 * d.max(1.0));
                    for j in 0..m {
                        if i != j {
                            let expect = x[n + i] * x[n + j];
                            assert!((g[(i, j)] - expect).abs() <= 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn gram_matrix_is_positive_semidefinite() {
        for rep in 0..20 {
            let a = random_chart(3, 2, 1500 + rep);
            let x = random_vector(6, 1600 + rep);
            let g = gram_matrix(&a, &x).unwrap();
            let eigen = g.symmetric_eigen();
            for &lambda in eigen.eigenvalues.iter() {
                assert!(lambda >= -1e-12);
            }
        }
    }

    #[test]
    fn lambda_sequences_examples() {
        assert_eq!(lambda_sequences(2, 2).unwrap(), vec![vec![1, 2]]);
        assert_eq!(
            lambda_sequences(3, 2).unwrap(),
            vec![vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert!(lambda_sequences(3, 1).is_err());
        assert!(lambda_sequences(3, 4).is_err());
    }

    #[test]
    fn lambda_sequences_counts_are_binomial() {
        fn binomial(m: usize, i: usize) -> usize {
            let mut num = 1usize;
            let mut den = 1usize;
            for k in 0..i {
                num *= m - k;
                den *= k + 1;
            }
            num / den
        }
        for m in 2..=8 {
            for i in 2..=m {
                assert_eq!(lambda_sequences(m, i).unwrap().len(), binomial(m, i));
            }
        }
    }

    #[test]
    fn det_closed_form_m1_is_delta() {
        let x = random_vector(4, 10);
        assert_eq!(det_closed_form(&x, 2, 1).unwrap(), delta(&x, 1));
    }

    #[test]
    fn det_closed_form_m2_hand_expansion() {
        let x = random_vector(6, 11);
        let (n, m) = (3, 2);
        let d = delta(&x, m);
        let hand = d * d - x[n] * x[n] * x[n + 1] * x[n + 1];
        let closed = det_closed_form(&x, n, m).unwrap();
        assert!((closed - hand).abs() <= 1e-12 * hand.abs().max(1.0));
    }

    #[test]
    fn det_closed_form_matches_numeric_determinant() {
        for n in 1..=5usize {
            for m in 1..=n {
                let a = ChartMatrix::<f64>::zero(n, m).unwrap();
                for rep in 0..20 {
                    let x = random_vector(2 * n, (2000 + 37 * n + m) as u64 + rep);
                    let closed = det_closed_form(&x, n, m).unwrap();
                    let numeric = gram_matrix(&a, &x).unwrap().determinant();
                    let scale = closed.abs().max(numeric.abs()).max(1e-300);
                    assert!(
                        (closed - numeric).abs() / scale <= 1e-10,
                        "(n,m)=({n},{m}): closed {closed:.6e} numeric {numeric:.6e}"
                    );
                }
            }
        }
    }

    #[test]
    fn lower_bound_no_conjugate_mass_gives_equality() {
        // b with b_{n+1} = ... = b_{n+m} = 0 makes every off-diagonal vanish
        let (n, m) = (3, 2);
        let mut coords = DVector::<f64>::zeros(6);
        coords[0] = 0.6;
        coords[2] = 0.8; // index n-1 = 2 is not in {n..n+m-1}? n=3: conjugate block is 3,4
        let b = AmbientVector::new(coords).unwrap();
        assert!((b.norm() - 1.0).abs() <= 1e-12);
        let check = transversality_lower_bound(&b, n, m).unwrap();
        let d = check.delta;
        assert!((check.det - d * d).abs() <= 1e-14);
        assert!(check.ok);
    }

    #[test]
    fn lower_bound_degenerate_direction_inside_plane() {
        let b = AmbientVector::<f64>::standard_basis(4, 0);
        let check = transversality_lower_bound(&b, 2, 1).unwrap();
        assert_eq!(check.det, 0.0);
        assert_eq!(check.delta, 0.0);
        assert_eq!(check.bound, 0.0);
        assert!(check.ok);
    }

    #[test]
    fn lower_bound_rejects_nonunit_direction() {
        let b = AmbientVector::from_slice(&[1.0, 1.0]).unwrap();
        assert!(matches!(
            transversality_lower_bound(&b, 1, 1),
            Err(ProjectionError::NotUnit { .. })
        ));
    }

    #[test]
    fn lower_bound_monte_carlo_sweep() {
        let mut rng = substream_rng(12, 41);
        for (n, m) in [(1, 1), (2, 2), (3, 2), (4, 4)] {
            for _ in 0..2000 {
                let b = AmbientVector::new(unit_vector::<f64, _>(&mut rng, 2 * n)).unwrap();
                let check = transversality_lower_bound(&b, n, m).unwrap();
                assert!(check.ok);
                assert!(check.det >= check.intermediate - 1e-12);
                assert!(check.intermediate >= check.bound - 1e-12);
                assert!(check.delta_gap <= 1e-13);
            }
        }
    }

    #[test]
    fn span_vectors_remain_isotropic_under_projection_identities() {
        // cross-module consistency: pi_A(x) equals inner products against an
        // isotropic basis, so the frame pairing of the plane vanishes
        let a = random_chart(3, 2, 13);
        let vs = span_vectors(&a);
        assert!(standard_form(&vs[0], &vs[1]).unwrap().abs() <= 1e-12);
    }
}
