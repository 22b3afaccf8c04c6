//! Numerical transversality certificate for the isotropic projection family.
//!
//! The certified statement, checked by Monte Carlo sampling: with
//! `0 < C_T <= 2^{-(m+2)/2}`, Lipschitz bounds `L_1` for
//! `(A, b) -> P_{V_A}(b)` and `L_2` for the determinant map
//! `(A, b) -> det(D_A (D_A)^T)` on the unit chart ball, and
//! `eps = min(C_T / L_1, (1 - 4 C_T^2)^m / (4 L_2))`, every chart point with
//! `|A| < eps` and every unit direction `b` with `|P_{V_A}(b)| <= C_T`
//! satisfies `det(D_A Phi (D_A Phi)^T) >= C_T^2`.
//!
//! `P_{V_A}` is evaluated in the coordinates of the orthonormalized frame of
//! the chart plane, and its chart derivatives are taken by central finite
//! differences; the analytic Jacobian is maintained only for the raw chart
//! projection, whose derivatives agree with the orthonormal-frame ones at
//! the chart origin.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use thiserror::Error;

use crate::grassmannian::{chart_embed, chart_free_count, plane_from_chart, ChartMatrix};
use crate::numdiff::{central_gradient, central_jacobian};
use crate::projection::{det_closed_form, jacobian_chart_projection};
use crate::scalar::{real, validation_tol, Scalar};
use crate::stream::{ball_vector, base, substream_rng, unit_vector};
use crate::symplectic::AmbientVector;

/// Finite-difference step for first derivatives of the frame projection.
pub const FD_STEP: f64 = 1e-5;
/// Outer finite-difference step for derivatives of the determinant map.
const FD_STEP_OUTER: f64 = 1e-4;
/// Safety factor applied to sampled Lipschitz maxima.
const LIPSCHITZ_SAFETY: f64 = 1.5;
/// Slack on the determinant comparison, absorbing double-precision noise.
const DET_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertificateError {
    #[error("C_T must satisfy 0 < C_T <= {max:.6}, got {got}")]
    CtOutOfRange { got: f64, max: f64 },
    #[error("grid and samples must be at least 1")]
    EmptyBudget,
    #[error("invalid plane parameters n={n}, m={m}")]
    InvalidShape { n: usize, m: usize },
}

/// Largest admissible transversality constant, `2^{-(m+2)/2}`.
pub fn max_admissible_ct<T: Scalar>(m: usize) -> T {
    real::<T>(2.0f64.powf(-(m as f64 + 2.0) / 2.0))
}

/// Result of a certificate run.
#[derive(Debug, Clone, PartialEq)]
pub struct TransversalityReport<T: Scalar> {
    pub n: usize,
    pub m: usize,
    pub c_t: T,
    /// Chart-ball radius `min(C_T / L_1, (1 - 4 C_T^2)^m / (4 L_2))`.
    pub epsilon: T,
    pub l1: T,
    pub l2: T,
    pub samples: usize,
    /// Samples whose frame projection norm was at most `C_T`.
    pub qualifying: usize,
    /// Smallest `det - C_T^2` among qualifying samples (infinite when no
    /// sample qualified).
    pub min_margin: T,
    pub violations: usize,
}

/// Per-sample detail of a certificate run.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateSample<T: Scalar> {
    pub index: usize,
    pub chart_norm: T,
    pub phi_norm: T,
    pub qualifying: bool,
    pub det: T,
    pub margin: T,
}

/// Frame-coordinate projection of `b` onto the plane of the chart with the
/// given independent entries.
fn frame_projection<T: Scalar>(n: usize, m: usize, free: &[T], b: &DVector<T>) -> DVector<T> {
    let chart = chart_embed(n, m, free).expect("free vector has the chart length");
    let frame = plane_from_chart(&chart).expect("chart planes have independent span vectors");
    frame.columns().transpose() * b
}

/// `det(J J^T)` of the finite-difference chart Jacobian of the frame
/// projection at the given chart point.
fn frame_det<T: Scalar>(n: usize, m: usize, free: &[T], b: &DVector<T>, step: T) -> T {
    let jac = central_jacobian(|f| frame_projection(n, m, f, b), free, m, step);
    (&jac * jac.transpose()).determinant()
}

/// Draws a chart matrix with Frobenius norm strictly below `radius` by
/// sampling free coordinates in a ball and shrinking until the constrained
/// matrix fits (the dependent entries are quadratic, so this terminates).
fn sample_chart_in_ball<T: Scalar, R: rand::Rng>(
    n: usize,
    m: usize,
    radius: T,
    rng: &mut R,
) -> ChartMatrix<T> {
    let free_len = chart_free_count(n, m).expect("validated shape");
    let mut free = ball_vector::<T, R>(rng, free_len, radius);
    loop {
        let chart = chart_embed(n, m, free.as_slice()).expect("free vector has the chart length");
        let norm = chart.frobenius_norm();
        if norm < radius {
            return chart;
        }
        free *= real::<T>(0.9) * radius / norm;
    }
}

/// Sampled Lipschitz estimates for the frame projection and its determinant
/// map over the unit chart ball times the sphere, inflated by a safety
/// factor and clamped to at least 1.
fn estimate_lipschitz<T: Scalar>(n: usize, m: usize, grid: usize, seed: u64) -> (T, T) {
    let directions = 8 * grid;
    let charts: Vec<Vec<T>> = (0..grid)
        .map(|k| {
            let mut rng = substream_rng(seed, base::LIPSCHITZ_CHART + k as u64);
            sample_chart_in_ball(n, m, real::<T>(0.999), &mut rng).free_parameters()
        })
        .collect();
    let dirs: Vec<DVector<T>> = (0..directions)
        .map(|k| {
            let mut rng = substream_rng(seed, base::LIPSCHITZ_DIRECTION + k as u64);
            unit_vector(&mut rng, 2 * n)
        })
        .collect();

    let step = real::<T>(FD_STEP);
    let outer = real::<T>(FD_STEP_OUTER);
    let pairs: Vec<(usize, usize)> = (0..charts.len())
        .flat_map(|i| (0..dirs.len()).map(move |j| (i, j)))
        .collect();
    let (max_l1, max_l2) = pairs
        .par_iter()
        .map(|&(ci, di)| {
            let free = &charts[ci];
            let b = &dirs[di];
            // derivative of the projection in chart directions; in the b
            // directions the map is linear with operator norm exactly 1
            let jac = central_jacobian(|f| frame_projection(n, m, f, b), free, m, step);
            let l1 = (jac.norm_squared() + T::one()).sqrt();
            // joint gradient of the determinant map
            let grad_chart = central_gradient(|f| frame_det(n, m, f, b, step), free, outer);
            let grad_dir = central_gradient(
                |bc| frame_det(n, m, free, &DVector::from_row_slice(bc), step),
                b.as_slice(),
                outer,
            );
            let l2 = (grad_chart.norm_squared() + grad_dir.norm_squared()).sqrt();
            (l1, l2)
        })
        .reduce(
            || (T::zero(), T::zero()),
            |(a1, a2), (b1, b2)| (a1.max(b1), a2.max(b2)),
        );

    let safety = real::<T>(LIPSCHITZ_SAFETY);
    (
        (max_l1 * safety).max(T::one()),
        (max_l2 * safety).max(T::one()),
    )
}

/// Runs the certificate and returns the report together with the per-sample
/// rows.
pub fn transversality_certificate_with_samples<T: Scalar>(
    n: usize,
    m: usize,
    c_t: T,
    grid: usize,
    samples: usize,
    seed: u64,
) -> Result<(TransversalityReport<T>, Vec<CertificateSample<T>>), CertificateError> {
    if m == 0 || m > n {
        return Err(CertificateError::InvalidShape { n, m });
    }
    let max_ct = max_admissible_ct::<T>(m);
    if c_t <= T::zero() || c_t > max_ct {
        return Err(CertificateError::CtOutOfRange {
            got: c_t.to_f64().unwrap_or(f64::NAN),
            max: max_ct.to_f64().unwrap_or(f64::NAN),
        });
    }
    if grid == 0 || samples == 0 {
        return Err(CertificateError::EmptyBudget);
    }

    let (l1, l2) = estimate_lipschitz::<T>(n, m, grid, seed);
    let four = real::<T>(4.0);
    let shrink = (T::one() - four * c_t * c_t).powi(m as i32) / (four * l2);
    let epsilon = (c_t / l1).min(shrink);

    let step = real::<T>(FD_STEP);
    let slack = real::<T>(DET_SLACK);
    let ct_sq = c_t * c_t;
    let rows: Vec<CertificateSample<T>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream_rng(seed, base::CERTIFICATE_SAMPLE + k as u64);
            let chart = sample_chart_in_ball(n, m, epsilon, &mut rng);
            let b: DVector<T> = unit_vector(&mut rng, 2 * n);
            let free = chart.free_parameters();
            let phi_norm = frame_projection(n, m, &free, &b).norm();
            let det = frame_det(n, m, &free, &b, step);
            CertificateSample {
                index: k,
                chart_norm: chart.frobenius_norm(),
                phi_norm,
                qualifying: phi_norm <= c_t,
                det,
                margin: det - ct_sq,
            }
        })
        .collect();

    let mut qualifying = 0;
    let mut violations = 0;
    let mut min_margin = T::from_f64(f64::INFINITY).expect("infinity converts");
    for row in &rows {
        if row.qualifying {
            qualifying += 1;
            min_margin = min_margin.min(row.margin);
            if row.det < ct_sq - slack {
                violations += 1;
            }
        }
    }

    let report = TransversalityReport {
        n,
        m,
        c_t,
        epsilon,
        l1,
        l2,
        samples,
        qualifying,
        min_margin,
        violations,
    };
    Ok((report, rows))
}

/// Monte Carlo transversality certificate; see the module docs for the
/// statement being sampled.
pub fn transversality_certificate<T: Scalar>(
    n: usize,
    m: usize,
    c_t: T,
    grid: usize,
    samples: usize,
    seed: u64,
) -> Result<TransversalityReport<T>, CertificateError> {
    transversality_certificate_with_samples(n, m, c_t, grid, samples, seed).map(|(r, _)| r)
}

/// Gaps between the raw chart projection and the orthonormal-frame
/// projection at the chart origin: identical values, and identical chart
/// derivatives up to finite-difference error.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameDerivativeGap<T: Scalar> {
    /// `max_i |(v_i^0 | b) - (e_i^0 | b)|`; exactly zero, the frames agree.
    pub value_gap: T,
    /// Largest discrepancy between finite differences of the frame
    /// projection and the analytic chart-projection Jacobian at the origin.
    pub derivative_gap: T,
    /// `|det closed form - det of the finite-difference frame Gram|`.
    pub det_gap: T,
}

/// Checks that at the chart origin the orthonormal-frame projection agrees
/// with the raw chart projection in value and in chart derivatives, and that
/// the closed-form determinant matches the finite-difference frame Gram
/// determinant.
pub fn frame_derivative_identity_check<T: Scalar>(
    n: usize,
    m: usize,
    b: &AmbientVector<T>,
) -> Result<FrameDerivativeGap<T>, CertificateError> {
    if m == 0 || m > n {
        return Err(CertificateError::InvalidShape { n, m });
    }
    let norm = b.norm();
    if (norm - T::one()).abs() > validation_tol(1e-12) {
        return Err(CertificateError::CtOutOfRange {
            got: norm.to_f64().unwrap_or(f64::NAN),
            max: 1.0,
        });
    }
    let free_len = chart_free_count(n, m).expect("validated shape");
    let origin = vec![T::zero(); free_len];
    let chart = ChartMatrix::zero(n, m).expect("validated shape");

    let frame_values = frame_projection(n, m, &origin, b.coords());
    let chart_values =
        crate::projection::chart_projection(&chart, b).expect("dimensions agree by construction");
    let value_gap = (&frame_values - &chart_values).abs().max();

    let step = real::<T>(FD_STEP);
    let fd: DMatrix<T> =
        central_jacobian(|f| frame_projection(n, m, f, b.coords()), &origin, m, step);
    let analytic = jacobian_chart_projection(&chart, b).expect("dimensions agree");
    let derivative_gap = (&fd - &analytic).abs().max();

    let det_fd = (&fd * fd.transpose()).determinant();
    let det_closed = det_closed_form(b, n, m).expect("validated shape");
    let det_gap = (det_fd - det_closed).abs();

    Ok(FrameDerivativeGap {
        value_gap,
        derivative_gap,
        det_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::substream_rng;

    #[test]
    fn max_ct_for_lines_is_two_to_minus_three_halves() {
        let ct = max_admissible_ct::<f64>(1);
        assert!((ct - 0.3535533905932738).abs() < 1e-15);
    }

    #[test]
    fn ct_range_is_enforced() {
        assert!(matches!(
            transversality_certificate::<f64>(1, 1, 0.5, 4, 10, 0),
            Err(CertificateError::CtOutOfRange { .. })
        ));
        assert!(matches!(
            transversality_certificate::<f64>(1, 1, 0.0, 4, 10, 0),
            Err(CertificateError::CtOutOfRange { .. })
        ));
        assert!(matches!(
            transversality_certificate::<f64>(1, 1, 0.25, 0, 10, 0),
            Err(CertificateError::EmptyBudget)
        ));
    }

    #[test]
    fn small_certificate_run_has_no_violations() {
        let (report, rows) =
            transversality_certificate_with_samples::<f64>(1, 1, 0.25, 8, 500, 0).unwrap();
        assert_eq!(report.samples, 500);
        assert_eq!(rows.len(), 500);
        assert!(report.qualifying > 0, "no qualifying samples");
        assert_eq!(report.violations, 0);
        assert!(report.min_margin > 0.0);
        assert!(report.epsilon > 0.0);
        assert!(report.l1 >= 1.0 && report.l2 >= 1.0);
        for row in &rows {
            assert!(row.chart_norm < report.epsilon);
        }
    }

    #[test]
    fn certificate_is_deterministic() {
        let a = transversality_certificate::<f64>(2, 1, 0.2, 4, 200, 7).unwrap();
        let b = transversality_certificate::<f64>(2, 1, 0.2, 4, 200, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn certificate_n2_m2_small_ct_has_no_violations() {
        let report = transversality_certificate::<f64>(2, 2, 0.1, 8, 2000, 1).unwrap();
        assert_eq!(report.violations, 0);
        // the chart-ball radius follows the stated formula
        let shrink = (1.0 - 4.0 * 0.1f64 * 0.1).powi(2) / (4.0 * report.l2);
        let expected = (0.1 / report.l1).min(shrink);
        assert_eq!(report.epsilon, expected);
    }

    #[test]
    fn frame_identity_check_at_origin() {
        let mut rng = substream_rng(5, 71);
        for _ in 0..10 {
            let b = AmbientVector::new(crate::stream::unit_vector::<f64, _>(&mut rng, 4)).unwrap();
            let gaps = frame_derivative_identity_check(2, 2, &b).unwrap();
            assert_eq!(gaps.value_gap, 0.0);
            assert!(
                gaps.derivative_gap <= 1e-6,
                "derivative gap {:.3e}",
                gaps.derivative_gap
            );
            assert!(gaps.det_gap <= 1e-5, "det gap {:.3e}", gaps.det_gap);
        }
    }
}
