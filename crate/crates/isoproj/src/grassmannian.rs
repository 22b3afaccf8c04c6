//! Local coordinates on the isotropic Grassmannian `G_h(n, m)`: constrained
//! chart matrices, span vectors, orthonormalization, and Haar-distributed
//! sampling of isotropic m-planes through the unitary action.
//!
//! A chart matrix is a `(2n-m) x m` matrix `A = (a_ij)` whose dependent
//! entries satisfy, for `j < i <= m`,
//!
//! ```text
//! a_{(n-m+i)j} = a_{(n-m+j)i} + sum_{k=1}^{n-m} (a_kj a_{(n+k)i} - a_{(n+k)j} a_ki)
//! ```
//!
//! which is exactly the condition making the plane spanned by
//! `e_i^A = e_i + sum_k a_ki e_{k+m}` isotropic. The independent entries are
//! those with `j in {1..m}` and `i in {1..n-m+j} u {n+1..2n-m}`; this crate
//! fixes their global order to column-major (j ascending, then i ascending),
//! which is also the Jacobian column order used by the transversality
//! machinery.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::Rng;
use thiserror::Error;

use crate::scalar::{validation_tol, Scalar};
use crate::stream::{base, standard_normal, substream_rng};
use crate::symplectic::{gram_identity_deviation, max_pairing, AmbientVector, Subspace};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChartError {
    #[error("chart parameters require 0 < m <= n, got n={n}, m={m}")]
    InvalidShape { n: usize, m: usize },
    #[error("free vector must have length {expected}, got {got}")]
    WrongFreeLength { expected: usize, got: usize },
    #[error("matrix shape must be {rows}x{cols}, got {got_rows}x{got_cols}")]
    WrongMatrixShape {
        rows: usize,
        cols: usize,
        got_rows: usize,
        got_cols: usize,
    },
    #[error("constraint residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    ConstraintViolated { residual: f64, tol: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("frame columns are numerically dependent")]
    DependentVectors,
    #[error("frame is not orthonormal (max Gram deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },
    #[error("frame is not isotropic (max pairing {pairing:.3e})")]
    NotIsotropic { pairing: f64 },
    #[error("frame parameters require 0 < m <= n, got n={n}, m={m}")]
    InvalidShape { n: usize, m: usize },
}

/// Dimension of `G_h(n, m)`: the number of independent chart entries,
/// `2nm - m(3m-1)/2`.
pub fn chart_free_count(n: usize, m: usize) -> Result<usize, ChartError> {
    if m == 0 || m > n {
        return Err(ChartError::InvalidShape { n, m });
    }
    Ok(2 * n * m - m * (3 * m - 1) / 2)
}

/// Independent entry positions `(row, col)` (0-based) in the global
/// column-major order. Row `i` and column `j` are independent (1-based)
/// when `i in {1..n-m+j} u {n+1..2n-m}`.
pub fn independent_entries(n: usize, m: usize) -> Vec<(usize, usize)> {
    let mut entries = Vec::new();
    for j in 1..=m {
        for i in 1..=(n - m + j) {
            entries.push((i - 1, j - 1));
        }
        for i in (n + 1)..=(2 * n - m) {
            entries.push((i - 1, j - 1));
        }
    }
    entries
}

/// A `(2n-m) x m` matrix in the isotropic chart `M_h(n, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartMatrix<T: Scalar> {
    entries: DMatrix<T>,
    n: usize,
    m: usize,
}

impl<T: Scalar> ChartMatrix<T> {
    /// The chart origin `A = 0`, whose plane is `span{e_1, ..., e_m}`.
    pub fn zero(n: usize, m: usize) -> Result<Self, ChartError> {
        chart_free_count(n, m)?;
        Ok(Self {
            entries: DMatrix::zeros(2 * n - m, m),
            n,
            m,
        })
    }

    /// Builds the chart matrix from its independent entries, filling the
    /// dependent entries directly from the constraint. The right-hand side
    /// involves only independent entries, so the residual is exactly zero.
    pub fn from_free(n: usize, m: usize, free: &[T]) -> Result<Self, ChartError> {
        let expected = chart_free_count(n, m)?;
        if free.len() != expected {
            return Err(ChartError::WrongFreeLength {
                expected,
                got: free.len(),
            });
        }
        let mut entries = DMatrix::zeros(2 * n - m, m);
        for (&value, &(row, col)) in free.iter().zip(independent_entries(n, m).iter()) {
            entries[(row, col)] = value;
        }
        let mut chart = Self { entries, n, m };
        chart.fill_dependent();
        Ok(chart)
    }

    /// Wraps a full matrix, validating shape and the constraint residual.
    pub fn from_matrix(n: usize, m: usize, entries: DMatrix<T>) -> Result<Self, ChartError> {
        chart_free_count(n, m)?;
        let (rows, cols) = entries.shape();
        if rows != 2 * n - m || cols != m {
            return Err(ChartError::WrongMatrixShape {
                rows: 2 * n - m,
                cols: m,
                got_rows: rows,
                got_cols: cols,
            });
        }
        let chart = Self { entries, n, m };
        let residual = chart.constraint_residual();
        let tol = validation_tol(1e-12);
        if residual > tol {
            return Err(ChartError::ConstraintViolated {
                residual: residual.to_f64().unwrap_or(f64::NAN),
                tol: tol.to_f64().unwrap_or(1e-12),
            });
        }
        Ok(chart)
    }

    fn fill_dependent(&mut self) {
        let (n, m) = (self.n, self.m);
        for j in 1..=m {
            for i in (j + 1)..=m {
                let mut value = self.at(n - m + j, i);
                for k in 1..=(n - m) {
                    value += self.at(k, j) * self.at(n + k, i) - self.at(n + k, j) * self.at(k, i);
                }
                self.entries[(n - m + i - 1, j - 1)] = value;
            }
        }
    }

    /// 1-based entry accessor `a_{ij}`.
    #[inline]
    pub(crate) fn at(&self, i: usize, j: usize) -> T {
        self.entries[(i - 1, j - 1)]
    }

    /// Largest absolute deviation from the defining constraint.
    pub fn constraint_residual(&self) -> T {
        let (n, m) = (self.n, self.m);
        let mut residual = T::zero();
        for j in 1..=m {
            for i in (j + 1)..=m {
                let mut rhs = self.at(n - m + j, i);
                for k in 1..=(n - m) {
                    rhs += self.at(k, j) * self.at(n + k, i) - self.at(n + k, j) * self.at(k, i);
                }
                residual = residual.max((self.at(n - m + i, j) - rhs).abs());
            }
        }
        residual
    }

    /// Extracts the independent entries in the global column-major order.
    pub fn free_parameters(&self) -> Vec<T> {
        independent_entries(self.n, self.m)
            .into_iter()
            .map(|(row, col)| self.entries[(row, col)])
            .collect()
    }

    pub fn entries(&self) -> &DMatrix<T> {
        &self.entries
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn free_len(&self) -> usize {
        chart_free_count(self.n, self.m).expect("shape was validated at construction")
    }

    /// Frobenius norm of the full constrained matrix.
    pub fn frobenius_norm(&self) -> T {
        self.entries.norm()
    }
}

/// Builds the chart matrix in `M_h(n, m)` from its independent entries.
pub fn chart_embed<T: Scalar>(
    n: usize,
    m: usize,
    free: &[T],
) -> Result<ChartMatrix<T>, ChartError> {
    ChartMatrix::from_free(n, m, free)
}

/// The span vectors `e_i^A = e_i + sum_{k=1}^{2n-m} a_ki e_{k+m}` of the
/// plane associated to `A`; their span is isotropic iff `A` satisfies the
/// chart constraint.
pub fn span_vectors<T: Scalar>(a: &ChartMatrix<T>) -> Vec<AmbientVector<T>> {
    let (n, m) = (a.n(), a.m());
    (1..=m)
        .map(|i| {
            let mut coords = DVector::zeros(2 * n);
            coords[i - 1] = T::one();
            for k in 1..=(2 * n - m) {
                coords[k + m - 1] = a.at(k, i);
            }
            AmbientVector::new(coords).expect("span vector has even ambient dimension")
        })
        .collect()
}

/// An orthonormal frame spanning an isotropic m-plane `V` in `G_h(n, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotropicFrame<T: Scalar> {
    columns: DMatrix<T>,
    n: usize,
    m: usize,
}

impl<T: Scalar> IsotropicFrame<T> {
    /// Validates orthonormality and isotropy, both at tolerance `1e-10`.
    pub fn new(columns: DMatrix<T>) -> Result<Self, FrameError> {
        let (rows, m) = columns.shape();
        if rows == 0 || !rows.is_multiple_of(2) || m == 0 || m > rows / 2 {
            return Err(FrameError::InvalidShape { n: rows / 2, m });
        }
        let deviation = gram_identity_deviation(&columns);
        if deviation > validation_tol(1e-10) {
            return Err(FrameError::NotOrthonormal {
                deviation: deviation.to_f64().unwrap_or(f64::NAN),
            });
        }
        let pairing = max_pairing(&columns);
        if pairing > validation_tol(1e-10) {
            return Err(FrameError::NotIsotropic {
                pairing: pairing.to_f64().unwrap_or(f64::NAN),
            });
        }
        let n = rows / 2;
        Ok(Self { columns, n, m })
    }

    /// Used where orthonormality and isotropy hold by construction.
    pub(crate) fn from_columns_unchecked(columns: DMatrix<T>) -> Self {
        let (rows, m) = columns.shape();
        debug_assert!(rows.is_multiple_of(2) && m <= rows / 2);
        let n = rows / 2;
        Self { columns, n, m }
    }

    /// The standard frame `(e_1, ..., e_m)`.
    pub fn standard(n: usize, m: usize) -> Result<Self, FrameError> {
        if m == 0 || m > n {
            return Err(FrameError::InvalidShape { n, m });
        }
        let columns = DMatrix::from_fn(2 * n, m, |i, j| if i == j { T::one() } else { T::zero() });
        Ok(Self { columns, n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ambient_dim(&self) -> usize {
        2 * self.n
    }

    pub fn columns(&self) -> &DMatrix<T> {
        &self.columns
    }

    pub fn vector(&self, j: usize) -> AmbientVector<T> {
        AmbientVector::new(self.columns.column(j).into_owned())
            .expect("frame columns have even ambient dimension")
    }

    pub fn to_subspace(&self) -> Subspace<T> {
        Subspace::orthonormal(self.columns.clone()).expect("frame is orthonormal by construction")
    }
}

/// Modified Gram-Schmidt in index order with one reorthogonalization pass.
pub(crate) fn orthonormalize_columns<T: Scalar>(
    mut columns: DMatrix<T>,
) -> Result<DMatrix<T>, FrameError> {
    let m = columns.ncols();
    let dependency_tol = validation_tol::<T>(1e-12);
    for i in 0..m {
        let original_norm = columns.column(i).norm();
        for _pass in 0..2 {
            for j in 0..i {
                let c = columns.column(j).dot(&columns.column(i));
                let prev = columns.column(j).into_owned();
                let mut col = columns.column_mut(i);
                col.axpy(-c, &prev, T::one());
            }
        }
        let norm = columns.column(i).norm();
        if norm <= dependency_tol * original_norm.max(T::one()) {
            return Err(FrameError::DependentVectors);
        }
        let mut col = columns.column_mut(i);
        col /= norm;
    }
    Ok(columns)
}

/// Orthonormal frame spanning the same plane as `span_vectors(a)`,
/// deterministic for a given chart matrix.
pub fn plane_from_chart<T: Scalar>(a: &ChartMatrix<T>) -> Result<IsotropicFrame<T>, FrameError> {
    let vectors = span_vectors(a);
    let raw = DMatrix::from_fn(2 * a.n(), a.m(), |i, j| vectors[j][i]);
    let columns = orthonormalize_columns(raw)?;
    IsotropicFrame::new(columns)
}

/// The real `2n x 2n` embedding of a Haar-random unitary of `C^n`, satisfying
/// `g^T g = I` and `g^T J g = J`.
///
/// The unitary is drawn as the Q factor of a complex Gaussian matrix, with
/// the factorization normalized to a positive-diagonal R so that the factor
/// is exactly Haar-distributed. A complex column `x + iy` embeds as the real
/// column `(x, y)`, which maps `U = X + iY` to the block matrix
/// `[[X, -Y], [Y, X]]`.
pub fn haar_unitary<T: Scalar>(n: usize, seed: u64) -> DMatrix<T> {
    let mut rng = substream_rng(seed, base::HAAR);
    haar_unitary_from_rng(n, &mut rng)
}

/// Same as [`haar_unitary`], drawing from a caller-supplied stream.
pub fn haar_unitary_from_rng<T: Scalar, R: Rng>(n: usize, rng: &mut R) -> DMatrix<T> {
    // Complex Ginibre matrix, filled column by column for a fixed draw order.
    let mut u: DMatrix<Complex<T>> = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            u[(i, j)] = Complex::new(standard_normal(rng), standard_normal(rng));
        }
    }
    // Complex modified Gram-Schmidt with reorthogonalization. The implied R
    // factor has positive real diagonal, which is the normalization that
    // makes the Q factor Haar-distributed.
    let one = Complex::new(T::one(), T::zero());
    for i in 0..n {
        for _pass in 0..2 {
            for j in 0..i {
                let c = u.column(j).dotc(&u.column(i));
                let prev = u.column(j).into_owned();
                let mut col = u.column_mut(i);
                col.axpy(-c, &prev, one);
            }
        }
        let norm = u.column(i).norm();
        u.column_mut(i).unscale_mut(norm);
    }
    let mut g = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for i in 0..n {
            let z = u[(i, j)];
            // column j embeds U e_j, column j+n embeds U (i e_j)
            g[(i, j)] = z.re;
            g[(i + n, j)] = z.im;
            g[(i, j + n)] = -z.im;
            g[(i + n, j + n)] = z.re;
        }
    }
    g
}

/// Haar-distributed isotropic m-plane: the image of `span{e_1, ..., e_m}`
/// under an embedded Haar-random unitary. Deterministic given
/// `(n, m, seed)`.
pub fn haar_sample<T: Scalar>(
    n: usize,
    m: usize,
    seed: u64,
) -> Result<IsotropicFrame<T>, FrameError> {
    let mut rng = substream_rng(seed, base::HAAR);
    haar_sample_from_rng(n, m, &mut rng)
}

/// Same as [`haar_sample`], drawing from a caller-supplied stream.
pub fn haar_sample_from_rng<T: Scalar, R: Rng>(
    n: usize,
    m: usize,
    rng: &mut R,
) -> Result<IsotropicFrame<T>, FrameError> {
    if m == 0 || m > n {
        return Err(FrameError::InvalidShape { n, m });
    }
    let g = haar_unitary_from_rng::<T, R>(n, rng);
    // unitary image of the standard isotropic frame: orthonormal and
    // isotropic by invariance of the form
    let columns = g.columns(0, m).into_owned();
    Ok(IsotropicFrame::from_columns_unchecked(columns))
}
