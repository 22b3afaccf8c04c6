//! The standard symplectic form on `R^{2n}`, symplectic orthogonals, and the
//! isotropy / Lagrangian predicates.
//!
//! The form is `w(x, y) = sum_{i=1}^n x_{i+n} y_i - x_i y_{i+n} = (Jx | y)`,
//! where `J` has the `n x n` identity in the top-right block and its negative
//! in the bottom-left block. A subspace `V` is isotropic when `w` vanishes on
//! `V x V`, and Lagrangian when additionally `dim V = n`.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::scalar::{real, validation_tol, Scalar};

/// Default absolute tolerance for the isotropy predicate on unit-normalized
/// frames; leaves headroom above double-precision Gram-Schmidt error.
pub const DEFAULT_ISOTROPY_TOL: f64 = 1e-10;

/// Relative singular-value cutoff used by rank decisions.
pub const RANK_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymplecticError {
    #[error("ambient dimension must be a positive even number, got {0}")]
    OddAmbientDimension(usize),
    #[error("ambient dimensions differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("frame must contain between 1 and 2n vectors, got {got} in R^{ambient}")]
    BadFrameShape { got: usize, ambient: usize },
    #[error("frame is rank deficient")]
    RankDeficient,
    #[error("frame is not orthonormal (max Gram deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },
    #[error("vector is not a unit direction (norm {norm:.12})")]
    NotUnit { norm: f64 },
}

/// A point of `R^{2n}`, or a direction on `S^{2n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientVector<T: Scalar> {
    coords: DVector<T>,
}

impl<T: Scalar> AmbientVector<T> {
    /// Wraps coordinates, requiring a positive even length.
    pub fn new(coords: DVector<T>) -> Result<Self, SymplecticError> {
        if coords.is_empty() || !coords.len().is_multiple_of(2) {
            return Err(SymplecticError::OddAmbientDimension(coords.len()));
        }
        Ok(Self { coords })
    }

    pub fn from_slice(coords: &[T]) -> Result<Self, SymplecticError> {
        Self::new(DVector::from_row_slice(coords))
    }

    /// Wraps a direction, additionally requiring unit Euclidean norm
    /// within `1e-12`.
    pub fn unit(coords: DVector<T>) -> Result<Self, SymplecticError> {
        let v = Self::new(coords)?;
        let norm = v.coords.norm();
        if (norm - T::one()).abs() > validation_tol(1e-12) {
            return Err(SymplecticError::NotUnit {
                norm: norm.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(v)
    }

    /// The standard basis vector `e_k` (0-based) of `R^{ambient}`.
    pub fn standard_basis(ambient: usize, k: usize) -> Self {
        assert!(k < ambient, "basis index out of range");
        assert!(
            ambient > 0 && ambient.is_multiple_of(2),
            "ambient dimension must be even"
        );
        let mut coords = DVector::zeros(ambient);
        coords[k] = T::one();
        Self { coords }
    }

    pub fn zero(ambient: usize) -> Self {
        assert!(
            ambient > 0 && ambient.is_multiple_of(2),
            "ambient dimension must be even"
        );
        Self {
            coords: DVector::zeros(ambient),
        }
    }

    /// Half the ambient dimension.
    pub fn n(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &DVector<T> {
        &self.coords
    }

    pub fn into_coords(self) -> DVector<T> {
        self.coords
    }

    pub fn norm(&self) -> T {
        self.coords.norm()
    }

    pub fn dot(&self, other: &Self) -> T {
        self.coords.dot(&other.coords)
    }
}

impl<T: Scalar> std::ops::Index<usize> for AmbientVector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.coords[i]
    }
}

/// A linear subspace of `R^{2n}` represented by an explicit column frame.
/// Orthonormality is a flag maintained by the constructors, not assumed.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<T: Scalar> {
    columns: DMatrix<T>,
    orthonormal: bool,
}

impl<T: Scalar> Subspace<T> {
    /// A subspace from frame columns (2n rows, one column per vector).
    pub fn new(columns: DMatrix<T>) -> Result<Self, SymplecticError> {
        let (rows, cols) = columns.shape();
        if rows == 0 || !rows.is_multiple_of(2) {
            return Err(SymplecticError::OddAmbientDimension(rows));
        }
        if cols > rows {
            return Err(SymplecticError::BadFrameShape {
                got: cols,
                ambient: rows,
            });
        }
        Ok(Self {
            columns,
            orthonormal: false,
        })
    }

    /// A subspace whose frame is verified orthonormal (Gram matrix within
    /// `1e-10` of the identity).
    pub fn orthonormal(columns: DMatrix<T>) -> Result<Self, SymplecticError> {
        let mut sub = Self::new(columns)?;
        let deviation = gram_identity_deviation(&sub.columns);
        if deviation > validation_tol(1e-10) {
            return Err(SymplecticError::NotOrthonormal {
                deviation: deviation.to_f64().unwrap_or(f64::NAN),
            });
        }
        sub.orthonormal = true;
        Ok(sub)
    }

    pub fn from_vectors(vectors: &[AmbientVector<T>]) -> Result<Self, SymplecticError> {
        if vectors.is_empty() {
            return Err(SymplecticError::BadFrameShape { got: 0, ambient: 0 });
        }
        let ambient = vectors[0].dim();
        for v in vectors {
            if v.dim() != ambient {
                return Err(SymplecticError::DimensionMismatch {
                    left: ambient,
                    right: v.dim(),
                });
            }
        }
        let columns = DMatrix::from_fn(ambient, vectors.len(), |i, j| vectors[j][i]);
        Self::new(columns)
    }

    /// The span of standard basis vectors `e_1, ..., e_m` of `R^{2n}`.
    pub fn standard(n: usize, m: usize) -> Self {
        assert!(m >= 1 && m <= 2 * n);
        let columns = DMatrix::from_fn(2 * n, m, |i, j| if i == j { T::one() } else { T::zero() });
        Self {
            columns,
            orthonormal: true,
        }
    }

    pub fn n(&self) -> usize {
        self.columns.nrows() / 2
    }

    pub fn ambient_dim(&self) -> usize {
        self.columns.nrows()
    }

    /// Number of frame vectors.
    pub fn dim(&self) -> usize {
        self.columns.ncols()
    }

    pub fn columns(&self) -> &DMatrix<T> {
        &self.columns
    }

    pub fn is_flagged_orthonormal(&self) -> bool {
        self.orthonormal
    }

    pub fn vector(&self, j: usize) -> AmbientVector<T> {
        AmbientVector {
            coords: self.columns.column(j).into_owned(),
        }
    }
}

pub(crate) fn gram_identity_deviation<T: Scalar>(columns: &DMatrix<T>) -> T {
    let gram = columns.transpose() * columns;
    let mut dev = T::zero();
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { T::one() } else { T::zero() };
            dev = dev.max((gram[(i, j)] - target).abs());
        }
    }
    dev
}

/// `w(x, y)` on raw coordinate vectors of equal even length.
pub(crate) fn form_raw<T: Scalar>(x: &DVector<T>, y: &DVector<T>) -> T {
    let n = x.len() / 2;
    let mut acc = T::zero();
    for i in 0..n {
        acc += x[i + n] * y[i] - x[i] * y[i + n];
    }
    acc
}

/// The standard symplectic form `w(x, y)`.
pub fn standard_form<T: Scalar>(
    x: &AmbientVector<T>,
    y: &AmbientVector<T>,
) -> Result<T, SymplecticError> {
    if x.dim() != y.dim() {
        return Err(SymplecticError::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    Ok(form_raw(x.coords(), y.coords()))
}

/// The matrix `J` with `+I` in the top-right and `-I` in the bottom-left
/// block, so that `w(x, y) = (Jx | y)`.
pub fn j_matrix<T: Scalar>(n: usize) -> DMatrix<T> {
    assert!(n >= 1);
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, i + n)] = T::one();
        j[(i + n, i)] = -T::one();
    }
    j
}

/// The symplectic orthogonal `V^w = { w : w(w, v) = 0 for all v in V }`,
/// computed as the null space of the pairing matrix via a rank-revealing
/// orthogonal factorization with relative singular-value cutoff `1e-12`.
///
/// The returned frame is orthonormal and has dimension `2n - dim V`.
pub fn symplectic_orthogonal<T: Scalar>(v: &Subspace<T>) -> Result<Subspace<T>, SymplecticError> {
    let two_n = v.ambient_dim();
    let m = v.dim();
    if m == 0 {
        // the zero subspace pairs trivially with everything
        return Subspace::orthonormal(DMatrix::identity(two_n, two_n));
    }
    // Rows of the pairing matrix are (J v_i)^T: w(w, v_i) = -(J v_i | w) up to
    // sign, so its null space is exactly V^w.
    let pairing = (j_matrix::<T>(two_n / 2) * v.columns()).transpose();
    let svd = pairing.clone().svd(false, true);
    let sigma_max = svd.singular_values.iter().fold(T::zero(), |a, &s| a.max(s));
    if sigma_max == T::zero() {
        return Err(SymplecticError::RankDeficient);
    }
    let cutoff = real::<T>(RANK_CUTOFF) * sigma_max;
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut row_space: Vec<DVector<T>> = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff {
            row_space.push(v_t.row(i).transpose());
        }
    }
    // J is orthogonal, so rank(pairing) = rank(frame): a defective rank means
    // the input frame was linearly dependent.
    if row_space.len() < m {
        return Err(SymplecticError::RankDeficient);
    }
    let complement = orthogonal_complement(&row_space, two_n);
    let columns = DMatrix::from_fn(two_n, complement.len(), |i, j| complement[j][i]);
    Subspace::orthonormal(columns)
}

/// Orthonormal basis of the orthogonal complement of the span of `basis`
/// (assumed orthonormal) inside `R^{ambient}`, built by projecting the
/// standard basis with greedy residual pivoting.
fn orthogonal_complement<T: Scalar>(basis: &[DVector<T>], ambient: usize) -> Vec<DVector<T>> {
    let target = ambient - basis.len();
    let mut picked: Vec<DVector<T>> = Vec::with_capacity(target);
    while picked.len() < target {
        let mut best: Option<(T, DVector<T>)> = None;
        for k in 0..ambient {
            let mut w: DVector<T> = DVector::zeros(ambient);
            w[k] = T::one();
            for b in basis.iter().chain(picked.iter()) {
                let c = b.dot(&w);
                w.axpy(-c, b, T::one());
            }
            // reorthogonalization pass
            for b in basis.iter().chain(picked.iter()) {
                let c = b.dot(&w);
                w.axpy(-c, b, T::one());
            }
            let norm = w.norm();
            if best.as_ref().is_none_or(|(n, _)| norm > *n) {
                best = Some((norm, w));
            }
        }
        let (norm, w) = best.expect("ambient dimension is positive");
        picked.push(w / norm);
    }
    picked
}

/// True iff `max_{i,j} |w(v_i, v_j)| <= tol` over the frame vectors.
pub fn is_isotropic<T: Scalar>(v: &Subspace<T>, tol: T) -> bool {
    max_pairing(v.columns()) <= tol
}

/// True iff the subspace is isotropic and has dimension `n`.
pub fn is_lagrangian<T: Scalar>(v: &Subspace<T>, tol: T) -> bool {
    v.dim() == v.n() && is_isotropic(v, tol)
}

/// Largest absolute symplectic pairing between frame columns.
pub(crate) fn max_pairing<T: Scalar>(columns: &DMatrix<T>) -> T {
    let m = columns.ncols();
    let mut max = T::zero();
    for i in 0..m {
        let vi = columns.column(i).into_owned();
        for j in (i + 1)..m {
            let vj = columns.column(j).into_owned();
            max = max.max(form_raw(&vi, &vj).abs());
        }
    }
    max
}
