//! The Heisenberg group `H^n`: points `(z, t)` of `R^{2n} x R` with product
//! `(z, t) * (z', t') = (z + z', t + t' + 2 w(z, z'))`, intrinsic dilations
//! `d_s(z, t) = (s z, s^2 t)`, the gauge norm `(|z|^4 + t^2)^{1/4}` and its
//! left-invariant metric, and the horizontal/vertical projections attached
//! to an isotropic plane.
//!
//! A horizontal subgroup is `V x {0}` for an isotropic subspace `V`, so
//! subgroups are represented here by their [`IsotropicFrame`] alone; frame
//! construction is what rejects non-isotropic planes. Every point decomposes
//! uniquely as `p = P_{V-perp}(p) * P_V(p)`.

use nalgebra::DVector;
use thiserror::Error;

use crate::grassmannian::IsotropicFrame;
use crate::scalar::Scalar;
use crate::symplectic::{form_raw, AmbientVector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeisenbergError {
    #[error("points live in different groups: n={left} vs n={right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("coordinate vector must have odd length 2n+1 >= 3, got {0}")]
    BadCoordinateLength(usize),
    #[error("dilation factor must be positive, got {0}")]
    NonPositiveDilation(f64),
    #[error("plane lives in R^{plane}, point in R^{point}")]
    PlaneMismatch { plane: usize, point: usize },
}

/// A point `(z, t)` of the Heisenberg group `H^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeisenbergPoint<T: Scalar> {
    z: DVector<T>,
    t: T,
}

impl<T: Scalar> HeisenbergPoint<T> {
    pub fn new(z: AmbientVector<T>, t: T) -> Self {
        Self {
            z: z.into_coords(),
            t,
        }
    }

    /// From the flat coordinates `(z_1, ..., z_{2n}, t)`.
    pub fn from_coords(coords: &[T]) -> Result<Self, HeisenbergError> {
        if coords.len() < 3 || coords.len().is_multiple_of(2) {
            return Err(HeisenbergError::BadCoordinateLength(coords.len()));
        }
        let (z, t) = coords.split_at(coords.len() - 1);
        Ok(Self {
            z: DVector::from_row_slice(z),
            t: t[0],
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            z: DVector::zeros(2 * n),
            t: T::zero(),
        }
    }

    pub fn n(&self) -> usize {
        self.z.len() / 2
    }

    pub fn z(&self) -> &DVector<T> {
        &self.z
    }

    pub fn t(&self) -> T {
        self.t
    }

    /// Group product `p * q`.
    pub fn group_op(&self, other: &Self) -> Result<Self, HeisenbergError> {
        if self.n() != other.n() {
            return Err(HeisenbergError::DimensionMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        let two = T::one() + T::one();
        Ok(Self {
            z: &self.z + &other.z,
            t: self.t + other.t + two * form_raw(&self.z, &other.z),
        })
    }

    /// Group inverse `(-z, -t)`.
    pub fn inverse(&self) -> Self {
        Self {
            z: -&self.z,
            t: -self.t,
        }
    }
}

/// Intrinsic dilation `d_s(z, t) = (s z, s^2 t)`, `s > 0`.
pub fn dilation<T: Scalar>(
    s: T,
    p: &HeisenbergPoint<T>,
) -> Result<HeisenbergPoint<T>, HeisenbergError> {
    if s <= T::zero() {
        return Err(HeisenbergError::NonPositiveDilation(
            s.to_f64().unwrap_or(f64::NAN),
        ));
    }
    Ok(HeisenbergPoint {
        z: &p.z * s,
        t: p.t * s * s,
    })
}

/// The gauge norm `(|z|^4 + t^2)^{1/4}`.
pub fn heis_norm<T: Scalar>(p: &HeisenbergPoint<T>) -> T {
    let z_sq = p.z.norm_squared();
    let quarter = T::one() / (T::one() + T::one() + T::one() + T::one());
    (z_sq * z_sq + p.t * p.t).powf(quarter)
}

/// Left-invariant distance `d_H(p, q) = |p^{-1} * q|_H`.
pub fn heis_dist<T: Scalar>(
    p: &HeisenbergPoint<T>,
    q: &HeisenbergPoint<T>,
) -> Result<T, HeisenbergError> {
    Ok(heis_norm(&p.inverse().group_op(q)?))
}

fn check_plane<T: Scalar>(
    v: &IsotropicFrame<T>,
    p: &HeisenbergPoint<T>,
) -> Result<(), HeisenbergError> {
    if v.ambient_dim() != p.z.len() {
        return Err(HeisenbergError::PlaneMismatch {
            plane: v.ambient_dim(),
            point: p.z.len(),
        });
    }
    Ok(())
}

/// Horizontal projection `P_V(z, t) = (P_V z, 0)` onto the horizontal
/// subgroup of the isotropic plane.
pub fn horizontal_projection<T: Scalar>(
    v: &IsotropicFrame<T>,
    p: &HeisenbergPoint<T>,
) -> Result<HeisenbergPoint<T>, HeisenbergError> {
    check_plane(v, p)?;
    let coords = v.columns().transpose() * &p.z;
    Ok(HeisenbergPoint {
        z: v.columns() * coords,
        t: T::zero(),
    })
}

/// Vertical projection
/// `P_{V-perp}(z, t) = (P_{V-perp} z, t - 2 w(P_{V-perp} z, P_V z))` onto the
/// vertical subgroup associated to the plane.
pub fn vertical_projection<T: Scalar>(
    v: &IsotropicFrame<T>,
    p: &HeisenbergPoint<T>,
) -> Result<HeisenbergPoint<T>, HeisenbergError> {
    check_plane(v, p)?;
    let coords = v.columns().transpose() * &p.z;
    let horizontal = v.columns() * coords;
    let residual = &p.z - &horizontal;
    let two = T::one() + T::one();
    Ok(HeisenbergPoint {
        t: p.t - two * form_raw(&residual, &horizontal),
        z: residual,
    })
}

/// Unique decomposition `p = vertical * horizontal`; returns the pair in
/// that order.
pub fn decompose<T: Scalar>(
    v: &IsotropicFrame<T>,
    p: &HeisenbergPoint<T>,
) -> Result<(HeisenbergPoint<T>, HeisenbergPoint<T>), HeisenbergError> {
    Ok((vertical_projection(v, p)?, horizontal_projection(v, p)?))
}

/// Projection onto the first `2n` coordinates, `(z, t) -> z`.
pub fn coordinate_projection<T: Scalar>(p: &HeisenbergPoint<T>) -> AmbientVector<T> {
    AmbientVector::new(p.z.clone()).expect("group points carry an even horizontal part")
}
