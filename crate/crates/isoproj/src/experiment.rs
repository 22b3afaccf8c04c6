//! Projection experiments: sweep Haar-sampled isotropic planes, box-count
//! each projected cover, and summarize how often the projections preserve
//! dimension (sets of dimension at most m) or keep positive measure (sets
//! of dimension above m). The Heisenberg variant routes every point through
//! the horizontal projection, which factors through the coordinate
//! projection, so t-lifts of a planar set reproduce the Euclidean sweep.

use nalgebra::DMatrix;
use rayon::prelude::*;
use thiserror::Error;

use crate::fractal::{
    box_count_dimension, embed_cover, ifs_cover, projected_measure_from_coords, DyadicCover,
    IfsSpec, LabError,
};
use crate::grassmannian::{haar_sample_from_rng, FrameError};
use crate::heisenberg::{coordinate_projection, HeisenbergPoint};
use crate::scalar::{real, Scalar};
use crate::stream::{base, substream_rng};
use crate::symplectic::AmbientVector;

/// Slope window regarded as "dimension preserved" around the target.
pub const SLOPE_TOLERANCE: f64 = 0.1;
/// Projected-measure threshold for the positive-measure regime.
pub const MEASURE_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("invalid plane parameters n={n}, m={m}")]
    InvalidShape { n: usize, m: usize },
    #[error("need at least one plane")]
    NoPlanes,
    #[error("level must be at least 4 to fit a box-counting window, got {0}")]
    LevelTooSmall(u32),
    #[error("set dimension {set} exceeds ambient dimension {ambient}")]
    SetTooWide { set: usize, ambient: usize },
    #[error("the vertical-axis lift needs a one-dimensional set, got {0}")]
    VerticalLiftNeedsCurve(usize),
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// Which regime of the almost-sure projection behaviour is being probed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentCase {
    /// Set dimension at most m: projections should preserve dimension.
    DimensionPreserving,
    /// Set dimension above m: projections should have positive measure.
    PositiveMeasure,
}

/// Per-plane outcome of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneOutcome<T: Scalar> {
    pub slope: T,
    pub r2: T,
    pub measure: T,
}

/// Five-number summary of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantiles<T: Scalar> {
    pub min: T,
    pub q25: T,
    pub median: T,
    pub q75: T,
    pub max: T,
}

impl<T: Scalar> Quantiles<T> {
    fn from_values(values: &[T]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite statistics"));
        let pick = |p: f64| {
            let idx = (p * (sorted.len() - 1) as f64).round() as usize;
            sorted[idx]
        };
        Self {
            min: sorted[0],
            q25: pick(0.25),
            median: pick(0.5),
            q75: pick(0.75),
            max: sorted[sorted.len() - 1],
        }
    }
}

/// Summary of a projection sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionExperimentReport<T: Scalar> {
    pub n: usize,
    pub m: usize,
    pub planes: usize,
    pub level: u32,
    pub target_dimension: T,
    /// Grid side used for the projected-measure estimates (the cell side).
    pub eps: T,
    pub case: ExperimentCase,
    pub outcomes: Vec<PlaneOutcome<T>>,
    /// Fraction of planes with `|slope - target| <= 0.1`.
    pub within_fraction: T,
    /// Fraction of "exceptional" planes: slope below `target - 0.1` in the
    /// dimension-preserving case, measure below the threshold otherwise.
    pub exceptional_fraction: T,
    pub slope_quantiles: Quantiles<T>,
    pub measure_quantiles: Quantiles<T>,
}

/// How a planar set is lifted into the Heisenberg group before projecting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeisenbergLift {
    /// `t = 0`: the set sits in the horizontal slab.
    Slab,
    /// A bounded smooth graph `t = z_1 z_2`.
    Graph,
    /// The set parametrizes the vertical axis: `z = 0`, `t` from the set.
    VerticalAxis,
}

fn validate(n: usize, m: usize, planes: usize, level: u32) -> Result<(), ExperimentError> {
    if m == 0 || m > n {
        return Err(ExperimentError::InvalidShape { n, m });
    }
    if planes == 0 {
        return Err(ExperimentError::NoPlanes);
    }
    if level < 4 {
        return Err(ExperimentError::LevelTooSmall(level));
    }
    Ok(())
}

fn cover_in_ambient<T: Scalar>(
    spec: &IfsSpec<T>,
    level: u32,
    two_n: usize,
) -> Result<DyadicCover<T>, ExperimentError> {
    let cover = ifs_cover(spec, level)?;
    if spec.dim() > two_n {
        return Err(ExperimentError::SetTooWide {
            set: spec.dim(),
            ambient: two_n,
        });
    }
    if spec.dim() == two_n {
        Ok(cover)
    } else {
        Ok(embed_cover(&cover, spec.dim(), two_n, 0)?)
    }
}

/// Shared sweep: Haar-sample planes, project the point columns into frame
/// coordinates, box-count each projection, and estimate its measure.
#[allow(clippy::too_many_arguments)]
fn sweep_planes<T: Scalar>(
    points: &DMatrix<T>,
    spec: &IfsSpec<T>,
    n: usize,
    m: usize,
    planes: usize,
    level: u32,
    seed: u64,
    eps: T,
) -> Result<ProjectionExperimentReport<T>, ExperimentError> {
    let scales: Vec<T> = (1..=level).map(|j| spec.scale().powi(j as i32)).collect();
    let outcomes: Vec<PlaneOutcome<T>> = (0..planes)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream_rng(seed, base::EXPERIMENT_PLANE + k as u64);
            let frame = haar_sample_from_rng::<T, _>(n, m, &mut rng)
                .expect("plane parameters were validated");
            let coords = frame.columns().transpose() * points;
            let report =
                box_count_dimension(&coords, &scales).expect("ladder was validated by level >= 4");
            let measure = projected_measure_from_coords(&coords, eps);
            PlaneOutcome {
                slope: report.slope,
                r2: report.r2,
                measure,
            }
        })
        .collect();

    let target = spec.target_dimension();
    let tol = real::<T>(SLOPE_TOLERANCE);
    let threshold = real::<T>(MEASURE_THRESHOLD);
    let case = if target <= real(m as f64) {
        ExperimentCase::DimensionPreserving
    } else {
        ExperimentCase::PositiveMeasure
    };
    let total = real::<T>(planes as f64);
    let within = outcomes
        .iter()
        .filter(|o| (o.slope - target).abs() <= tol)
        .count();
    let exceptional = match case {
        ExperimentCase::DimensionPreserving => {
            outcomes.iter().filter(|o| o.slope < target - tol).count()
        }
        ExperimentCase::PositiveMeasure => {
            outcomes.iter().filter(|o| o.measure < threshold).count()
        }
    };
    let slopes: Vec<T> = outcomes.iter().map(|o| o.slope).collect();
    let measures: Vec<T> = outcomes.iter().map(|o| o.measure).collect();
    Ok(ProjectionExperimentReport {
        n,
        m,
        planes,
        level,
        target_dimension: target,
        eps,
        case,
        within_fraction: real::<T>(within as f64) / total,
        exceptional_fraction: real::<T>(exceptional as f64) / total,
        slope_quantiles: Quantiles::from_values(&slopes),
        measure_quantiles: Quantiles::from_values(&measures),
        outcomes,
    })
}

/// Sweeps Haar-sampled isotropic m-planes over the Euclidean projections of
/// an IFS cover in `R^{2n}`. The measure estimates use the cover's cell side
/// as grid side; [`projection_dimension_experiment_with_eps`] overrides it.
pub fn projection_dimension_experiment<T: Scalar>(
    spec: &IfsSpec<T>,
    n: usize,
    m: usize,
    planes: usize,
    level: u32,
    seed: u64,
) -> Result<ProjectionExperimentReport<T>, ExperimentError> {
    projection_dimension_experiment_with_eps(spec, n, m, planes, level, seed, None)
}

/// [`projection_dimension_experiment`] with an explicit grid side for the
/// projected-measure estimates.
pub fn projection_dimension_experiment_with_eps<T: Scalar>(
    spec: &IfsSpec<T>,
    n: usize,
    m: usize,
    planes: usize,
    level: u32,
    seed: u64,
    eps: Option<T>,
) -> Result<ProjectionExperimentReport<T>, ExperimentError> {
    validate(n, m, planes, level)?;
    let cover = cover_in_ambient(spec, level, 2 * n)?;
    let points = cover.centers_matrix();
    let eps = eps.unwrap_or_else(|| cover.cell_side());
    sweep_planes(&points, spec, n, m, planes, level, seed, eps)
}

/// Same sweep routed through the Heisenberg horizontal projection: each
/// cover point is lifted to the group, pushed through the coordinate
/// projection, and then projected onto the sampled planes. For the `t = 0`
/// lift this reproduces [`projection_dimension_experiment`] bit for bit
/// under the same seed.
pub fn heisenberg_projection_experiment<T: Scalar>(
    spec: &IfsSpec<T>,
    n: usize,
    m: usize,
    planes: usize,
    level: u32,
    seed: u64,
    lift: HeisenbergLift,
) -> Result<ProjectionExperimentReport<T>, ExperimentError> {
    heisenberg_projection_experiment_with_eps(spec, n, m, planes, level, seed, lift, None)
}

/// [`heisenberg_projection_experiment`] with an explicit grid side for the
/// projected-measure estimates.
#[allow(clippy::too_many_arguments)]
pub fn heisenberg_projection_experiment_with_eps<T: Scalar>(
    spec: &IfsSpec<T>,
    n: usize,
    m: usize,
    planes: usize,
    level: u32,
    seed: u64,
    lift: HeisenbergLift,
    eps: Option<T>,
) -> Result<ProjectionExperimentReport<T>, ExperimentError> {
    validate(n, m, planes, level)?;
    let two_n = 2 * n;
    let (points, default_eps) = match lift {
        HeisenbergLift::Slab | HeisenbergLift::Graph => {
            let cover = cover_in_ambient(spec, level, two_n)?;
            let centers = cover.centers_matrix();
            let lifted = lift_columns(&centers, lift);
            (lifted, cover.cell_side())
        }
        HeisenbergLift::VerticalAxis => {
            if spec.dim() != 1 {
                return Err(ExperimentError::VerticalLiftNeedsCurve(spec.dim()));
            }
            let cover = ifs_cover(spec, level)?;
            let centers = cover.centers_matrix();
            let count = centers.ncols();
            let mut z = DMatrix::zeros(two_n, count);
            for k in 0..count {
                let p = HeisenbergPoint::new(
                    AmbientVector::new(z.column(k).into_owned()).expect("even ambient dimension"),
                    centers[(0, k)],
                );
                z.set_column(k, coordinate_projection(&p).coords());
            }
            (z, cover.cell_side())
        }
    };
    let eps = eps.unwrap_or(default_eps);
    sweep_planes(&points, spec, n, m, planes, level, seed, eps)
}

/// Lifts each column into the group with the given t-rule and projects it
/// back to its horizontal part.
fn lift_columns<T: Scalar>(centers: &DMatrix<T>, lift: HeisenbergLift) -> DMatrix<T> {
    let (two_n, count) = centers.shape();
    let mut out = DMatrix::zeros(two_n, count);
    for k in 0..count {
        let z = AmbientVector::new(centers.column(k).into_owned())
            .expect("covers live in even ambient dimension here");
        let t = match lift {
            HeisenbergLift::Slab => T::zero(),
            HeisenbergLift::Graph => z[0] * z[1],
            HeisenbergLift::VerticalAxis => unreachable!("handled by the caller"),
        };
        let p = HeisenbergPoint::new(z, t);
        out.set_column(k, coordinate_projection(&p).coords());
    }
    out
}
