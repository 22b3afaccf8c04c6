//! Desk-scale fractal machinery: equal-ratio iterated function systems with
//! strong separation, their canonical covers, box-counting dimension
//! estimates, grid-content estimates of projected measure, and Monte Carlo
//! energy estimates.

use nalgebra::DMatrix;
use rand::Rng;
use thiserror::Error;

use crate::grassmannian::IsotropicFrame;
use crate::scalar::{real, Scalar};
use crate::stream::{base, substream_rng};

/// Default cap on the number of cover cells, `4^10`.
pub const DEFAULT_CELL_BUDGET: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("contraction ratio must lie in (0, 1), got {0}")]
    BadScale(f64),
    #[error("need at least one map, all with translations of equal dimension")]
    BadMaps,
    #[error("level-1 cells overlap: translations {i} and {j} are closer than the cell side")]
    NotSeparated { i: usize, j: usize },
    #[error("translations must keep level-1 cells inside the unit cube")]
    OutsideUnitCube,
    #[error("cover would hold {cells} cells, budget is {budget}")]
    BudgetExceeded { cells: usize, budget: usize },
    #[error("embedding requires offset + {d} <= {big_d}, got offset {offset}")]
    InvalidOffset {
        d: usize,
        big_d: usize,
        offset: usize,
    },
    #[error("cover dimension {cover} does not match expected {expected}")]
    CoverDimensionMismatch { cover: usize, expected: usize },
    #[error("need at least 4 positive, strictly decreasing scales, got {0}")]
    BadScales(usize),
    #[error("alpha must be positive, got {0}")]
    BadAlpha(f64),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("eps must be positive, got {0}")]
    BadEps(f64),
}

/// An equal-ratio iterated function system `x -> scale * x + translation`
/// with strongly separated level-1 cells inside the unit cube.
#[derive(Debug, Clone, PartialEq)]
pub struct IfsSpec<T: Scalar> {
    scale: T,
    translations: Vec<Vec<T>>,
    dim: usize,
}

impl<T: Scalar> IfsSpec<T> {
    /// Validates the contraction ratio, equal dimensions, containment of the
    /// level-1 cells in the unit cube, and pairwise disjointness of the
    /// (half-open) level-1 cells.
    pub fn new(scale: T, translations: Vec<Vec<T>>) -> Result<Self, LabError> {
        if scale <= T::zero() || scale >= T::one() {
            return Err(LabError::BadScale(scale.to_f64().unwrap_or(f64::NAN)));
        }
        if translations.is_empty() || translations[0].is_empty() {
            return Err(LabError::BadMaps);
        }
        let dim = translations[0].len();
        if translations.iter().any(|t| t.len() != dim) {
            return Err(LabError::BadMaps);
        }
        let slack = real::<T>(1e-12);
        for t in &translations {
            for &c in t {
                if c < -slack || c > T::one() - scale + slack {
                    return Err(LabError::OutsideUnitCube);
                }
            }
        }
        for i in 0..translations.len() {
            for j in (i + 1)..translations.len() {
                let separated = (0..dim)
                    .any(|a| (translations[i][a] - translations[j][a]).abs() >= scale - slack);
                if !separated {
                    return Err(LabError::NotSeparated { i, j });
                }
            }
        }
        Ok(Self {
            scale,
            translations,
            dim,
        })
    }

    /// The four-corner Cantor set: 4 maps of ratio 1/4 at the corners of the
    /// unit square. Similarity dimension 1, purely 1-unrectifiable.
    pub fn four_corner_cantor() -> Self {
        let c = real::<T>(0.75);
        let z = T::zero();
        Self::new(
            real(0.25),
            vec![vec![z, z], vec![c, z], vec![z, c], vec![c, c]],
        )
        .expect("preset is separated")
    }

    /// The unit square as a 4-map tiling of ratio 1/2. Similarity dimension 2.
    pub fn unit_square() -> Self {
        let h = real::<T>(0.5);
        let z = T::zero();
        Self::new(h, vec![vec![z, z], vec![h, z], vec![z, h], vec![h, h]]).expect("preset tiles")
    }

    /// Planar Cantor dust of similarity dimension 3/4: three maps of ratio
    /// `3^(-4/3)` at non-collinear corners, so `log 3 / log(3^(4/3)) = 3/4`.
    pub fn cantor_dust_075() -> Self {
        let r = 3.0f64.powf(-4.0 / 3.0);
        let c = real::<T>(1.0 - r);
        let z = T::zero();
        Self::new(real(r), vec![vec![z, z], vec![c, z], vec![z, c]]).expect("preset is separated")
    }

    /// The unit segment as a 2-map tiling of ratio 1/2. Similarity dimension 1.
    pub fn unit_segment() -> Self {
        let h = real::<T>(0.5);
        Self::new(h, vec![vec![T::zero()], vec![h]]).expect("preset tiles")
    }

    pub fn map_count(&self) -> usize {
        self.translations.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn translations(&self) -> &[Vec<T>] {
        &self.translations
    }

    /// Similarity dimension `log(#maps) / log(1/scale)`; equals the
    /// box-counting and Hausdorff dimension under strong separation.
    pub fn target_dimension(&self) -> T {
        let maps = real::<T>(self.map_count() as f64);
        maps.ln() / (T::one() / self.scale).ln()
    }
}

/// The canonical level-`level` cover of an IFS attractor: one cell of side
/// `scale^level` per word, identified by the integer multi-index of its
/// corner on the grid of that side.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicCover<T: Scalar> {
    level: u32,
    dim: usize,
    cell_side: T,
    /// Flattened row-major indices, `dim` entries per cell, sorted.
    cells: Vec<i64>,
}

impl<T: Scalar> DyadicCover<T> {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cell_side(&self) -> T {
        self.cell_side
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn cell(&self, k: usize) -> &[i64] {
        &self.cells[k * self.dim..(k + 1) * self.dim]
    }

    /// Cell centers as columns of a `dim x cell_count` matrix.
    pub fn centers_matrix(&self) -> DMatrix<T> {
        let count = self.cell_count();
        let half = real::<T>(0.5);
        DMatrix::from_fn(self.dim, count, |a, k| {
            (T::from_i64(self.cells[k * self.dim + a]).expect("index fits the scalar") + half)
                * self.cell_side
        })
    }
}

/// The exact set of level-`level` cells of the attractor's canonical cover.
pub fn ifs_cover<T: Scalar>(spec: &IfsSpec<T>, level: u32) -> Result<DyadicCover<T>, LabError> {
    ifs_cover_with_budget(spec, level, DEFAULT_CELL_BUDGET)
}

pub fn ifs_cover_with_budget<T: Scalar>(
    spec: &IfsSpec<T>,
    level: u32,
    budget: usize,
) -> Result<DyadicCover<T>, LabError> {
    let cells = spec.map_count().checked_pow(level).unwrap_or(usize::MAX);
    if cells > budget {
        return Err(LabError::BudgetExceeded { cells, budget });
    }

    let d = spec.dim();
    // corners of all words, built level by level
    let mut corners: Vec<T> = vec![T::zero(); d];
    let mut step = T::one();
    for _ in 0..level {
        let mut next = Vec::with_capacity(corners.len() * spec.map_count());
        for corner in corners.chunks_exact(d) {
            for tr in spec.translations() {
                for a in 0..d {
                    next.push(corner[a] + tr[a] * step);
                }
            }
        }
        corners = next;
        step *= spec.scale();
    }
    // `step` is now scale^level, the cell side
    let side = step;
    let mut cells_idx: Vec<i64> = corners
        .iter()
        .map(|&c| {
            (c / side)
                .round()
                .to_i64()
                .expect("cover index fits in 64 bits")
        })
        .collect();
    sort_cells(&mut cells_idx, d);
    Ok(DyadicCover {
        level,
        dim: d,
        cell_side: side,
        cells: cells_idx,
    })
}

fn sort_cells(cells: &mut Vec<i64>, d: usize) {
    if d == 0 || cells.is_empty() {
        return;
    }
    let mut grouped: Vec<&[i64]> = cells.chunks_exact(d).collect();
    grouped.sort_unstable();
    grouped.dedup();
    let flat: Vec<i64> = grouped.into_iter().flatten().copied().collect();
    *cells = flat;
}

/// Pads cover cells with zero indices so a `d`-dimensional set occupies the
/// coordinate block starting at `offset` inside `R^big_d`.
pub fn embed_cover<T: Scalar>(
    cover: &DyadicCover<T>,
    d: usize,
    big_d: usize,
    offset: usize,
) -> Result<DyadicCover<T>, LabError> {
    if d != cover.dim {
        return Err(LabError::CoverDimensionMismatch {
            cover: cover.dim,
            expected: d,
        });
    }
    if d > big_d || offset + d > big_d {
        return Err(LabError::InvalidOffset { d, big_d, offset });
    }
    let count = cover.cell_count();
    let mut cells = vec![0i64; count * big_d];
    for k in 0..count {
        for a in 0..d {
            cells[k * big_d + offset + a] = cover.cells[k * cover.dim + a];
        }
    }
    sort_cells(&mut cells, big_d);
    Ok(DyadicCover {
        level: cover.level,
        dim: big_d,
        cell_side: cover.cell_side,
        cells,
    })
}

/// Number of occupied boxes of side `scale` for the given point columns.
pub(crate) fn occupied_boxes<T: Scalar>(points: &DMatrix<T>, scale: T) -> usize {
    let (d, count) = points.shape();
    if count == 0 {
        return 0;
    }
    let mut indices = Vec::with_capacity(d * count);
    let mut max_abs: i64 = 0;
    for k in 0..count {
        for a in 0..d {
            let idx = (points[(a, k)] / scale)
                .floor()
                .to_i64()
                .expect("box index fits in 64 bits");
            max_abs = max_abs.max(idx.abs());
            indices.push(idx);
        }
    }
    if d == 1 {
        indices.sort_unstable();
        indices.dedup();
        indices.len()
    } else if d <= 4 && max_abs < 1 << 31 {
        // pack up to four 32-bit indices into one key
        let mut keys: Vec<u128> = (0..count)
            .map(|k| {
                let mut key: u128 = 0;
                for a in 0..d {
                    let shifted = (indices[k * d + a] + (1 << 31)) as u128;
                    key |= shifted << (32 * a);
                }
                key
            })
            .collect();
        keys.sort_unstable();
        keys.dedup();
        keys.len()
    } else {
        let mut keys: Vec<&[i64]> = indices.chunks_exact(d).collect();
        keys.sort_unstable();
        keys.dedup();
        keys.len()
    }
}

/// Log-log regression output of a box-counting experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionReport<T: Scalar> {
    pub scales: Vec<T>,
    pub counts: Vec<usize>,
    /// Least-squares slope of `log(count)` against `log(1/scale)` over the
    /// window.
    pub slope: T,
    /// Fit quality in `[0, 1]`.
    pub r2: T,
    /// Half-open index range used for the fit; the coarsest and finest
    /// scales are dropped by default.
    pub window: (usize, usize),
}

/// Box-counting dimension estimate for point columns over a geometric
/// ladder of scales.
pub fn box_count_dimension<T: Scalar>(
    points: &DMatrix<T>,
    scales: &[T],
) -> Result<DimensionReport<T>, LabError> {
    if scales.len() < 4 {
        return Err(LabError::BadScales(scales.len()));
    }
    for w in scales.windows(2) {
        if w[1] <= T::zero() || w[1] >= w[0] {
            return Err(LabError::BadScales(scales.len()));
        }
    }
    if points.ncols() == 0 {
        return Err(LabError::TooFewPoints { needed: 1, got: 0 });
    }
    let counts: Vec<usize> = scales.iter().map(|&s| occupied_boxes(points, s)).collect();
    let window = (1, scales.len() - 1);
    let (slope, r2) = fit_loglog(&scales[window.0..window.1], &counts[window.0..window.1]);
    Ok(DimensionReport {
        scales: scales.to_vec(),
        counts,
        slope,
        r2,
        window,
    })
}

/// Box-counting dimension of a cover, through its cell centers.
pub fn box_count_cover<T: Scalar>(
    cover: &DyadicCover<T>,
    scales: &[T],
) -> Result<DimensionReport<T>, LabError> {
    box_count_dimension(&cover.centers_matrix(), scales)
}

fn fit_loglog<T: Scalar>(scales: &[T], counts: &[usize]) -> (T, T) {
    let n = real::<T>(scales.len() as f64);
    let xs: Vec<T> = scales.iter().map(|&s| (T::one() / s).ln()).collect();
    let ys: Vec<T> = counts.iter().map(|&c| real::<T>(c as f64).ln()).collect();
    let mean = |v: &[T]| v.iter().fold(T::zero(), |a, &b| a + b) / n;
    let (mx, my) = (mean(&xs), mean(&ys));
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    let mut syy = T::zero();
    for (&x, &y) in xs.iter().zip(ys.iter()) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == T::zero() {
        return (T::zero(), T::one());
    }
    let slope = sxy / sxx;
    let r2 = if syy == T::zero() {
        T::one()
    } else {
        (sxy * sxy / (sxx * syy)).min(T::one()).max(T::zero())
    };
    (slope, r2)
}

/// Grid-content estimate of the measure of the projection of a cover onto
/// an isotropic plane: projects every cell center into frame coordinates,
/// counts occupied `eps`-cells, and returns `count * eps^m`. An
/// upper-content proxy, meaningful at `eps` of the order of the cell side.
pub fn projected_measure_estimate<T: Scalar>(
    v: &IsotropicFrame<T>,
    cover: &DyadicCover<T>,
    eps: T,
) -> Result<T, LabError> {
    if eps <= T::zero() {
        return Err(LabError::BadEps(eps.to_f64().unwrap_or(f64::NAN)));
    }
    if cover.dim() != v.ambient_dim() {
        return Err(LabError::CoverDimensionMismatch {
            cover: cover.dim(),
            expected: v.ambient_dim(),
        });
    }
    let coords = v.columns().transpose() * cover.centers_matrix();
    Ok(projected_measure_from_coords(&coords, eps))
}

/// Same estimate from already-projected frame coordinates.
pub(crate) fn projected_measure_from_coords<T: Scalar>(coords: &DMatrix<T>, eps: T) -> T {
    let m = coords.nrows();
    let count = occupied_boxes(coords, eps);
    real::<T>(count as f64) * eps.powi(m as i32)
}

/// Monte Carlo estimate of the energy integrand `|x - y|^(-alpha)` of the
/// empirical measure of the point columns, averaged over `pairs` random
/// distinct index pairs.
pub fn energy_estimate<T: Scalar>(
    points: &DMatrix<T>,
    alpha: T,
    pairs: usize,
    seed: u64,
) -> Result<T, LabError> {
    if alpha <= T::zero() {
        return Err(LabError::BadAlpha(alpha.to_f64().unwrap_or(f64::NAN)));
    }
    let count = points.ncols();
    if count < 2 {
        return Err(LabError::TooFewPoints {
            needed: 2,
            got: count,
        });
    }
    if pairs == 0 {
        return Err(LabError::BadScales(0));
    }
    let mut rng = substream_rng(seed, base::ENERGY_PAIR);
    let mut sum = T::zero();
    for _ in 0..pairs {
        let i = rng.random_range(0..count);
        let mut j = rng.random_range(0..count - 1);
        if j >= i {
            j += 1;
        }
        let dist = (points.column(i) - points.column(j)).norm();
        sum += dist.powf(-alpha);
    }
    Ok(sum / real::<T>(pairs as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::substream_rng;
    use rand::Rng;

    #[test]
    fn four_corner_level_one() {
        let spec = IfsSpec::<f64>::four_corner_cantor();
        let cover = ifs_cover(&spec, 1).unwrap();
        assert_eq!(cover.cell_count(), 4);
        assert_eq!(cover.cell_side(), 0.25);
        assert_eq!(cover.cells, vec![0, 0, 0, 3, 3, 0, 3, 3]);
    }

    #[test]
    fn four_corner_counts_are_powers_of_four() {
        let spec = IfsSpec::<f64>::four_corner_cantor();
        for level in 0..=6u32 {
            let cover = ifs_cover(&spec, level).unwrap();
            assert_eq!(cover.cell_count(), 4usize.pow(level));
        }
    }

    #[test]
    fn four_corner_target_dimension_is_one() {
        let spec = IfsSpec::<f64>::four_corner_cantor();
        assert!((spec.target_dimension() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dust_target_dimension_is_three_quarters() {
        let spec = IfsSpec::<f64>::cantor_dust_075();
        assert!((spec.target_dimension() - 0.75).abs() < 1e-12);
        for level in [1u32, 5, 9] {
            let cover = ifs_cover(&spec, level).unwrap();
            assert_eq!(cover.cell_count(), 3usize.pow(level));
        }
    }

    #[test]
    fn overlapping_maps_are_rejected() {
        assert!(matches!(
            IfsSpec::<f64>::new(0.5, vec![vec![0.0, 0.0], vec![0.25, 0.25]]),
            Err(LabError::NotSeparated { .. })
        ));
        assert!(matches!(
            IfsSpec::<f64>::new(1.5, vec![vec![0.0]]),
            Err(LabError::BadScale(_))
        ));
        assert!(matches!(
            IfsSpec::<f64>::new(0.5, vec![vec![0.0], vec![0.9]]),
            Err(LabError::OutsideUnitCube)
        ));
    }

    #[test]
    fn budget_is_enforced() {
        let spec = IfsSpec::<f64>::four_corner_cantor();
        assert!(matches!(
            ifs_cover_with_budget(&spec, 4, 100),
            Err(LabError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn embed_identity_when_dimensions_match() {
        let spec = IfsSpec::<f64>::four_corner_cantor();
        let cover = ifs_cover(&spec, 2).unwrap();
        let same = embed_cover(&cover, 2, 2, 0).unwrap();
        assert_eq!(cover, same);
    }

    #[test]
    fn embed_preserves_cell_count_and_checks_offset() {
        let spec = IfsSpec::<f64>::four_corner_cantor();
        let cover = ifs_cover(&spec, 3).unwrap();
        let lifted = embed_cover(&cover, 2, 4, 0).unwrap();
        assert_eq!(lifted.cell_count(), cover.cell_count());
        assert_eq!(lifted.dim(), 4);
        assert!(matches!(
            embed_cover(&cover, 2, 4, 3),
            Err(LabError::InvalidOffset { .. })
        ));
        assert!(matches!(
            embed_cover(&cover, 3, 4, 0),
            Err(LabError::CoverDimensionMismatch { .. })
        ));
    }

    #[test]
    fn embedding_does_not_change_box_count_estimate() {
        let spec = IfsSpec::<f64>::four_corner_cantor();
        let cover = ifs_cover(&spec, 7).unwrap();
        let scales: Vec<f64> = (1..=7).map(|j| 0.25f64.powi(j)).collect();
        let flat = box_count_cover(&cover, &scales).unwrap();
        let lifted = embed_cover(&cover, 2, 4, 1).unwrap();
        let tall = box_count_cover(&lifted, &scales).unwrap();
        assert_eq!(flat.counts, tall.counts);
        assert!((flat.slope - tall.slope).abs() <= 0.02);
    }

    #[test]
    fn segment_points_have_dimension_one() {
        let mut rng = substream_rng(3, 67);
        let points = DMatrix::<f64>::from_fn(1, 10_000, |_, _| rng.random::<f64>());
        let scales: Vec<f64> = (2..=9).map(|j| 0.5f64.powi(j)).collect();
        let report = box_count_dimension(&points, &scales).unwrap();
        assert!((report.slope - 1.0).abs() <= 0.05, "slope {}", report.slope);
        assert!(report.r2 > 0.99);
    }

    #[test]
    fn single_point_has_dimension_zero() {
        let points = DMatrix::<f64>::from_column_slice(2, 1, &[0.371, 0.829]);
        let scales: Vec<f64> = (1..=6).map(|j| 0.5f64.powi(j)).collect();
        let report = box_count_dimension(&points, &scales).unwrap();
        assert!(report.slope.abs() <= 0.02);
        assert_eq!(report.r2, 1.0);
    }

    #[test]
    fn four_corner_cover_has_dimension_one() {
        let spec = IfsSpec::<f64>::four_corner_cantor();
        let cover = ifs_cover(&spec, 8).unwrap();
        let scales: Vec<f64> = (1..=8).map(|j| 0.25f64.powi(j)).collect();
        let report = box_count_cover(&cover, &scales).unwrap();
        assert!((report.slope - 1.0).abs() <= 0.05, "slope {}", report.slope);
    }

    #[test]
    fn scale_ladder_is_validated() {
        let points = DMatrix::<f64>::zeros(1, 3);
        assert!(matches!(
            box_count_dimension(&points, &[0.5, 0.25, 0.125]),
            Err(LabError::BadScales(3))
        ));
        assert!(matches!(
            box_count_dimension(&points, &[0.5, 0.25, 0.5, 0.125]),
            Err(LabError::BadScales(4))
        ));
    }

    #[test]
    fn full_square_projects_to_full_interval() {
        let spec = IfsSpec::<f64>::unit_square();
        let cover = ifs_cover(&spec, 8).unwrap();
        let v = IsotropicFrame::<f64>::standard(1, 1).unwrap();
        let eps = cover.cell_side();
        let estimate = projected_measure_estimate(&v, &cover, eps).unwrap();
        assert!(estimate >= 1.0 - eps, "estimate {estimate}");
    }

    #[test]
    fn four_corner_axis_projection_is_exact() {
        let spec = IfsSpec::<f64>::four_corner_cantor();
        let v = IsotropicFrame::<f64>::standard(1, 1).unwrap();
        for level in 1..=10u32 {
            let cover = ifs_cover(&spec, level).unwrap();
            let estimate = projected_measure_estimate(&v, &cover, cover.cell_side()).unwrap();
            assert_eq!(estimate, 0.5f64.powi(level as i32));
        }
    }

    #[test]
    fn projected_measure_is_monotone_in_level_for_sampled_lines() {
        let spec = IfsSpec::<f64>::four_corner_cantor();
        for seed in 0..10u64 {
            let v = crate::grassmannian::haar_sample::<f64>(1, 1, seed).unwrap();
            let mut last = f64::INFINITY;
            for level in 3..=7u32 {
                let cover = ifs_cover(&spec, level).unwrap();
                let estimate = projected_measure_estimate(&v, &cover, cover.cell_side()).unwrap();
                assert!(
                    estimate <= last + 1e-12,
                    "seed {seed} level {level}: {estimate} > {last}"
                );
                last = estimate;
            }
        }
    }

    #[test]
    fn energy_of_a_single_pair_is_the_inverse_distance_power() {
        let points = DMatrix::<f64>::from_column_slice(1, 2, &[0.0, 1.0]);
        for alpha in [0.5, 1.0, 1.5] {
            assert_eq!(energy_estimate(&points, alpha, 100, 0).unwrap(), 1.0);
        }
        let spread = DMatrix::<f64>::from_column_slice(1, 2, &[0.0, 0.5]);
        let e = energy_estimate(&spread, 1.0, 50, 0).unwrap();
        assert!((e - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn energy_rejects_bad_arguments() {
        let points = DMatrix::<f64>::from_column_slice(1, 2, &[0.0, 1.0]);
        assert!(matches!(
            energy_estimate(&points, 0.0, 10, 0),
            Err(LabError::BadAlpha(_))
        ));
        let single = DMatrix::<f64>::from_column_slice(1, 1, &[0.0]);
        assert!(matches!(
            energy_estimate(&single, 0.5, 10, 0),
            Err(LabError::TooFewPoints { .. })
        ));
    }

    /// Median energy estimate over independent seeds at each sampling
    /// stage; the estimator of a finite energy stabilizes across stages
    /// while a divergent one trends upward with the sampling effort.
    fn energy_trend(alpha: f64) -> Vec<f64> {
        let segment = |count: usize, seed: u64| {
            let mut rng = substream_rng(seed, 71);
            DMatrix::<f64>::from_fn(1, count, |_, _| rng.random::<f64>())
        };
        (0..5u32)
            .map(|stage| {
                let count = 500usize << stage;
                let pairs = 50 * count;
                let mut vals: Vec<f64> = (0..15u64)
                    .map(|k| {
                        let points = segment(count, 100 * stage as u64 + k);
                        energy_estimate(&points, alpha, pairs, 200 * stage as u64 + k).unwrap()
                    })
                    .collect();
                vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
                vals[vals.len() / 2]
            })
            .collect()
    }

    #[test]
    fn energy_stabilizes_below_critical_alpha() {
        // finite energy: alpha = 0.5 < 1 = dimension of the segment
        let medians = energy_trend(0.5);
        let first = medians[0];
        for m in &medians {
            assert!((m - first).abs() / first < 0.05, "medians {medians:?}");
        }
    }

    #[test]
    fn energy_diverges_above_critical_alpha() {
        // divergent energy: alpha = 1.5 > 1; the estimate keeps growing as
        // points and pairs double
        let medians = energy_trend(1.5);
        let xs: Vec<f64> = (0..medians.len()).map(|i| i as f64).collect();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let logs: Vec<f64> = medians.iter().map(|m| m.ln()).collect();
        let (mx, my) = (mean(&xs), mean(&logs));
        let sxy: f64 = xs.iter().zip(&logs).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let slope = sxy / sxx;
        assert!(slope > 0.1, "trend slope {slope:.3}, medians {medians:?}");
        assert!(
            medians[4] > 1.5 * medians[0],
            "no overall growth: {medians:?}"
        );
    }

    #[test]
    fn cover_box_counts_recover_similarity_dimension() {
        let cases = [
            (IfsSpec::<f64>::four_corner_cantor(), 8u32),
            (IfsSpec::<f64>::unit_square(), 8),
            (IfsSpec::<f64>::cantor_dust_075(), 9),
            (IfsSpec::<f64>::unit_segment(), 12),
        ];
        for (spec, level) in cases {
            let cover = ifs_cover(&spec, level).unwrap();
            let scales: Vec<f64> = (1..=level).map(|j| spec.scale().powi(j as i32)).collect();
            let report = box_count_cover(&cover, &scales).unwrap();
            let target = spec.target_dimension();
            assert!(
                (report.slope - target).abs() <= 0.05,
                "{} maps, target {target}: slope {}",
                spec.map_count(),
                report.slope
            );
        }
    }

    #[test]
    fn energy_is_relabeling_invariant_up_to_sampling_noise() {
        let mut rng = substream_rng(21, 79);
        let points = DMatrix::<f64>::from_fn(2, 500, |_, _| rng.random::<f64>());
        let reversed = DMatrix::<f64>::from_fn(2, 500, |a, k| points[(a, 499 - k)]);
        let e1 = energy_estimate(&points, 0.5, 50_000, 3).unwrap();
        let e2 = energy_estimate(&reversed, 0.5, 50_000, 3).unwrap();
        assert!((e1 - e2).abs() / e1 < 0.05, "{e1} vs {e2}");
    }

    #[test]
    fn energy_is_isometry_invariant_under_identical_pair_sampling() {
        let mut rng = substream_rng(8, 73);
        let points = DMatrix::<f64>::from_fn(2, 100, |_, _| rng.random::<f64>());
        let theta: f64 = 0.7;
        let rot = DMatrix::<f64>::from_row_slice(
            2,
            2,
            &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()],
        );
        let rotated = &rot * &points;
        let a = energy_estimate(&points, 0.8, 5000, 4).unwrap();
        let b = energy_estimate(&rotated, 0.8, 5000, 4).unwrap();
        assert!((a - b).abs() <= 1e-9 * a);
    }
}
