//! Symplectic linear algebra on `R^{2n}`, local coordinates and Haar
//! sampling on the isotropic Grassmannian, a numerically certified
//! transversal family of isotropic projections, Heisenberg-group
//! projections, and a fractal dimension laboratory that exercises the
//! projection behaviour on self-similar test sets.
//!
//! All numerics are generic over the scalar type through [`Scalar`]
//! (`f32` or `f64`); the `*64` aliases below fix the default `f64`
//! instantiations used by the command-line tools.

pub mod certificate;
pub mod experiment;
pub mod fractal;
pub mod grassmannian;
pub mod heisenberg;
pub mod numdiff;
pub mod projection;
pub mod scalar;
pub mod stream;
pub mod symplectic;

pub use certificate::{
    frame_derivative_identity_check, max_admissible_ct, transversality_certificate,
    transversality_certificate_with_samples, CertificateError, CertificateSample,
    FrameDerivativeGap, TransversalityReport,
};
pub use experiment::{
    heisenberg_projection_experiment, heisenberg_projection_experiment_with_eps,
    projection_dimension_experiment, projection_dimension_experiment_with_eps, ExperimentCase,
    ExperimentError, HeisenbergLift, PlaneOutcome, ProjectionExperimentReport, Quantiles,
};
pub use fractal::{
    box_count_cover, box_count_dimension, embed_cover, energy_estimate, ifs_cover,
    ifs_cover_with_budget, projected_measure_estimate, DimensionReport, DyadicCover, IfsSpec,
    LabError, DEFAULT_CELL_BUDGET,
};
pub use grassmannian::{
    chart_embed, chart_free_count, haar_sample, haar_sample_from_rng, haar_unitary,
    haar_unitary_from_rng, independent_entries, plane_from_chart, span_vectors, ChartError,
    ChartMatrix, FrameError, IsotropicFrame,
};
pub use heisenberg::{
    coordinate_projection, decompose, dilation, heis_dist, heis_norm, horizontal_projection,
    vertical_projection, HeisenbergError, HeisenbergPoint,
};
pub use projection::{
    chart_projection, det_closed_form, frame_coordinates, gram_matrix, jacobian_chart_projection,
    lambda_sequences, orthogonal_projection, phi, transversality_lower_bound, LowerBoundCheck,
    ProjectionError,
};
pub use scalar::Scalar;
pub use symplectic::{
    is_isotropic, is_lagrangian, j_matrix, standard_form, symplectic_orthogonal, AmbientVector,
    Subspace, SymplecticError, DEFAULT_ISOTROPY_TOL,
};

/// Default `f64` instantiations.
pub type AmbientVector64 = AmbientVector<f64>;
pub type Subspace64 = Subspace<f64>;
pub type ChartMatrix64 = ChartMatrix<f64>;
pub type IsotropicFrame64 = IsotropicFrame<f64>;
pub type HeisenbergPoint64 = HeisenbergPoint<f64>;
pub type TransversalityReport64 = TransversalityReport<f64>;
pub type IfsSpec64 = IfsSpec<f64>;
pub type DyadicCover64 = DyadicCover<f64>;
pub type DimensionReport64 = DimensionReport<f64>;
