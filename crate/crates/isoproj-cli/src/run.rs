//! Command dispatch: each command produces one CSV (a row per sample, plane,
//! or stage), a one-line summary on standard output, and optionally an SVG
//! log-log plot. Identical configurations reproduce identical bytes.

use std::path::Path;

use isoproj::fractal::LabError;
use isoproj::stream::{base, normal_vector, substream_rng};
use isoproj::{
    box_count_cover, decompose, det_closed_form, dilation, embed_cover, energy_estimate,
    gram_matrix, haar_sample_from_rng, haar_unitary_from_rng, heis_dist,
    heisenberg_projection_experiment_with_eps, ifs_cover, j_matrix,
    projection_dimension_experiment_with_eps, standard_form,
    transversality_certificate_with_samples, AmbientVector64, ChartMatrix64, ExperimentError,
    HeisenbergPoint64, ProjectionExperimentReport,
};
use nalgebra::DMatrix;
use thiserror::Error;

use crate::config::{Command, ConfigError, ExperimentConfig};
use crate::csv::{CsvWriter, Field};
use crate::svg;

/// 1% critical value of the one-sample Kolmogorov-Smirnov statistic,
/// `1.6276 / sqrt(N)` in the large-sample limit.
pub fn ks_critical_value(samples: usize) -> f64 {
    1.6276 / (samples as f64).sqrt()
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("{0}")]
    Compute(String),
    #[error("cannot write `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl RunError {
    /// Machine-readable exit code: 2 for configuration and I/O problems,
    /// 3 for budget problems (1 is reserved for certificate violations).
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Budget(_) => 3,
            _ => 2,
        }
    }

    fn from_experiment(err: ExperimentError) -> Self {
        match err {
            ExperimentError::Lab(LabError::BudgetExceeded { cells, budget }) => RunError::Budget(
                format!("cover would hold {cells} cells, budget is {budget}"),
            ),
            other => RunError::Compute(other.to_string()),
        }
    }

    fn from_lab(err: LabError) -> Self {
        match err {
            LabError::BudgetExceeded { cells, budget } => RunError::Budget(format!(
                "cover would hold {cells} cells, budget is {budget}"
            )),
            other => RunError::Compute(other.to_string()),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Outcome of a run: the summary line already printed, and the number of
/// certificate violations (nonzero only for `certify`).
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub summary: String,
    pub violations: usize,
}

/// Exit code of a completed run: 1 exactly when the certificate reported
/// violations, 0 otherwise.
pub fn exit_code_for(outcome: &RunOutcome) -> i32 {
    if outcome.violations > 0 {
        1
    } else {
        0
    }
}

/// Dispatches a validated configuration, writes its artifacts, and prints
/// the summary line.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    let outcome = match config.command {
        Command::Certify => run_certify(config)?,
        Command::DetCheck => run_det_check(config)?,
        Command::HaarAudit => run_haar_audit(config)?,
        Command::HeisCheck => run_heis_check(config)?,
        Command::DimExperiment => run_dim_experiment(config, false)?,
        Command::HeisExperiment => run_dim_experiment(config, true)?,
        Command::Energy => run_energy(config)?,
    };
    println!("{}", outcome.summary);
    Ok(outcome)
}

fn run_certify(config: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    let c_t = config.c_t.expect("validated by resolve");
    let (report, rows) = transversality_certificate_with_samples::<f64>(
        config.n,
        config.m,
        c_t,
        config.grid,
        config.samples,
        config.seed,
    )
    .map_err(|e| RunError::Compute(e.to_string()))?;

    let path = &config.output_path;
    let mut csv = CsvWriter::create(
        path,
        &[
            "sample",
            "chart_norm",
            "phi_norm",
            "qualifies",
            "det",
            "margin",
        ],
    )
    .map_err(io_err(path))?;
    for row in &rows {
        csv.row(&[
            Field::UInt(row.index as u64),
            Field::Float(row.chart_norm),
            Field::Float(row.phi_norm),
            Field::Flag(row.qualifying),
            Field::Float(row.det),
            Field::Float(row.margin),
        ])
        .map_err(io_err(path))?;
    }
    csv.finish().map_err(io_err(path))?;

    let summary = format!(
        "certify n={} m={} seed={} c_t={} epsilon={:.6e} l1={:.6e} l2={:.6e} samples={} qualifying={} min_margin={:.6e} violations={}",
        report.n,
        report.m,
        config.seed,
        c_t,
        report.epsilon,
        report.l1,
        report.l2,
        report.samples,
        report.qualifying,
        report.min_margin,
        report.violations
    );
    Ok(RunOutcome {
        summary,
        violations: report.violations,
    })
}

fn run_det_check(config: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    let (n, m) = (config.n, config.m);
    let chart = ChartMatrix64::zero(n, m).map_err(|e| RunError::Compute(e.to_string()))?;
    let path = &config.output_path;
    let mut csv = CsvWriter::create(path, &["sample", "det_closed", "det_numeric", "rel_err"])
        .map_err(io_err(path))?;
    let mut max_rel_err = 0.0f64;
    for k in 0..config.samples {
        let mut rng = substream_rng(config.seed, base::AUDIT_SAMPLE + k as u64);
        let x =
            AmbientVector64::new(normal_vector(&mut rng, 2 * n)).expect("even ambient dimension");
        let closed = det_closed_form(&x, n, m).map_err(|e| RunError::Compute(e.to_string()))?;
        let numeric = gram_matrix(&chart, &x)
            .map_err(|e| RunError::Compute(e.to_string()))?
            .determinant();
        let rel_err = (closed - numeric).abs() / closed.abs().max(numeric.abs()).max(1e-300);
        max_rel_err = max_rel_err.max(rel_err);
        csv.row(&[
            Field::UInt(k as u64),
            Field::Float(closed),
            Field::Float(numeric),
            Field::Float(rel_err),
        ])
        .map_err(io_err(path))?;
    }
    csv.finish().map_err(io_err(path))?;
    let summary = format!(
        "det-check n={n} m={m} seed={} samples={} max_rel_err={:.6e}",
        config.seed, config.samples, max_rel_err
    );
    Ok(RunOutcome {
        summary,
        violations: 0,
    })
}

fn run_haar_audit(config: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    let (n, m) = (config.n, config.m);
    let line_audit = n == 1 && m == 1;
    let identity = DMatrix::<f64>::identity(2 * n, 2 * n);
    let j = j_matrix::<f64>(n);
    let path = &config.output_path;
    let header: &[&str] = if line_audit {
        &[
            "sample",
            "orthogonality_err",
            "symplectic_err",
            "isotropy_err",
            "angle",
        ]
    } else {
        &[
            "sample",
            "orthogonality_err",
            "symplectic_err",
            "isotropy_err",
        ]
    };
    let mut csv = CsvWriter::create(path, header).map_err(io_err(path))?;

    let mut max_ortho = 0.0f64;
    let mut max_sympl = 0.0f64;
    let mut max_iso = 0.0f64;
    let mut angles = Vec::new();
    for k in 0..config.samples {
        let mut rng = substream_rng(config.seed, base::AUDIT_SAMPLE + k as u64);
        let g = haar_unitary_from_rng::<f64, _>(n, &mut rng);
        let ortho = (g.transpose() * &g - &identity).abs().max();
        let sympl = (g.transpose() * &j * &g - &j).abs().max();
        let frame = g.columns(0, m).into_owned();
        let mut iso = 0.0f64;
        for i in 0..m {
            let vi = AmbientVector64::new(frame.column(i).into_owned()).expect("even dimension");
            for l in (i + 1)..m {
                let vl =
                    AmbientVector64::new(frame.column(l).into_owned()).expect("even dimension");
                iso = iso.max(standard_form(&vi, &vl).expect("same ambient space").abs());
            }
        }
        max_ortho = max_ortho.max(ortho);
        max_sympl = max_sympl.max(sympl);
        max_iso = max_iso.max(iso);
        if line_audit {
            let angle = frame[(1, 0)]
                .atan2(frame[(0, 0)])
                .rem_euclid(std::f64::consts::PI);
            angles.push(angle);
            csv.row(&[
                Field::UInt(k as u64),
                Field::Float(ortho),
                Field::Float(sympl),
                Field::Float(iso),
                Field::Float(angle),
            ])
            .map_err(io_err(path))?;
        } else {
            csv.row(&[
                Field::UInt(k as u64),
                Field::Float(ortho),
                Field::Float(sympl),
                Field::Float(iso),
            ])
            .map_err(io_err(path))?;
        }
    }
    csv.finish().map_err(io_err(path))?;

    let mut summary = format!(
        "haar-audit n={n} m={m} seed={} samples={} max_ortho_err={:.6e} max_symplectic_err={:.6e} max_isotropy_err={:.6e}",
        config.seed, config.samples, max_ortho, max_sympl, max_iso
    );
    if line_audit {
        let ks = ks_statistic_uniform(&mut angles, std::f64::consts::PI);
        summary.push_str(&format!(
            " ks_stat={:.6e} ks_critical={:.6e}",
            ks,
            ks_critical_value(config.samples)
        ));
    }
    Ok(RunOutcome {
        summary,
        violations: 0,
    })
}

/// One-sample KS statistic against the uniform distribution on `[0, span)`.
pub fn ks_statistic_uniform(values: &mut [f64], span: f64) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let n = values.len() as f64;
    let mut ks = 0.0f64;
    for (i, v) in values.iter().enumerate() {
        let f = v / span;
        ks = ks
            .max((f - i as f64 / n).abs())
            .max(((i + 1) as f64 / n - f).abs());
    }
    ks
}

fn run_heis_check(config: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    let (n, m) = (config.n, config.m);
    let path = &config.output_path;
    let mut csv = CsvWriter::create(
        path,
        &[
            "sample",
            "recomposition_err",
            "associativity_err",
            "dilation_err",
            "left_invariance_err",
        ],
    )
    .map_err(io_err(path))?;

    let point = |rng: &mut isoproj::stream::ChaCha8Rng| {
        let z = AmbientVector64::new(normal_vector(rng, 2 * n)).expect("even dimension");
        let t = isoproj::stream::standard_normal(rng);
        HeisenbergPoint64::new(z, t)
    };
    let point_gap = |a: &HeisenbergPoint64, b: &HeisenbergPoint64| -> f64 {
        (a.z() - b.z()).abs().max().max((a.t() - b.t()).abs())
    };

    let mut maxima = [0.0f64; 4];
    for k in 0..config.samples {
        let mut rng = substream_rng(config.seed, base::AUDIT_SAMPLE + k as u64);
        let v = haar_sample_from_rng::<f64, _>(n, m, &mut rng)
            .map_err(|e| RunError::Compute(e.to_string()))?;
        let p = point(&mut rng);
        let q = point(&mut rng);
        let r = point(&mut rng);

        let (vert, horiz) = decompose(&v, &p).map_err(|e| RunError::Compute(e.to_string()))?;
        let recomposed = vert.group_op(&horiz).expect("same group");
        let recomposition = point_gap(&recomposed, &p);

        let assoc_left = p
            .group_op(&q)
            .expect("same group")
            .group_op(&r)
            .expect("same group");
        let assoc_right = p
            .group_op(&q.group_op(&r).expect("same group"))
            .expect("same group");
        let associativity = point_gap(&assoc_left, &assoc_right);

        let mut dilation_err = 0.0f64;
        for s in [0.1, 1.0, 7.0] {
            let scaled = dilation(s, &p).expect("positive factor");
            dilation_err =
                dilation_err.max((isoproj::heis_norm(&scaled) - s * isoproj::heis_norm(&p)).abs());
        }

        let d0 = heis_dist(&p, &q).expect("same group");
        let d1 = heis_dist(
            &r.group_op(&p).expect("same group"),
            &r.group_op(&q).expect("same group"),
        )
        .expect("same group");
        let left_invariance = (d0 - d1).abs();

        maxima[0] = maxima[0].max(recomposition);
        maxima[1] = maxima[1].max(associativity);
        maxima[2] = maxima[2].max(dilation_err);
        maxima[3] = maxima[3].max(left_invariance);
        csv.row(&[
            Field::UInt(k as u64),
            Field::Float(recomposition),
            Field::Float(associativity),
            Field::Float(dilation_err),
            Field::Float(left_invariance),
        ])
        .map_err(io_err(path))?;
    }
    csv.finish().map_err(io_err(path))?;
    let summary = format!(
        "heis-check n={n} m={m} seed={} samples={} max_recomposition_err={:.6e} max_associativity_err={:.6e} max_dilation_err={:.6e} max_left_invariance_err={:.6e}",
        config.seed, config.samples, maxima[0], maxima[1], maxima[2], maxima[3]
    );
    Ok(RunOutcome {
        summary,
        violations: 0,
    })
}

fn run_dim_experiment(config: &ExperimentConfig, heisenberg: bool) -> Result<RunOutcome, RunError> {
    let spec = config.set.spec();
    let report: ProjectionExperimentReport<f64> = if heisenberg {
        heisenberg_projection_experiment_with_eps(
            &spec,
            config.n,
            config.m,
            config.planes,
            config.level,
            config.seed,
            config.lift.lift(),
            config.eps,
        )
        .map_err(RunError::from_experiment)?
    } else {
        projection_dimension_experiment_with_eps(
            &spec,
            config.n,
            config.m,
            config.planes,
            config.level,
            config.seed,
            config.eps,
        )
        .map_err(RunError::from_experiment)?
    };

    let path = &config.output_path;
    let mut csv =
        CsvWriter::create(path, &["plane", "slope", "r2", "measure"]).map_err(io_err(path))?;
    for (k, outcome) in report.outcomes.iter().enumerate() {
        csv.row(&[
            Field::UInt(k as u64),
            Field::Float(outcome.slope),
            Field::Float(outcome.r2),
            Field::Float(outcome.measure),
        ])
        .map_err(io_err(path))?;
    }
    csv.finish().map_err(io_err(path))?;

    if let Some(plot_path) = &config.plot_path {
        write_cover_plot(config, &spec, plot_path)?;
    }

    let command = if heisenberg {
        "heis-experiment"
    } else {
        "dim-experiment"
    };
    let lift = if heisenberg {
        format!(" lift={}", config.lift.name())
    } else {
        String::new()
    };
    let summary = format!(
        "{command} n={} m={} seed={} set={}{} level={} planes={} target={:.6} within_fraction={:.6} exceptional_fraction={:.6} median_slope={:.6} median_measure={:.6e}",
        report.n,
        report.m,
        config.seed,
        config.set.name(),
        lift,
        report.level,
        report.planes,
        report.target_dimension,
        report.within_fraction,
        report.exceptional_fraction,
        report.slope_quantiles.median,
        report.measure_quantiles.median
    );
    Ok(RunOutcome {
        summary,
        violations: 0,
    })
}

fn write_cover_plot(
    config: &ExperimentConfig,
    spec: &isoproj::IfsSpec64,
    plot_path: &Path,
) -> Result<(), RunError> {
    let cover = ifs_cover(spec, config.level).map_err(RunError::from_lab)?;
    let cover = if spec.dim() < 2 * config.n {
        embed_cover(&cover, spec.dim(), 2 * config.n, 0).map_err(RunError::from_lab)?
    } else {
        cover
    };
    let scales: Vec<f64> = (1..=config.level)
        .map(|j| spec.scale().powi(j as i32))
        .collect();
    let report = box_count_cover(&cover, &scales).map_err(RunError::from_lab)?;
    svg::write_loglog(
        plot_path,
        &report.scales,
        &report.counts,
        report.slope,
        report.window,
        &format!("{} level {} box counts", config.set.name(), config.level),
    )
    .map_err(io_err(plot_path))
}

fn run_energy(config: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    let spec = config.set.spec();
    let cover = ifs_cover(&spec, config.level).map_err(RunError::from_lab)?;
    let points = cover.centers_matrix();
    let alpha = config.alpha.expect("validated by resolve");

    let path = &config.output_path;
    let mut csv =
        CsvWriter::create(path, &["stage", "points", "pairs", "estimate"]).map_err(io_err(path))?;
    let mut estimate = 0.0;
    let mut final_pairs = 0;
    for stage in 0..4u32 {
        let pairs = (config.samples >> (3 - stage)).max(1);
        estimate =
            energy_estimate(&points, alpha, pairs, config.seed).map_err(RunError::from_lab)?;
        final_pairs = pairs;
        csv.row(&[
            Field::UInt(stage as u64),
            Field::UInt(points.ncols() as u64),
            Field::UInt(pairs as u64),
            Field::Float(estimate),
        ])
        .map_err(io_err(path))?;
    }
    csv.finish().map_err(io_err(path))?;
    let summary = format!(
        "energy seed={} set={} level={} alpha={} points={} pairs={} estimate={:.6e}",
        config.seed,
        config.set.name(),
        config.level,
        alpha,
        points.ncols(),
        final_pairs,
        estimate
    );
    Ok(RunOutcome {
        summary,
        violations: 0,
    })
}
