//! Experiment configuration: a flat key-value TOML document plus
//! command-line overrides, validated into an [`ExperimentConfig`].

use std::path::PathBuf;

use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("config is not valid TOML: {0}")]
    Syntax(String),
    #[error("missing required field `{0}`")]
    MissingField(&'static str),
    #[error("{0}")]
    Constraint(String),
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
    #[error("unknown set preset `{0}` (known: four-corner-cantor, unit-square, cantor-dust-075, unit-segment)")]
    UnknownSet(String),
    #[error("unknown lift `{0}` (known: slab, graph, vertical-axis)")]
    UnknownLift(String),
    #[error("config file names command `{file}` but the subcommand is `{cli}`")]
    CommandMismatch { file: String, cli: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Certify,
    DetCheck,
    HaarAudit,
    HeisCheck,
    DimExperiment,
    HeisExperiment,
    Energy,
}

impl Command {
    pub fn parse(name: &str) -> Result<Self, ConfigError> {
        match name.trim().to_lowercase().replace('_', "-").as_str() {
            "certify" => Ok(Self::Certify),
            "det-check" => Ok(Self::DetCheck),
            "haar-audit" => Ok(Self::HaarAudit),
            "heis-check" => Ok(Self::HeisCheck),
            "dim-experiment" => Ok(Self::DimExperiment),
            "heis-experiment" => Ok(Self::HeisExperiment),
            "energy" => Ok(Self::Energy),
            other => Err(ConfigError::UnknownCommand(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Certify => "certify",
            Self::DetCheck => "det-check",
            Self::HaarAudit => "haar-audit",
            Self::HeisCheck => "heis-check",
            Self::DimExperiment => "dim-experiment",
            Self::HeisExperiment => "heis-experiment",
            Self::Energy => "energy",
        }
    }
}

/// Named test sets available to the experiment commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetPreset {
    FourCornerCantor,
    UnitSquare,
    CantorDust075,
    UnitSegment,
}

impl SetPreset {
    pub fn parse(name: &str) -> Result<Self, ConfigError> {
        match name.trim().to_lowercase().replace('_', "-").as_str() {
            "four-corner-cantor" | "four-corner" => Ok(Self::FourCornerCantor),
            "unit-square" | "square" => Ok(Self::UnitSquare),
            "cantor-dust-075" | "dust" => Ok(Self::CantorDust075),
            "unit-segment" | "segment" => Ok(Self::UnitSegment),
            other => Err(ConfigError::UnknownSet(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::FourCornerCantor => "four-corner-cantor",
            Self::UnitSquare => "unit-square",
            Self::CantorDust075 => "cantor-dust-075",
            Self::UnitSegment => "unit-segment",
        }
    }

    pub fn spec(&self) -> isoproj::IfsSpec64 {
        match self {
            Self::FourCornerCantor => isoproj::IfsSpec::four_corner_cantor(),
            Self::UnitSquare => isoproj::IfsSpec::unit_square(),
            Self::CantorDust075 => isoproj::IfsSpec::cantor_dust_075(),
            Self::UnitSegment => isoproj::IfsSpec::unit_segment(),
        }
    }
}

/// Heisenberg lift rule for `heis-experiment`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftKind {
    Slab,
    Graph,
    VerticalAxis,
}

impl LiftKind {
    pub fn parse(name: &str) -> Result<Self, ConfigError> {
        match name.trim().to_lowercase().replace('_', "-").as_str() {
            "slab" | "t0" => Ok(Self::Slab),
            "graph" => Ok(Self::Graph),
            "vertical-axis" | "vertical" => Ok(Self::VerticalAxis),
            other => Err(ConfigError::UnknownLift(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Slab => "slab",
            Self::Graph => "graph",
            Self::VerticalAxis => "vertical-axis",
        }
    }

    pub fn lift(&self) -> isoproj::HeisenbergLift {
        match self {
            Self::Slab => isoproj::HeisenbergLift::Slab,
            Self::Graph => isoproj::HeisenbergLift::Graph,
            Self::VerticalAxis => isoproj::HeisenbergLift::VerticalAxis,
        }
    }
}

/// Raw key-value document; unknown keys are rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<String>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub planes: Option<usize>,
    pub level: Option<u32>,
    pub grid: Option<usize>,
    #[serde(alias = "ct", alias = "C_T")]
    pub c_t: Option<f64>,
    pub alpha: Option<f64>,
    pub eps: Option<f64>,
    pub set: Option<String>,
    pub lift: Option<String>,
    pub out: Option<String>,
    pub plot: Option<String>,
}

/// Command-line overrides; any present value wins over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub planes: Option<usize>,
    pub level: Option<u32>,
    pub grid: Option<usize>,
    pub c_t: Option<f64>,
    pub alpha: Option<f64>,
    pub eps: Option<f64>,
    pub set: Option<String>,
    pub lift: Option<String>,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

/// A fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub samples: usize,
    pub planes: usize,
    pub level: u32,
    pub grid: usize,
    pub c_t: Option<f64>,
    pub alpha: Option<f64>,
    pub eps: Option<f64>,
    pub set: SetPreset,
    pub lift: LiftKind,
    pub output_path: PathBuf,
    pub plot_path: Option<PathBuf>,
}

/// Largest plane budget accepted by the experiment commands.
pub const MAX_PLANES: usize = 1000;

pub fn parse_config_file(source: &str) -> Result<ConfigFile, ConfigError> {
    toml::from_str(source).map_err(|e| ConfigError::Syntax(e.to_string()))
}

/// Parses and validates a standalone configuration document; the document
/// must name its command.
pub fn parse_config(source: &str) -> Result<ExperimentConfig, ConfigError> {
    let file = parse_config_file(source)?;
    let name = file
        .command
        .clone()
        .ok_or(ConfigError::MissingField("command"))?;
    let command = Command::parse(&name)?;
    resolve(command, file, Overrides::default())
}

/// Merges file values and overrides, applies defaults, and validates.
pub fn resolve(
    command: Command,
    file: ConfigFile,
    cli: Overrides,
) -> Result<ExperimentConfig, ConfigError> {
    if let Some(name) = &file.command {
        let file_command = Command::parse(name)?;
        if file_command != command {
            return Err(ConfigError::CommandMismatch {
                file: file_command.name().to_string(),
                cli: command.name().to_string(),
            });
        }
    }

    let needs_planes = matches!(command, Command::DimExperiment | Command::HeisExperiment);
    let (n, m) = match command {
        Command::Energy => (cli.n.or(file.n).unwrap_or(1), cli.m.or(file.m).unwrap_or(1)),
        _ => (
            cli.n.or(file.n).ok_or(ConfigError::MissingField("n"))?,
            cli.m.or(file.m).ok_or(ConfigError::MissingField("m"))?,
        ),
    };
    if m == 0 || n == 0 {
        return Err(ConfigError::Constraint("n and m must be positive".into()));
    }
    if m > n {
        return Err(ConfigError::Constraint("m must satisfy m <= n".into()));
    }

    let seed = cli.seed.or(file.seed).unwrap_or(0);
    let samples = cli.samples.or(file.samples).unwrap_or(10_000);
    let planes = cli.planes.or(file.planes).unwrap_or(200);
    let level = cli.level.or(file.level).unwrap_or(8);
    let grid = cli.grid.or(file.grid).unwrap_or(32);
    if samples == 0 || planes == 0 || level == 0 || grid == 0 {
        return Err(ConfigError::Constraint(
            "samples, planes, level, and grid must be positive".into(),
        ));
    }
    if needs_planes && planes > MAX_PLANES {
        return Err(ConfigError::Constraint(format!(
            "planes must be at most {MAX_PLANES}, got {planes}"
        )));
    }

    let c_t = cli.c_t.or(file.c_t);
    if command == Command::Certify {
        let value = c_t.ok_or(ConfigError::MissingField("c_t"))?;
        let max = isoproj::max_admissible_ct::<f64>(m);
        if value <= 0.0 || value > max {
            return Err(ConfigError::Constraint(format!(
                "c_t must satisfy 0 < c_t <= {max:.6}, got {value}"
            )));
        }
    }
    let alpha = cli.alpha.or(file.alpha);
    if command == Command::Energy {
        let value = alpha.ok_or(ConfigError::MissingField("alpha"))?;
        if value <= 0.0 {
            return Err(ConfigError::Constraint(format!(
                "alpha must be positive, got {value}"
            )));
        }
    }
    let eps = cli.eps.or(file.eps);
    if let Some(value) = eps {
        if value <= 0.0 {
            return Err(ConfigError::Constraint(format!(
                "eps must be positive, got {value}"
            )));
        }
    }

    let set = match cli.set.or(file.set) {
        Some(name) => SetPreset::parse(&name)?,
        None => match command {
            Command::DimExperiment => SetPreset::CantorDust075,
            Command::HeisExperiment => SetPreset::FourCornerCantor,
            Command::Energy => SetPreset::UnitSegment,
            _ => SetPreset::FourCornerCantor,
        },
    };
    let lift = match cli.lift.or(file.lift) {
        Some(name) => LiftKind::parse(&name)?,
        None => LiftKind::Slab,
    };

    let output_path = cli
        .out
        .or_else(|| file.out.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", command.name())));
    let plot_path = cli.plot.or_else(|| file.plot.map(PathBuf::from));

    Ok(ExperimentConfig {
        command,
        n,
        m,
        seed,
        samples,
        planes,
        level,
        grid,
        c_t,
        alpha,
        eps,
        set,
        lift,
        output_path,
        plot_path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certify_defaults_are_applied() {
        let config = parse_config("command = \"certify\"\nn = 2\nm = 2\nc_t = 0.1\n").unwrap();
        assert_eq!(config.command, Command::Certify);
        assert_eq!(config.seed, 0);
        assert_eq!(config.samples, 10_000);
        assert_eq!(config.planes, 200);
        assert_eq!(config.level, 8);
        assert_eq!(config.grid, 32);
        assert_eq!(config.output_path, PathBuf::from("certify.csv"));
    }

    #[test]
    fn m_bigger_than_n_is_a_constraint_error() {
        let err = parse_config("command = \"certify\"\nn = 1\nm = 2\nc_t = 0.1\n").unwrap_err();
        match err {
            ConfigError::Constraint(msg) => assert!(msg.contains("m must satisfy m <= n")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn dim_experiment_preset_is_valid() {
        let config =
            parse_config("command = \"dim-experiment\"\nn = 1\nm = 1\nlevel = 9\nplanes = 200\n")
                .unwrap();
        assert_eq!(config.set, SetPreset::CantorDust075);
        assert_eq!(config.level, 9);
        assert_eq!(config.planes, 200);
    }

    #[test]
    fn missing_required_fields_are_named() {
        assert_eq!(
            parse_config("command = \"certify\"\nn = 2\nm = 2\n").unwrap_err(),
            ConfigError::MissingField("c_t")
        );
        assert_eq!(
            parse_config("command = \"energy\"\n").unwrap_err(),
            ConfigError::MissingField("alpha")
        );
        assert_eq!(
            parse_config("command = \"det-check\"\nm = 1\n").unwrap_err(),
            ConfigError::MissingField("n")
        );
    }

    #[test]
    fn unknown_keys_and_commands_are_rejected() {
        assert!(matches!(
            parse_config("command = \"certify\"\nn = 1\nm = 1\nc_t = 0.1\nbogus = 3\n"),
            Err(ConfigError::Syntax(_))
        ));
        assert!(matches!(
            parse_config("command = \"non-sense\"\n"),
            Err(ConfigError::UnknownCommand(_))
        ));
    }

    #[test]
    fn cli_overrides_win_over_file_values() {
        let file = parse_config_file("command = \"certify\"\nn = 2\nm = 2\nc_t = 0.1\nseed = 5\n")
            .unwrap();
        let cli = Overrides {
            seed: Some(9),
            c_t: Some(0.05),
            ..Default::default()
        };
        let config = resolve(Command::Certify, file, cli).unwrap();
        assert_eq!(config.seed, 9);
        assert_eq!(config.c_t, Some(0.05));
    }

    #[test]
    fn file_and_subcommand_must_agree() {
        let file = parse_config_file("command = \"certify\"\nn = 1\nm = 1\nc_t = 0.1\n").unwrap();
        assert!(matches!(
            resolve(Command::Energy, file, Overrides::default()),
            Err(ConfigError::CommandMismatch { .. })
        ));
    }

    #[test]
    fn plane_budget_is_enforced() {
        let err = parse_config("command = \"dim-experiment\"\nn = 1\nm = 1\nplanes = 2000\n")
            .unwrap_err();
        assert!(matches!(err, ConfigError::Constraint(_)));
    }
}
