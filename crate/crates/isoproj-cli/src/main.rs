use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use isoproj_cli::config::{self, Command, ConfigFile, Overrides};
use isoproj_cli::run;

/// Certificates and experiments for isotropic projections, with
/// deterministic seeds and CSV/SVG artifacts.
#[derive(Parser)]
#[command(name = "isoproj", version, about)]
struct Cli {
    #[command(subcommand)]
    command: CommandArg,
}

#[derive(Subcommand)]
enum CommandArg {
    /// Monte Carlo transversality certificate; exits 1 on any violation
    Certify(CommonArgs),
    /// Closed-form determinant against the numeric determinant
    DetCheck(CommonArgs),
    /// Orthogonality, symplecticity, and isotropy of Haar samples
    HaarAudit(CommonArgs),
    /// Heisenberg group identities on random samples
    HeisCheck(CommonArgs),
    /// Box-counting dimension of projected covers over sampled planes
    DimExperiment(CommonArgs),
    /// The same sweep through Heisenberg horizontal projections
    HeisExperiment(CommonArgs),
    /// Monte Carlo energy estimate of a preset measure
    Energy(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Key-value configuration file (TOML)
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    planes: Option<usize>,
    #[arg(long)]
    level: Option<u32>,
    /// Grid resolution for the Lipschitz estimation
    #[arg(long)]
    grid: Option<usize>,
    /// Transversality constant C_T
    #[arg(long)]
    ct: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Test set preset (four-corner-cantor, unit-square, cantor-dust-075, unit-segment)
    #[arg(long)]
    set: Option<String>,
    /// Heisenberg lift (slab, graph, vertical-axis)
    #[arg(long)]
    lift: Option<String>,
    /// Output CSV path (default: <command>.csv)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional SVG log-log plot path
    #[arg(long)]
    plot: Option<PathBuf>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            n: self.n,
            m: self.m,
            seed: self.seed,
            samples: self.samples,
            planes: self.planes,
            level: self.level,
            grid: self.grid,
            c_t: self.ct,
            alpha: self.alpha,
            eps: self.eps,
            set: self.set.clone(),
            lift: self.lift.clone(),
            out: self.out.clone(),
            plot: self.plot.clone(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match &cli.command {
        CommandArg::Certify(a) => (Command::Certify, a),
        CommandArg::DetCheck(a) => (Command::DetCheck, a),
        CommandArg::HaarAudit(a) => (Command::HaarAudit, a),
        CommandArg::HeisCheck(a) => (Command::HeisCheck, a),
        CommandArg::DimExperiment(a) => (Command::DimExperiment, a),
        CommandArg::HeisExperiment(a) => (Command::HeisExperiment, a),
        CommandArg::Energy(a) => (Command::Energy, a),
    };

    let file = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(source) => match config::parse_config_file(&source) {
                Ok(file) => file,
                Err(err) => {
                    eprintln!("error: {err}");
                    return ExitCode::from(2);
                }
            },
            Err(err) => {
                eprintln!("error: cannot read `{}`: {err}", path.display());
                return ExitCode::from(2);
            }
        },
        None => ConfigFile::default(),
    };

    let config = match config::resolve(command, file, args.overrides()) {
        Ok(config) => config,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(2);
        }
    };

    match run::run(&config) {
        Ok(outcome) => ExitCode::from(run::exit_code_for(&outcome) as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
