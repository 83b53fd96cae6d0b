use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use spectral_zeros::experiment::{self, Experiment};
use spectral_zeros::Error;

/// Zero sets of Fourier transforms of convex bodies and the entropy of their
/// translated intersections.
#[derive(Parser)]
#[command(name = "spectral-zeros", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed form, volume quadrature and boundary rule at random frequencies.
    OracleCheck(Common),
    /// Stationary-phase model error across radii.
    ModelError(Common),
    /// Radial zeros and shell samples inside B.
    Shells(Common),
    /// Entropy of sampled X sets across radii and η.
    XsetEntropy(Common),
    /// Lattice spectrum certificates and the spectrum-to-X construction.
    CubeSpectrum(Common),
    /// Near-integrality statistics on X samples.
    ResidualStats(Common),
    /// Evaluate the transform at frequencies read from a CSV file.
    Eval {
        #[command(flatten)]
        common: Common,
        /// CSV file with one frequency per row.
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Body kind: ball, cube, ellipsoid or rounded-square.
    #[arg(long)]
    body: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    /// Any configuration key, e.g. `--param rho=0.2`. Repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Comma-separated radii.
    #[arg(long = "R", value_name = "LIST")]
    r: Option<String>,
    /// Vectors separated by `;`, coordinates by `,`.
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// `csv` (table plus JSON summary) or `json`.
    #[arg(long)]
    format: Option<String>,
}

impl Common {
    fn overrides(&self) -> Result<Vec<(String, String)>, Error> {
        let mut out = Vec::new();
        for p in &self.params {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::Config {
                    key: p.clone(),
                    message: "expected KEY=VALUE".into(),
                })?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k.to_string(), v));
            }
        };
        push("kind", self.body.clone());
        push("dim", self.dim.map(|d| d.to_string()));
        push("R", self.r.clone());
        push("eta", self.eta.clone());
        push("seed", self.seed.map(|s| s.to_string()));
        push("out_dir", self.out_dir.as_ref().map(|p| p.display().to_string()));
        push("format", self.format.clone());
        Ok(out)
    }
}

fn execute(experiment: Experiment, common: &Common, input: Option<PathBuf>) -> Result<bool, Error> {
    let cfg = experiment::load(experiment, common.config.as_deref(), &common.overrides()?)?;
    let outcome = experiment::run(&cfg, input.as_deref())?;
    for c in &outcome.checks {
        println!(
            "{} {}: {} {} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.relation,
            c.threshold
        );
    }
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::OracleCheck(c) => execute(Experiment::OracleCheck, c, None),
        Command::ModelError(c) => execute(Experiment::ModelError, c, None),
        Command::Shells(c) => execute(Experiment::Shells, c, None),
        Command::XsetEntropy(c) => execute(Experiment::XsetEntropy, c, None),
        Command::CubeSpectrum(c) => execute(Experiment::CubeSpectrum, c, None),
        Command::ResidualStats(c) => execute(Experiment::ResidualStats, c, None),
        Command::Eval { common, input } => execute(Experiment::Eval, common, Some(input.clone())),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
