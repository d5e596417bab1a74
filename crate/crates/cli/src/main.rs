use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use oscillab::{presets_table, run, RunConfig};

#[derive(Parser)]
#[command(
    name = "oscillab",
    version,
    about = "Oscillator amplifier models: quantum master equation, classical \
             limit cycle, stochastic ensembles, and the Hamiltonian embedding \
             of the van der Pol equation."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one scenario and write CSV/JSON/SVG artifacts.
    Run(Box<RunArgs>),
    /// List the canonical operating points with their populations.
    Presets,
}

#[derive(Args)]
struct RunArgs {
    /// Flat JSON config file; flags given here override its keys.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Exit with status 2 if any headline metric misses its tolerance.
    #[arg(long)]
    assert: bool,

    /// One of: me, sde, sle, vdp, vdp-ham, preset-a, preset-b, preset-c,
    /// equivalence, commutator-check.
    #[arg(long)]
    scenario: Option<String>,

    /// Output directory [default: $OSCILLAB_OUTPUT_DIR or "."]
    #[arg(long, value_name = "DIR")]
    output_dir: Option<String>,

    /// RNG seed, also part of the artifact file names [default: 42]
    #[arg(long)]
    seed: Option<u64>,

    /// Fock levels per mode [default: 96; preset-c: 30; commutator-check: 12]
    #[arg(long)]
    dim: Option<usize>,

    /// Integrator step [default: 1e-3; sde: 1e-2; equivalence: 1e-4]
    #[arg(long)]
    dt: Option<f64>,

    /// Integration horizon [default: 0.5 (me/presets), 1 (sde), 30 (sle),
    /// 50 (vdp, vdp-ham), 60 (equivalence)]
    #[arg(long)]
    t_final: Option<f64>,

    /// One-quantum rate scale [default: 1 (me/presets); 0 (sde)]
    #[arg(long)]
    gamma1: Option<f64>,

    /// Two-quantum rate scale [default: 0.1]
    #[arg(long)]
    gamma2: Option<f64>,

    /// One-quantum upward population
    #[arg(long)]
    n_up: Option<f64>,

    /// One-quantum downward population
    #[arg(long)]
    n_dn: Option<f64>,

    /// Two-quantum upward population
    #[arg(long)]
    n_upp: Option<f64>,

    /// Two-quantum downward population
    #[arg(long)]
    n_ddn: Option<f64>,

    /// Oscillator frequency [default: 1]
    #[arg(long)]
    omega0: Option<f64>,

    /// Work in the frame rotating at omega0 [default: true for me/presets,
    /// false for sle]
    #[arg(long)]
    rotating_frame: Option<bool>,

    /// Additive noise intensity [default: 0]
    #[arg(long)]
    sigma_v2: Option<f64>,

    /// Multiplicative noise intensity (sde scenario, required)
    #[arg(long)]
    sigma_w2: Option<f64>,

    /// Stochastic convention: "ito" or "stratonovich" (sde, required)
    #[arg(long)]
    interpretation: Option<String>,

    /// Ensemble size [default: 10000]
    #[arg(long)]
    n_traj: Option<usize>,

    /// Nonlinearity of the scalar oscillator (vdp, required)
    #[arg(long)]
    mu: Option<f64>,

    /// Coupling of the Hamiltonian embedding (vdp-ham/equivalence
    /// required; commutator-check default 0.3)
    #[arg(long)]
    lambda: Option<f64>,

    /// Initial position [default: 1; equivalence: 2]
    #[arg(long)]
    x0: Option<f64>,

    /// Initial velocity [default: 0]
    #[arg(long)]
    v0: Option<f64>,

    /// Initial auxiliary coordinate [default: 0.3]
    #[arg(long)]
    y0: Option<f64>,

    /// Initial auxiliary momentum [default: 0.1]
    #[arg(long)]
    px0: Option<f64>,

    /// Initial amplitude, real part [default: 0.2; sle: 0.1]
    #[arg(long)]
    alpha_re: Option<f64>,

    /// Initial amplitude, imaginary part [default: 0]
    #[arg(long)]
    alpha_im: Option<f64>,

    /// Record every n-th step [default: 1 (me/presets), 10, 100
    /// (equivalence)]
    #[arg(long)]
    record_stride: Option<usize>,
}

impl RunArgs {
    fn merge_into(&self, config: &mut RunConfig) {
        macro_rules! take {
            ($($field:ident),* $(,)?) => {
                $(if self.$field.is_some() {
                    config.$field = self.$field.clone();
                })*
            };
        }
        take!(
            scenario, output_dir, seed, dim, dt, t_final, gamma1, gamma2, n_up, n_dn, n_upp,
            n_ddn, omega0, rotating_frame, sigma_v2, sigma_w2, interpretation, n_traj, mu,
            lambda, x0, v0, y0, px0, alpha_re, alpha_im, record_stride,
        );
    }
}

fn execute(args: &RunArgs) -> Result<bool> {
    let mut config = match &args.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    args.merge_into(&mut config);

    let outcome = run(&config)?;
    for metric in &outcome.summary.metrics {
        println!("{}", metric.describe());
    }
    println!("summary: {}", outcome.json_path.display());
    Ok(outcome.summary.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Presets => {
            print!("{}", presets_table());
            ExitCode::SUCCESS
        }
        Command::Run(args) => match execute(&args) {
            Ok(pass) => {
                if args.assert && !pass {
                    eprintln!("assertion failed: at least one metric missed its tolerance");
                    ExitCode::from(2)
                } else {
                    ExitCode::SUCCESS
                }
            }
            Err(err) => {
                eprintln!("error: {err:#}");
                ExitCode::FAILURE
            }
        },
    }
}
