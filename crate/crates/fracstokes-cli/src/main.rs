//! fracstokes: spectral solvers and critical-exponent calculators for the
//! integro-differential diffusion equation u_t = D^{1-a} Lap u + f.
//!
//! Exit codes: 0 success/Global, 2 usage or domain error, 3 I/O error,
//! 10 blow-up detected, 11 inconclusive run, 12 sweep found no boundary.

mod commands;
mod config;

use clap::{Args, Parser, Subcommand};
use commands::{InitialData, SystemInit, EXIT_IO, EXIT_USAGE};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fracstokes", version, about, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InitArgs {
    /// initial field as an FRDF file (must match the config grid)
    #[arg(long)]
    u0: Option<PathBuf>,
    /// Gaussian amplitude when no file is given
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    /// Gaussian width (default L/16)
    #[arg(long)]
    width: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the Mittag-Leffler function E_{alpha,beta}(z)
    #[command(allow_negative_numbers = true)]
    Ml { alpha: f64, beta: f64, z: f64 },
    /// Evolve the linear homogeneous equation from a config file
    EvolveLinear {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        init: InitArgs,
    },
    /// Run the semilinear Picard solver with blow-up detection
    EvolveSemilinear {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        init: InitArgs,
        /// write every k-th trajectory field as an FRDF checkpoint
        #[arg(long)]
        checkpoint_every: Option<usize>,
    },
    /// Run the coupled two-component system solver
    EvolveSystem {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        init: InitArgs,
        /// Gaussian amplitude of the v component (default: same as u)
        #[arg(long)]
        v_amplitude: Option<f64>,
        /// Gaussian width of the v component
        #[arg(long)]
        v_width: Option<f64>,
        /// initial v field as an FRDF file
        #[arg(long)]
        v0: Option<PathBuf>,
        #[arg(long)]
        checkpoint_every: Option<usize>,
    },
    /// Critical-exponent calculators (JSON on stdout)
    Exponent {
        #[command(subcommand)]
        which: ExponentCmd,
    },
    /// Empirical blow-up sweep over p with boundary estimation
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// worker threads (default: number of processors)
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Debug the scalar-mode time stepper against the spectral factor
    ModeOracle {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1024)]
        steps: usize,
        /// also print E_{a,1}(-lambda t^a) and the difference
        #[arg(long)]
        compare: bool,
    },
}

#[derive(Subcommand)]
enum ExponentCmd {
    /// p_c and optionally lambda(p) for the scalar equation
    #[command(allow_negative_numbers = true)]
    Scalar {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long, default_value_t = 0.0)]
        rho: f64,
        /// also evaluate lambda at this p
        #[arg(long)]
        lambda_at: Option<f64>,
    },
    /// l1, l2 and the dimension bounds for the system
    #[command(allow_negative_numbers = true)]
    System {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 0.0)]
        sigma1: f64,
        #[arg(long, default_value_t = 0.0)]
        sigma2: f64,
        #[arg(long, default_value_t = 0.0)]
        rho1: f64,
        #[arg(long, default_value_t = 0.0)]
        rho2: f64,
    },
}

fn init_data(args: &InitArgs) -> InitialData {
    InitialData { file: args.u0.clone(), amplitude: args.amplitude, width: args.width }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Ml { alpha, beta, z } => commands::cmd_ml(alpha, beta, z),
        Command::EvolveLinear { config, out, init } => {
            commands::cmd_evolve_linear(&config, &out, &init_data(&init))
        }
        Command::EvolveSemilinear { config, out, init, checkpoint_every } => {
            commands::cmd_evolve_semilinear(&config, &out, &init_data(&init), checkpoint_every)
        }
        Command::EvolveSystem {
            config,
            out,
            init,
            v_amplitude,
            v_width,
            v0,
            checkpoint_every,
        } => {
            let u = init_data(&init);
            let v = InitialData {
                file: v0,
                amplitude: v_amplitude.unwrap_or(init.amplitude),
                width: v_width.or(init.width),
            };
            commands::cmd_evolve_system(&config, &out, &SystemInit { u, v }, checkpoint_every)
        }
        Command::Exponent { which } => match which {
            ExponentCmd::Scalar { n, alpha, sigma, rho, lambda_at } => {
                commands::cmd_exponent_scalar(n, alpha, sigma, rho, lambda_at)
            }
            ExponentCmd::System { n, alpha, beta, p, q, sigma1, sigma2, rho1, rho2 } => {
                commands::cmd_exponent_system(n, alpha, beta, p, q, sigma1, sigma2, rho1, rho2)
            }
        },
        Command::Sweep { config, out, jobs } => commands::cmd_sweep(&config, &out, jobs),
        Command::ModeOracle { lambda, alpha, t_end, steps, compare } => {
            commands::cmd_mode_oracle(lambda, alpha, t_end, steps, compare)
        }
    }
}

/// I/O failures exit 3; every other error is a usage/domain problem (2).
fn exit_code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return EXIT_IO;
        }
        if let Some(core) = cause.downcast_ref::<fracstokes_core::Error>() {
            if matches!(core, fracstokes_core::Error::Io(_)) {
                return EXIT_IO;
            }
        }
    }
    EXIT_USAGE
}

fn main() -> ExitCode {
    if let Ok(dir) = std::env::var("FRACSTOKES_CACHE") {
        if !dir.is_empty() {
            fracstokes_core::propagator::set_disk_cache_dir(Some(PathBuf::from(dir)));
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
