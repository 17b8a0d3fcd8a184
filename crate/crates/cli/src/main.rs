use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use polwig_cli::commands::{self, CliError, Flags, Resolved};

#[derive(Parser)]
#[command(
    name = "polwig",
    version,
    about = "Phase-space surfaces and verification runs for polarization kernels \
             of entangled coherent states"
)]
struct Cli {
    /// Optional key=value config file providing defaults
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a figure-preset surface (1a..1f) over (delta, phi_x)
    Figure {
        /// Preset id: 1a, 1b, 1c, 1d, 1e or 1f
        id: String,
        /// Samples per axis (>= 8)
        #[arg(long)]
        res: Option<usize>,
        /// Output format: csv, json or svg
        #[arg(long)]
        format: Option<String>,
        /// Output path (default figure_<id>.<ext> in the output directory)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification suite and write a JSON report
    Verify {
        /// Fock levels per mode
        #[arg(long)]
        dim: Option<usize>,
        /// Number of seeded comparison points
        #[arg(long)]
        points: Option<usize>,
        /// Seed for the reproducible point sample
        #[arg(long)]
        seed: Option<u64>,
        /// Report path (default verify.json)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate closed-form Stokes parameters over an amplitude sweep
    Stokes {
        /// x-mode amplitude, cartesian (0.7, 1+2i) or polar (0.7@1.0472)
        #[arg(long, default_value = "0.7")]
        beta: String,
        /// y-mode amplitude
        #[arg(long, default_value = "0.7")]
        gamma: String,
        /// Scale sweep start:stop:count applied to both amplitudes
        #[arg(long, default_value = "0:2:21")]
        sweep: String,
        /// Output format: csv or json
        #[arg(long)]
        format: Option<String>,
        /// Output path (default stokes.<ext>)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a surface for a free-form parameter record
    Grid {
        /// Comma-separated key=value record (beta_mod, beta_phase, p2_mod,
        /// p2_phase, phs_mod, phs_phase, alpha_mod, phi_x, delta, m, l, k,
        /// order)
        #[arg(long, default_value = "")]
        params: String,
        /// Two of delta, phi_x, alpha_mod
        #[arg(long, default_value = "delta,phi_x")]
        axes: String,
        /// Samples per axis (>= 8)
        #[arg(long)]
        res: Option<usize>,
        /// Output format: csv, json or svg
        #[arg(long)]
        format: Option<String>,
        /// Output path (default grid.<ext>)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn resolved(cli: &Cli) -> Result<Resolved, CliError> {
    let (res, dim, seed, points, format) = match &cli.command {
        Command::Figure { res, format, .. } => (*res, None, None, None, format.clone()),
        Command::Verify { dim, points, seed, .. } => (None, *dim, *seed, *points, None),
        Command::Stokes { format, .. } => (None, None, None, None, format.clone()),
        Command::Grid { res, format, .. } => (*res, None, None, None, format.clone()),
    };
    commands::resolve_options(&Flags {
        config: cli.config.clone(),
        res,
        dim,
        seed,
        points,
        format,
    })
}

fn run(cli: Cli) -> Result<String, CliError> {
    let opts = resolved(&cli)?;
    match &cli.command {
        Command::Figure { id, out, .. } => {
            let path = commands::cmd_figure(id, &opts, out.clone())?;
            Ok(format!("wrote {}", path.display()))
        }
        Command::Verify { out, .. } => {
            let (path, _) = commands::cmd_verify(&opts, out.clone())?;
            Ok(format!("verify: all checks passed, report at {}", path.display()))
        }
        Command::Stokes { beta, gamma, sweep, out, .. } => {
            let path = commands::cmd_stokes(beta, gamma, sweep, &opts, out.clone())?;
            Ok(format!("wrote {}", path.display()))
        }
        Command::Grid { params, axes, out, .. } => {
            let path = commands::cmd_grid(params, axes, &opts, out.clone())?;
            Ok(format!("wrote {}", path.display()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(message) => {
            println!("{message}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
