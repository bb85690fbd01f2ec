use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use starcurl_cli::error::{EXIT_CONFIG, EXIT_OK};
use starcurl_cli::{execute, init_threads, Overrides};

/// Quaternionic div-curl, Beltrami and Vekua solvers on voxelized
/// star-shaped domains.
#[derive(Parser)]
#[command(name = "starcurl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve div w = g0, curl w = g (free, Neumann or Dirichlet variant).
    Divcurl(RunArgs),
    /// Beltrami field by Neumann series in the right inverse of curl.
    Beltrami(RunArgs),
    /// Solve (D - alpha) w = g or (D + M^alpha) w = g.
    Vekua(RunArgs),
    /// Static Maxwell system in an inhomogeneous medium.
    Maxwell(RunArgs),
    /// Check module invariants on the configured domain.
    Verify(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides [output] dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed (overrides [scenario] seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Grid resolution (overrides [grid] n).
    #[arg(long = "grid-n")]
    grid_n: Option<usize>,
}

fn exit(code: i32) -> ExitCode {
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return exit(if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK });
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return exit(EXIT_CONFIG);
    }
    let (kind, args) = match cli.command {
        Command::Divcurl(a) => ("divcurl", a),
        Command::Beltrami(a) => ("beltrami", a),
        Command::Vekua(a) => ("vekua", a),
        Command::Maxwell(a) => ("maxwell", a),
        Command::Verify(a) => ("verify", a),
    };
    let overrides = Overrides {
        out: args.out,
        seed: args.seed,
        grid_n: args.grid_n,
    };
    match execute(kind, &args.config, &overrides) {
        Ok(outcome) => {
            let code = outcome.exit_code();
            if code != EXIT_OK {
                eprintln!("error: one or more asserted checks failed");
            }
            exit(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit(e.exit_code())
        }
    }
}
