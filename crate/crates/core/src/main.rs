use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qheis::cli;
use qheis::par::Execution;
use qheis::verify::VerifyInputs;

/// q-deformed Heisenberg-picture dynamics.
#[derive(Parser)]
#[command(name = "qheis", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its CSV to $QHEIS_OUT_DIR (default: .).
    Run { config: PathBuf },
    /// Run a scenario for each q in a comma-separated list.
    Sweep {
        config: PathBuf,
        #[arg(long = "q", value_name = "LIST")]
        q: String,
        /// Evaluate sweep points one at a time.
        #[arg(long)]
        sequential: bool,
    },
    /// Run the invariant suite and golden identities.
    Verify,
    /// Print the golden identities and the bracket-convention table.
    VerifyIdentities,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let out_dir = cli::output_dir();
    let mut stderr = io::stderr();
    let status = match args.command {
        Command::Run { config } => cli::cmd_run(&config, &out_dir, &mut stderr),
        Command::Sweep { config, q, sequential } => {
            let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
            cli::cmd_sweep(&config, &q, &out_dir, exec, &mut stderr)
        }
        Command::Verify => cli::cmd_verify(&VerifyInputs::default(), &mut io::stdout()),
        Command::VerifyIdentities => cli::cmd_verify_identities(&VerifyInputs::default(), &mut io::stdout()),
    };
    ExitCode::from(status.code() as u8)
}
