mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_FINDING: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "descent-forge", version, about = "Search, reduce and descend on quartic Diophantine equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exhaustive search for solutions of one equation or resolvent
    Search {
        #[arg(long)]
        target: String,
        /// Defaults to 100 for quartics, 60 for resolvents
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long)]
        include_trivial: bool,
        /// Keep (x, y) pairs with a common factor
        #[arg(long)]
        no_coprime: bool,
        /// Add elapsed_ms and partitions to JSON output
        #[arg(long)]
        timings: bool,
    },
    /// Map a quartic solution (x,y,z) of E2 or E4 to its resolvent
    Reduce {
        #[arg(long)]
        target: String,
        /// Comma-separated integers
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        tuple: Vec<String>,
    },
    /// Lift a resolvent solution (X,Y,X',Y') back to E2 or E4
    Lift {
        #[arg(long)]
        target: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        tuple: Vec<String>,
    },
    /// Run the descent chain on a solution of R1
    Descend {
        #[arg(long, default_value = "R1")]
        target: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        tuple: Vec<String>,
    },
    /// Residue obstruction for a resolvent; without --modulus reports 2, 3 and the lower bound
    Residues {
        #[arg(long, default_value = "R1")]
        target: String,
        #[arg(long)]
        modulus: Option<u64>,
    },
    /// Search every catalog equation and resolvent
    VerifyTable {
        #[arg(long, default_value_t = 100)]
        bound: u64,
        /// Defaults to min(bound, 60)
        #[arg(long)]
        resolvent_bound: Option<u64>,
        #[arg(long)]
        timings: bool,
    },
    /// List catalog equations and resolvents
    Catalog,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

fn threads_from_env() -> Result<usize, String> {
    match std::env::var("DESCENT_FORGE_THREADS") {
        Err(_) => Ok(1),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(format!("DESCENT_FORGE_THREADS must be a positive integer, got {raw:?}")),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if code == EXIT_OK {
                print!("{e}");
            } else {
                eprint!("{e}");
            }
            return ExitCode::from(code);
        }
    };
    let threads = match threads_from_env() {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let out = commands::run(&cli, threads);
    for line in &out.diagnostics {
        eprintln!("{line}");
    }
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(out.document.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(EXIT_INTERNAL);
    }
    ExitCode::from(out.exit)
}
