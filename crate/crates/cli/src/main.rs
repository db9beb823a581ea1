use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ple_cli::{load_config, resolve_threads, run, CliError, RunOptions};

/// Run one configured computation and write its artifacts.
#[derive(Debug, Parser)]
#[command(name = "ple", version, about)]
struct Args {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `out` in the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed (overrides `seed` in the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (overrides the PLE_THREADS environment variable).
    #[arg(long)]
    threads: Option<usize>,
    /// Suppress warnings and the summary on stderr.
    #[arg(long)]
    quiet: bool,
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if e.use_stderr() => {
            let err = CliError::Config(e.to_string());
            return fail(&err);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let threads = match resolve_threads(args.threads) {
        Ok(n) => n,
        Err(e) => return fail(&e),
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        return fail(&CliError::Io(e.to_string()));
    }
    let cfg = match load_config(&args.config) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let opts = RunOptions { out: args.out, seed: args.seed, quiet: args.quiet };
    match run(&cfg, &opts) {
        Ok(s) => {
            if !args.quiet {
                eprintln!("wrote {} files to {}", s.files.len(), s.out.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}
