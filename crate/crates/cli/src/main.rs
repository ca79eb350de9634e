mod args;
mod cmd;
mod error;
mod output;
mod plot;
mod states;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use error::{CliError, CliResult};

fn threads() -> CliResult<Option<usize>> {
    match std::env::var("MERGELAB_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Input(format!("MERGELAB_THREADS={v:?} is not a positive integer"))),
        },
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Entropy(c) => cmd::entropy::run(c),
        Command::Region(c) => cmd::region::run(c),
        Command::Simulate(c) => cmd::simulate::run(c),
        Command::Split(c) => cmd::split::run(c),
        Command::Embezzle(c) => cmd::embezzle::run(c),
        Command::Selftest(a) => cmd::selftest::run(a),
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads()? {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(3),
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mergelab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
