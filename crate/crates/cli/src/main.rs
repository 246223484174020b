mod args;
mod commands;
mod output;

use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::Parser;

use args::{Cli, Command};

fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.workers {
        if n == 0 {
            bail!("--workers must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match &cli.command {
        Command::Extract(c) => commands::extract(c),
        Command::Corrmap(c) => commands::corrmap(c),
        Command::Synth(c) => commands::synth(c, cli.seed),
        Command::Train(c) => commands::train_cmd(c, cli.seed),
        Command::Eval(c) => commands::eval_cmd(c, cli.seed),
        Command::Sweep(c) => commands::sweep(c, cli.seed),
        Command::Selftest => commands::selftest_cmd(cli.seed),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
