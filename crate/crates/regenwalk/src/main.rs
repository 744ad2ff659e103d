use std::process::ExitCode;

use clap::Parser;

use regenwalk::args::{Cli, Command};
use regenwalk::commands::{
    cmd_analyze, cmd_calibrate, cmd_enumerate, cmd_oracle, cmd_sample, with_pool,
};
use regenwalk::CliResult;

fn run(cli: Cli) -> CliResult<Vec<String>> {
    let (args, check) = match &cli.command {
        Command::Enumerate(a) | Command::Calibrate(a) | Command::Sample(a) | Command::Oracle(a) => {
            (a, false)
        }
        Command::Analyze { config, check } => (config, *check),
    };
    let config = args.resolve()?;
    for w in config.validate()? {
        eprintln!("warning: {w}");
    }
    with_pool(&config, || match cli.command {
        Command::Enumerate(_) => cmd_enumerate(&config),
        Command::Calibrate(_) => cmd_calibrate(&config),
        Command::Sample(_) => cmd_sample(&config),
        Command::Analyze { .. } => cmd_analyze(&config, check),
        Command::Oracle(_) => cmd_oracle(&config),
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(files) => {
            for f in files {
                println!("wrote {f}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
