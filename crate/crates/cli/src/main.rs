mod args;
mod commands;
mod emit;
mod failure;
mod settings;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use failure::{Failure, Outcome};
use settings::{parse_config, Layers, RunConfig};

fn resolve(cli: &Cli) -> Outcome<RunConfig> {
    let common = cli.command.common();
    let file = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => Default::default(),
    };
    let cli_layer = cli
        .command
        .pairs()
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
        .collect();
    RunConfig::resolve(
        cli.command.name(),
        &Layers {
            file,
            cli: cli_layer,
        },
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let outcome = resolve(&cli).and_then(|rc| {
        if let Some(n) = rc.jobs {
            sawtooth_core::exec::set_worker_count(n);
        }
        commands::run(&rc)
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("sawtooth: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
