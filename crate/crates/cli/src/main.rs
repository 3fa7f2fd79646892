use std::process::ExitCode;

use clap::Parser;
use rbfbvp_cli::{output::emit, run, Cli, CliError};

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let artifact = match run(cli) {
        Ok(a) => a,
        Err(e) => return fail(&e),
    };
    if let Err(e) = emit(artifact.out.as_deref(), &artifact.bytes) {
        return fail(&e);
    }
    match artifact.failure {
        Some(e) => fail(&e),
        None => ExitCode::SUCCESS,
    }
}
