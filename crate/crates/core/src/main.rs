use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(mosob::cli::run(std::env::args_os()))
}
