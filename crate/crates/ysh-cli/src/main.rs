use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(ysh_cli::run(std::env::args_os()))
}
