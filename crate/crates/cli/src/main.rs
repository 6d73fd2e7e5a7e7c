use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(corners_lab_cli::run(std::env::args_os()))
}
