use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(nds::cli::run(std::env::args_os()))
}
