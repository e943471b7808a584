use std::process::ExitCode;

fn main() -> ExitCode {
    itinera_service::cli::main_with(std::env::args_os())
}
