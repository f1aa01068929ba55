use std::process::ExitCode;

fn main() -> ExitCode {
    sis_stream::cli::main_with_args(std::env::args_os())
}
