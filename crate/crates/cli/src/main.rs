use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(acorbfn::cli::run(std::env::args_os()))
}
