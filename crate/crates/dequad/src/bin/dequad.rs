use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(dequad::cli::run(std::env::args()) as u8)
}
