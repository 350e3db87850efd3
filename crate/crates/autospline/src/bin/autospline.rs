use std::process::ExitCode;

fn main() -> ExitCode {
    let mut out = std::io::stdout().lock();
    ExitCode::from(autospline::cli::run(std::env::args_os(), &mut out) as u8)
}
