use std::io::Write as _;
use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, out, err) = shiftlab::cli::run(std::env::args_os());
    if !out.is_empty() {
        print!("{out}");
        std::io::stdout().flush().ok();
    }
    if !err.is_empty() {
        eprint!("{err}");
    }
    ExitCode::from(code)
}
