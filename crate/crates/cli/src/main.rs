use std::io::{self, BufWriter};
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let mut err = io::stderr();
    let exit = matbeta_cli::run(std::env::args_os(), &mut out, &mut err);
    ExitCode::from(exit.code())
}
