use std::io;
use std::process::exit;

fn main() {
    let status = sps_core::cli::run(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    exit(status.code());
}
