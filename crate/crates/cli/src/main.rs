use clap::Parser;

use gravirrev_cli::cli::Cli;

fn main() {
    let args = match Cli::try_parse() {
        Ok(args) => args,
        // Usage errors exit 2; --help and --version exit 0.
        Err(e) => e.exit(),
    };
    if let Err(e) = gravirrev_cli::init_thread_pool() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
    if let Err(e) = gravirrev_cli::run(args) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
