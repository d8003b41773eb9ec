use clap::Parser;

use randsub::cli::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = randsub::run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
