use clap::Parser;
use fastkde_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(failure) = run(cli) {
        eprintln!("fastkde: {failure}");
        std::process::exit(failure.exit_code());
    }
}
