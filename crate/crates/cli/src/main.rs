use clap::Parser;

use rising_sun_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("rsd: error: {e}");
        std::process::exit(e.exit_code());
    }
}
