use clap::Parser;

fn main() {
    let cli = epmd::cli::Cli::parse();
    if let Err(e) = epmd::cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
