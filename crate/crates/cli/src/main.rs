use clap::Parser;

fn main() {
    let cli = eqshare_cli::Cli::parse();
    if let Err(e) = eqshare_cli::run(&cli) {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
