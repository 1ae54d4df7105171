use clap::Parser;

fn main() {
    std::process::exit(ffhecke::cli::run(ffhecke::cli::Cli::parse()));
}
