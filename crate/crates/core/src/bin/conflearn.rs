use clap::Parser;

fn main() {
    let args = conflearn::cli::Args::parse();
    std::process::exit(conflearn::cli::run(&args));
}
