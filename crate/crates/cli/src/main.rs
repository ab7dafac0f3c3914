use clap::Parser;
use log::LevelFilter;

use bidisk_cli::Cli;

fn init_logging() {
    let level = match std::env::var("BIDISK_LOG").as_deref() {
        Ok("quiet") => LevelFilter::Off,
        Ok("info") => LevelFilter::Info,
        Ok("debug") => LevelFilter::Debug,
        _ => LevelFilter::Warn,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .target(env_logger::Target::Stderr)
        .init();
}

fn main() {
    init_logging();
    let cli = Cli::parse();
    std::process::exit(bidisk_cli::execute(&cli));
}
