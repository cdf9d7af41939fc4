use clap::Parser;
use metrobound_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    let level = if cli.quiet { "warn" } else { "warn,metrobound_cli=info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    std::process::exit(metrobound_cli::main_with(cli));
}
