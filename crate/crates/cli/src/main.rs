use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = svf_cli::Cli::parse();
    if let Err(e) = svf_cli::execute(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(svf_cli::exit_code(&e));
    }
}
