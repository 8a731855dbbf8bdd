use clap::Parser;
use detbias_cli::{exit_code, run, Cli, RunConfig};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = RunConfig::resolve(&cli.flags).and_then(|cfg| run(cli.command, &cfg));
    match &result {
        Ok(o) if o.partial => {
            log::warn!("finished with failures; see gaps.csv and detect_failures.csv")
        }
        Ok(_) => {}
        Err(e) => log::error!("{e}"),
    }
    std::process::exit(exit_code(&result));
}
