use std::io::Write;
use std::process::ExitCode;

use ghminer::cli;
use tracing_subscriber::EnvFilter;

fn main() -> ExitCode {
    let config = match cli::parse_args(std::env::args_os().skip(1)) {
        Ok(c) => c,
        Err(e) => {
            if e.exit_code == cli::EXIT_OK {
                print!("{}", e.message);
            } else {
                eprintln!("{e}");
            }
            return ExitCode::from(e.exit_code as u8);
        }
    };

    let default = if config.verbose { "ghminer=debug" } else { "ghminer=error" };
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new(default)))
        .with_writer(std::io::stderr)
        .with_target(false)
        .init();

    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = cli::run(
        &config,
        &|name| std::env::var(name).ok(),
        &mut stdout.lock(),
        &mut stderr.lock(),
    );
    let _ = std::io::stdout().flush();
    ExitCode::from(code as u8)
}
