use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod output;

use args::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // --help and --version also arrive here
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(k) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: could not configure {k} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
