//! `memwalk`: batch front end. Exit status 0 on success, 1 when a
//! verification row fails or a replay differs, 2 on usage and other errors.

/// `println!` that ignores a closed stdout (e.g. piped into `head`).
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{out_dir, Cli, Command};
use commands::{replay, Outcome, Run};

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let dir = out_dir(cli.out_dir.as_deref());
    if let Command::Replay(r) = &cli.command {
        return replay(&r.manifest, &dir);
    }
    let run = Run::resolve(&cli.command, cli.config.as_deref())?;
    Ok(run.execute(&dir)?.0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
