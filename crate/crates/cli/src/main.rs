use std::process::ExitCode;

use clap::Parser;
use lintree_cli::{exit_code, run, Cli};

fn emit(cli: &Cli, body: &str) -> std::io::Result<()> {
    match &cli.out {
        Some(p) => std::fs::write(p, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(out) => match emit(&cli, &out.render(cli.format)) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Err(f) => {
            if let Some(p) = &f.partial {
                let _ = emit(&cli, &p.render(cli.format));
            }
            eprintln!("error: {}", f.error);
            ExitCode::from(exit_code(&f.error) as u8)
        }
    }
}
