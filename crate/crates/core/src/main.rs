use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use choquet_core::cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (text, code) = execute(&cli);
    if code >= 2 {
        eprint!("{text}");
    } else {
        let _ = std::io::stdout().write_all(text.as_bytes());
    }
    ExitCode::from(code as u8)
}
