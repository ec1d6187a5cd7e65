use std::io::IsTerminal;
use std::process::ExitCode;

use compos_cli::{color_enabled, run, Style};

fn main() -> ExitCode {
    let env = std::env::var("COMPOS_COLOR").ok();
    let style = Style {
        color: color_enabled(env.as_deref(), std::io::stderr().is_terminal()),
    };
    let out = run(std::env::args_os(), style);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    ExitCode::from(out.code as u8)
}
