use std::io::IsTerminal;

use reqlint_cli::{run, Style};

fn main() {
    let style = Style::detect(std::env::var("REQLINT_COLOR").ok().as_deref(), std::io::stdout().is_terminal());
    let code = run(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock(), style);
    std::process::exit(code);
}
