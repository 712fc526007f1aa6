use clap::Parser;
use jetsym_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let (out, status) = run(&cli);
    if !out.is_empty() {
        println!("{out}");
    }
    std::process::exit(status);
}
