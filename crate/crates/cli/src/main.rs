use clap::Parser;
use sgkink_cli::commands::Cli;

fn main() {
    let cli = Cli::parse();
    let out = sgkink_cli::run(&cli);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    std::process::exit(out.code);
}
