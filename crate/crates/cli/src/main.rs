use clap::Parser;

use bnet_cli::commands::{exit_code, run, Command};

/// Discrete belief-network inference: exact bucket elimination and
/// mini-bucket bounds for MPE, belief updating and MAP.
#[derive(Parser)]
#[command(name = "bnet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn main() {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(output) => {
            if !output.is_empty() {
                println!("{output}");
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(exit_code(&err));
        }
    }
}
