use clap::Parser;

fn main() {
    let cli = wdcalc::cli::Cli::parse();
    let (code, out) = wdcalc::cli::run(cli);
    print!("{out}");
    std::process::exit(code);
}
