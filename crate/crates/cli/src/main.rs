fn main() {
    std::process::exit(foch_cli::run_cli(std::env::args_os()));
}
