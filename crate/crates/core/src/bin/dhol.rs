fn main() {
    std::process::exit(dhol::cli::run_cli(std::env::args_os()));
}
