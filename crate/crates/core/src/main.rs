fn main() {
    std::process::exit(patternlab::cli::run_cli(std::env::args_os()));
}
