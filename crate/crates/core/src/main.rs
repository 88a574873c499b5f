fn main() {
    std::process::exit(diagmetric::cli::run(std::env::args_os()));
}
