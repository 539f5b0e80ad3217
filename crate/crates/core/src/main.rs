fn main() {
    std::process::exit(weightcheck::cli::run(std::env::args_os()));
}
